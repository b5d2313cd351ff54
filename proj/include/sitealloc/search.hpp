#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sitealloc {

/// Value of a sorted, duplicate-free k-subset of {0..n-1}. Larger is better.
/// Must be safe to call concurrently.
using SubsetFitness = std::function<double(std::span<const std::size_t>)>;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// The `rank`-th k-subset of {0..n-1} in lexicographic order.
std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k, std::uint64_t rank);

/// Advances `c` to the next k-subset in lexicographic order; false after the last.
bool next_combination(std::vector<std::size_t>& c, std::size_t n);

struct EnumerationResult {
  std::vector<std::size_t> best;
  double best_value = 0.0;
  std::uint64_t evaluated = 0;
};

/// Maximizes `fitness` over every k-subset. Ties resolve to the
/// lexicographically smallest subset. OpenMP-parallel over chunks of ranks.
EnumerationResult enumerate_best(std::size_t n, std::size_t k, const SubsetFitness& fitness);

/// Serial reference for enumerate_best.
EnumerationResult enumerate_best_serial(std::size_t n, std::size_t k, const SubsetFitness& fitness);

struct GaParams {
  std::size_t population_size = 60;
  std::size_t generations = 200;
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;
  std::size_t elitism = 2;
  std::uint64_t seed = 0;

  /// Throws InputError when the parameters are inconsistent.
  void validate() const;
};

struct GaProgress {
  std::size_t generation = 0;
  double best_value = 0.0;
};

struct GaRun {
  std::vector<std::size_t> best;  // sorted
  double best_value = 0.0;
  /// Best-so-far value after each generation, starting with generation 0.
  std::vector<double> history;
  std::uint64_t evaluations = 0;
  bool interrupted = false;
};

struct GaHooks {
  std::function<void(const GaProgress&)> on_generation;
  const std::atomic<bool>* cancel = nullptr;
  /// Evaluate fresh individuals of a generation in parallel.
  bool parallel = true;
};

/// Genetic search over k-subsets of {0..n-1}.
///
/// Chromosomes are k gene slots holding site indices. Duplicate genes are
/// repaired by scanning upward (wrapping) to the nearest unused index, so every
/// individual is a feasible k-subset. Tournament selection of size 3, uniform
/// crossover over slots, per-slot uniform resampling as mutation, and elitism.
/// Fitness is cached per canonical subset. The random stream is consumed on the
/// calling thread only, so runs are reproducible for a given seed regardless
/// of thread count.
GaRun ga_maximize(std::size_t n, std::size_t k, const GaParams& params,
                  const SubsetFitness& fitness, const GaHooks& hooks = {});

/// Exposed for tests.
void repair_chromosome(std::vector<std::size_t>& genes, std::size_t n);

}  // namespace sitealloc
