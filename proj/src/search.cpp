#include "sitealloc/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "sitealloc/domain.hpp"

namespace sitealloc {
namespace {

constexpr std::size_t kTournamentSize = 3;
constexpr std::uint64_t kChunk = 2048;

struct Best {
  std::vector<std::size_t> subset;
  double value = -std::numeric_limits<double>::infinity();
  bool set = false;

  // Strictly better only; earlier (lexicographically smaller) subsets win ties.
  void offer(const std::vector<std::size_t>& c, double v) {
    if (!set || v > value) {
      subset = c;
      value = v;
      set = true;
    }
  }
};

Best scan_range(std::size_t n, std::size_t k, std::uint64_t first, std::uint64_t last,
                const SubsetFitness& fitness) {
  Best best;
  auto c = unrank_combination(n, k, first);
  for (std::uint64_t r = first; r < last; ++r) {
    best.offer(c, fitness(c));
    next_combination(c, n);
  }
  return best;
}

void check_subset_args(std::size_t n, std::size_t k) {
  if (k > n) throw InputError("budget k exceeds candidate count");
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step.
    const std::uint64_t factor = n - k + i;
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t r = result / g;
    const std::uint64_t d = i / g;
    const std::uint64_t f = factor / d;
    if (r > std::numeric_limits<std::uint64_t>::max() / f) return std::numeric_limits<std::uint64_t>::max();
    result = r * f;
  }
  return result;
}

std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k, std::uint64_t rank) {
  std::vector<std::size_t> c;
  c.reserve(k);
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (std::size_t v = next; v < n; ++v) {
      const std::uint64_t block = binomial(n - v - 1, k - slot - 1);
      if (rank < block) {
        c.push_back(v);
        next = v + 1;
        break;
      }
      rank -= block;
    }
  }
  return c;
}

bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

EnumerationResult enumerate_best_serial(std::size_t n, std::size_t k, const SubsetFitness& fitness) {
  check_subset_args(n, k);
  const std::uint64_t total = binomial(n, k);
  Best best = scan_range(n, k, 0, total, fitness);
  return {best.subset, best.value, total};
}

EnumerationResult enumerate_best(std::size_t n, std::size_t k, const SubsetFitness& fitness) {
  check_subset_args(n, k);
  const std::uint64_t total = binomial(n, k);
  const auto chunks = static_cast<std::ptrdiff_t>((total + kChunk - 1) / kChunk);
  std::vector<Best> partial(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t ch = 0; ch < chunks; ++ch) {
    const std::uint64_t first = static_cast<std::uint64_t>(ch) * kChunk;
    partial[static_cast<std::size_t>(ch)] =
        scan_range(n, k, first, std::min(total, first + kChunk), fitness);
  }
  Best best;
  for (const auto& p : partial)
    if (p.set) best.offer(p.subset, p.value);
  return {best.subset, best.value, total};
}

void GaParams::validate() const {
  if (population_size == 0) throw InputError("population_size must be positive");
  if (elitism >= population_size) throw InputError("elitism must be smaller than population_size");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw InputError("crossover_rate must lie in [0,1]");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw InputError("mutation_rate must lie in [0,1]");
}

void repair_chromosome(std::vector<std::size_t>& genes, std::size_t n) {
  std::vector<bool> used(n, false);
  for (auto& g : genes) {
    g %= n;
    while (used[g]) g = (g + 1) % n;
    used[g] = true;
  }
}

GaRun ga_maximize(std::size_t n, std::size_t k, const GaParams& params,
                  const SubsetFitness& fitness, const GaHooks& hooks) {
  check_subset_args(n, k);
  params.validate();

  GaRun run;
  std::map<std::vector<std::size_t>, double> cache;
  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick_site(0, n == 0 ? 0 : n - 1);
  std::uniform_int_distribution<std::size_t> pick_member(0, params.population_size - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  struct Individual {
    std::vector<std::size_t> genes;
    std::vector<std::size_t> key;
    double value = 0.0;
  };
  std::vector<Individual> population(params.population_size);

  auto evaluate = [&](std::vector<Individual>& pop) {
    std::vector<std::vector<std::size_t>> fresh;
    for (auto& ind : pop) {
      ind.key = ind.genes;
      std::sort(ind.key.begin(), ind.key.end());
      if (!cache.contains(ind.key) &&
          std::find(fresh.begin(), fresh.end(), ind.key) == fresh.end())
        fresh.push_back(ind.key);
    }
    std::vector<double> values(fresh.size());
    const auto count = static_cast<std::ptrdiff_t>(fresh.size());
#pragma omp parallel for schedule(dynamic, 1) if (hooks.parallel)
    for (std::ptrdiff_t i = 0; i < count; ++i)
      values[static_cast<std::size_t>(i)] = fitness(fresh[static_cast<std::size_t>(i)]);
    for (std::size_t i = 0; i < fresh.size(); ++i) cache.emplace(fresh[i], values[i]);
    run.evaluations += fresh.size();
    for (auto& ind : pop) ind.value = cache.at(ind.key);
  };

  bool have_best = false;
  auto record = [&](std::size_t generation) {
    for (const auto& ind : population) {
      if (!have_best || ind.value > run.best_value) {
        run.best = ind.key;
        run.best_value = ind.value;
        have_best = true;
      }
    }
    run.history.push_back(run.best_value);
    if (hooks.on_generation) hooks.on_generation({generation, run.best_value});
  };

  for (auto& ind : population) {
    ind.genes.resize(k);
    for (auto& g : ind.genes) g = pick_site(rng);
    if (k > 0) repair_chromosome(ind.genes, n);
  }
  evaluate(population);
  record(0);

  auto tournament = [&]() -> const Individual& {
    std::size_t winner = pick_member(rng);
    for (std::size_t t = 1; t < kTournamentSize; ++t) {
      const std::size_t challenger = pick_member(rng);
      if (population[challenger].value > population[winner].value) winner = challenger;
    }
    return population[winner];
  };

  for (std::size_t gen = 1; gen <= params.generations; ++gen) {
    if (hooks.cancel && hooks.cancel->load()) {
      run.interrupted = true;
      break;
    }
    std::stable_sort(population.begin(), population.end(),
                     [](const Individual& a, const Individual& b) { return a.value > b.value; });

    std::vector<Individual> next;
    next.reserve(params.population_size);
    for (std::size_t e = 0; e < params.elitism; ++e) next.push_back(population[e]);
    while (next.size() < params.population_size) {
      const Individual& mother = tournament();
      const Individual& father = tournament();
      Individual child;
      child.genes = mother.genes;
      if (unit(rng) < params.crossover_rate) {
        for (std::size_t s = 0; s < k; ++s)
          if (unit(rng) < 0.5) child.genes[s] = father.genes[s];
      }
      for (std::size_t s = 0; s < k; ++s)
        if (unit(rng) < params.mutation_rate) child.genes[s] = pick_site(rng);
      if (k > 0) repair_chromosome(child.genes, n);
      next.push_back(std::move(child));
    }
    population = std::move(next);
    evaluate(population);
    record(gen);
  }
  return run;
}

}  // namespace sitealloc
