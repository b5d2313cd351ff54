#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "sitealloc/domain.hpp"
#include "sitealloc/search.hpp"

using namespace sitealloc;

namespace {

// Deterministic pseudo-random value per subset, with many ties when `levels` is small.
SubsetFitness hashed_fitness(std::uint64_t salt, int levels) {
  return [salt, levels](std::span<const std::size_t> s) {
    std::uint64_t h = salt;
    for (auto i : s) h = (h ^ (i + 0x9e3779b97f4a7c15ULL)) * 0xbf58476d1ce4e5b9ULL;
    return static_cast<double>((h >> 17) % static_cast<std::uint64_t>(levels));
  };
}

}  // namespace

TEST_CASE("binomial coefficients") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(25, 6) == 177100);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(60, 30) == 118264581564861424ULL);
  CHECK(binomial(200, 100) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("unranking walks subsets in lexicographic order") {
  for (std::size_t n = 0; n <= 8; ++n)
    for (std::size_t k = 0; k <= n; ++k) {
      std::vector<std::size_t> c(k);
      std::iota(c.begin(), c.end(), std::size_t{0});
      std::uint64_t rank = 0;
      std::vector<std::size_t> previous;
      do {
        CHECK(unrank_combination(n, k, rank) == c);
        if (rank > 0) CHECK(std::lexicographical_compare(previous.begin(), previous.end(), c.begin(), c.end()));
        previous = c;
        ++rank;
      } while (next_combination(c, n));
      CHECK(rank == binomial(n, k));
    }
}

TEST_CASE("parallel enumeration agrees with the serial reference") {
  for (std::uint64_t salt = 0; salt < 20; ++salt) {
    const std::size_t n = 6 + salt % 10;
    const std::size_t k = 1 + salt % 4;
    const auto f = hashed_fitness(salt, 5);
    const auto par = enumerate_best(n, k, f);
    const auto ser = enumerate_best_serial(n, k, f);
    CHECK(par.best == ser.best);
    CHECK(par.best_value == ser.best_value);
    CHECK(par.evaluated == binomial(n, k));
  }
}

TEST_CASE("enumeration ties go to the lexicographically smallest subset") {
  const auto flat = [](std::span<const std::size_t>) { return 1.0; };
  CHECK(enumerate_best(7, 3, flat).best == std::vector<std::size_t>{0, 1, 2});
  CHECK(enumerate_best(7, 0, flat).best.empty());
  CHECK_THROWS_AS(enumerate_best(2, 3, flat), InputError);
}

TEST_CASE("repair always yields distinct in-range genes") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const std::size_t k = 1 + rng() % n;
    std::vector<std::size_t> genes(k);
    for (auto& g : genes) g = rng() % (2 * n);
    repair_chromosome(genes, n);
    const std::set<std::size_t> unique(genes.begin(), genes.end());
    CHECK(unique.size() == k);
    CHECK(*unique.rbegin() < n);
  }
  std::vector<std::size_t> wrap = {4, 4};
  repair_chromosome(wrap, 5);
  CHECK(wrap == std::vector<std::size_t>{4, 0});
}

TEST_CASE("ga parameters are validated") {
  const auto f = hashed_fitness(1, 10);
  GaParams p;
  p.elitism = p.population_size;
  CHECK_THROWS_AS(ga_maximize(10, 3, p, f), InputError);
  p = {};
  p.mutation_rate = 1.5;
  CHECK_THROWS_AS(ga_maximize(10, 3, p, f), InputError);
  CHECK_THROWS_AS(ga_maximize(2, 3, GaParams{}, f), InputError);
}

TEST_CASE("ga is deterministic per seed and independent of parallel evaluation") {
  const auto f = hashed_fitness(9, 1000);
  GaParams p;
  p.seed = 42;
  p.generations = 30;
  const auto a = ga_maximize(20, 4, p, f);
  const auto b = ga_maximize(20, 4, p, f);
  GaHooks serial;
  serial.parallel = false;
  const auto c = ga_maximize(20, 4, p, f, serial);
  CHECK(a.best == b.best);
  CHECK(a.history == b.history);
  CHECK(a.best == c.best);
  CHECK(a.history == c.history);
  CHECK(std::is_sorted(a.best.begin(), a.best.end()));
  CHECK(a.best_value == f(a.best));
}

TEST_CASE("elitism keeps the best-so-far history monotone") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GaParams p;
    p.seed = seed;
    p.generations = 25;
    p.population_size = 20;
    const auto run = ga_maximize(15, 3, p, hashed_fitness(seed, 1000));
    CHECK(run.history.size() == p.generations + 1);
    CHECK(std::is_sorted(run.history.begin(), run.history.end()));
    CHECK(run.history.back() == run.best_value);
  }
}

TEST_CASE("edge budgets") {
  const auto f = hashed_fitness(3, 100);
  GaParams p;
  p.generations = 5;
  const auto all = ga_maximize(6, 6, p, f);
  CHECK(all.best == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  p.generations = 0;
  const auto initial = ga_maximize(12, 3, p, f);
  CHECK(initial.history.size() == 1);
  CHECK(initial.best.size() == 3);
}

TEST_CASE("ga finds the optimum of small problems") {
  int matches = 0;
  for (std::uint64_t salt = 0; salt < 20; ++salt) {
    // Additive values with pairwise interactions.
    std::mt19937_64 rng(salt);
    std::normal_distribution<double> z;
    std::vector<double> unary(12);
    std::vector<std::vector<double>> pair(12, std::vector<double>(12));
    for (auto& u : unary) u = z(rng);
    for (auto& row : pair)
      for (auto& v : row) v = 0.5 * z(rng);
    const SubsetFitness f = [&](std::span<const std::size_t> s) {
      double v = 0.0;
      for (auto i : s) {
        v += unary[i];
        for (auto j : s)
          if (i < j) v += pair[i][j];
      }
      return v;
    };
    GaParams p;
    p.seed = salt;
    const auto ga = ga_maximize(12, 3, p, f);
    const auto oracle = enumerate_best(12, 3, f);
    CHECK(ga.best_value <= oracle.best_value);
    matches += ga.best_value == oracle.best_value;
  }
  CHECK(matches >= 19);
}

TEST_CASE("cancellation stops the run and reports progress") {
  std::atomic<bool> cancel{false};
  std::size_t seen = 0;
  GaHooks hooks;
  hooks.cancel = &cancel;
  hooks.on_generation = [&](const GaProgress& g) {
    seen = g.generation;
    if (g.generation == 3) cancel.store(true);
  };
  GaParams p;
  p.generations = 100;
  const auto run = ga_maximize(20, 4, p, hashed_fitness(2, 1000), hooks);
  CHECK(run.interrupted);
  CHECK(seen == 3);
  CHECK(run.best.size() == 4);
}
