#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "sitealloc/objective.hpp"
#include "support.hpp"

using namespace sitealloc;
using testing::make_region;
using testing::site;

namespace {

ProblemInstance small_instance(Weights w, std::size_t k, BudgetMode mode = BudgetMode::exact) {
  const Region r = make_region({{"a", 0, 0, 1000}, {"b", 1, 0, 1000}, {"c", 2, 0, 1000}, {"d", 3, 0, 1000}},
                               {0.9, 0.5, 0.5, 0.1});
  std::vector<CandidateSite> sites = {site("s0", 0, 0, 150), site("s1", 1, 0, 150), site("s2", 2, 0, 150),
                                      site("s3", 3, 0, 150), site("s4", 1.5, 0, 250)};
  return ProblemInstance::build(r, sites, w, k, 0.1, {}, mode);
}

}  // namespace

TEST_CASE("combined objective arithmetic") {
  ScoreTriple s;
  s.coverage = 46;
  s.equity = 0.153;
  CHECK(combine({1e-2, 0.0, 1.0}, s) == doctest::Approx(0.307).epsilon(1e-12));
  s.d_optimality = 5.0;
  CHECK(combine({1e-2, 0.0, 1.0}, s) == doctest::Approx(0.307).epsilon(1e-12));
  CHECK(combine({1e-2, 0.1, 1.0}, s) == doctest::Approx(-0.193).epsilon(1e-12));
}

TEST_CASE("zero weights give a zero objective") {
  const auto inst = small_instance({0, 0, 0}, 2);
  const std::vector<std::size_t> sel = {0, 3};
  CHECK(evaluate(inst, sel).combined == 0.0);
}

TEST_CASE("allocation covering nothing scores zero") {
  const Region r = make_region({{"a", 0, 0, 100000}, {"b", 1, 0, 100000}}, {1.0, 0.0});
  const auto inst = ProblemInstance::build(r, {site("s", 0, 0, 1), site("t", 1, 0, 1)}, {1, 0, 1}, 1, 0.1);
  const std::vector<std::size_t> sel = {1};
  const auto ev = evaluate(inst, sel);
  CHECK(ev.scores.coverage == 0);
  CHECK(ev.scores.equity == 0.0);
  CHECK(ev.combined == 0.0);
  CHECK_FALSE(ev.scores.d_optimality.has_value());
}

TEST_CASE("feasibility") {
  const auto inst = small_instance({1, 0, 1}, 3);
  CHECK(is_feasible(inst, std::vector<std::size_t>{1, 2, 3}));
  CHECK_FALSE(is_feasible(inst, std::vector<std::size_t>{1, 2}));
  CHECK_FALSE(is_feasible(inst, std::vector<std::size_t>{1, 1, 2}));
  CHECK_FALSE(is_feasible(inst, std::vector<std::size_t>{1, 2, 9}));
  CHECK_THROWS_WITH_AS(evaluate(inst, std::vector<std::size_t>{1, 2}), "budget violation", InputError);

  const auto loose = small_instance({1, 0, 1}, 3, BudgetMode::at_most);
  CHECK(is_feasible(loose, std::vector<std::size_t>{1, 2}));
  CHECK(is_feasible(loose, std::vector<std::size_t>{}));
  CHECK_FALSE(is_feasible(loose, std::vector<std::size_t>{0, 1, 2, 3}));
  const auto ev = evaluate(loose, std::vector<std::size_t>{});
  CHECK(ev.combined == 0.0);
}

TEST_CASE("instance construction errors") {
  const Region r = make_region({{"a", 0, 0, 100}});
  CHECK_THROWS_AS(ProblemInstance::build(r, {site("s", 0, 0, 10)}, {1, 0, 1}, 2, 0.1), InputError);
  CHECK_THROWS_WITH_AS(ProblemInstance::build(r, {site("s", 0, 0, 10)}, {1, 1, 1}, 1, 0.1), "grid required",
                       InputError);
  CHECK_THROWS_AS(ProblemInstance::build(r, {site("s", 0, 0, 10)}, {1, 0, 1}, 1, 1.5), InputError);
  CHECK_THROWS_AS(ProblemInstance::build(r, {site("s", 0, 0, 10), site("s", 1, 0, 10)}, {1, 0, 1}, 1, 0.1),
                  InputError);
}

TEST_CASE("evaluation with a design term uses the regret against cached local optima") {
  auto synth = testing::random_synth(5, 3, 4, 7);
  const auto grid = default_theta_grid(synth.region);
  const auto inst = ProblemInstance::build(synth.region, synth.sites, {1e-2, 0.5, 1}, 3, 0.1, grid);
  const std::vector<std::size_t> sel = {0, 2, 5};
  CHECK_THROWS_AS(evaluate(inst, sel), InputError);
  LocalDesignCache cache(grid, {LocalSearch::Mode::exhaustive});
  cache.warm(inst.sites, 3);
  const auto ev = evaluate(inst, sel, &cache);
  REQUIRE(ev.scores.d_optimality.has_value());
  const double f2 = minimax_score(inst.sites, sel, grid, cache.at(3));
  CHECK(*ev.scores.d_optimality == f2);
  CHECK(ev.combined == doctest::Approx(1e-2 * ev.scores.coverage - 0.5 * f2 - ev.scores.equity));
}

TEST_CASE("evaluation properties on random instances") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    auto synth = testing::random_synth(rng(), 3, 4, 8, 0.7);
    const std::size_t k = 1 + rng() % 4;
    const auto inst = ProblemInstance::build(synth.region, synth.sites, {1e-2, 0, 1}, k, 0.1);
    std::vector<std::size_t> all(inst.candidate_count());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    const std::vector<std::size_t> sel(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    const auto a = evaluate(inst, sel);
    const auto b = evaluate(inst, sel);
    CHECK(a.combined == b.combined);
    CHECK(a.covered == b.covered);
    CHECK(coverage_constraints_hold(inst.stack, sel, a.covered));

    // Linear in each score with the sign of its weight.
    ScoreTriple s = a.scores;
    s.coverage += 1;
    CHECK(combine(inst.weights, s) > a.combined);
    s = a.scores;
    s.equity += 0.01;
    CHECK(combine(inst.weights, s) < a.combined);
    s = a.scores;
    s.d_optimality = 1.0;
    const Weights with_design{1e-2, 0.3, 1};
    const double base = combine(with_design, s);
    s.d_optimality = 2.0;
    CHECK(combine(with_design, s) < base);
  }
}
