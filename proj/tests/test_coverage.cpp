#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "sitealloc/coverage.hpp"
#include "support.hpp"

using namespace sitealloc;
using testing::make_region;
using testing::site;

namespace {

std::vector<std::uint8_t> row_of(const CoverageMatrix& a, std::size_t r) {
  auto span = a.row(r);
  return {span.begin(), span.end()};
}

struct RandomCase {
  Region region;
  std::vector<CandidateSite> sites;
};

RandomCase random_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> m_dist(1, 25);
  std::uniform_int_distribution<int> n_dist(1, 8);
  std::uniform_real_distribution<double> coord(0.0, 20.0);
  std::uniform_int_distribution<std::int64_t> pop(0, 5000);
  std::uniform_real_distribution<double> cap(50.0, 3000.0);
  RandomCase c;
  const int m = m_dist(rng);
  for (int j = 0; j < m; ++j) {
    const auto p = (rng() % 10 == 0) ? 0 : pop(rng);
    c.region.areas.push_back({"a" + std::to_string(100 + j), {coord(rng), coord(rng)}, p, {}});
  }
  const int n = n_dist(rng);
  for (int i = 0; i < n; ++i) c.sites.push_back(site("s" + std::to_string(i), coord(rng), coord(rng), cap(rng)));
  return c;
}

}  // namespace

TEST_CASE("capacity prefix hand trace") {
  const Region region = make_region({{"a", 1, 0, 50}, {"b", 2, 0, 60}, {"c", 3, 0, 70}});
  const std::vector<CandidateSite> sites = {site("s", 0, 0, 120)};
  const auto a = build_coverage_matrix(region, sites, 1.0);
  CHECK(row_of(a, 0) == std::vector<std::uint8_t>{1, 1, 0});
  CHECK(a.tp[0] == doctest::Approx(120.0));
}

TEST_CASE("weekly capacity of 1120 covers exactly 10% of 11200 people") {
  const std::vector<CandidateSite> sites = {site("s", 0, 0, 1120)};
  const auto covered = build_coverage_matrix(make_region({{"a", 0, 0, 11200}}), sites, 0.10);
  CHECK(covered.at(0, 0));
  CHECK(covered.tp[0] == doctest::Approx(11200.0));
  const auto uncovered = build_coverage_matrix(make_region({{"a", 0, 0, 11201}}), sites, 0.10);
  CHECK_FALSE(uncovered.at(0, 0));
}

TEST_CASE("capacity beyond total demand covers every area") {
  const Region region = make_region({{"a", 1, 0, 50}, {"b", 5, 5, 60}, {"c", -3, 2, 70}});
  const std::vector<CandidateSite> sites = {site("s", 0, 0, 1e9)};
  const auto a = build_coverage_matrix(region, sites, 1.0);
  CHECK(a.row_count(0) == 3);
}

TEST_CASE("zero-population areas inside the prefix are covered, beyond it are not") {
  const Region region =
      make_region({{"a", 1, 0, 100}, {"b", 2, 0, 0}, {"c", 3, 0, 100}, {"d", 4, 0, 0}});
  const std::vector<CandidateSite> sites = {site("s", 0, 0, 150)};
  const auto a = build_coverage_matrix(region, sites, 1.0);
  CHECK(row_of(a, 0) == std::vector<std::uint8_t>{1, 1, 0, 0});
}

TEST_CASE("distance ties resolve by area id") {
  // "b" and "a" are equidistant; "a" is charged first.
  const Region region = make_region({{"b", -1, 0, 60}, {"a", 1, 0, 60}});
  const std::vector<CandidateSite> sites = {site("s", 0, 0, 100)};
  const auto a = build_coverage_matrix(region, sites, 1.0);
  CHECK(row_of(a, 0) == std::vector<std::uint8_t>{0, 1});
}

TEST_CASE("coverage matrix errors") {
  const std::vector<CandidateSite> sites = {site("s", 0, 0, 100)};
  CHECK_THROWS_WITH_AS(build_coverage_matrix(Region{}, sites, 0.1), "no areas", InputError);
  const Region region = make_region({{"a", 0, 0, 10}});
  CHECK_THROWS_WITH_AS(build_coverage_matrix(region, sites, 0.0), "invalid fraction", InputError);
  CHECK_THROWS_WITH_AS(build_coverage_matrix(region, sites, -0.5), "invalid fraction", InputError);
  const std::vector<CandidateSite> mixed = {site("s", 0, 0, 100, 1), site("t", 0, 0, 100, 2)};
  CHECK_THROWS_AS(build_coverage_matrix(region, mixed, 0.1), InputError);
}

TEST_CASE("covered indicators take the union over sites and types") {
  const Region region = make_region({{"A", 0, 0, 10}, {"B", 1, 0, 10}, {"C", 2, 0, 10}});
  const std::vector<CandidateSite> sites = {site("s0", 0, 0, 20, 1), site("s1", 2, 0, 20, 2)};
  const auto stack = build_coverage_stack(region, sites, 1.0);
  REQUIRE(stack.matrices.size() == 2);
  CHECK(row_of(stack.matrices[0], 0) == std::vector<std::uint8_t>{1, 1, 0});
  CHECK(row_of(stack.matrices[1], 0) == std::vector<std::uint8_t>{0, 1, 1});

  const std::vector<std::size_t> none;
  CHECK(covered_indicators(stack, none) == std::vector<std::uint8_t>{0, 0, 0});
  const std::vector<std::size_t> both = {0, 1};
  const auto e = covered_indicators(stack, both);
  CHECK(e == std::vector<std::uint8_t>{1, 1, 1});
  CHECK(e[1] == 1);  // covered twice, still binary

  const std::vector<std::size_t> bad = {2};
  CHECK_THROWS_AS(covered_indicators(stack, bad), std::out_of_range);
}

TEST_CASE("coverage score sums the indicators") {
  CHECK(coverage_score(std::vector<std::uint8_t>{0, 0, 0}) == 0);
  CHECK(coverage_score(std::vector<std::uint8_t>(7, 1)) == 7);
  CHECK(coverage_score(std::vector<std::uint8_t>{1, 0, 1, 1}) == 3);
}

TEST_CASE("prefix, capacity and monotonicity hold on random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_case(rng);
    const double p = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const auto a = build_coverage_matrix(c.region, c.sites, p);
    const auto serial = build_coverage_matrix_serial(c.region, c.sites, p);
    CHECK(a.cells == serial.cells);

    for (std::size_t i = 0; i < c.sites.size(); ++i) {
      const auto order = areas_by_distance(c.region, c.sites[i].location);
      // Prefix: once an area is uncovered, every farther area is uncovered.
      bool open = true;
      double demand = 0.0;
      for (std::size_t j : order) {
        if (!a.at(i, j)) open = false;
        CHECK((a.at(i, j) ? open : true));
        if (a.at(i, j)) demand += p * static_cast<double>(c.region.areas[j].population);
      }
      CHECK(demand <= c.sites[i].capacity * (1 + 1e-12));
      // Maximality: the first uncovered area would overflow.
      for (std::size_t j : order) {
        if (a.at(i, j)) continue;
        CHECK(demand + p * static_cast<double>(c.region.areas[j].population) > c.sites[i].capacity);
        break;
      }
      // Raising the fraction never adds areas.
      const auto tighter = build_coverage_matrix(c.region, std::span(&c.sites[i], 1), std::min(1.0, p * 1.5));
      for (std::size_t j = 0; j < c.region.size(); ++j) CHECK((tighter.at(0, j) ? a.at(i, j) : true));
    }

    // Monotone in the selected set.
    const auto stack = build_coverage_stack(c.region, c.sites, p);
    std::vector<std::size_t> all(c.sites.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<std::size_t> subset;
    auto previous = covered_indicators(stack, subset);
    for (auto i : all) {
      subset.push_back(i);
      const auto e = covered_indicators(stack, subset);
      for (std::size_t j = 0; j < e.size(); ++j) CHECK(e[j] >= previous[j]);
      CHECK(coverage_score(e) >= coverage_score(previous));
      previous = e;
    }
  }
}
