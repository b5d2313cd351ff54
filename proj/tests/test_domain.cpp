#include <random>

#include "doctest.h"
#include "sitealloc/domain.hpp"
#include "support.hpp"

using namespace sitealloc;

namespace {

Region one_area() {
  Region r;
  r.stratum_axes = {{"group", {"A", "B"}}};
  r.areas = {{"a1", {0, 0}, 100, {60, 40}}};
  return r;
}

bool has_reason(const ValidationReport& report, const std::string& reason) {
  for (const auto& v : report)
    if (v.reason == reason) return true;
  return false;
}

}  // namespace

TEST_CASE("valid single-area region has an empty report") { CHECK(validate_region(one_area()).empty()); }

TEST_CASE("stratum sum mismatch is reported") {
  Region r = one_area();
  r.areas[0].stratum_counts = {50, 40};
  const auto report = validate_region(r);
  REQUIRE(report.size() == 1);
  CHECK(report[0].reason == "stratum sum mismatch");
  CHECK(report[0].area_id == "a1");
}

TEST_CASE("duplicate ids are reported once") {
  Region r = one_area();
  r.areas.push_back(r.areas[0]);
  const auto report = validate_region(r);
  REQUIRE(report.size() == 1);
  CHECK(report[0].reason == "duplicate id");
}

TEST_CASE("empty region and missing strata") {
  CHECK(has_reason(validate_region(Region{}), "no areas"));
  Region r;
  r.areas = {{"a", {0, 0}, 10, {}}};
  CHECK(validate_region(r).empty());
  CHECK(has_reason(validate_region(r, true), "no stratum axes"));
}

TEST_CASE("combination labels follow row-major flattening") {
  Region r;
  r.stratum_axes = {{"race", {"w", "b", "h"}}, {"sex", {"f", "m"}}};
  CHECK(r.combination_count() == 6);
  CHECK(r.combination_label(0) == "w|f");
  CHECK(r.combination_label(1) == "w|m");
  CHECK(r.combination_label(5) == "h|m");
}

TEST_CASE("weight range warnings") {
  CHECK(Weights{1e-2, 1.0, 1.0}.range_warnings().empty());
  CHECK(Weights{1e-9, 1.0, 1e7}.range_warnings().size() == 2);
}

TEST_CASE("validation is idempotent and detects random violating mutations") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Region r = testing::random_synth(rng(), 3, 4, 4).region;
    REQUIRE(validate_region(r).empty());
    const std::size_t j = rng() % r.size();
    std::string expected;
    switch (rng() % 4) {
      case 0:
        r.areas[j].stratum_counts[rng() % 2] += 1 + static_cast<std::int64_t>(rng() % 5);
        expected = "stratum sum mismatch";
        break;
      case 1:
        r.areas[j].id = r.areas[(j + 1) % r.size()].id;
        expected = "duplicate id";
        break;
      case 2:
        r.areas[j].population = -1;
        expected = "negative population";
        break;
      default:
        r.areas[j].stratum_counts[0] = -r.areas[j].stratum_counts[0] - 1;
        expected = "negative stratum count";
        break;
    }
    const auto first = validate_region(r);
    CHECK(has_reason(first, expected));
    CHECK(first == validate_region(r));
  }
}
