#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sitealloc/domain.hpp"
#include "sitealloc/ingest.hpp"

namespace sitealloc::testing {

struct AreaRow {
  std::string id;
  double x;
  double y;
  std::int64_t population;
};

/// Region with one two-level axis; `share_a` is the fraction of each area in level A.
inline Region make_region(const std::vector<AreaRow>& rows, const std::vector<double>& share_a = {}) {
  Region r;
  r.stratum_axes = {{"group", {"A", "B"}}};
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& row = rows[j];
    const double s = share_a.empty() ? 0.5 : share_a[j];
    const auto a = static_cast<std::int64_t>(static_cast<double>(row.population) * s);
    r.areas.push_back({row.id, {row.x, row.y}, row.population, {a, row.population - a}});
  }
  return r;
}

inline CandidateSite site(const std::string& id, double x, double y, double capacity, int type = 1) {
  return {id, {x, y}, capacity, type};
}

/// Random small synthetic instance (region + candidate sites).
inline SynthRegion random_synth(std::uint64_t seed, std::size_t rows, std::size_t cols, std::size_t sites,
                                double segregation = 0.5) {
  SynthParams p;
  p.rows = rows;
  p.cols = cols;
  p.site_count = sites;
  p.segregation = segregation;
  p.seed = seed;
  return synth_region(p);
}

}  // namespace sitealloc::testing
