#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sitealloc/domain.hpp"

namespace sitealloc {

/// Binary coverage matrix for the sites of one type. Row r belongs to the
/// candidate site `site_indices[r]`; column j is area j of the region.
///
/// A site's row marks the shortest distance-ordered prefix of areas whose
/// cumulative demand w_j * p * P_j fits within the site's weekly capacity.
/// Equivalently, each site can cover a total population of capacity / p.
struct CoverageMatrix {
  int site_type = 1;
  double target_fraction = 1.0;
  std::size_t area_count = 0;
  std::vector<std::size_t> site_indices;
  std::vector<double> capacity;
  std::vector<double> tp;
  std::vector<double> area_weights;
  std::vector<std::uint8_t> cells;

  std::size_t rows() const { return site_indices.size(); }
  bool at(std::size_t row, std::size_t area) const { return cells[row * area_count + area] != 0; }
  std::span<const std::uint8_t> row(std::size_t r) const {
    return {cells.data() + r * area_count, area_count};
  }
  std::int64_t row_count(std::size_t r) const;
};

/// One coverage matrix per site type, all over the same areas.
struct CoverageStack {
  std::vector<CoverageMatrix> matrices;
  std::size_t area_count = 0;
  std::size_t site_count = 0;

  struct Slot {
    std::size_t matrix = 0;
    std::size_t row = 0;
  };
  /// Candidate index -> position of its row in `matrices`.
  std::vector<Slot> locator;
};

/// Areas sorted by distance from `from`, ties broken by area id ascending.
std::vector<std::size_t> areas_by_distance(const Region& region, const Point& from);

/// OpenMP build, parallel over sites. `sites` must share one site type;
/// `site_indices` (optional) tags each row with its candidate index, and
/// `area_weights` defaults to 1.0 for every area.
CoverageMatrix build_coverage_matrix(const Region& region, std::span<const CandidateSite> sites,
                                     double target_fraction,
                                     std::span<const std::size_t> site_indices = {},
                                     std::span<const double> area_weights = {});

/// Single-threaded reference build; must agree with build_coverage_matrix exactly.
CoverageMatrix build_coverage_matrix_serial(const Region& region,
                                            std::span<const CandidateSite> sites,
                                            double target_fraction,
                                            std::span<const std::size_t> site_indices = {},
                                            std::span<const double> area_weights = {});

/// Groups candidates by site type (ascending) and builds one matrix per type.
CoverageStack build_coverage_stack(const Region& region, std::span<const CandidateSite> sites,
                                   double target_fraction,
                                   std::span<const double> area_weights = {});

/// e_j = 1 iff some selected site of any type covers area j.
std::vector<std::uint8_t> covered_indicators(const CoverageStack& stack,
                                             std::span<const std::size_t> selected);
inline std::vector<std::uint8_t> covered_indicators(const CoverageStack& stack,
                                                    const Allocation& allocation) {
  return covered_indicators(stack, allocation.selected);
}

std::int64_t coverage_score(std::span<const std::uint8_t> e);

}  // namespace sitealloc
