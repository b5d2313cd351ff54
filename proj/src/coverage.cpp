#include "sitealloc/coverage.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sitealloc {
namespace {

// Relative slack on the capacity comparison so that e.g. 0.1 * 11200 is not
// rejected against 1120 because of binary rounding of the fraction.
constexpr double kCapacitySlack = 1e-12;

CoverageMatrix prepare(const Region& region, std::span<const CandidateSite> sites,
                       double target_fraction, std::span<const std::size_t> site_indices,
                       std::span<const double> area_weights) {
  if (region.areas.empty()) throw InputError("no areas");
  if (!(target_fraction > 0.0) || target_fraction > 1.0) throw InputError("invalid fraction");
  if (sites.empty()) throw InputError("no sites");
  if (!site_indices.empty() && site_indices.size() != sites.size())
    throw InputError("site index list does not match site list");
  if (!area_weights.empty() && area_weights.size() != region.size())
    throw InputError("area weight list does not match area count");
  const int type = sites.front().site_type;
  for (const auto& s : sites) {
    if (s.site_type != type) throw InputError("mixed site types in one coverage matrix");
    if (!(s.capacity > 0.0)) throw InputError("site '" + s.id + "' has nonpositive capacity");
  }

  CoverageMatrix a;
  a.site_type = type;
  a.target_fraction = target_fraction;
  a.area_count = region.size();
  a.site_indices.resize(sites.size());
  if (site_indices.empty())
    std::iota(a.site_indices.begin(), a.site_indices.end(), std::size_t{0});
  else
    std::copy(site_indices.begin(), site_indices.end(), a.site_indices.begin());
  a.capacity.reserve(sites.size());
  a.tp.reserve(sites.size());
  for (const auto& s : sites) {
    a.capacity.push_back(s.capacity);
    a.tp.push_back(s.capacity / target_fraction);
  }
  if (area_weights.empty())
    a.area_weights.assign(region.size(), 1.0);
  else
    a.area_weights.assign(area_weights.begin(), area_weights.end());
  a.cells.assign(sites.size() * region.size(), 0);
  return a;
}

void fill_row(const Region& region, const CandidateSite& site, CoverageMatrix& a, std::size_t r) {
  const auto order = areas_by_distance(region, site.location);
  double weighted_population = 0.0;
  const double limit = site.capacity * (1.0 + kCapacitySlack);
  std::uint8_t* row = a.cells.data() + r * a.area_count;
  for (std::size_t j : order) {
    weighted_population += a.area_weights[j] * static_cast<double>(region.areas[j].population);
    if (a.target_fraction * weighted_population > limit) break;
    row[j] = 1;
  }
}

}  // namespace

std::int64_t CoverageMatrix::row_count(std::size_t r) const {
  auto cells_row = row(r);
  return std::count(cells_row.begin(), cells_row.end(), std::uint8_t{1});
}

std::vector<std::size_t> areas_by_distance(const Region& region, const Point& from) {
  std::vector<double> d(region.size());
  for (std::size_t j = 0; j < region.size(); ++j) d[j] = distance(from, region.areas[j].centroid);
  std::vector<std::size_t> order(region.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    if (d[l] != d[r]) return d[l] < d[r];
    return region.areas[l].id < region.areas[r].id;
  });
  return order;
}

CoverageMatrix build_coverage_matrix(const Region& region, std::span<const CandidateSite> sites,
                                     double target_fraction,
                                     std::span<const std::size_t> site_indices,
                                     std::span<const double> area_weights) {
  CoverageMatrix a = prepare(region, sites, target_fraction, site_indices, area_weights);
  const auto n = static_cast<std::ptrdiff_t>(sites.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t r = 0; r < n; ++r) fill_row(region, sites[r], a, static_cast<std::size_t>(r));
  return a;
}

CoverageMatrix build_coverage_matrix_serial(const Region& region,
                                            std::span<const CandidateSite> sites,
                                            double target_fraction,
                                            std::span<const std::size_t> site_indices,
                                            std::span<const double> area_weights) {
  CoverageMatrix a = prepare(region, sites, target_fraction, site_indices, area_weights);
  for (std::size_t r = 0; r < sites.size(); ++r) fill_row(region, sites[r], a, r);
  return a;
}

CoverageStack build_coverage_stack(const Region& region, std::span<const CandidateSite> sites,
                                   double target_fraction, std::span<const double> area_weights) {
  if (region.areas.empty()) throw InputError("no areas");
  CoverageStack stack;
  stack.area_count = region.size();
  stack.site_count = sites.size();
  stack.locator.resize(sites.size());

  std::map<int, std::vector<std::size_t>> by_type;
  for (std::size_t i = 0; i < sites.size(); ++i) by_type[sites[i].site_type].push_back(i);

  for (const auto& [type, indices] : by_type) {
    std::vector<CandidateSite> group;
    group.reserve(indices.size());
    for (auto i : indices) group.push_back(sites[i]);
    const std::size_t m = stack.matrices.size();
    stack.matrices.push_back(
        build_coverage_matrix(region, group, target_fraction, indices, area_weights));
    for (std::size_t r = 0; r < indices.size(); ++r) stack.locator[indices[r]] = {m, r};
  }
  return stack;
}

std::vector<std::uint8_t> covered_indicators(const CoverageStack& stack,
                                             std::span<const std::size_t> selected) {
  std::vector<std::uint8_t> e(stack.area_count, 0);
  for (std::size_t i : selected) {
    if (i >= stack.site_count)
      throw std::out_of_range("site index " + std::to_string(i) + " out of range");
    const auto slot = stack.locator[i];
    const auto row = stack.matrices[slot.matrix].row(slot.row);
    for (std::size_t j = 0; j < e.size(); ++j) e[j] |= row[j];
  }
  return e;
}

std::int64_t coverage_score(std::span<const std::uint8_t> e) {
  std::int64_t total = 0;
  for (auto v : e) total += v;
  return total;
}

}  // namespace sitealloc
