#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sitealloc {

/// Raised for malformed inputs and violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Planar coordinate in kilometres (projected plane).
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

struct StratumAxis {
  std::string name;
  std::vector<std::string> levels;

  friend bool operator==(const StratumAxis&, const StratumAxis&) = default;
};

/// A demand unit. `stratum_counts` is flattened over the full cross product of
/// the region's stratum axes (row-major, last axis fastest).
struct Area {
  std::string id;
  Point centroid;
  std::int64_t population = 0;
  std::vector<std::int64_t> stratum_counts;

  friend bool operator==(const Area&, const Area&) = default;
};

/// Equirectangular projection origin used when the region came from lon/lat.
struct ProjectionOrigin {
  double lon0 = 0.0;
  double lat0 = 0.0;

  friend bool operator==(const ProjectionOrigin&, const ProjectionOrigin&) = default;
};

struct Region {
  std::vector<Area> areas;
  std::vector<StratumAxis> stratum_axes;
  std::optional<ProjectionOrigin> origin;

  std::size_t size() const { return areas.size(); }
  /// Number of cells in the stratum cross product (0 when no axes).
  std::size_t combination_count() const;
  /// Human-readable label for flattened combination `c`, e.g. "black|female".
  std::string combination_label(std::size_t c) const;
  std::int64_t total_population() const;

  friend bool operator==(const Region&, const Region&) = default;
};

struct CandidateSite {
  std::string id;
  Point location;
  double capacity = 1120.0;
  int site_type = 1;

  friend bool operator==(const CandidateSite&, const CandidateSite&) = default;
};

/// Selected site indices (0-based into the candidate list) plus the budget k.
struct Allocation {
  std::vector<std::size_t> selected;
  std::size_t budget = 0;

  /// Sorted, duplicate-free copy of `selected`.
  std::vector<std::size_t> canonical() const;
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct Weights {
  double lambda1 = 1e-2;
  double lambda2 = 0.0;
  double lambda3 = 1.0;

  /// Messages for weights outside [1e-8, 1e6]. Out-of-range weights are allowed.
  std::vector<std::string> range_warnings() const;
  friend bool operator==(const Weights&, const Weights&) = default;
};

struct ScoreTriple {
  std::int64_t coverage = 0;
  /// Minimax regret; empty when not computed (lambda2 == 0). May be +inf.
  std::optional<double> d_optimality;
  double equity = 0.0;
};

struct Violation {
  std::string area_id;
  std::string reason;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

/// Lists every invariant violation of `region`. When `require_strata` is set,
/// a region without stratum axes is reported as a violation.
ValidationReport validate_region(const Region& region, bool require_strata = false);

std::vector<std::string> validate_sites(const std::vector<CandidateSite>& sites);

}  // namespace sitealloc
