#include "sitealloc/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace sitealloc {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::size_t Region::combination_count() const {
  if (stratum_axes.empty()) return 0;
  std::size_t c = 1;
  for (const auto& axis : stratum_axes) c *= axis.levels.size();
  return c;
}

std::string Region::combination_label(std::size_t c) const {
  std::vector<std::string> parts(stratum_axes.size());
  for (std::size_t a = stratum_axes.size(); a-- > 0;) {
    const auto& levels = stratum_axes[a].levels;
    parts[a] = levels[c % levels.size()];
    c /= levels.size();
  }
  std::string out;
  for (std::size_t a = 0; a < parts.size(); ++a) {
    if (a) out += '|';
    out += parts[a];
  }
  return out;
}

std::int64_t Region::total_population() const {
  return std::accumulate(areas.begin(), areas.end(), std::int64_t{0},
                         [](std::int64_t s, const Area& a) { return s + a.population; });
}

std::vector<std::size_t> Allocation::canonical() const {
  std::vector<std::size_t> out = selected;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> Weights::range_warnings() const {
  std::vector<std::string> out;
  auto check = [&](const char* name, double v) {
    if (v < 1e-8 || v > 1e6)
      out.push_back(std::string(name) + " = " + std::to_string(v) + " is outside [1e-8, 1e6]");
  };
  check("lambda1", lambda1);
  check("lambda2", lambda2);
  check("lambda3", lambda3);
  return out;
}

ValidationReport validate_region(const Region& region, bool require_strata) {
  ValidationReport report;
  if (region.areas.empty()) report.push_back({"", "no areas"});
  if (require_strata && region.stratum_axes.empty()) report.push_back({"", "no stratum axes"});
  for (const auto& axis : region.stratum_axes) {
    if (axis.levels.empty()) report.push_back({"", "stratum axis '" + axis.name + "' has no levels"});
  }
  const std::size_t combos = region.combination_count();

  std::unordered_set<std::string> seen;
  for (const auto& area : region.areas) {
    if (!seen.insert(area.id).second) report.push_back({area.id, "duplicate id"});
    if (area.population < 0) report.push_back({area.id, "negative population"});
    if (!std::isfinite(area.centroid.x) || !std::isfinite(area.centroid.y))
      report.push_back({area.id, "non-finite centroid"});
    if (region.stratum_axes.empty()) {
      if (!area.stratum_counts.empty()) report.push_back({area.id, "stratum counts without axes"});
      continue;
    }
    if (area.stratum_counts.size() != combos) {
      report.push_back({area.id, "stratum count size mismatch"});
      continue;
    }
    std::int64_t sum = 0;
    bool negative = false;
    for (auto c : area.stratum_counts) {
      negative = negative || c < 0;
      sum += c;
    }
    if (negative) report.push_back({area.id, "negative stratum count"});
    if (sum != area.population) report.push_back({area.id, "stratum sum mismatch"});
  }
  return report;
}

std::vector<std::string> validate_sites(const std::vector<CandidateSite>& sites) {
  std::vector<std::string> problems;
  std::unordered_set<std::string> seen;
  for (const auto& s : sites) {
    if (!seen.insert(s.id).second) problems.push_back(s.id + ": duplicate id");
    if (!(s.capacity > 0.0)) problems.push_back(s.id + ": capacity must be positive");
    if (s.site_type < 1) problems.push_back(s.id + ": site type must be >= 1");
  }
  return problems;
}

}  // namespace sitealloc
