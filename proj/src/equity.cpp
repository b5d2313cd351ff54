#include "sitealloc/equity.hpp"

namespace sitealloc {
namespace {

void check_length(const Region& region, std::span<const std::uint8_t> e) {
  if (e.size() != region.size()) throw InputError("coverage vector length does not match area count");
}

}  // namespace

double marginal_coverage(const Region& region, std::span<const std::uint8_t> e) {
  check_length(region, e);
  std::int64_t covered = 0;
  std::int64_t total = 0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    total += region.areas[j].population;
    if (e[j]) covered += region.areas[j].population;
  }
  if (total <= 0) throw InputError("zero total population");
  return static_cast<double>(covered) / static_cast<double>(total);
}

EquityBreakdown equity_score(const Region& region, std::span<const std::uint8_t> e) {
  const std::size_t combos = region.combination_count();
  if (combos == 0) throw InputError("equity requires stratum axes");

  EquityBreakdown out;
  out.marginal = marginal_coverage(region, e);

  std::vector<std::int64_t> covered(combos, 0);
  std::vector<std::int64_t> total(combos, 0);
  for (std::size_t j = 0; j < region.size(); ++j) {
    const auto& counts = region.areas[j].stratum_counts;
    if (counts.size() != combos) throw InputError("area '" + region.areas[j].id + "' has malformed strata");
    for (std::size_t c = 0; c < combos; ++c) {
      total[c] += counts[c];
      if (e[j]) covered[c] += counts[c];
    }
  }

  out.per_stratum.reserve(combos);
  for (std::size_t c = 0; c < combos; ++c) {
    StratumEquity s;
    s.combination = c;
    s.label = region.combination_label(c);
    s.population = total[c];
    if (total[c] == 0) {
      s.counted = false;
    } else {
      s.conditional = static_cast<double>(covered[c]) / static_cast<double>(total[c]);
      const double gap = s.conditional - out.marginal;
      s.squared_deviation = gap * gap;
      out.total += s.squared_deviation;
    }
    out.per_stratum.push_back(std::move(s));
  }
  return out;
}

}  // namespace sitealloc
