#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sitealloc/domain.hpp"

namespace sitealloc {

struct StratumEquity {
  std::size_t combination = 0;
  std::string label;
  std::int64_t population = 0;
  double conditional = 0.0;
  double squared_deviation = 0.0;
  /// False for empty strata, which are skipped in the total.
  bool counted = true;
};

struct EquityBreakdown {
  double marginal = 0.0;
  std::vector<StratumEquity> per_stratum;
  double total = 0.0;
};

/// Share of the region's population living in covered areas.
double marginal_coverage(const Region& region, std::span<const std::uint8_t> e);

/// Sum over stratum combinations of (P(covered | stratum) - P(covered))^2.
/// Strata with zero total population contribute nothing.
EquityBreakdown equity_score(const Region& region, std::span<const std::uint8_t> e);

}  // namespace sitealloc
