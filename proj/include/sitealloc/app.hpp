#pragma once

// Shared front-end core: scenario loading and JSON report building used by
// both the command-line tool and the HTTP service, so that the two produce
// identical numbers for identical inputs.

#include <atomic>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sitealloc/config.hpp"
#include "sitealloc/objective.hpp"
#include "sitealloc/solver.hpp"

namespace sitealloc {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

/// Unknown or duplicate site ids in a requested allocation.
class AllocationError : public InputError {
 public:
  using InputError::InputError;
};

struct Scenario {
  RunConfig config;
  Region region;
  std::vector<CandidateSite> sites;
  std::vector<std::string> warnings;
};

/// Loads files (or synthesizes) per `config`. Throws InputError/ConfigError.
Scenario load_scenario(const RunConfig& config);
Scenario make_scenario(const RunConfig& config, Region region, std::vector<CandidateSite> sites);

ThetaGrid resolve_grid(const RunConfig& config, const Region& region);
ProblemInstance make_instance(const Scenario& scenario, std::size_t k);

Allocation resolve_allocation(const Scenario& scenario, const std::vector<std::string>& site_ids);
/// Site ids separated by newlines or commas; `#` starts a comment.
std::vector<std::string> read_allocation_file(const std::filesystem::path& path);

/// Finite doubles as numbers, non-finite as "inf" / "-inf" / "nan".
Json number_json(double v);
Json config_json(const RunConfig& config);
Json scores_json(const ScoreTriple& scores);

Json score_report(const Scenario& scenario, const std::vector<std::string>& site_ids);

struct OptimizeControl {
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(const GaProgress&)> on_generation;
};

Json optimize_report(const Scenario& scenario, const OptimizeControl& control = {});

Json compare_report(const Scenario& scenario,
                    const std::vector<std::pair<std::string, std::vector<std::string>>>& schemes,
                    bool with_optimized = false);
/// Fixed-width rendering of a compare report.
std::string render_compare_table(const Json& report);

/// Copy of `report` without volatile fields (timestamps).
Json strip_volatile(Json report);

/// Entry point of the `sitealloc` tool. Exit codes: 0 ok, 2 usage/config, 3 solve failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sitealloc
