#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sitealloc/domain.hpp"
#include "sitealloc/gp_design.hpp"
#include "sitealloc/ingest.hpp"
#include "sitealloc/objective.hpp"
#include "sitealloc/search.hpp"

namespace sitealloc {

/// Usage or configuration problem (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Importance { less, somewhat, important, very };

/// Accepts "less", "Less Important", "somewhat_important", "very", ...
Importance parse_importance(const std::string& text);
std::string to_string(Importance level);
/// 1e-6, 1e-4, 1e-2, 1 for Less .. Very Important.
double coverage_weight(Importance level);
/// 1e-4, 1e-2, 1, 1e2 for Less .. Very Important.
double equity_weight(Importance level);

/// Flat key/value document. Keys are normalized to dash form ("target-fraction").
using KeyValues = std::map<std::string, std::string>;

std::string normalize_key(std::string key);
/// `key = value` lines; `#` comments; values may be double-quoted.
KeyValues parse_config_text(const std::string& text, const std::string& name = "config");
KeyValues load_config_file(const std::filesystem::path& path);

/// Every key RunConfig understands, with a one-line description.
const std::vector<std::pair<std::string, std::string>>& config_keys();

struct RunConfig {
  std::optional<std::filesystem::path> areas;
  std::optional<std::filesystem::path> strata;
  std::optional<std::filesystem::path> sites;
  OwnershipFilter ownership = OwnershipFilter::all;
  std::optional<SynthParams> synth;

  Weights weights;
  std::optional<Importance> coverage_importance;
  std::optional<Importance> equity_importance;
  bool strict_weights = false;

  std::optional<std::size_t> k;
  BudgetMode budget_mode = BudgetMode::exact;
  double target_fraction = 0.1;

  KernelFamily kernel = KernelFamily::exponential;
  /// Path to a `sigma2,phi,tau2` grid file, or "default" for the built-in grid.
  std::optional<std::string> grid;
  LocalSearch::Mode local_search = LocalSearch::Mode::automatic;

  GaParams ga;
  int threads = 0;
  bool exact = false;
  std::optional<std::filesystem::path> out;

  /// Throws ConfigError on unknown keys or malformed values. With
  /// `require_source`, the data files (or synth settings) must be present.
  static RunConfig from_values(const KeyValues& values, bool require_source = true);
};

/// Reads a `sigma2,phi,tau2[,kernel]` grid file.
ThetaGrid load_theta_grid(const std::filesystem::path& path, KernelFamily family);

}  // namespace sitealloc
