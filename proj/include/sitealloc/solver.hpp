#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sitealloc/objective.hpp"
#include "sitealloc/search.hpp"

namespace sitealloc {

struct SolveReport {
  Allocation best;
  ScoreTriple best_scores;
  double combined = 0.0;
  std::vector<double> history;
  std::uint64_t evaluations = 0;
  bool interrupted = false;
  std::string method;
};

struct SolveOptions {
  /// Search used to find the local optimal designs behind the regret term.
  LocalSearch local_search;
  std::function<void(const GaProgress&)> on_generation;
  const std::atomic<bool>* cancel = nullptr;
  bool parallel = true;
};

/// Largest C(n, k) exhaustive_solve accepts.
inline constexpr std::uint64_t kOracleLimit = 1000000;

/// Builds (or extends) the local-design cache for every design size the
/// instance's budget mode allows. No-op when lambda2 == 0.
void warm_local_designs(const ProblemInstance& instance, LocalDesignCache& cache);
LocalDesignCache make_local_designs(const ProblemInstance& instance, const LocalSearch& search = {});

/// Enumerates every feasible allocation. Ties go to the lexicographically
/// smallest index set.
SolveReport exhaustive_solve(const ProblemInstance& instance, const LocalDesignCache* locals = nullptr,
                             const SolveOptions& options = {});

SolveReport ga_solve(const ProblemInstance& instance, const GaParams& params,
                     const LocalDesignCache* locals = nullptr, const SolveOptions& options = {});

struct SchemeRow {
  std::string name;
  Allocation allocation;
  bool feasible = false;
  std::optional<Evaluation> evaluation;
  std::string error;
};

/// Scores named allocations side by side. Infeasible rows are flagged, not fatal.
std::vector<SchemeRow> compare_schemes(const ProblemInstance& instance,
                                       const std::vector<std::pair<std::string, Allocation>>& schemes,
                                       LocalDesignCache* locals = nullptr);

}  // namespace sitealloc
