#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sitealloc/coverage.hpp"
#include "sitealloc/domain.hpp"
#include "sitealloc/gp_design.hpp"

namespace sitealloc {

enum class BudgetMode { exact, at_most };

std::string to_string(BudgetMode mode);
BudgetMode parse_budget_mode(const std::string& name);

struct ProblemInstance {
  Region region;
  std::vector<CandidateSite> sites;
  CoverageStack stack;
  ThetaGrid grid;
  Weights weights;
  std::size_t budget = 0;
  double target_fraction = 0.1;
  BudgetMode budget_mode = BudgetMode::exact;

  /// Validates inputs and builds the coverage stack.
  static ProblemInstance build(Region region, std::vector<CandidateSite> sites, Weights weights,
                               std::size_t budget, double target_fraction, ThetaGrid grid = {},
                               BudgetMode mode = BudgetMode::exact);

  std::size_t candidate_count() const { return sites.size(); }
  bool needs_design_score() const { return weights.lambda2 != 0.0; }
};

struct Evaluation {
  ScoreTriple scores;
  double combined = 0.0;
  std::vector<std::uint8_t> covered;
};

/// Exactly k distinct valid indices (or at most k under BudgetMode::at_most).
bool is_feasible(const ProblemInstance& instance, std::span<const std::size_t> selected);
inline bool is_feasible(const ProblemInstance& instance, const Allocation& allocation) {
  return is_feasible(instance, allocation.selected);
}

/// Sum_t Sum_i a_ij z_i - e_j >= 0 for every area.
bool coverage_constraints_hold(const CoverageStack& stack, std::span<const std::size_t> selected,
                               std::span<const std::uint8_t> e);

/// lambda1 f1 - lambda2 f2 - lambda3 f3. The design term is skipped (and left
/// unset in the scores) when lambda2 == 0; otherwise `locals` must hold the
/// local optima for the allocation's size.
Evaluation evaluate(const ProblemInstance& instance, std::span<const std::size_t> selected,
                    const LocalDesignCache* locals = nullptr);
inline Evaluation evaluate(const ProblemInstance& instance, const Allocation& allocation,
                           const LocalDesignCache* locals = nullptr) {
  return evaluate(instance, allocation.selected, locals);
}

double combine(const Weights& weights, const ScoreTriple& scores);

}  // namespace sitealloc
