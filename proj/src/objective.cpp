#include "sitealloc/objective.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include "sitealloc/equity.hpp"

namespace sitealloc {

std::string to_string(BudgetMode mode) { return mode == BudgetMode::exact ? "exact" : "at_most"; }

BudgetMode parse_budget_mode(const std::string& name) {
  if (name == "exact") return BudgetMode::exact;
  if (name == "at_most" || name == "at-most") return BudgetMode::at_most;
  throw InputError("unknown budget mode '" + name + "'");
}

ProblemInstance ProblemInstance::build(Region region, std::vector<CandidateSite> sites,
                                       Weights weights, std::size_t budget, double target_fraction,
                                       ThetaGrid grid, BudgetMode mode) {
  if (auto report = validate_region(region); !report.empty()) {
    std::string msg = "invalid region:";
    for (const auto& v : report) msg += " [" + v.area_id + ": " + v.reason + "]";
    throw InputError(msg);
  }
  if (auto problems = validate_sites(sites); !problems.empty())
    throw InputError("invalid sites: " + problems.front());
  if (budget > sites.size()) throw InputError("budget k exceeds candidate count");
  if (weights.lambda1 < 0 || weights.lambda2 < 0 || weights.lambda3 < 0)
    throw InputError("weights must be nonnegative");
  if (weights.lambda2 != 0.0 && grid.points.empty()) throw InputError("grid required");

  ProblemInstance p;
  p.stack = sites.empty() ? CoverageStack{{}, region.size(), 0, {}}
                          : build_coverage_stack(region, sites, target_fraction);
  if (sites.empty() && !(target_fraction > 0.0 && target_fraction <= 1.0))
    throw InputError("invalid fraction");
  p.region = std::move(region);
  p.sites = std::move(sites);
  p.grid = std::move(grid);
  p.weights = weights;
  p.budget = budget;
  p.target_fraction = target_fraction;
  p.budget_mode = mode;
  return p;
}

bool is_feasible(const ProblemInstance& instance, std::span<const std::size_t> selected) {
  const std::size_t n = instance.sites.size();
  std::vector<bool> seen(n, false);
  for (auto i : selected) {
    if (i >= n || seen[i]) return false;
    seen[i] = true;
  }
  if (instance.budget_mode == BudgetMode::exact) return selected.size() == instance.budget;
  return selected.size() <= instance.budget;
}

bool coverage_constraints_hold(const CoverageStack& stack, std::span<const std::size_t> selected,
                               std::span<const std::uint8_t> e) {
  std::vector<int> reach(stack.area_count, 0);
  for (auto i : selected) {
    const auto slot = stack.locator.at(i);
    const auto row = stack.matrices[slot.matrix].row(slot.row);
    for (std::size_t j = 0; j < reach.size(); ++j) reach[j] += row[j];
  }
  for (std::size_t j = 0; j < reach.size(); ++j)
    if (reach[j] - e[j] < 0) return false;
  return true;
}

double combine(const Weights& weights, const ScoreTriple& scores) {
  double value = weights.lambda1 * static_cast<double>(scores.coverage);
  if (weights.lambda2 != 0.0 && scores.d_optimality) value -= weights.lambda2 * *scores.d_optimality;
  if (weights.lambda3 != 0.0) value -= weights.lambda3 * scores.equity;
  return value;
}

Evaluation evaluate(const ProblemInstance& instance, std::span<const std::size_t> selected,
                    const LocalDesignCache* locals) {
  if (!is_feasible(instance, selected)) throw InputError("budget violation");

  Evaluation out;
  out.covered = covered_indicators(instance.stack, selected);
  assert(coverage_constraints_hold(instance.stack, selected, out.covered));
  out.scores.coverage = coverage_score(out.covered);

  if (instance.needs_design_score() && selected.empty()) {
    out.scores.d_optimality = std::numeric_limits<double>::infinity();
  } else if (instance.needs_design_score()) {
    if (locals == nullptr || !locals->contains(selected.size()))
      throw InputError("local optimal designs not computed for k = " + std::to_string(selected.size()));
    out.scores.d_optimality =
        minimax_score(instance.sites, selected, locals->grid(), locals->at(selected.size()));
  }

  if (instance.region.combination_count() > 0) {
    out.scores.equity = equity_score(instance.region, out.covered).total;
  } else if (instance.weights.lambda3 != 0.0) {
    throw InputError("equity requires stratum axes");
  }

  out.combined = combine(instance.weights, out.scores);
  return out;
}

}  // namespace sitealloc
