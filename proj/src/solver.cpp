#include "sitealloc/solver.hpp"

#include <algorithm>
#include <limits>

namespace sitealloc {
namespace {

std::vector<std::size_t> design_sizes(const ProblemInstance& instance) {
  if (instance.budget_mode == BudgetMode::exact) return {instance.budget};
  std::vector<std::size_t> sizes(instance.budget + 1);
  for (std::size_t s = 0; s <= instance.budget; ++s) sizes[s] = s;
  return sizes;
}

SubsetFitness objective_fitness(const ProblemInstance& instance, const LocalDesignCache* locals) {
  return [&instance, locals](std::span<const std::size_t> subset) {
    return evaluate(instance, subset, locals).combined;
  };
}

void finish(SolveReport& report, const ProblemInstance& instance, const LocalDesignCache* locals) {
  const Evaluation eval = evaluate(instance, report.best.selected, locals);
  report.best.budget = instance.budget;
  report.best_scores = eval.scores;
  report.combined = eval.combined;
}

// Keeps the better of two candidates; ties go to the lexicographically smaller set.
bool better(double value, const std::vector<std::size_t>& subset, double incumbent_value,
            const std::vector<std::size_t>& incumbent) {
  if (value != incumbent_value) return value > incumbent_value;
  return std::lexicographical_compare(subset.begin(), subset.end(), incumbent.begin(), incumbent.end());
}

}  // namespace

void warm_local_designs(const ProblemInstance& instance, LocalDesignCache& cache) {
  if (!instance.needs_design_score()) return;
  for (auto k : design_sizes(instance)) {
    if (k == 0) continue;
    cache.warm(instance.sites, k);
  }
}

LocalDesignCache make_local_designs(const ProblemInstance& instance, const LocalSearch& search) {
  LocalDesignCache cache(instance.grid, search);
  warm_local_designs(instance, cache);
  return cache;
}

SolveReport exhaustive_solve(const ProblemInstance& instance, const LocalDesignCache* locals,
                             const SolveOptions& options) {
  const std::size_t n = instance.candidate_count();
  std::uint64_t total = 0;
  for (auto k : design_sizes(instance)) {
    const std::uint64_t c = binomial(n, k);
    total = (c > kOracleLimit || total + c > kOracleLimit) ? kOracleLimit + 1 : total + c;
  }
  if (total > kOracleLimit) throw InputError("instance too large for oracle");

  std::optional<LocalDesignCache> owned;
  if (instance.needs_design_score() && locals == nullptr) {
    owned.emplace(make_local_designs(instance, options.local_search));
    locals = &*owned;
  }

  const SubsetFitness fitness = objective_fitness(instance, locals);
  SolveReport report;
  report.method = "exhaustive";
  bool have = false;
  double best_value = 0.0;
  for (auto k : design_sizes(instance)) {
    if (k == 0 && instance.needs_design_score()) continue;
    auto r = options.parallel ? enumerate_best(n, k, fitness) : enumerate_best_serial(n, k, fitness);
    report.evaluations += r.evaluated;
    if (!have || better(r.best_value, r.best, best_value, report.best.selected)) {
      report.best.selected = r.best;
      best_value = r.best_value;
      have = true;
    }
  }
  if (!have) throw InputError("no feasible allocation");
  report.history = {best_value};
  finish(report, instance, locals);
  return report;
}

SolveReport ga_solve(const ProblemInstance& instance, const GaParams& params,
                     const LocalDesignCache* locals, const SolveOptions& options) {
  params.validate();
  std::optional<LocalDesignCache> owned;
  if (instance.needs_design_score() && locals == nullptr) {
    owned.emplace(make_local_designs(instance, options.local_search));
    locals = &*owned;
  }

  const std::size_t n = instance.candidate_count();
  const SubsetFitness fitness = objective_fitness(instance, locals);
  GaHooks hooks;
  hooks.on_generation = options.on_generation;
  hooks.cancel = options.cancel;
  hooks.parallel = options.parallel;

  SolveReport report;
  report.method = "ga";
  bool have = false;
  double best_value = 0.0;
  for (auto k : design_sizes(instance)) {
    if (k == 0) {
      if (instance.needs_design_score()) continue;
      const double value = fitness(std::span<const std::size_t>{});
      ++report.evaluations;
      if (!have || better(value, {}, best_value, report.best.selected)) {
        report.best.selected.clear();
        best_value = value;
        have = true;
      }
      continue;
    }
    GaRun run = ga_maximize(n, k, params, fitness, hooks);
    report.evaluations += run.evaluations;
    report.interrupted = report.interrupted || run.interrupted;
    if (report.history.empty()) {
      report.history = run.history;
    } else {
      const std::size_t len = std::max(report.history.size(), run.history.size());
      report.history.resize(len, report.history.back());
      for (std::size_t g = 0; g < len; ++g)
        report.history[g] = std::max(report.history[g], run.history[std::min(g, run.history.size() - 1)]);
    }
    if (!have || better(run.best_value, run.best, best_value, report.best.selected)) {
      report.best.selected = run.best;
      best_value = run.best_value;
      have = true;
    }
    if (report.interrupted) break;
  }
  if (!have) throw InputError("no feasible allocation");
  if (report.history.empty()) report.history = {best_value};
  finish(report, instance, locals);
  return report;
}

std::vector<SchemeRow> compare_schemes(const ProblemInstance& instance,
                                       const std::vector<std::pair<std::string, Allocation>>& schemes,
                                       LocalDesignCache* locals) {
  std::optional<LocalDesignCache> owned;
  if (instance.needs_design_score() && locals == nullptr) {
    owned.emplace(instance.grid);
    locals = &*owned;
  }

  std::vector<SchemeRow> rows;
  rows.reserve(schemes.size());
  for (const auto& [name, allocation] : schemes) {
    SchemeRow row;
    row.name = name;
    row.allocation = allocation;
    row.feasible = is_feasible(instance, allocation);
    if (!row.feasible) {
      row.error = "budget violation";
      rows.push_back(std::move(row));
      continue;
    }
    try {
      if (instance.needs_design_score() && !allocation.selected.empty())
        locals->warm(instance.sites, allocation.selected.size());
      row.evaluation = evaluate(instance, allocation, locals);
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sitealloc
