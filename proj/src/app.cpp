#include "sitealloc/app.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"
#include "sitealloc/equity.hpp"

namespace sitealloc {
namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json path_json(const std::optional<std::filesystem::path>& p) {
  return p ? Json(p->string()) : Json(nullptr);
}

Json site_ids_json(const Scenario& s, const std::vector<std::size_t>& selected) {
  Json ids = Json::array();
  for (auto i : selected) ids.push_back(s.sites[i].id);
  return ids;
}

Json covered_json(const Region& region, const std::vector<std::uint8_t>& e) {
  Json ids = Json::array();
  for (std::size_t j = 0; j < e.size(); ++j)
    if (e[j]) ids.push_back(region.areas[j].id);
  return ids;
}

Json equity_json(const Region& region, const std::vector<std::uint8_t>& e) {
  if (region.combination_count() == 0 || region.total_population() <= 0) return nullptr;
  const EquityBreakdown b = equity_score(region, e);
  Json strata = Json::array();
  for (const auto& s : b.per_stratum) {
    strata.push_back({{"label", s.label},
                      {"population", s.population},
                      {"conditional", number_json(s.conditional)},
                      {"squared_deviation", number_json(s.squared_deviation)},
                      {"counted", s.counted}});
  }
  return {{"marginal", number_json(b.marginal)}, {"total", number_json(b.total)}, {"strata", strata}};
}

Json report_header(const Scenario& s, const char* kind) {
  Json r;
  r["schema"] = kReportSchema;
  r["kind"] = kind;
  r["generated_at"] = utc_timestamp();
  r["config"] = config_json(s.config);
  r["region"] = {{"areas", s.region.size()}, {"candidates", s.sites.size()}};
  if (!s.warnings.empty()) r["warnings"] = s.warnings;
  return r;
}

LocalSearch local_search_for(const RunConfig& c) {
  LocalSearch search;
  search.mode = c.local_search;
  search.ga = c.ga;
  return search;
}

Json row_json(const Scenario& s, const SchemeRow& row) {
  Json j;
  j["name"] = row.name;
  j["feasible"] = row.feasible;
  Json ids = Json::array();
  for (auto i : row.allocation.selected)
    ids.push_back(i < s.sites.size() ? Json(s.sites[i].id) : Json(nullptr));
  j["site_ids"] = ids;
  if (row.evaluation) {
    j["coverage"] = row.evaluation->scores.coverage;
    j["d_optimality"] = row.evaluation->scores.d_optimality ? number_json(*row.evaluation->scores.d_optimality)
                                                             : Json(nullptr);
    j["equity"] = number_json(row.evaluation->scores.equity);
    j["combined"] = number_json(row.evaluation->combined);
  } else {
    j["coverage"] = nullptr;
    j["d_optimality"] = nullptr;
    j["equity"] = nullptr;
    j["combined"] = nullptr;
  }
  j["error"] = row.error.empty() ? Json(nullptr) : Json(row.error);
  return j;
}

std::string cell(const Json& v, int precision) {
  if (v.is_null()) return "n/a";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return std::to_string(v.get<std::int64_t>());
  std::ostringstream os;
  os << std::setprecision(precision) << v.get<double>();
  return os.str();
}

}  // namespace

Scenario make_scenario(const RunConfig& config, Region region, std::vector<CandidateSite> sites) {
  Scenario s;
  s.config = config;
  s.region = std::move(region);
  s.sites = std::move(sites);
  if (config.strict_weights)
    for (auto& w : config.weights.range_warnings()) s.warnings.push_back(w);
  return s;
}

Scenario load_scenario(const RunConfig& config) {
  if (config.areas && config.sites) {
    Region region = load_region(*config.areas, config.strata);
    auto loaded = load_sites(*config.sites, region.origin.value_or(ProjectionOrigin{}), config.ownership);
    Scenario s = make_scenario(config, std::move(region), std::move(loaded.sites));
    s.warnings.insert(s.warnings.end(), loaded.warnings.begin(), loaded.warnings.end());
    return s;
  }
  if (config.synth) {
    auto synth = synth_region(*config.synth);
    return make_scenario(config, std::move(synth.region), std::move(synth.sites));
  }
  throw ConfigError("config needs areas and sites files, or synth settings");
}

ThetaGrid resolve_grid(const RunConfig& config, const Region& region) {
  if (!config.grid) return {};
  if (*config.grid == "default") return default_theta_grid(region, config.kernel);
  return load_theta_grid(*config.grid, config.kernel);
}

ProblemInstance make_instance(const Scenario& s, std::size_t k) {
  if (s.config.weights.lambda2 > 0.0 && !s.config.grid) throw ConfigError("grid required");
  return ProblemInstance::build(s.region, s.sites, s.config.weights, k, s.config.target_fraction,
                                resolve_grid(s.config, s.region), s.config.budget_mode);
}

Allocation resolve_allocation(const Scenario& s, const std::vector<std::string>& site_ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < s.sites.size(); ++i) index.emplace(s.sites[i].id, i);
  Allocation a;
  std::vector<bool> seen(s.sites.size(), false);
  for (const auto& id : site_ids) {
    auto it = index.find(id);
    if (it == index.end()) throw AllocationError("unknown site id '" + id + "'");
    if (seen[it->second]) throw AllocationError("duplicate site id '" + id + "'");
    seen[it->second] = true;
    a.selected.push_back(it->second);
  }
  a.budget = s.config.k.value_or(a.selected.size());
  return a;
}

std::vector<std::string> read_allocation_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open allocation file " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::stringstream ss(line);
    std::string id;
    while (std::getline(ss, id, ',')) {
      id = detail::trim(id);
      if (!id.empty()) ids.push_back(id);
    }
  }
  return ids;
}

Json number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json config_json(const RunConfig& c) {
  Json j;
  j["areas"] = path_json(c.areas);
  j["strata"] = path_json(c.strata);
  j["sites"] = path_json(c.sites);
  j["ownership"] = to_string(c.ownership);
  if (c.synth) {
    const auto& s = *c.synth;
    Json axes = Json::array();
    for (const auto& a : s.axes) axes.push_back({{"name", a.name}, {"levels", a.levels}});
    j["synth"] = {{"rows", s.rows},
                  {"cols", s.cols},
                  {"spacing_km", s.spacing_km},
                  {"jitter_km", s.jitter_km},
                  {"population_min", s.population_min},
                  {"population_max", s.population_max},
                  {"segregation", s.segregation},
                  {"axes", axes},
                  {"sites", s.site_count},
                  {"capacity", s.site_capacity},
                  {"seed", s.seed}};
  } else {
    j["synth"] = nullptr;
  }
  j["weights"] = {{"lambda1", c.weights.lambda1}, {"lambda2", c.weights.lambda2}, {"lambda3", c.weights.lambda3}};
  j["coverage_importance"] = c.coverage_importance ? Json(to_string(*c.coverage_importance)) : Json(nullptr);
  j["equity_importance"] = c.equity_importance ? Json(to_string(*c.equity_importance)) : Json(nullptr);
  j["k"] = c.k ? Json(*c.k) : Json(nullptr);
  j["budget_mode"] = to_string(c.budget_mode);
  j["target_fraction"] = c.target_fraction;
  j["kernel"] = to_string(c.kernel);
  j["grid"] = c.grid ? Json(*c.grid) : Json(nullptr);
  j["ga"] = {{"population_size", c.ga.population_size},
             {"generations", c.ga.generations},
             {"crossover_rate", c.ga.crossover_rate},
             {"mutation_rate", c.ga.mutation_rate},
             {"elitism", c.ga.elitism},
             {"seed", c.ga.seed}};
  j["exact"] = c.exact;
  return j;
}

Json scores_json(const ScoreTriple& scores) {
  return {{"coverage", scores.coverage},
          {"d_optimality", scores.d_optimality ? number_json(*scores.d_optimality) : Json(nullptr)},
          {"equity", number_json(scores.equity)}};
}

Json score_report(const Scenario& s, const std::vector<std::string>& site_ids) {
  const Allocation allocation = resolve_allocation(s, site_ids);
  const ProblemInstance instance = make_instance(s, allocation.budget);
  if (!is_feasible(instance, allocation)) throw AllocationError("budget violation");

  LocalDesignCache locals(instance.grid, local_search_for(s.config));
  if (instance.needs_design_score() && !allocation.selected.empty())
    locals.warm(instance.sites, allocation.selected.size());
  const Evaluation eval = evaluate(instance, allocation, &locals);

  Json r = report_header(s, "score");
  r["allocation"] = {{"site_ids", site_ids_json(s, allocation.selected)}, {"k", instance.budget}};
  r["scores"] = scores_json(eval.scores);
  r["combined"] = number_json(eval.combined);
  r["covered_area_ids"] = covered_json(s.region, eval.covered);
  r["equity_breakdown"] = equity_json(s.region, eval.covered);
  if (instance.needs_design_score() && !allocation.selected.empty()) {
    const auto d = design_regret(instance.sites, allocation.selected, instance.grid,
                                 locals.at(allocation.selected.size()));
    Json v0s = Json::array();
    for (double v : d.v0_by_theta) v0s.push_back(number_json(v));
    r["design"] = {{"v0_by_theta", v0s}};
  }
  return r;
}

Json optimize_report(const Scenario& s, const OptimizeControl& control) {
  if (!s.config.k) throw ConfigError("k required");
  const ProblemInstance instance = make_instance(s, *s.config.k);
  const LocalDesignCache locals = make_local_designs(instance, local_search_for(s.config));

  SolveOptions options;
  options.cancel = control.cancel;
  options.on_generation = control.on_generation;
  const SolveReport report = s.config.exact ? exhaustive_solve(instance, &locals, options)
                                            : ga_solve(instance, s.config.ga, &locals, options);
  const auto e = covered_indicators(instance.stack, report.best.selected);

  Json r = report_header(s, "optimize");
  r["method"] = report.method;
  r["interrupted"] = report.interrupted;
  r["best"] = {{"site_ids", site_ids_json(s, report.best.selected)},
               {"indices", report.best.selected},
               {"k", instance.budget}};
  r["scores"] = scores_json(report.best_scores);
  r["combined"] = number_json(report.combined);
  Json history = Json::array();
  for (double v : report.history) history.push_back(number_json(v));
  r["history"] = history;
  r["evaluations"] = report.evaluations;
  r["covered_area_ids"] = covered_json(s.region, e);
  r["equity_breakdown"] = equity_json(s.region, e);
  return r;
}

Json compare_report(const Scenario& s,
                    const std::vector<std::pair<std::string, std::vector<std::string>>>& schemes,
                    bool with_optimized) {
  std::vector<std::pair<std::string, Allocation>> allocations;
  std::vector<std::string> resolve_errors(schemes.size());
  for (std::size_t r = 0; r < schemes.size(); ++r) {
    try {
      allocations.emplace_back(schemes[r].first, resolve_allocation(s, schemes[r].second));
    } catch (const AllocationError& ex) {
      resolve_errors[r] = ex.what();
      allocations.emplace_back(schemes[r].first, Allocation{});
    }
  }

  std::size_t k = s.config.k.value_or(0);
  if (!s.config.k) {
    for (const auto& [name, a] : allocations) k = std::max(k, a.selected.size());
  }
  const ProblemInstance instance = make_instance(s, k);
  LocalDesignCache locals(instance.grid, local_search_for(s.config));
  auto rows = compare_schemes(instance, allocations, &locals);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (resolve_errors[r].empty()) continue;
    rows[r].feasible = false;
    rows[r].evaluation.reset();
    rows[r].error = resolve_errors[r];
  }

  Json r = report_header(s, "compare");
  Json table = Json::array();
  for (const auto& row : rows) table.push_back(row_json(s, row));
  if (with_optimized) {
    Json opt = optimize_report(s);
    table.push_back({{"name", "proposed"},
                     {"feasible", true},
                     {"site_ids", opt["best"]["site_ids"]},
                     {"coverage", opt["scores"]["coverage"]},
                     {"d_optimality", opt["scores"]["d_optimality"]},
                     {"equity", opt["scores"]["equity"]},
                     {"combined", opt["combined"]},
                     {"error", nullptr}});
  }
  r["rows"] = table;
  return r;
}

std::string render_compare_table(const Json& report) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %10s %14s %12s %12s\n", "scheme", "coverage", "d_optimality",
                "equity", "combined");
  os << line;
  for (const auto& row : report.at("rows")) {
    std::snprintf(line, sizeof line, "%-20s %10s %14s %12s %12s", row.at("name").get<std::string>().c_str(),
                  cell(row.at("coverage"), 6).c_str(), cell(row.at("d_optimality"), 6).c_str(),
                  cell(row.at("equity"), 6).c_str(), cell(row.at("combined"), 6).c_str());
    os << line;
    if (!row.at("error").is_null()) os << "  [" << row.at("error").get<std::string>() << "]";
    os << '\n';
  }
  return os.str();
}

Json strip_volatile(Json report) {
  if (report.is_object()) {
    report.erase("generated_at");
    for (auto& [key, value] : report.items()) value = strip_volatile(value);
  } else if (report.is_array()) {
    for (auto& value : report) value = strip_volatile(value);
  }
  return report;
}

}  // namespace sitealloc
