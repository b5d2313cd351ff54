#include "sitealloc/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "csv.hpp"

namespace sitealloc {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

class ValueReader {
 public:
  explicit ValueReader(const KeyValues& values) : values_(values) {}

  std::optional<std::string> text(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<double> real(const std::string& key) const {
    auto t = text(key);
    if (!t) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t->c_str(), &end);
    if (t->empty() || errno != 0 || end != t->c_str() + t->size())
      throw ConfigError("'" + key + "' expects a number, got '" + *t + "'");
    return v;
  }

  template <typename Int>
  std::optional<Int> integer(const std::string& key) const {
    auto t = text(key);
    if (!t) return std::nullopt;
    Int v{};
    auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
    if (t->empty() || ec != std::errc{} || ptr != t->data() + t->size())
      throw ConfigError("'" + key + "' expects a nonnegative integer, got '" + *t + "'");
    return v;
  }

  std::optional<bool> boolean(const std::string& key) const {
    auto t = text(key);
    if (!t) return std::nullopt;
    const auto v = lower(*t);
    if (v == "true" || v == "1" || v == "yes" || v == "on" || v.empty()) return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("'" + key + "' expects true or false, got '" + *t + "'");
  }

 private:
  const KeyValues& values_;
};

std::vector<StratumAxis> parse_axes(const std::string& text) {
  // "race:white,black;sex:female,male"
  std::vector<StratumAxis> axes;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw ConfigError("synth-axes entry '" + part + "' is not name:levels");
    StratumAxis axis{detail::trim(part.substr(0, colon)), {}};
    std::stringstream ls(part.substr(colon + 1));
    std::string level;
    while (std::getline(ls, level, ',')) axis.levels.push_back(detail::trim(level));
    axes.push_back(std::move(axis));
  }
  return axes;
}

}  // namespace

Importance parse_importance(const std::string& text) {
  std::string s = lower(detail::trim(text));
  std::replace(s.begin(), s.end(), '_', ' ');
  std::replace(s.begin(), s.end(), '-', ' ');
  if (s == "less" || s == "less important") return Importance::less;
  if (s == "somewhat" || s == "somewhat important") return Importance::somewhat;
  if (s == "important") return Importance::important;
  if (s == "very" || s == "very important") return Importance::very;
  throw ConfigError("unknown importance level '" + text + "'");
}

std::string to_string(Importance level) {
  switch (level) {
    case Importance::less: return "Less Important";
    case Importance::somewhat: return "Somewhat Important";
    case Importance::important: return "Important";
    case Importance::very: break;
  }
  return "Very Important";
}

double coverage_weight(Importance level) {
  switch (level) {
    case Importance::less: return 1e-6;
    case Importance::somewhat: return 1e-4;
    case Importance::important: return 1e-2;
    case Importance::very: break;
  }
  return 1e0;
}

double equity_weight(Importance level) {
  switch (level) {
    case Importance::less: return 1e-4;
    case Importance::somewhat: return 1e-2;
    case Importance::important: return 1e0;
    case Importance::very: break;
  }
  return 1e2;
}

std::string normalize_key(std::string key) {
  key = lower(detail::trim(key));
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

KeyValues parse_config_text(const std::string& text, const std::string& name) {
  KeyValues out;
  std::stringstream ss(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(ss, line)) {
    ++number;
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(number) + ": expected key = value");
    std::string key = normalize_key(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string::npos) throw ConfigError(name + ":" + std::to_string(number) + ": unterminated string");
      value = value.substr(1, close - 1);
    } else if (auto hash = value.find(" #"); hash != std::string::npos) {
      value = detail::trim(value.substr(0, hash));
    }
    if (key.empty()) throw ConfigError(name + ":" + std::to_string(number) + ": empty key");
    out[key] = value;
  }
  return out;
}

KeyValues load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"areas", "areas file (area_id,lon,lat,population)"},
      {"strata", "strata file (area_id,axis,level,count[,combo])"},
      {"sites", "candidate sites file (site_id,lon,lat,capacity,site_type,ownership)"},
      {"ownership", "site ownership filter: public|private|unknown|all"},
      {"synth", "use a synthetic region instead of files"},
      {"synth-rows", "synthetic grid rows"},
      {"synth-cols", "synthetic grid columns"},
      {"synth-spacing", "synthetic grid spacing (km)"},
      {"synth-jitter", "synthetic centroid jitter (km)"},
      {"synth-pop-min", "synthetic minimum area population"},
      {"synth-pop-max", "synthetic maximum area population"},
      {"synth-segregation", "synthetic segregation in [0,1]"},
      {"synth-axes", "synthetic stratum axes, e.g. race:a,b;sex:f,m"},
      {"synth-sites", "synthetic candidate site count"},
      {"synth-capacity", "synthetic site capacity (tests/week)"},
      {"synth-seed", "synthetic region seed"},
      {"lambda1", "coverage weight"},
      {"lambda2", "D-optimality regret weight"},
      {"lambda3", "equity weight"},
      {"coverage-importance", "coverage importance level (less|somewhat|important|very)"},
      {"equity-importance", "equity importance level (less|somewhat|important|very)"},
      {"strict-weights", "warn when weights fall outside [1e-8, 1e6]"},
      {"k", "number of sites to open"},
      {"budget-mode", "exact|at_most"},
      {"target-fraction", "share of an area's population a site must serve"},
      {"kernel", "exponential|squared_exponential"},
      {"grid-file", "theta grid file (sigma2,phi,tau2) or 'default'"},
      {"local-search", "local optimal design search: auto|exhaustive|ga"},
      {"population-size", "GA population size"},
      {"generations", "GA generations"},
      {"crossover-rate", "GA crossover rate"},
      {"mutation-rate", "GA per-gene mutation rate"},
      {"elitism", "GA elite count"},
      {"seed", "GA seed"},
      {"threads", "worker threads (0 = OpenMP default)"},
      {"exact", "use exhaustive enumeration instead of the GA"},
      {"out", "report output path"},
  };
  return keys;
}

RunConfig RunConfig::from_values(const KeyValues& values, bool require_source) {
  for (const auto& [key, value] : values) {
    const auto& keys = config_keys();
    if (std::none_of(keys.begin(), keys.end(), [&](const auto& k) { return k.first == key; }))
      throw ConfigError("unknown config key '" + key + "'");
  }
  const ValueReader r(values);
  RunConfig c;
  try {
    if (auto v = r.text("areas")) c.areas = *v;
    if (auto v = r.text("strata")) c.strata = *v;
    if (auto v = r.text("sites")) c.sites = *v;
    if (auto v = r.text("ownership")) c.ownership = parse_ownership_filter(lower(*v));

    const bool any_synth = std::any_of(values.begin(), values.end(),
                                       [](const auto& kv) { return kv.first.rfind("synth-", 0) == 0; });
    if (r.boolean("synth").value_or(false) || any_synth) {
      SynthParams s;
      if (auto v = r.integer<std::size_t>("synth-rows")) s.rows = *v;
      if (auto v = r.integer<std::size_t>("synth-cols")) s.cols = *v;
      if (auto v = r.real("synth-spacing")) s.spacing_km = *v;
      if (auto v = r.real("synth-jitter")) s.jitter_km = *v;
      if (auto v = r.integer<std::int64_t>("synth-pop-min")) s.population_min = *v;
      if (auto v = r.integer<std::int64_t>("synth-pop-max")) s.population_max = *v;
      if (auto v = r.real("synth-segregation")) s.segregation = *v;
      if (auto v = r.text("synth-axes")) s.axes = parse_axes(*v);
      if (auto v = r.integer<std::size_t>("synth-sites")) s.site_count = *v;
      if (auto v = r.real("synth-capacity")) s.site_capacity = *v;
      if (auto v = r.integer<std::uint64_t>("synth-seed")) s.seed = *v;
      s.validate();
      c.synth = s;
    }

    if (auto v = r.text("coverage-importance")) {
      if (values.contains("lambda1")) throw ConfigError("set either lambda1 or coverage-importance, not both");
      c.coverage_importance = parse_importance(*v);
      c.weights.lambda1 = coverage_weight(*c.coverage_importance);
    }
    if (auto v = r.text("equity-importance")) {
      if (values.contains("lambda3")) throw ConfigError("set either lambda3 or equity-importance, not both");
      c.equity_importance = parse_importance(*v);
      c.weights.lambda3 = equity_weight(*c.equity_importance);
    }
    if (auto v = r.real("lambda1")) c.weights.lambda1 = *v;
    if (auto v = r.real("lambda2")) c.weights.lambda2 = *v;
    if (auto v = r.real("lambda3")) c.weights.lambda3 = *v;
    if (c.weights.lambda1 < 0 || c.weights.lambda2 < 0 || c.weights.lambda3 < 0)
      throw ConfigError("weights must be nonnegative");
    c.strict_weights = r.boolean("strict-weights").value_or(false);

    if (auto v = r.integer<std::size_t>("k")) c.k = *v;
    if (auto v = r.text("budget-mode")) c.budget_mode = parse_budget_mode(lower(*v));
    if (auto v = r.real("target-fraction")) c.target_fraction = *v;
    if (!(c.target_fraction > 0.0 && c.target_fraction <= 1.0)) throw ConfigError("invalid fraction");

    if (auto v = r.text("kernel")) c.kernel = parse_kernel_family(lower(*v));
    if (auto v = r.text("grid-file"); v && !v->empty()) c.grid = *v;
    if (auto v = r.text("local-search")) {
      const auto mode = lower(*v);
      if (mode == "auto" || mode == "automatic") c.local_search = LocalSearch::Mode::automatic;
      else if (mode == "exhaustive") c.local_search = LocalSearch::Mode::exhaustive;
      else if (mode == "ga" || mode == "genetic") c.local_search = LocalSearch::Mode::genetic;
      else throw ConfigError("unknown local-search mode '" + *v + "'");
    }
    if (c.weights.lambda2 > 0.0 && !c.grid) throw ConfigError("grid required");

    if (auto v = r.integer<std::size_t>("population-size")) c.ga.population_size = *v;
    if (auto v = r.integer<std::size_t>("generations")) c.ga.generations = *v;
    if (auto v = r.real("crossover-rate")) c.ga.crossover_rate = *v;
    if (auto v = r.real("mutation-rate")) c.ga.mutation_rate = *v;
    if (auto v = r.integer<std::size_t>("elitism")) c.ga.elitism = *v;
    if (auto v = r.integer<std::uint64_t>("seed")) c.ga.seed = *v;
    c.ga.validate();
    if (auto v = r.integer<int>("threads")) c.threads = *v;
    c.exact = r.boolean("exact").value_or(false);
    if (auto v = r.text("out"); v && !v->empty()) c.out = *v;
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& ex) {
    throw ConfigError(ex.what());
  }

  if (require_source && !c.synth && (!c.areas || !c.sites)) throw ConfigError("config needs areas and sites files, or synth settings");
  return c;
}

ThetaGrid load_theta_grid(const std::filesystem::path& path, KernelFamily family) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file " + path.string());
  detail::CsvReader reader(in, path.string());
  ThetaGrid grid;
  while (reader.next()) {
    KernelSpec spec{family, reader.number("sigma2"), reader.number("phi"), reader.number("tau2")};
    if (auto k = reader.get("kernel"); !k.empty()) spec.family = parse_kernel_family(lower(k));
    try {
      spec.validate();
    } catch (const InputError& ex) {
      reader.fail(ex.what());
    }
    grid.points.push_back(spec);
  }
  if (grid.points.empty()) throw ConfigError("grid file " + path.string() + " has no rows");
  return grid;
}

}  // namespace sitealloc
