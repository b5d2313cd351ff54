#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "sitealloc/app.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sitealloc {
namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSolve = 3;

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

class SigintGuard {
 public:
  SigintGuard() {
    g_interrupted.store(false);
    previous_ = std::signal(SIGINT, on_sigint);
  }
  ~SigintGuard() { std::signal(SIGINT, previous_); }
  SigintGuard(const SigintGuard&) = delete;
  SigintGuard& operator=(const SigintGuard&) = delete;

 private:
  void (*previous_)(int) = SIG_DFL;
};

const std::set<std::string> kBooleanKeys = {"exact", "synth", "strict-weights"};

struct Options {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;
};

void add_config_options(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "run-config file (key = value lines)");
  for (const auto& [key, description] : config_keys()) {
    if (kBooleanKeys.contains(key))
      sub->add_flag("--" + key, o.switches[key], description);
    else
      sub->add_option("--" + key, o.values[key], description);
  }
}

RunConfig resolve_config(const CLI::App* sub, const Options& o, bool force_synth = false) {
  KeyValues values;
  if (!o.config_path.empty()) values = load_config_file(o.config_path);
  for (const auto& [key, description] : config_keys()) {
    if (sub->count("--" + key) == 0) continue;
    if (kBooleanKeys.contains(key)) {
      values[key] = o.switches.at(key) ? "true" : "false";
      continue;
    }
    values[key] = o.values.at(key);
    // A flag overrides the competing weight setting from the config file.
    if (key == "lambda1") values.erase("coverage-importance");
    if (key == "coverage-importance") values.erase("lambda1");
    if (key == "lambda3") values.erase("equity-importance");
    if (key == "equity-importance") values.erase("lambda3");
  }
  if (force_synth) values["synth"] = "true";
  RunConfig config = RunConfig::from_values(values, !force_synth);
#ifdef _OPENMP
  if (config.threads > 0) omp_set_num_threads(config.threads);
#endif
  return config;
}

void emit(const Json& report, const RunConfig& config, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (!config.out) {
    out << text;
    return;
  }
  std::ofstream file(*config.out);
  if (!file) throw ConfigError("cannot write " + config.out->string());
  file << text;
}

void print_warnings(const Json& report, std::ostream& err) {
  if (!report.contains("warnings")) return;
  for (const auto& w : report["warnings"]) err << "warning: " << w.get<std::string>() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Allocate test centers for coverage, design efficiency and equity"};
  app.name("sitealloc");
  app.require_subcommand(1);

  Options score_opts, optimize_opts, compare_opts, synth_opts;
  std::string allocation_path;
  std::vector<std::string> compare_inputs;
  bool with_optimized = false;
  std::string out_dir;

  auto* score = app.add_subcommand("score", "score an existing allocation");
  add_config_options(score, score_opts);
  score->add_option("--allocation", allocation_path, "file of selected site ids")->required();

  auto* optimize = app.add_subcommand("optimize", "search for the best allocation");
  add_config_options(optimize, optimize_opts);

  auto* compare = app.add_subcommand("compare", "score several allocations side by side");
  add_config_options(compare, compare_opts);
  compare->add_option("--allocation", compare_inputs, "[name=]file of selected site ids")->required();
  compare->add_flag("--with-optimized", with_optimized, "append an optimized 'proposed' row");

  auto* synth = app.add_subcommand("synth", "write a synthetic region as input files");
  add_config_options(synth, synth_opts);
  synth->add_option("--out-dir", out_dir, "directory for areas.csv, strata.csv, sites.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (score->parsed()) {
      const RunConfig config = resolve_config(score, score_opts);
      const Scenario scenario = load_scenario(config);
      const Json report = score_report(scenario, read_allocation_file(allocation_path));
      print_warnings(report, err);
      emit(report, config, out);
    } else if (optimize->parsed()) {
      const RunConfig config = resolve_config(optimize, optimize_opts);
      const Scenario scenario = load_scenario(config);
      SigintGuard guard;
      OptimizeControl control;
      control.cancel = &g_interrupted;
      const Json report = optimize_report(scenario, control);
      print_warnings(report, err);
      if (report["interrupted"].get<bool>()) err << "interrupted: writing partial report\n";
      emit(report, config, out);
    } else if (compare->parsed()) {
      const RunConfig config = resolve_config(compare, compare_opts);
      const Scenario scenario = load_scenario(config);
      std::vector<std::pair<std::string, std::vector<std::string>>> schemes;
      for (const auto& input : compare_inputs) {
        const auto eq = input.find('=');
        const std::string path = eq == std::string::npos ? input : input.substr(eq + 1);
        const std::string name =
            eq == std::string::npos ? std::filesystem::path(path).stem().string() : input.substr(0, eq);
        schemes.emplace_back(name, read_allocation_file(path));
      }
      const Json report = compare_report(scenario, schemes, with_optimized);
      print_warnings(report, err);
      out << render_compare_table(report);
      if (config.out) emit(report, config, out);
    } else if (synth->parsed()) {
      const RunConfig config = resolve_config(synth, synth_opts, true);
      const auto generated = synth_region(*config.synth);
      const std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      save_region(generated.region, dir / "areas.csv", dir / "strata.csv");
      save_sites(generated.sites, *generated.region.origin, dir / "sites.csv");
      out << "wrote " << generated.region.size() << " areas and " << generated.sites.size() << " sites to "
          << dir.string() << '\n';
    }
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const InputError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "solve failed: " << ex.what() << '\n';
    return kExitSolve;
  }
  return 0;
}

}  // namespace sitealloc
