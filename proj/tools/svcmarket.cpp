#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svcmarket/config.hpp"
#include "svcmarket/engine.hpp"
#include "svcmarket/experiment.hpp"
#include "svcmarket/io.hpp"
#include "svcmarket/plot.hpp"
#include "svcmarket/report.hpp"

namespace fs = std::filesystem;
using namespace svcmarket;

namespace {

enum class LogLevel { Off, Error, Warn, Info, Debug };

LogLevel log_level() {
  const char* env = std::getenv("SVCMARKET_LOG");
  if (!env) return LogLevel::Info;
  const std::string v(env);
  if (v == "off" || v == "0") return LogLevel::Off;
  if (v == "error") return LogLevel::Error;
  if (v == "warn") return LogLevel::Warn;
  if (v == "debug" || v == "trace") return LogLevel::Debug;
  return LogLevel::Info;
}

void log(LogLevel level, const std::string& msg) {
  static const LogLevel threshold = log_level();
  if (level > threshold || threshold == LogLevel::Off) return;
  static constexpr const char* names[] = {"", "error", "warn", "info", "debug"};
  std::cerr << "[svcmarket " << names[static_cast<int>(level)] << "] " << msg << '\n';
}

struct Overrides {
  std::string scenario;
  std::string topology;
  std::string method;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<int> cycle;
  std::optional<double> arrival_rate;
  std::string out_dir = "results";
  bool overwrite = false;
  bool no_plots = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--scenario", o.scenario, "Scenario JSON file (defaults when omitted)");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--replications", o.replications, "Number of replications");
  cmd->add_option("--cycle", o.cycle, "Cycle duration in ticks");
  cmd->add_option("--arrival-rate", o.arrival_rate, "Base arrival rate per tick");
}

void add_output(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--out-dir", o.out_dir, "Output directory");
  cmd->add_flag("--overwrite", o.overwrite, "Replace existing results");
  cmd->add_flag("--no-plots", o.no_plots, "Skip SVG rendering");
}

TopologyKind topology_or_throw(const std::string& name) {
  const auto k = parse_topology(name);
  if (!k) throw ConfigError({{"topology", name, "GovA..GovH or a topology name"}});
  return *k;
}

MeasurementMethod method_or_throw(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw ConfigError({{"measurement_method", name, "Usys, DM, QoS, SaL"}});
  return *m;
}

ValidatedScenario resolve(const Overrides& o) {
  ScenarioConfig c = o.scenario.empty() ? ScenarioConfig{} : load_scenario(o.scenario);
  if (!o.topology.empty()) c.topology = topology_or_throw(o.topology);
  if (!o.method.empty()) c.measurement_method = method_or_throw(o.method);
  if (o.seed) c.seed = *o.seed;
  if (o.replications) c.replications = *o.replications;
  if (o.cycle) c.cycle_duration = *o.cycle;
  if (o.arrival_rate) c.arrival_rate = *o.arrival_rate;
  return validate_scenario(std::move(c));
}

void maybe_plot(const Overrides& o) {
  if (o.no_plots) return;
  for (const auto& p : render_plots(o.out_dir)) log(LogLevel::Debug, "wrote " + p.string());
}

int cmd_run(const Overrides& o) {
  const auto s = resolve(o);
  prepare_output_dir(o.out_dir, o.overwrite);
  const int reps = s->replications;
  log(LogLevel::Info, "running " + preset_name(s->topology) + " with " + std::string(to_string(s->measurement_method)) +
                          ", " + std::to_string(reps) + " replication(s)");
  if (reps == 1) {
    const auto r = run_simulation(s, s->seed);
    write_run(o.out_dir, r);
    log(LogLevel::Info, "U_sys = " + format_number(r.system_utility));
  } else {
    const auto agg = run_replications(s, s->seed, reps);
    Json runs = Json::array();
    for (std::size_t i = 0; i < agg.runs.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "rep-%03zu", i);
      const fs::path sub = fs::path(o.out_dir) / name;
      fs::create_directories(sub);
      write_run(sub, agg.runs[i]);
      runs.push_back({{"replication", i}, {"seed", agg.runs[i].scenario.seed},
                      {"system_utility", agg.runs[i].system_utility}});
    }
    Json j;
    j["seed"] = s->seed;
    j["replications"] = reps;
    j["scenario"] = scenario_to_json(s.config());
    j["system_utility"] = summary_stats_json(agg.system_utility);
    j["raw_factors"] = agg.factors ? raw_factors_json(*agg.factors) : Json(nullptr);
    j["runs"] = runs;
    write_json(fs::path(o.out_dir) / "summary.json", j);
    log(LogLevel::Info, "mean U_sys = " + format_number(agg.system_utility.mean));
  }
  maybe_plot(o);
  return 0;
}

int cmd_compare_topologies(const Overrides& o, const std::vector<std::string>& names, const std::string& reference) {
  const auto s = resolve(o);
  std::vector<TopologyKind> kinds;
  if (names.empty()) {
    kinds.assign(std::begin(kAllTopologies), std::end(kAllTopologies));
  } else {
    for (const auto& n : names) kinds.push_back(topology_or_throw(n));
  }
  const auto ref = topology_or_throw(reference);
  prepare_output_dir(o.out_dir, o.overwrite);
  log(LogLevel::Info, "comparing " + std::to_string(kinds.size()) + " topologies over " +
                          std::to_string(s->replications) + " replication(s)");
  const auto cmp = compare_topologies(s, kinds, s->replications, ref);
  write_topology_outputs(o.out_dir, cmp);
  write_json(fs::path(o.out_dir) / "summary.json", topology_summary_json(cmp, s.config(), s->replications));
  write_topology_table(std::cout, cmp);
  maybe_plot(o);
  return 0;
}

int cmd_compare_methods(const Overrides& o, const std::vector<std::string>& names,
                        const std::vector<std::string>& topologies) {
  const auto s = resolve(o);
  std::vector<MeasurementMethod> methods;
  if (names.empty()) {
    methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
  } else {
    for (const auto& n : names) methods.push_back(method_or_throw(n));
  }
  std::vector<TopologyKind> kinds;
  if (topologies.empty()) {
    kinds.assign(std::begin(kAllTopologies), std::end(kAllTopologies));
  } else {
    for (const auto& n : topologies) kinds.push_back(topology_or_throw(n));
  }
  if (methods.size() < 2) throw ConfigError({{"methods", std::to_string(methods.size()), "at least 2"}});
  prepare_output_dir(o.out_dir, o.overwrite);
  log(LogLevel::Info, "comparing " + std::to_string(methods.size()) + " methods on " + std::to_string(kinds.size()) +
                          " topologies over " + std::to_string(s->replications) + " replication(s)");
  const auto cmp = compare_methods(s, methods, kinds, s->replications);
  write_method_outputs(o.out_dir, cmp);
  write_json(fs::path(o.out_dir) / "summary.json", method_summary_json(cmp, s.config(), s->replications));
  for (const auto& r : cmp.rows) {
    std::cout << to_string(r.method) << ": Overall " << format_number(r.scores.Overall) << ", stability "
              << format_number(r.stability) << '\n';
  }
  maybe_plot(o);
  return 0;
}

int cmd_plot(const std::string& dir) {
  if (!fs::is_directory(dir)) throw MissingResults(dir + " is not a results directory");
  for (const auto& p : render_plots(dir)) std::cout << p.string() << '\n';
  return 0;
}

int cmd_validate(const Overrides& o) {
  const auto s = resolve(o);
  std::cout << scenario_to_json(s.config()).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based simulator of a data service market"};
  app.require_subcommand(1);
  Overrides o;

  auto* run = app.add_subcommand("run", "Simulate one scenario");
  add_common(run, o);
  add_output(run, o);
  run->add_option("--topology", o.topology, "Topology preset or name");
  run->add_option("--method", o.method, "Measurement method");

  std::vector<std::string> topo_names;
  std::string reference = "GovG";
  auto* ct = app.add_subcommand("compare-topologies", "Run every topology on the same order streams");
  add_common(ct, o);
  add_output(ct, o);
  ct->add_option("--topology", topo_names, "Topologies to compare (repeatable, default all eight)");
  ct->add_option("--method", o.method, "Measurement method");
  ct->add_option("--gains-reference", reference, "Topology used as the Gains% reference");

  std::vector<std::string> method_names;
  std::vector<std::string> method_topos;
  auto* cm = app.add_subcommand("compare-methods", "Run every measurement method on the same order streams");
  add_common(cm, o);
  add_output(cm, o);
  cm->add_option("--method", method_names, "Methods to compare (repeatable, default all four)");
  cm->add_option("--topology", method_topos, "Topologies in the grid (repeatable, default all eight)");

  std::string plot_dir;
  auto* pl = app.add_subcommand("plot", "Render SVG charts from a results directory");
  pl->add_option("--out-dir,dir", plot_dir, "Results directory")->required();

  auto* vc = app.add_subcommand("validate-config", "Validate a scenario and print it with defaults resolved");
  add_common(vc, o);
  vc->add_option("--topology", o.topology, "Topology preset or name");
  vc->add_option("--method", o.method, "Measurement method");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(o);
    if (*ct) return cmd_compare_topologies(o, topo_names, reference);
    if (*cm) return cmd_compare_methods(o, method_names, method_topos);
    if (*pl) return cmd_plot(plot_dir);
    if (*vc) return cmd_validate(o);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const OutputExists& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const MissingResults& e) {
    std::cerr << "missing results: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
