// gpssim: planning and simulation front end.
//
// Exit codes: 0 ok, 1 infeasible deployment (strict), 2 configuration or
// input error, 3 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "gpssim/config.hpp"
#include "gpssim/delay_calibration.hpp"
#include "gpssim/error.hpp"
#include "gpssim/ntp.hpp"
#include "gpssim/report.hpp"
#include "gpssim/scenario.hpp"

namespace fs = std::filesystem;
using namespace gpssim;

namespace {

enum Exit { kOk = 0, kInfeasible = 1, kConfig = 2, kRuntime = 3 };

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "json";
  bool strict = false;
  std::string scenario;
  std::string input;
  bool synthetic = false;
};

/// Collects named outputs; the first is the main report.
class Output {
 public:
  explicit Output(const Options& o) : opts_(o) {}

  void add(const std::string& file, std::string content) { files_.emplace_back(file, std::move(content)); }

  void flush() const {
    if (opts_.out_dir.empty()) {
      if (!files_.empty()) std::cout << files_.front().second;
      return;
    }
    fs::create_directories(opts_.out_dir);
    for (const auto& [name, content] : files_) {
      const fs::path p = fs::path(opts_.out_dir) / name;
      std::ofstream f(p, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + p.string());
      f << content;
      std::cout << "wrote " << p.string() << '\n';
    }
  }

 private:
  const Options& opts_;
  std::vector<std::pair<std::string, std::string>> files_;
};

config::Config load(const Options& o) {
  std::string path = o.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(config::kConfigEnvVar)) path = env;
  }
  config::Config c = path.empty() ? config::default_config() : config::load_config(path);
  if (o.seed) c.seed = *o.seed;
  return c;
}

bool json_format(const Options& o) { return o.format == "json"; }

int cmd_plan(const Options& o) {
  const config::Config c = load(o);
  const report::PlanReport plan = report::build_plan(c.deployment);
  Output out(o);
  out.add(json_format(o) ? "plan.json" : "plan.csv", json_format(o) ? report::plan_json(plan) : report::plan_csv(plan));
  out.add("reception_curves.csv", report::curves_csv(plan.reception, "r"));
  out.add("blockage_curves.csv", report::curves_csv(plan.blockage, "d"));
  out.flush();
  if (o.strict && !plan.validation.ok) {
    std::cerr << "deployment is infeasible at the posted speeds\n";
    return kInfeasible;
  }
  return kOk;
}

std::string file_safe(std::string s) {
  for (char& ch : s) {
    if (ch == '/') ch = '_';
  }
  return s;
}

int run_scenario(const Options& o, const config::Config& c, const std::string& name) {
  const config::ScenarioSpec& spec = c.scenario(name);
  const bool js = json_format(o);
  const std::string main_file = name + (js ? ".json" : ".csv");
  Output out(o);

  if (const auto* s = std::get_if<config::StaticSpec>(&spec)) {
    const auto rows =
        scenario::run_static_handover_batch(s->clocks, c.receiver(s->receiver), s->trials, c.seed, c.options);
    out.add(main_file, js ? report::static_json(name, c.seed, rows) : report::static_csv(rows));
  } else if (const auto* t = std::get_if<config::TraversalSpec>(&spec)) {
    scenario::PathScenario path = t->path;
    path.strict = path.strict || o.strict;
    const auto rows = scenario::run_dynamic_batch(path, t->clocks, t->runs, c.seed, c.options);
    out.add(main_file, js ? report::traversal_json(name, c.seed, rows) : report::traversal_csv(rows));
    const solver::Vec3 origin = solver::geodetic_to_ecef(c.options.origin);
    for (const auto& r : rows) {
      out.add(name + "_" + file_safe(r.clock.label()) + "_fixes.csv", report::fixes_csv(r.first_run, origin));
    }
  } else if (const auto* w = std::get_if<config::SweepSpec>(&spec)) {
    std::vector<report::SweepTable> tables;
    for (const auto& rx : w->receivers) {
      tables.push_back({rx, scenario::run_offset_sweep(w->offsets, c.receiver(rx), w->trials, c.seed, c.options)});
    }
    out.add(main_file, js ? report::sweep_json(name, c.seed, tables) : report::sweep_csv(tables));
  } else if (const auto* d = std::get_if<config::OutdoorSpec>(&spec)) {
    const auto cmp =
        scenario::run_outdoor_comparison(c.seed, c.receiver(d->receiver), d->trials, d->coverage_radius_m, c.options);
    out.add(main_file, js ? report::outdoor_json(name, c.seed, cmp) : report::outdoor_csv(cmp));
  }
  out.flush();
  return kOk;
}

int cmd_simulate(const Options& o) {
  const config::Config c = load(o);
  return run_scenario(o, c, o.scenario);
}

int cmd_sweep(const Options& o) {
  const config::Config c = load(o);
  const std::string name = o.scenario.empty() ? "sweep" : o.scenario;
  if (!std::holds_alternative<config::SweepSpec>(c.scenario(name))) {
    throw ConfigError("scenarios." + name, "is not a sweep scenario");
  }
  return run_scenario(o, c, name);
}

int cmd_calibrate(const Options& o) {
  const config::Config c = load(o);
  std::vector<TimeOffset> samples;
  if (!o.input.empty()) {
    std::ifstream in(o.input);
    if (!in) throw ConfigError("--input", "cannot read '" + o.input + "'");
    samples = calibration::read_samples_csv(in);
  } else {
    Rng rng(c.seed);
    samples = calibration::measure_sim_delay(c.sim_delay, c.calibration_samples, rng);
  }
  const calibration::CalibrationResult r = calibration::calibrate(samples);
  Output out(o);
  out.add(json_format(o) ? "calibration.json" : "calibration.csv",
          json_format(o) ? report::calibration_json(r) : report::calibration_csv(r));
  if (o.input.empty()) {
    std::ostringstream ss;
    calibration::write_samples_csv(ss, samples);
    out.add("samples.csv", ss.str());
  }
  out.flush();
  return kOk;
}

int cmd_sync(const Options& o) {
  const config::Config c = load(o);
  const auto rows = ntp::run_sync_comparison(c.ntp, c.seed);
  Output out(o);
  out.add(json_format(o) ? "sync_compare.json" : "sync_compare.csv",
          json_format(o) ? report::sync_json(c.seed, rows) : ntp::sync_comparison_csv(rows));
  out.flush();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GPS-simulator indoor positioning planner and simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path,
                 std::string("JSON config file (default: $") + config::kConfigEnvVar + ", then built-in defaults)");
  app.add_option("--seed", o.seed, "Override the config seed");
  app.add_option("--out", o.out_dir, "Write reports into this directory instead of stdout");
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--strict", o.strict, "Treat an infeasible deployment as an error (exit 1)");

  auto* plan = app.add_subcommand("plan", "Coverage radius / separation planning report");
  auto* sim = app.add_subcommand("simulate", "Run a named scenario");
  sim->add_option("--scenario", o.scenario, "Scenario name (static, drive, pedestrian, sweep, outdoor, ...)")
      ->required();
  auto* sweep = app.add_subcommand("sweep", "Clock-offset sweep");
  sweep->add_option("--scenario", o.scenario, "Sweep scenario name (default: sweep)");
  auto* cal = app.add_subcommand("calibrate", "Simulator delay calibration");
  auto* group = cal->add_option_group("source");
  group->add_option("--input", o.input, "CSV of measured delays (timestamp_s,delay_ms)");
  group->add_flag("--synthetic", o.synthetic, "Generate samples from the configured delay model");
  group->require_option(1);
  auto* sync = app.add_subcommand("sync-compare", "NTP connection/server comparison matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (plan->parsed()) return cmd_plan(o);
    if (sim->parsed()) return cmd_simulate(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (cal->parsed()) return cmd_calibrate(o);
    if (sync->parsed()) return cmd_sync(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const EmptySampleSet& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfig;
  } catch (const OverlappingCoverage& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ZeroSpeed& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InfeasibleDeployment& e) {
    std::cerr << "infeasible deployment: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
