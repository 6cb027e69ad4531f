#include "quadsim/harness.hpp"
#include "quadsim/robot_description.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <optional>

using namespace quadsim;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kDivergence = 3, kIo = 4 };

struct Options {
  std::string config_path;
  std::string output = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::string formats = "json,csv,svg,text";
  std::string experiment;
};

Config resolve(const Options& o) {
  Config c = o.config_path.empty() ? Config{} : load_config(o.config_path);
  if (o.seed) {
    c.seed = *o.seed;
    c.sim.imu.seed = *o.seed;
  }
  if (o.duration) {
    c.run.duration = *o.duration;
    if (o.experiment == "limb-ratio-kinematics") c.limb_ratio.duration = *o.duration;
  }
  require_valid(c);
  return c;
}

int emit(const TrialReport& report, const Options& o) {
  const auto formats = parse_formats(o.formats);
  for (const auto& f : emit_report(report, o.output, formats)) fmt::print("{}/{}\n", o.output, f);
  if (!report.complete) {
    for (const auto& n : report.notes) fmt::print(stderr, "note: {}\n", n);
    return kDivergence;
  }
  return kOk;
}

void add_common(CLI::App* cmd, Options& o, bool run_flags) {
  cmd->add_option("-c,--config", o.config_path, "YAML configuration file (defaults when omitted)");
  cmd->add_option("-o,--output", o.output, "Output directory");
  if (!run_flags) return;
  cmd->add_option("-s,--seed", o.seed, "Random seed override");
  cmd->add_option("-d,--duration", o.duration, "Trotting duration override, s");
  cmd->add_option("-f,--formats", o.formats, "Comma-separated output formats: json,csv,svg,text");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morphology-parametric quadruped simulator and experiment harness"};
  app.require_subcommand(1);
  Options o;

  auto* validate_cmd = app.add_subcommand("validate", "Check a configuration and report every violation");
  validate_cmd->add_option("-c,--config", o.config_path, "YAML configuration file")->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "Run a stand-then-trot trial and write telemetry");
  add_common(simulate_cmd, o, true);

  auto* experiment_cmd = app.add_subcommand("experiment", "Run a named experiment");
  experiment_cmd->add_option("id", o.experiment, "grf-validation | limb-ratio-kinematics | inertia-cot[-slow|-fast] | feasibility-map")
      ->required();
  add_common(experiment_cmd, o, true);

  auto* feasibility_cmd = app.add_subcommand("feasibility-map", "Limb-length feasibility across gear ratios");
  add_common(feasibility_cmd, o, true);

  auto* urdf_cmd = app.add_subcommand("export-urdf", "Write the robot description");
  add_common(urdf_cmd, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*validate_cmd) {
      Config c = load_config(o.config_path);
      const auto violations = validate(c);
      for (const auto& v : violations) fmt::print("{}: {}\n", v.field, v.rule);
      if (!violations.empty()) return kConfig;
      fmt::print("{}: valid\n", o.config_path);
      return kOk;
    }
    if (*simulate_cmd) {
      const Config c = resolve(o);
      const SimulationOutcome out = run_simulation(c);
      const int code = emit(out.report, o);
      if (out.trial.diverged) return kDivergence;
      return code == kDivergence ? kOther : code;
    }
    if (*experiment_cmd) return emit(run_experiment(resolve(o), o.experiment), o);
    if (*feasibility_cmd) return emit(run_experiment(resolve(o), "feasibility-map"), o);
    if (*urdf_cmd) {
      const Config c = resolve(o);
      const std::string path = o.output + "/robot.urdf";
      write_text_file(path, export_robot_description(c.morphology.body(), c.actuator));
      fmt::print("{}\n", path);
      return kOk;
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfig;
  } catch (const SimulationDivergedError& e) {
    fmt::print(stderr, "simulation diverged: {}\n", e.what());
    return kDivergence;
  } catch (const IoError& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kOther;
  }
  return kOther;
}
