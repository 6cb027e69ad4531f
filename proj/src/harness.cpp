#include "quadsim/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace quadsim {

namespace {

std::string fixed(double x, int digits = 2) {
  return std::isfinite(x) ? fmt::format("{:.{}f}", x, digits) : std::string("n/a");
}

// Hardware reference row order and names.
constexpr std::array<Leg, kNumLegs> kTableLegs{Leg::HR, Leg::HL, Leg::FR, Leg::FL};

std::string_view long_leg_name(Leg leg) {
  switch (leg) {
    case Leg::FR: return "Front Right";
    case Leg::FL: return "Front Left";
    case Leg::HR: return "Back Right";
    case Leg::HL: return "Back Left";
  }
  return "?";
}

constexpr std::array<const char*, 3> kAxisNames{"x", "y", "z"};

TrialReport start_report(std::string id, const Config& config) {
  TrialReport r = make_report(std::move(id), config);
  r.notes.push_back(fmt::format("assumed gait: trot period {} s, duty factor {}", format_number(config.gait.period),
                                format_number(config.gait.duty_factor)));
  return r;
}

TextTable rmse_table(std::string name, std::string title, const std::array<Vec3, kNumLegs>& values) {
  TextTable t{std::move(name), std::move(title), {"Leg", "3-link X", "3-link Y", "3-link Z"}, {}};
  for (Leg leg : kTableLegs) {
    const Vec3& v = values[index(leg)];
    t.rows.push_back({std::string(long_leg_name(leg)), fixed(v.x()), fixed(v.y()), fixed(v.z())});
  }
  return t;
}

}  // namespace

std::string ratio_label(double f) {
  return fmt::format("{}:{}", std::lround(100.0 * f), std::lround(100.0 * (1.0 - f)));
}

std::vector<std::string> experiment_ids() {
  return {"grf-validation", "limb-ratio-kinematics", "inertia-cot", "feasibility-map"};
}

TrialReport run_experiment(const Config& config, std::string_view id) {
  if (id == "grf-validation") return grf_validation_report(config, run_grf_validation(config));
  if (id == "limb-ratio-kinematics") return limb_ratio_report(config, run_limb_ratio_experiment(config));
  if (id == "feasibility-map") return feasibility_report(config, run_feasibility(config));
  if (id == "inertia-cot" || id == "inertia-cot-slow" || id == "inertia-cot-fast") {
    Config c = config;
    if (id != "inertia-cot") c.inertia_cot.profile = std::string(id);
    require_valid(c);
    return inertia_cot_report(c, run_inertia_cot_experiment(c));
  }
  std::string known;
  for (const auto& e : experiment_ids()) known += (known.empty() ? "" : ", ") + e;
  throw ConfigError(fmt::format("unknown experiment '{}' (expected one of {})", id, known));
}

// ---------------------------------------------------------------------------

TrialReport grf_validation_report(const Config& config, const GrfValidationResult& result) {
  TrialReport r = start_report("grf-validation", config);
  std::array<Vec3, kNumLegs> unc{}, cal{}, model{};
  bool calibrated_not_worse = true, z_largest = true;
  double model_max = 0.0;
  for (Leg leg : kAllLegs) {
    const LimbGrfError& e = result.limbs[index(leg)];
    unc[index(leg)] = e.uncalibrated;
    cal[index(leg)] = e.calibrated;
    model[index(leg)] = e.model;
    for (int a = 0; a < 3; ++a) {
      const std::string base = fmt::format("{}.{}", leg_name(leg), kAxisNames[a]);
      r.add_metric("rmse_uncalibrated." + base, e.uncalibrated(a), "N");
      r.add_metric("rmse_calibrated." + base, e.calibrated(a), "N");
      r.add_metric("rmse_model." + base, e.model(a), "N");
      r.add_metric("calibration." + base, e.calibration(a));
      calibrated_not_worse = calibrated_not_worse && e.calibrated(a) <= e.uncalibrated(a);
      model_max = std::max(model_max, e.model(a));
    }
    z_largest = z_largest && e.uncalibrated.z() > e.uncalibrated.x() && e.uncalibrated.z() > e.uncalibrated.y();
    r.add_metric(fmt::format("samples.{}", leg_name(leg)), static_cast<double>(e.samples));
  }
  r.add_metric("check.calibrated_not_worse", calibrated_not_worse ? 1.0 : 0.0);
  r.add_metric("check.z_largest_uncalibrated", z_largest ? 1.0 : 0.0);
  r.add_metric("rmse_model.max", model_max, "N");

  r.tables.push_back(rmse_table("rmse_uncalibrated", "GRF RMSE, serial-limb estimate without calibration (N)", unc));
  r.tables.push_back(rmse_table("rmse_calibrated", "GRF RMSE after per-axis calibration (N)", cal));
  r.tables.push_back(rmse_table("rmse_model", "GRF RMSE with exact limb dynamics (N)", model));
  r.tables.push_back(rmse_table("rmse_reference", "Hardware reference RMSE, for comparison only (N)", reference_grf_rmse()));

  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const TrialLog& log = result.runs[i];
    const std::string axis(axis_name(result.axes[i]));
    Plot plot{"grf_" + axis, fmt::format("Front right GRF during {} rotations", axis), "time (s)", "force (N)", {}, false};
    for (int a = 0; a < 3; ++a) {
      PlotSeries est{fmt::format("estimate {}", kAxisNames[a]), {}, {}, true, false};
      PlotSeries truth{fmt::format("ground truth {}", kAxisNames[a]), {}, {}, false, false};
      for (const LogRow& row : log.rows) {
        est.x.push_back(row.time);
        est.y.push_back(row.grf_estimated[index(Leg::FR)](a));
        truth.x.push_back(row.time);
        truth.y.push_back(row.grf_true[index(Leg::FR)](a));
      }
      plot.series.push_back(std::move(truth));
      plot.series.push_back(std::move(est));
    }
    r.plots.push_back(std::move(plot));

    std::string csv = "time";
    for (Leg leg : kAllLegs) {
      for (const char* kind : {"est", "model", "true"}) {
        for (const char* a : kAxisNames) csv += fmt::format(",{}_{}_{}", kind, leg_name(leg), a);
      }
    }
    csv += "\n";
    for (const LogRow& row : log.rows) {
      csv += format_number(row.time);
      for (int l = 0; l < kNumLegs; ++l) {
        for (const Vec3* f : {&row.grf_estimated[l], &row.grf_model[l], &row.grf_true[l]}) {
          for (int a = 0; a < 3; ++a) csv += "," + format_number((*f)(a));
        }
      }
      csv += "\n";
    }
    r.files.push_back({fmt::format("grf-validation_traces_{}.csv", axis), ReportFormat::Csv, std::move(csv)});
  }
  r.notes.push_back(fmt::format("{} rotations of {} deg at {} Hz per axis, each axis run separately from standing",
                                config.grf_validation.repetitions, format_number(config.grf_validation.amplitude),
                                format_number(config.grf_validation.frequency)));
  r.notes.push_back("forces are compared in the world frame; every foot is measured in every run");
  r.notes.push_back("calibration scales are fitted per limb by least squares on the same samples");
  r.notes.push_back("hardware reference values differ in magnitude; only the axis pattern is comparable");
  return r;
}

// ---------------------------------------------------------------------------

TrialReport limb_ratio_report(const Config& config, const LimbRatioResult& result) {
  TrialReport r = start_report("limb-ratio-kinematics", config);
  TextTable t{"descriptors",
              "Foot trajectory descriptors over the last stride (tibia:femur)",
              {"Ratio", "Fore peak (cm)", "Hind peak (cm)", "Fore excursion (cm)", "Hind excursion (cm)",
               "Fore asymmetry", "Hind asymmetry", "Max closure (mm)", "Speed (m/s)"},
              {}};
  Plot fore{"foot_paths_fore", "Fore foot path relative to the hip", "x from hip (cm)", "height (cm)", {}, true};
  Plot hind{"foot_paths_hind", "Hind foot path relative to the hip", "x from hip (cm)", "height (cm)", {}, true};
  std::string csv = "ratio,leg,time,x,y\n";
  double max_closure = 0.0;
  double best_fore = -1.0, best_hind = -1.0;
  std::string best_fore_label, best_hind_label;
  bool complete = true;
  for (const LimbRatioRun& run : result.runs) {
    const std::string label = ratio_label(run.tibia_fraction);
    if (!run.completed) {
      complete = false;
      r.notes.push_back(fmt::format("{}: gait unstable, descriptors omitted ({})", label, run.failure));
      t.rows.push_back({label, "n/a", "n/a", "n/a", "n/a", "n/a", "n/a", "n/a", "n/a"});
      continue;
    }
    const StrideDescriptors& d = run.descriptors;
    for (const auto& [leg, pd] : {std::pair<const char*, const PathDescriptors*>{"fore", &d.fore}, {"hind", &d.hind}}) {
      r.add_metric(fmt::format("peak_vertical.{}.{}", label, leg), pd->peak_vertical, "m");
      r.add_metric(fmt::format("horizontal_excursion.{}.{}", label, leg), pd->horizontal_excursion, "m");
      r.add_metric(fmt::format("asymmetry.{}.{}", label, leg), pd->asymmetry);
      r.add_metric(fmt::format("closure.{}.{}", label, leg), pd->closure, "m");
      max_closure = std::max(max_closure, pd->closure);
    }
    r.add_metric(fmt::format("mean_speed.{}", label), run.mean_speed, "m/s");
    if (d.fore.peak_vertical > best_fore) best_fore = d.fore.peak_vertical, best_fore_label = label;
    if (d.hind.peak_vertical > best_hind) best_hind = d.hind.peak_vertical, best_hind_label = label;
    t.rows.push_back({label, fixed(100 * d.fore.peak_vertical, 3), fixed(100 * d.hind.peak_vertical, 3),
                      fixed(100 * d.fore.horizontal_excursion, 3), fixed(100 * d.hind.horizontal_excursion, 3),
                      fixed(d.fore.asymmetry, 3), fixed(d.hind.asymmetry, 3),
                      fixed(1000 * std::max(d.fore.closure, d.hind.closure), 3), fixed(run.mean_speed, 3)});
    for (const auto& [leg, path, plot] :
         {std::tuple<const char*, const FootPath*, Plot*>{"fore", &run.paths.fore, &fore}, {"hind", &run.paths.hind, &hind}}) {
      PlotSeries s{label, {}, {}, false, false};
      for (std::size_t k = 0; k < path->points.size(); ++k) {
        s.x.push_back(100.0 * path->points[k].x());
        s.y.push_back(100.0 * path->points[k].y());
        csv += fmt::format("{},{},{},{},{}\n", label, leg, format_number(path->time[k]),
                           format_number(path->points[k].x()), format_number(path->points[k].y()));
      }
      plot->series.push_back(std::move(s));
    }
  }
  r.complete = complete;
  r.add_metric("closure.max", max_closure, "m");
  r.add_metric("check.fifty_fifty_max_peak", complete && best_fore_label == "50:50" && best_hind_label == "50:50" ? 1.0 : 0.0);
  r.tables.push_back(std::move(t));
  r.plots.push_back(std::move(fore));
  r.plots.push_back(std::move(hind));
  r.files.push_back({"limb-ratio-kinematics_paths.csv", ReportFormat::Csv, std::move(csv)});
  r.notes.push_back(config.limb_ratio.marker_offset
                        ? fmt::format("paths follow a tibia marker {} m above the foot", format_number(config.limb_ratio.marker_height))
                        : std::string("paths follow the foot contact point"));
  r.notes.push_back("x is measured from the hip in the heading frame; height is zero at the lowest point of the stride");
  r.notes.push_back("swing uses a fixed knee flexion with hip compensation, identical for every ratio");
  return r;
}

// ---------------------------------------------------------------------------

TrialReport inertia_cot_report(const Config& config, const InertiaCotResult& result) {
  TrialReport r = start_report("inertia-cot", config);
  const std::array<Payload, 3> payloads{Payload::None, Payload::Femur, Payload::Tibia};
  const auto& seeds = config.inertia_cot.seeds;
  struct Means {
    double cot_imu = 0, cot_truth = 0, speed_imu = 0, speed_truth = 0, mass = 0;
    PowerSummary power;
    int n = 0;
  };
  std::array<Means, 3> means{};
  bool complete = true;
  for (int k = 0; k < 3; ++k) {
    Means& m = means[k];
    for (std::uint64_t seed : seeds) {
      const CotRun& run = result.run(payloads[k], seed);
      if (!run.completed) {
        complete = false;
        r.notes.push_back(fmt::format("{} seed {}: {}", payload_name(run.payload), seed, run.failure));
        continue;
      }
      const std::string base = fmt::format("{}.seed{}", payload_name(run.payload), seed);
      r.add_metric("cot_imu." + base, run.cot_imu);
      r.add_metric("cot_truth." + base, run.cot_truth);
      m.cot_imu += run.cot_imu;
      m.cot_truth += run.cot_truth;
      m.speed_imu += run.speed_imu;
      m.speed_truth += run.speed_truth;
      m.mass = run.total_mass;
      m.power.peak_power += run.power.peak_power;
      m.power.mean_power += run.power.mean_power;
      m.power.peak_torque += run.power.peak_torque;
      m.power.mean_torque += run.power.mean_torque;
      ++m.n;
    }
    if (m.n > 0) {
      const double n = m.n;
      m.cot_imu /= n, m.cot_truth /= n, m.speed_imu /= n, m.speed_truth /= n;
      m.power.peak_power /= n, m.power.mean_power /= n, m.power.peak_torque /= n, m.power.mean_torque /= n;
    }
  }
  for (int k = 0; k < 3; ++k) {
    const std::string v(payload_name(payloads[k]));
    const Means& m = means[k];
    r.add_metric("cot_imu." + v, m.cot_imu);
    r.add_metric("cot_truth." + v, m.cot_truth);
    r.add_metric("peak_power." + v, m.power.peak_power, "W");
    r.add_metric("mean_power." + v, m.power.mean_power, "W");
    r.add_metric("peak_torque." + v, m.power.peak_torque, "N*m");
    r.add_metric("mean_torque." + v, m.power.mean_torque, "N*m");
    r.add_metric("speed_imu." + v, m.speed_imu, "m/s");
    r.add_metric("speed_truth." + v, m.speed_truth, "m/s");
    r.add_metric("total_mass." + v, m.mass, "kg");
    r.add_metric("moi_analytic." + v, result.moi_analytic[k], "kg*m^2");
    r.add_metric("moi_pendulum." + v, result.moi_pendulum[k], "kg*m^2");
  }
  auto strictly_ordered = [&](auto field) {
    if (!complete) return false;
    for (std::uint64_t seed : seeds) {
      const double a = field(result.run(Payload::None, seed));
      const double b = field(result.run(Payload::Femur, seed));
      const double c = field(result.run(Payload::Tibia, seed));
      if (!(a < b && b < c)) return false;
    }
    return true;
  };
  r.add_metric("check.cot_ordering_imu", strictly_ordered([](const CotRun& x) { return x.cot_imu; }) ? 1.0 : 0.0);
  r.add_metric("check.cot_ordering_truth", strictly_ordered([](const CotRun& x) { return x.cot_truth; }) ? 1.0 : 0.0);
  r.add_metric("moi_increase.tibia_over_femur", result.moi_analytic[2] / result.moi_analytic[1] - 1.0);
  r.add_metric("analysis_samples", static_cast<double>(config.inertia_cot.analysis_samples));
  r.complete = complete;

  const CotProfile& prof = result.profile;
  const std::string what = prof.distance > 0.0
                               ? fmt::format("{} m at {} m/s", format_number(prof.distance), format_number(prof.speed))
                               : fmt::format("{} s at {} m/s", format_number(prof.duration), format_number(prof.speed));
  TextTable t2{"performance", fmt::format("Trotting performance, {} (sum of all motors, mean of {} seeds)", what, seeds.size()),
               {"", "Unloaded", "Femur", "Tibia"}, {}};
  auto row = [&](std::string name, auto get, int digits) {
    std::vector<std::string> cells{std::move(name)};
    for (const Means& m : means) cells.push_back(fixed(get(m), digits));
    t2.rows.push_back(std::move(cells));
  };
  row("Peak Power (W)", [](const Means& m) { return m.power.peak_power; }, 2);
  row("Mean Power (W)", [](const Means& m) { return m.power.mean_power; }, 2);
  row("Peak Torque (Nm)", [](const Means& m) { return m.power.peak_torque; }, 2);
  row("Mean Torque (Nm)", [](const Means& m) { return m.power.mean_torque; }, 2);
  row("Cost of Transport", [](const Means& m) { return m.cot_imu; }, 3);
  row("Cost of Transport (ground-truth speed)", [](const Means& m) { return m.cot_truth; }, 3);
  r.tables.push_back(std::move(t2));

  const CotReference ref;
  TextTable tr{"performance_reference", "Hardware reference, for ordering comparison only", {"", "Unloaded", "Femur", "Tibia"}, {}};
  auto ref_row = [&](std::string name, const std::array<double, 3>& v) {
    tr.rows.push_back({std::move(name), fixed(v[0]), fixed(v[1]), fixed(v[2])});
  };
  ref_row("Peak Power (W)", ref.peak_power);
  ref_row("Mean Power (W)", ref.mean_power);
  ref_row("Peak Torque (Nm)", ref.peak_torque);
  ref_row("Mean Torque (Nm)", ref.mean_torque);
  ref_row("Cost of Transport", ref.cot);
  r.tables.push_back(std::move(tr));

  TextTable moi{"inertia", "Limb moment of inertia about the hip (kg m^2)", {"", "Unloaded", "Femur", "Tibia"}, {}};
  moi.rows.push_back({"Analytic", fixed(result.moi_analytic[0], 5), fixed(result.moi_analytic[1], 5), fixed(result.moi_analytic[2], 5)});
  moi.rows.push_back({"Pendulum", fixed(result.moi_pendulum[0], 5), fixed(result.moi_pendulum[1], 5), fixed(result.moi_pendulum[2], 5)});
  r.tables.push_back(std::move(moi));

  TextTable runs{"runs", "Individual runs", {"Variant", "Seed", "COT", "COT (truth)", "Speed (m/s)", "Speed truth (m/s)", "Mean power (W)"}, {}};
  Plot plot{"cot_by_seed", "Cost of transport by seed", "seed", "cost of transport", {}, false};
  for (int k = 0; k < 3; ++k) {
    PlotSeries s{std::string(payload_name(payloads[k])), {}, {}, false, false};
    for (std::uint64_t seed : seeds) {
      const CotRun& run = result.run(payloads[k], seed);
      runs.rows.push_back({std::string(payload_name(run.payload)), std::to_string(seed),
                           run.completed ? fixed(run.cot_imu, 4) : "failed", fixed(run.cot_truth, 4),
                           fixed(run.speed_imu, 4), fixed(run.speed_truth, 4), fixed(run.power.mean_power)});
      if (!run.completed) continue;
      s.x.push_back(static_cast<double>(seed));
      s.y.push_back(run.cot_imu);
    }
    plot.series.push_back(std::move(s));
  }
  r.tables.push_back(std::move(runs));
  r.plots.push_back(std::move(plot));
  r.notes.push_back(fmt::format("profile {}: {}; analysis over the last {} logged samples of each run", prof.name, what,
                                config.inertia_cot.analysis_samples));
  r.notes.push_back(fmt::format("payload {} kg per limb at the femur or tibia midpoint", format_number(config.inertia_cot.added_mass)));
  r.notes.push_back("speed is the mean Euclidean norm of the IMU-integrated velocity; ground-truth speed shown alongside");
  r.notes.push_back("power peaks are taken of the summed instantaneous series");
  r.notes.push_back("seeds vary IMU noise and the initial pose perturbation");
  return r;
}

// ---------------------------------------------------------------------------

TrialReport feasibility_report(const Config& config, const FeasibilityResult& result) {
  TrialReport r = start_report("feasibility-map", config);
  TextTable t{"feasibility", "Feasible femur x tibia lengths under the swing task",
              {"Gear ratio", "Torque limit (Nm)", "Speed limit (rad/s)", "Feasible cells", "Total cells"}, {}};
  Plot plot{"feasibility", "Feasible limb lengths", "femur length (m)", "tibia length (m)", {}, true};
  for (const FeasibilityMap& m : result.maps) {
    const std::string g = format_number(m.gear_ratio);
    r.add_metric(fmt::format("feasible_cells.{}", g), m.feasible_count());
    t.rows.push_back({g + ":1", fixed(m.torque_limit), fixed(m.speed_limit), std::to_string(m.feasible_count()),
                      std::to_string(m.cells.size())});
    r.files.push_back({fmt::format("feasibility-map_{}.csv", g), ReportFormat::Csv, m.to_csv()});
  }
  r.add_metric("total_cells", result.maps.empty() ? 0.0 : static_cast<double>(result.maps.front().cells.size()));
  std::vector<const FeasibilityMap*> sorted;
  for (const auto& m : result.maps) sorted.push_back(&m);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->gear_ratio > b->gear_ratio; });
  for (const FeasibilityMap* m : sorted) {
    PlotSeries s{fmt::format("{}:1 feasible", format_number(m->gear_ratio)), {}, {}, false, true};
    for (const FeasibilityCell& c : m->cells) {
      if (!c.feasible) continue;
      s.x.push_back(c.femur);
      s.y.push_back(c.tibia);
    }
    plot.series.push_back(std::move(s));
  }
  bool nested = sorted.size() >= 2;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) nested = nested && strictly_contains(*sorted[i], *sorted[i + 1]);
  r.add_metric("check.strict_containment", nested ? 1.0 : 0.0);
  r.tables.push_back(std::move(t));
  r.plots.push_back(std::move(plot));
  r.notes.push_back(fmt::format("assumed motor limits {} N*m and {} rad/s, identical for every gear ratio",
                                format_number(config.actuator.motor_torque_limit()),
                                format_number(config.actuator.motor_speed_limit())));
  r.notes.push_back(fmt::format("assumed swing: hip sweep of {} rad at {} Hz with the knee held at {} rad; link masses scale with length",
                                format_number(config.feasibility.swing.amplitude),
                                format_number(config.feasibility.swing.frequency),
                                format_number(config.feasibility.swing.knee_angle)));
  r.notes.push_back("rotor inertia is excluded from the swing torque");
  return r;
}

// ---------------------------------------------------------------------------

SimulationOutcome run_simulation(const Config& config) {
  SimulationOutcome out;
  const TrialSpec spec = trial_spec(config);
  out.trial = run_trial(spec);
  const TrialLog& log = out.trial.log;
  TrialReport& r = out.report;
  r = start_report("simulate", config);
  r.complete = out.trial.completed;
  if (!out.trial.completed) r.notes.push_back(out.trial.failure);
  r.add_metric("completed", out.trial.completed ? 1.0 : 0.0);
  r.add_metric("total_mass", out.trial.total_mass, "kg");
  r.add_metric("samples", static_cast<double>(log.size()));
  if (!log.empty()) {
    const LogRow& last = log.rows.back();
    r.add_metric("final_time", last.time, "s");
    r.add_metric("distance", last.position.head<2>().norm(), "m");
    double max_tilt = 0.0;
    for (const LogRow& row : log.rows) {
      const Vec3 up = row.orientation * Vec3::UnitZ();
      max_tilt = std::max(max_tilt, std::acos(std::clamp(up.z(), -1.0, 1.0)));
    }
    r.add_metric("max_tilt", max_tilt, "rad");
    std::size_t first = 0;
    while (first < log.size() && log.rows[first].time <= spec.settle_time + 1e-12) ++first;
    if (first < log.size()) {
      const TrialLog gait = log.slice(first, log.size() - first);
      const PowerSummary p = summarize_power(gait);
      r.add_metric("speed_truth", mean_speed(gait, SpeedSource::GroundTruth), "m/s");
      r.add_metric("speed_imu", mean_speed(gait, SpeedSource::Imu), "m/s");
      r.add_metric("peak_power", p.peak_power, "W");
      r.add_metric("mean_power", p.mean_power, "W");
      r.add_metric("peak_torque", p.peak_torque, "N*m");
      r.add_metric("mean_torque", p.mean_torque, "N*m");
      if (mean_speed(gait, SpeedSource::GroundTruth) > 0.0) {
        r.add_metric("cot_truth", compute_cot(gait, out.trial.total_mass, SpeedSource::GroundTruth, spec.sim.gravity));
      }
      if (mean_speed(gait, SpeedSource::Imu) > 0.0) {
        r.add_metric("cot_imu", compute_cot(gait, out.trial.total_mass, SpeedSource::Imu, spec.sim.gravity));
      }
    }
  }
  Plot speed{"speed", "Trunk speed", "time (s)", "speed (m/s)", {}, false};
  Plot power{"power", "Summed actuator power", "time (s)", "power (W)", {}, false};
  PlotSeries truth{"ground truth", {}, {}, false, false}, imu{"IMU integrated", {}, {}, true, false};
  PlotSeries pw{"total clamped power", {}, {}, false, false};
  for (const LogRow& row : log.rows) {
    truth.x.push_back(row.time);
    truth.y.push_back(row.linear_velocity.norm());
    imu.x.push_back(row.time);
    imu.y.push_back(row.imu_speed);
    pw.x.push_back(row.time);
    pw.y.push_back(row.total_power);
  }
  speed.series = {std::move(truth), std::move(imu)};
  power.series = {std::move(pw)};
  r.plots = {std::move(speed), std::move(power)};
  std::ostringstream csv, jsonl;
  write_csv(log, csv);
  write_jsonl(log, jsonl);
  r.files.push_back({"telemetry.csv", ReportFormat::Csv, csv.str()});
  r.files.push_back({"telemetry.jsonl", ReportFormat::Json, jsonl.str()});
  r.notes.push_back(fmt::format("contact: penalty spring {} N/m, damper {} N*s/m, friction {}",
                                format_number(spec.sim.contact.stiffness), format_number(spec.sim.contact.damping),
                                format_number(spec.sim.contact.mu)));
  return out;
}

}  // namespace quadsim
