#include "quadsim/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>

namespace quadsim {

namespace {

int ticks(double period, double dt) { return std::max(1, static_cast<int>(std::lround(period / dt))); }

Mat3 heading(const Mat3& R) { return rotation_exp(Vec3(0.0, 0.0, std::atan2(R(1, 0), R(0, 0)))); }

Vec3 nan3() { return Vec3::Constant(std::numeric_limits<double>::quiet_NaN()); }

template <class T, class F>
std::vector<T> run_parallel(std::size_t n, F&& job) {
  std::vector<std::future<T>> futures;
  futures.reserve(n);
  for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, job, i));
  std::vector<T> out;
  out.reserve(n);
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Trials

RobotState standing_state(const Controller& controller) {
  RobotState s;
  s.q = controller.standing_joint_angles();
  s.position = Vec3(0.0, 0.0, controller.params().ground_height + controller.params().stand_height);
  return s;
}

TrialSpec trial_spec(const Config& c) {
  TrialSpec t;
  t.body = c.morphology.body();
  t.actuator = c.actuator;
  t.sim = c.sim;
  t.gait = c.gait;
  t.controller = c.controller;
  t.speed = c.run.speed;
  t.settle_time = c.run.settle_time;
  t.duration = c.run.duration;
  t.log_rate = c.run.log_rate;
  t.seed = c.seed;
  return t;
}

LogRow make_log_row(const World& world) {
  const RobotState& s = world.state();
  const RobotState& s0 = world.step_start_state();
  const Mat3 R0 = s0.rotation();
  LogRow r;
  r.time = s.time;
  r.position = s.position;
  r.orientation = s.orientation;
  r.linear_velocity = s.linear_velocity;
  r.angular_velocity = s.angular_velocity;
  r.q = s.q;
  r.qd = s.qd;
  r.tau = world.joint_torques();
  const Vec12 tau_free = world.free_limb_torques();
  for (Leg leg : kAllLegs) {
    const int l = index(leg);
    const LimbMorphology& limb = world.body().limbs[l];
    const JointAngles angles = s0.leg_angles(leg);
    const Vec3 tau = r.tau.segment<3>(3 * l);
    try {
      r.grf_estimated[l] = R0 * estimate_grf(limb, angles, -tau, Vec3::Ones(), side_of(leg)).force;
      r.grf_model[l] =
          R0 * estimate_grf(limb, angles, tau_free.segment<3>(3 * l) - tau, Vec3::Ones(), side_of(leg)).force;
    } catch (const SingularConfigurationError&) {
      r.grf_estimated[l] = nan3();
      r.grf_model[l] = nan3();
    }
    r.grf_true[l] = world.contacts()[l].force;
    r.contact[l] = world.contacts()[l].in_contact;
  }
  const auto power = world.power_samples();
  for (int j = 0; j < 12; ++j) r.power(j) = power[j].clamped;
  r.total_power = r.power.sum();
  r.total_abs_torque = r.tau.cwiseAbs().sum();
  const ImuSample imu = world.imu_read();
  r.imu_accel = imu.accel;
  r.imu_gyro = imu.gyro;
  return r;
}

TrialResult run_trial(const TrialSpec& spec) {
  World world(spec.body, spec.actuator, spec.sim);
  Controller controller(spec.body, spec.actuator, spec.gait, spec.controller);
  RobotState start = standing_state(controller);
  if (spec.initial_perturbation > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u(-spec.initial_perturbation, spec.initial_perturbation);
    for (int j = 0; j < 12; ++j) start.q(j) += u(rng);
    for (int a = 0; a < 3; ++a) start.position(a) += 0.2 * u(rng);
  }
  world.reset(start);
  controller.set_mode(ControlMode::Trot, spec.settle_time);

  const double dt = spec.sim.dt;
  const int control_every = ticks(spec.controller.control_period, dt);
  const int log_every = ticks(1.0 / spec.log_rate, dt);
  const long steps = std::lround((spec.settle_time + spec.duration) / dt);
  const Vec3 command(spec.speed, 0.0, 0.0);

  TrialResult out;
  out.total_mass = world.total_mass();
  out.log.sample_period = log_every * dt;
  std::vector<ImuSample> imu;
  imu.reserve(static_cast<std::size_t>(steps));
  std::vector<std::size_t> logged;
  Vec3 first_velocity = Vec3::Zero();
  Mat3 first_orientation = Mat3::Identity();
  JointCommands cmd{};
  try {
    for (long i = 0; i < steps; ++i) {
      if (i % control_every == 0) cmd = controller.control_tick(world.state(), command).joints;
      world.step(cmd);
      if (i == 0) {
        first_velocity = world.state().linear_velocity;
        first_orientation = world.state().rotation();
      }
      imu.push_back(world.imu_read());
      if ((i + 1) % log_every == 0) {
        out.log.rows.push_back(make_log_row(world));
        logged.push_back(imu.size() - 1);
      }
    }
  } catch (const SimulationDivergedError& e) {
    out.completed = false;
    out.diverged = true;
    out.failure = fmt::format("simulation diverged: {}", e.what());
  } catch (const Error& e) {
    out.completed = false;
    out.failure = fmt::format("controller failure at t = {}: {}", format_number(world.state().time), e.what());
  }
  if (imu.size() >= 2) {
    const SpeedTrace trace = integrate_velocity(imu, first_velocity, first_orientation, spec.sim.gravity);
    for (std::size_t k = 0; k < logged.size(); ++k) out.log.rows[k].imu_speed = trace.speed[logged[k]];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

double mean_speed(const TrialLog& log, SpeedSource source) {
  if (log.empty()) throw DegenerateInputError("mean_speed: empty log");
  double sum = 0.0;
  for (const LogRow& r : log.rows) sum += source == SpeedSource::Imu ? r.imu_speed : r.linear_velocity.norm();
  return sum / static_cast<double>(log.size());
}

double compute_cot(const TrialLog& log, double total_mass, SpeedSource source, double gravity) {
  if (log.empty()) throw DegenerateInputError("compute_cot: empty log");
  if (!(total_mass > 0.0) || !(gravity > 0.0)) throw DegenerateInputError("compute_cot: mass and gravity must be positive");
  const double v = mean_speed(log, source);
  if (!(v > 0.0)) throw DegenerateInputError("compute_cot: mean speed is zero");
  return summarize_power(log).mean_power / (total_mass * gravity * v);
}

PowerSummary summarize_power(const TrialLog& log) {
  if (log.empty()) throw DegenerateInputError("summarize_power: empty log");
  PowerSummary s;
  for (const LogRow& r : log.rows) {
    s.peak_power = std::max(s.peak_power, r.total_power);
    s.peak_torque = std::max(s.peak_torque, r.total_abs_torque);
    s.mean_power += r.total_power;
    s.mean_torque += r.total_abs_torque;
  }
  s.mean_power /= static_cast<double>(log.size());
  s.mean_torque /= static_cast<double>(log.size());
  return s;
}

Vec3 rmse(const std::vector<Vec3>& estimate, const std::vector<Vec3>& reference) {
  if (estimate.size() != reference.size()) throw DegenerateInputError("rmse: size mismatch");
  if (estimate.empty()) throw DegenerateInputError("rmse: no samples");
  Vec3 sum = Vec3::Zero();
  for (std::size_t k = 0; k < estimate.size(); ++k) sum += (estimate[k] - reference[k]).cwiseAbs2();
  return (sum / static_cast<double>(estimate.size())).cwiseSqrt();
}

// ---------------------------------------------------------------------------
// Rotation protocol and GRF validation

std::string_view axis_name(RotationAxis axis) {
  switch (axis) {
    case RotationAxis::Roll: return "roll";
    case RotationAxis::Pitch: return "pitch";
    case RotationAxis::Yaw: return "yaw";
  }
  return "?";
}

RotationAxis axis_from_name(std::string_view name) {
  for (RotationAxis a : {RotationAxis::Roll, RotationAxis::Pitch, RotationAxis::Yaw}) {
    if (axis_name(a) == name) return a;
  }
  throw ConfigError(fmt::format("unknown rotation axis '{}'", name));
}

TrialLog run_rotation_protocol(World& world, Controller& controller, RotationAxis axis, const RotationSpec& spec) {
  if (!(spec.amplitude >= 0.0) || !(spec.frequency > 0.0) || spec.repetitions < 1 || !(spec.log_rate > 0.0)) {
    throw DegenerateInputError("run_rotation_protocol: invalid protocol parameters");
  }
  const double dt = world.params().dt;
  const int control_every = ticks(controller.params().control_period, dt);
  const int log_every = ticks(1.0 / spec.log_rate, dt);
  const Vec3 unit = axis == RotationAxis::Roll ? Vec3::UnitX() : axis == RotationAxis::Pitch ? Vec3::UnitY() : Vec3::UnitZ();

  controller.set_mode(ControlMode::Stand);
  const Mat3 base = heading(world.state().rotation());
  controller.set_desired_orientation(base);
  JointCommands cmd{};
  const long settle = std::lround(spec.settle_time / dt);
  for (long i = 0; i < settle; ++i) {
    if (i % control_every == 0) cmd = controller.control_tick(world.state(), Vec3::Zero()).joints;
    world.step(cmd);
  }

  TrialLog log;
  log.sample_period = log_every * dt;
  const double t0 = world.state().time;
  const long steps = std::lround(spec.repetitions / spec.frequency / dt);
  for (long i = 0; i < steps; ++i) {
    if (i % control_every == 0) {
      const double t = world.state().time - t0;
      const double angle = spec.amplitude * std::sin(2.0 * std::numbers::pi * spec.frequency * t);
      controller.set_desired_orientation(base * rotation_exp(angle * unit));
      cmd = controller.control_tick(world.state(), Vec3::Zero()).joints;
    }
    world.step(cmd);
    for (Leg leg : kAllLegs) {
      const double fz = world.contacts()[index(leg)].force.z();
      if (fz < spec.min_contact_force) {
        throw ProtocolAbortedError(fmt::format("{} rotation: {} foot lost stance at t = {} s (fz = {} N)",
                                               axis_name(axis), leg_name(leg),
                                               format_number(world.state().time), format_number(fz)));
      }
    }
    if ((i + 1) % log_every == 0) log.rows.push_back(make_log_row(world));
  }
  return log;
}

std::array<LimbGrfError, kNumLegs> grf_errors(const std::vector<TrialLog>& runs) {
  std::array<LimbGrfError, kNumLegs> out{};
  for (int l = 0; l < kNumLegs; ++l) {
    std::vector<Vec3> est, model, truth;
    for (const TrialLog& log : runs) {
      for (const LogRow& r : log.rows) {
        if (!r.grf_estimated[l].allFinite() || !r.grf_model[l].allFinite()) continue;
        est.push_back(r.grf_estimated[l]);
        model.push_back(r.grf_model[l]);
        truth.push_back(r.grf_true[l]);
      }
    }
    std::vector<std::pair<Vec3, Vec3>> pairs;
    pairs.reserve(est.size());
    for (std::size_t k = 0; k < est.size(); ++k) pairs.emplace_back(est[k], truth[k]);
    LimbGrfError& e = out[l];
    e.samples = est.size();
    e.calibration = calibrate_axes(pairs);
    std::vector<Vec3> calibrated(est.size());
    for (std::size_t k = 0; k < est.size(); ++k) calibrated[k] = e.calibration.cwiseProduct(est[k]);
    e.uncalibrated = rmse(est, truth);
    e.calibrated = rmse(calibrated, truth);
    e.model = rmse(model, truth);
  }
  return out;
}

GrfValidationResult run_grf_validation(const Config& config) {
  const GrfValidationPreset& p = config.grf_validation;
  RotationSpec spec;
  spec.amplitude = p.amplitude * std::numbers::pi / 180.0;
  spec.frequency = p.frequency;
  spec.repetitions = p.repetitions;
  spec.settle_time = p.settle_time;
  spec.min_contact_force = p.min_contact_force;
  spec.log_rate = config.run.log_rate;

  GrfValidationResult out;
  for (const std::string& a : p.axes) out.axes.push_back(axis_from_name(a));
  const BodyMorphology body = config.morphology.body();
  out.runs = run_parallel<TrialLog>(out.axes.size(), [&](std::size_t i) {
    World world(body, config.actuator, config.sim);
    Controller controller(body, config.actuator, config.gait, config.controller);
    world.reset(standing_state(controller));
    return run_rotation_protocol(world, controller, out.axes[i], spec);
  });
  out.limbs = grf_errors(out.runs);
  return out;
}

std::array<Vec3, kNumLegs> reference_grf_rmse() {
  return {Vec3(1.83, 2.83, 11.15), Vec3(1.29, 1.67, 6.84), Vec3(1.47, 2.51, 6.46), Vec3(2.86, 1.44, 5.49)};
}

// ---------------------------------------------------------------------------
// Limb ratio

PathDescriptors describe_path(const FootPath& stride) {
  const auto& p = stride.points;
  if (p.size() < 2) throw DegenerateInputError("describe_path: need at least two points");
  double xmin = p[0].x(), xmax = p[0].x(), ymin = p[0].y(), ymax = p[0].y();
  std::size_t apex = 0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    xmin = std::min(xmin, p[k].x());
    xmax = std::max(xmax, p[k].x());
    ymin = std::min(ymin, p[k].y());
    if (p[k].y() > ymax) ymax = p[k].y(), apex = k;
  }
  PathDescriptors d;
  d.peak_vertical = ymax - ymin;
  d.horizontal_excursion = xmax - xmin;
  d.asymmetry = d.horizontal_excursion > 0.0 ? (p[apex].x() - 0.5 * (xmin + xmax)) / d.horizontal_excursion : 0.0;
  d.closure = (p.back() - p.front()).norm();
  return d;
}

StrideDescriptors describe_stride(const StridePaths& paths) {
  return {describe_path(paths.fore), describe_path(paths.hind)};
}

StridePaths swap_fore_hind(const StridePaths& paths) { return {paths.hind, paths.fore}; }

FootPath stride_path(const TrialLog& log, const BodyMorphology& body, Leg leg, double period,
                     std::optional<double> marker_height) {
  const auto n = static_cast<std::size_t>(std::lround(period / log.sample_period));
  if (n < 2 || log.size() < n + 1) throw DegenerateInputError("stride_path: log shorter than one stride");
  const TrialLog stride = log.tail(n + 1);
  const LimbMorphology& limb = body.limbs[index(leg)];
  LimbMorphology knee_probe = limb;
  knee_probe.l3 = 0.0;
  const Vec3& hip = body.hip_positions[index(leg)];
  FootPath out;
  std::vector<double> height;
  for (const LogRow& r : stride.rows) {
    const JointAngles q = JointAngles::from_vector(r.q.segment<3>(3 * index(leg)));
    Vec3 point = forward_kinematics(limb, q, side_of(leg));
    if (marker_height) {
      const Vec3 knee = forward_kinematics(knee_probe, q, side_of(leg));
      point += *marker_height * (knee - point).normalized();
    }
    const Mat3 R = r.orientation.toRotationMatrix();
    const Vec3 rel = heading(R).transpose() * (R * point);
    out.time.push_back(r.time);
    out.points.emplace_back(rel.x(), 0.0);
    height.push_back(r.position.z() + (R * (hip + point)).z());
  }
  const double ground = *std::min_element(height.begin(), height.end());
  for (std::size_t k = 0; k < height.size(); ++k) out.points[k].y() = height[k] - ground;
  return out;
}

LimbRatioResult run_limb_ratio_experiment(const Config& config) {
  const LimbRatioPreset& p = config.limb_ratio;
  LimbRatioResult out;
  out.runs = run_parallel<LimbRatioRun>(p.tibia_fractions.size(), [&](std::size_t i) {
    LimbRatioRun run;
    run.tibia_fraction = p.tibia_fractions[i];
    TrialSpec spec = trial_spec(config);
    for (auto& limb : spec.body.limbs) limb.set_ratio(p.total_length, run.tibia_fraction);
    run.limb = spec.body.limbs[0];
    spec.controller.swing_mode = SwingMode::KneeLift;
    spec.controller.knee_lift = p.knee_lift;
    spec.speed = p.speed;
    spec.duration = p.duration;
    const TrialResult trial = run_trial(spec);
    run.completed = trial.completed;
    run.failure = trial.failure;
    if (!trial.completed) return run;
    const std::optional<double> marker = p.marker_offset ? std::optional<double>(p.marker_height) : std::nullopt;
    run.paths.fore = stride_path(trial.log, spec.body, Leg::FR, spec.gait.period, marker);
    run.paths.hind = stride_path(trial.log, spec.body, Leg::HR, spec.gait.period, marker);
    run.descriptors = describe_stride(run.paths);
    run.mean_speed = mean_speed(trial.log.tail(run.paths.fore.time.size()), SpeedSource::GroundTruth);
    return run;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Inertia and cost of transport

std::string_view payload_name(Payload p) {
  switch (p) {
    case Payload::None: return "unloaded";
    case Payload::Femur: return "femur-loaded";
    case Payload::Tibia: return "tibia-loaded";
  }
  return "?";
}

LimbMorphology with_payload(const LimbMorphology& limb, Payload p, double mass) {
  LimbMorphology out = limb;
  out.added_mass.reset();
  if (p == Payload::Femur) out.added_mass = AddedMass{mass, kFemur, 0.5 * limb.l2};
  if (p == Payload::Tibia) out.added_mass = AddedMass{mass, kTibia, 0.5 * limb.l3};
  return out;
}

const CotRun& InertiaCotResult::run(Payload p, std::uint64_t seed) const {
  for (const CotRun& r : runs) {
    if (r.payload == p && r.seed == seed) return r;
  }
  throw DegenerateInputError(fmt::format("no {} run for seed {}", payload_name(p), seed));
}

InertiaCotResult run_inertia_cot_experiment(const Config& config) {
  const InertiaCotPreset& p = config.inertia_cot;
  InertiaCotResult out;
  out.profile = p.selected();
  const double speed = out.profile.speed;
  const double cruise = out.profile.distance > 0.0 ? out.profile.distance / speed : out.profile.duration;
  const double ramp = speed / config.controller.max_acceleration;
  const std::array<Payload, 3> payloads{Payload::None, Payload::Femur, Payload::Tibia};

  for (int k = 0; k < 3; ++k) {
    const LimbMorphology limb = with_payload(config.morphology.limb, payloads[k], p.added_mass);
    out.moi_analytic[k] = moment_of_inertia_about_hip(limb);
    out.moi_pendulum[k] = pendulum_moi(limb).inertia;
  }

  out.runs = run_parallel<CotRun>(3 * p.seeds.size(), [&](std::size_t i) {
    CotRun run;
    run.payload = payloads[i / p.seeds.size()];
    run.seed = p.seeds[i % p.seeds.size()];
    TrialSpec spec = trial_spec(config);
    for (auto& limb : spec.body.limbs) limb = with_payload(limb, run.payload, p.added_mass);
    spec.speed = speed;
    spec.duration = ramp + cruise;
    spec.seed = run.seed;
    spec.initial_perturbation = p.initial_perturbation;
    spec.sim.imu.seed = run.seed;
    spec.sim.imu.accel_noise = p.accel_noise;
    spec.sim.imu.gyro_noise = p.gyro_noise;
    const TrialResult trial = run_trial(spec);
    run.total_mass = trial.total_mass;
    run.completed = trial.completed;
    run.failure = trial.failure;
    if (!trial.completed) return run;
    const TrialLog window = trial.log.tail(static_cast<std::size_t>(p.analysis_samples));
    run.samples = window.size();
    run.speed_imu = mean_speed(window, SpeedSource::Imu);
    run.speed_truth = mean_speed(window, SpeedSource::GroundTruth);
    run.cot_imu = compute_cot(window, run.total_mass, SpeedSource::Imu, spec.sim.gravity);
    run.cot_truth = compute_cot(window, run.total_mass, SpeedSource::GroundTruth, spec.sim.gravity);
    run.power = summarize_power(window);
    return run;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Feasibility

bool strictly_contains(const FeasibilityMap& outer, const FeasibilityMap& inner) {
  return inner.subset_of(outer) && outer.feasible_count() > inner.feasible_count();
}

FeasibilityResult run_feasibility(const Config& config) {
  const FeasibilityPreset& p = config.feasibility;
  FeasibilityResult out;
  out.maps = run_parallel<FeasibilityMap>(p.gear_ratios.size(), [&](std::size_t i) {
    return feasibility_map(config.actuator.with_gear_ratio(p.gear_ratios[i]), config.morphology.limb, p.swing, p.grid);
  });
  return out;
}

}  // namespace quadsim
