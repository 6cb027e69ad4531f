// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "quadsim/harness.hpp"

#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

using namespace quadsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

LimbMorphology random_limb(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> len(0.05, 0.4), mass(0.05, 0.6), frac(0.1, 0.9);
  LimbMorphology limb;
  limb.config = std::bernoulli_distribution(0.3)(rng) ? LimbConfig::FourLink : LimbConfig::ThreeLink;
  limb.knee_direction = std::bernoulli_distribution(0.5)(rng) ? KneeDirection::Backward : KneeDirection::Forward;
  limb.l1 = len(rng);
  limb.l2 = len(rng);
  limb.l3 = len(rng);
  limb.l4 = limb.config == LimbConfig::FourLink ? 0.5 * len(rng) : 0.1 * len(rng);
  for (int i = 0; i < kNumLinks; ++i) {
    limb.link_masses[i] = (i == kTarsus && limb.config == LimbConfig::ThreeLink) ? 0.0 : mass(rng);
    limb.link_com_offsets[i] = frac(rng) * limb.length(i);
  }
  if (std::bernoulli_distribution(0.5)(rng)) {
    const int link = std::bernoulli_distribution(0.5)(rng) ? kFemur : kTibia;
    limb.added_mass = AddedMass{0.5, link, frac(rng) * limb.length(link)};
  }
  return limb;
}

JointAngles random_angles(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  return {u(rng), u(rng), u(rng)};
}

Outcome jacobian_correctness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  const double h = 1e-6;
  double worst = 0.0;
  int evaluations = 0;
  for (int m = 0; m < 20; ++m) {
    const LimbMorphology limb = random_limb(rng);
    for (int i = 0; i < 10000; ++i) {
      const JointAngles q = random_angles(rng);
      const Side side = i % 2 ? Side::Left : Side::Right;
      Mat3 numeric;
      for (int k = 0; k < 3; ++k) {
        Vec3 plus = q.vector(), minus = q.vector();
        plus(k) += h;
        minus(k) -= h;
        numeric.col(k) = (forward_kinematics(limb, JointAngles::from_vector(plus), side) -
                          forward_kinematics(limb, JointAngles::from_vector(minus), side)) /
                         (2.0 * h);
      }
      const Mat3 analytic = jacobian_foot(limb, q, side).matrix;
      worst = std::max(worst, (analytic - numeric).norm() / analytic.norm());
      ++evaluations;
    }
  }
  const double t = seconds_since(t0);
  return {worst < 1e-5 && t < 10.0,
          fmt::format("max relative error {:.3g} over {} configurations, {:.2f} s", worst, evaluations, t)};
}

Outcome grf_round_trip() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> f(-200.0, 200.0);
  double worst = 0.0;
  int checked = 0, skipped = 0;
  LimbMorphology limb = random_limb(rng);
  while (checked < 10000) {
    if (checked % 500 == 0) limb = random_limb(rng);
    const JointAngles q = random_angles(rng);
    const Side side = checked % 2 ? Side::Left : Side::Right;
    if (jacobian_foot(limb, q, side).condition_number() >= 1e6) {
      ++skipped;
      continue;
    }
    const Vec3 F(f(rng), f(rng), f(rng));
    const Vec3 tau = jacobian_foot(limb, q, side).matrix.transpose() * F;
    const Vec3 est = estimate_grf(limb, q, tau, Vec3::Ones(), side).force;
    worst = std::max(worst, (est - F).norm() / F.norm());
    ++checked;
  }
  const double t = seconds_since(t0);
  return {worst < 1e-9 && t < 10.0, fmt::format("max relative error {:.3g} over {} configurations ({} singular "
                                                 "draws skipped), {:.2f} s",
                                                 worst, checked, skipped, t)};
}

Outcome zero_angle_jacobian() {
  LimbMorphology limb;
  limb.l1 = 0.05;
  limb.l4 = 0.05;
  limb.l2 = 0.2;
  limb.l3 = 0.2;
  const Mat3 J = jacobian_foot(limb, {0.0, 0.0, 0.0}).matrix;
  Mat3 expected;
  expected << 0.0, 0.4, 0.2, 0.4, 0.0, 0.0, 0.1, 0.0, 0.0;
  std::ostringstream ss;
  ss << J.format(Eigen::IOFormat(Eigen::FullPrecision, Eigen::DontAlignCols, ", ", "; ", "", "", "[", "]"));
  return {J == expected, "J(0,0,0) = " + ss.str()};
}

Outcome moi_oracle() {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> knee(0.0, 1.5);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const LimbMorphology limb = random_limb(rng);
    const JointAngles pose{0.0, 0.0, knee(rng)};
    const double analytic = moment_of_inertia_about_hip(limb, pose);
    worst = std::max(worst, std::abs(pendulum_moi(limb, 0.05, pose).inertia - analytic) / analytic);
  }
  LimbMorphology rod;
  rod.link_masses = {0.0, 0.8, 0.0, 0.0};
  rod.l2 = 0.35;
  rod.link_com_offsets[kFemur] = 0.175;
  const double exact = 0.8 * 0.35 * 0.35 / 3.0;
  const double rod_analytic = std::abs(moment_of_inertia_about_hip(rod) - exact);
  const double rod_pendulum = std::abs(pendulum_moi(rod).inertia - exact) / exact;
  return {worst < 0.01 && rod_analytic < 1e-9 && rod_pendulum < 0.01,
          fmt::format("random limbs max pendulum error {:.3g}%; rod analytic error {:.3g}, pendulum {:.3g}%",
                      100.0 * worst, rod_analytic, 100.0 * rod_pendulum)};
}

Outcome cot_unit_check() {
  TrialLog log;
  for (int k = 0; k < 100; ++k) {
    LogRow r;
    r.time = 0.002 * k;
    r.total_power = 100.0;
    r.linear_velocity = Vec3(1.0, 0.0, 0.0);
    log.rows.push_back(r);
  }
  const double cot = compute_cot(log, 10.0, SpeedSource::GroundTruth);
  return {std::abs(cot - 1.019) <= 1e-3, fmt::format("COT = {:.6f}", cot)};
}

Outcome inertia_cot_ordering(const Config& config) {
  const auto t0 = Clock::now();
  const InertiaCotResult r = run_inertia_cot_experiment(config);
  const double t = seconds_since(t0);
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : config.inertia_cot.seeds) {
    const CotRun& u = r.run(Payload::None, seed);
    const CotRun& f = r.run(Payload::Femur, seed);
    const CotRun& b = r.run(Payload::Tibia, seed);
    const bool seed_ok = u.completed && f.completed && b.completed && u.cot_imu < f.cot_imu && f.cot_imu < b.cot_imu;
    ok = ok && seed_ok;
    detail += fmt::format("seed {}: {:.4f} < {:.4f} < {:.4f}{}; ", seed, u.cot_imu, f.cot_imu, b.cot_imu,
                          seed_ok ? "" : " (violated)");
  }
  const double increase = r.moi_analytic[2] / r.moi_analytic[1] - 1.0;
  ok = ok && increase > 0.10 && t < 300.0 && config.sim.dt == 1e-3;
  detail += fmt::format("MOI tibia over femur +{:.1f}%; dt {} s; {:.1f} s", 100.0 * increase, config.sim.dt, t);
  return {ok, detail};
}

Outcome grf_validation(const Config& config) {
  GrfValidationResult r;
  try {
    r = run_grf_validation(config);
  } catch (const Error& e) {
    return {false, std::string("protocol aborted: ") + e.what()};
  }
  bool ok = true;
  std::string detail;
  const auto reference = reference_grf_rmse();
  for (Leg leg : kAllLegs) {
    const LimbGrfError& e = r.limbs[index(leg)];
    const bool calibrated_ok = (e.calibrated.array() <= e.uncalibrated.array()).all();
    Eigen::Index axis = 0;
    e.uncalibrated.maxCoeff(&axis);
    ok = ok && e.samples > 0 && calibrated_ok && axis == 2;
    const Vec3& ref = reference[index(leg)];
    detail += fmt::format("{} uncal ({:.2f}, {:.2f}, {:.2f}) cal ({:.2f}, {:.2f}, {:.2f}) ref ({}, {}, {}) N; ",
                          leg_name(leg), e.uncalibrated.x(), e.uncalibrated.y(), e.uncalibrated.z(), e.calibrated.x(),
                          e.calibrated.y(), e.calibrated.z(), ref.x(), ref.y(), ref.z());
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome limb_ratio(const Config& config) {
  const LimbRatioResult r = run_limb_ratio_experiment(config);
  const LimbRatioRun* fifty = nullptr;
  for (const auto& run : r.runs) {
    if (std::abs(run.tibia_fraction - 0.5) < 1e-12) fifty = &run;
  }
  if (!fifty) return {false, "no 50:50 run configured"};
  bool ok = true;
  double closure = 0.0;
  std::string detail;
  for (const auto& run : r.runs) {
    ok = ok && run.completed;
    closure = std::max({closure, run.descriptors.fore.closure, run.descriptors.hind.closure});
    if (&run != fifty) {
      ok = ok && run.descriptors.fore.peak_vertical < fifty->descriptors.fore.peak_vertical &&
           run.descriptors.hind.peak_vertical < fifty->descriptors.hind.peak_vertical;
    }
    detail += fmt::format("{} peak fore {:.2f} hind {:.2f} mm; ", ratio_label(run.tibia_fraction),
                          1e3 * run.descriptors.fore.peak_vertical, 1e3 * run.descriptors.hind.peak_vertical);
  }
  ok = ok && closure <= 5e-3;
  detail += fmt::format("max closure {:.3f} mm", 1e3 * closure);
  return {ok, detail};
}

Outcome feasibility(const Config& config) {
  const auto t0 = Clock::now();
  Config c = config;
  c.feasibility.grid.femur_steps = c.feasibility.grid.tibia_steps = 50;
  c.feasibility.gear_ratios = {7.5, 15.0};
  const FeasibilityResult r = run_feasibility(c);
  const double t = seconds_since(t0);
  const bool contains = strictly_contains(r.maps[1], r.maps[0]);
  return {contains && t < 60.0, fmt::format("feasible cells 7.5:1 {} / 15:1 {} of {}; strict containment {}; {:.2f} s",
                                            r.maps[0].feasible_count(), r.maps[1].feasible_count(),
                                            r.maps[0].cells.size(), contains ? "yes" : "no", t)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const Config& config) {
  const fs::path root = fs::temp_directory_path() / "quadsim_acceptance_determinism";
  fs::remove_all(root);
  Config c = config;
  c.run.duration = 2.0;
  const auto formats = all_formats();
  std::vector<std::string> names[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = root / std::to_string(k);
    const SimulationOutcome sim = run_simulation(c);
    names[k] = emit_report(sim.report, dir, formats);
    for (const auto& n : emit_report(run_experiment(c, "grf-validation"), dir, formats)) names[k].push_back(n);
  }
  bool ok = names[0] == names[1];
  int identical = 0;
  for (const auto& n : names[0]) {
    if (slurp(root / "0" / n) == slurp(root / "1" / n)) {
      ++identical;
    } else {
      ok = false;
    }
  }
  fs::remove_all(root);
  return {ok, fmt::format("{} of {} telemetry and report files byte-identical across repeat runs", identical,
                          names[0].size())};
}

Outcome physics_sanity(const Config& config) {
  const BodyMorphology body = config.morphology.body();
  bool ok = true;
  std::string detail;

  // Contact-free energy drift.
  {
    SimParams p = config.sim;
    p.contact.enabled = false;
    World w(body, config.actuator, p);
    RobotState s;
    s.position = Vec3(0.0, 0.0, 1.0);
    s.linear_velocity = Vec3(0.4, -0.2, 1.5);
    s.angular_velocity = Vec3(0.8, -1.1, 0.6);
    for (int j = 0; j < 12; ++j) {
      s.q(j) = 0.3 * std::sin(1.7 * j);
      s.qd(j) = 2.0 * std::cos(2.3 * j);
    }
    w.reset(s);
    const double e0 = w.mechanical_energy();
    const double duration = 5.0;
    double worst = 0.0;
    const long steps = std::lround(duration / p.dt);
    for (long i = 0; i < steps; ++i) {
      w.step(JointCommands{});
      worst = std::max(worst, std::abs(w.mechanical_energy() - e0));
    }
    const double drift = 100.0 * worst / std::abs(e0) / duration;
    ok = ok && drift < 0.1;
    detail += fmt::format("energy drift {:.4f}%/s; ", drift);
  }

  const int control_every = static_cast<int>(std::lround(config.controller.control_period / config.sim.dt));
  // Quiet standing weight support.
  {
    World w(body, config.actuator, config.sim);
    Controller c(body, config.actuator, config.gait, config.controller);
    w.reset(standing_state(c));
    c.set_mode(ControlMode::Stand);
    const double weight = w.total_mass() * config.sim.gravity;
    double worst = 0.0;
    JointCommands cmd{};
    const long steps = std::lround(2.0 / config.sim.dt);
    for (long i = 0; i < steps; ++i) {
      if (i % control_every == 0) cmd = c.control_tick(w.state(), Vec3::Zero()).joints;
      w.step(cmd);
      if (i >= steps / 2) {
        double fz = 0.0;
        for (const auto& contact : w.contacts()) fz += contact.force.z();
        worst = std::max(worst, std::abs(fz - weight) / weight);
      }
    }
    ok = ok && worst < 0.01;
    detail += fmt::format("standing sum fz within {:.4f}% of Mg; ", 100.0 * worst);
  }

  // Allocation constraints during a trot and on random wrenches.
  {
    const double mu = config.controller.allocation.mu;
    const double tol = 1e-9;
    long allocations = 0, violations = 0;
    auto check = [&](const StanceAllocation& a) {
      ++allocations;
      for (int l = 0; l < kNumLegs; ++l) {
        if (!a.stance[l]) continue;
        const Vec3& f = a.forces[l];
        const double scale = std::max(1.0, f.norm());
        if (f.z() < -tol * scale || f.head<2>().norm() > mu * f.z() + tol * scale) ++violations;
      }
    };
    World w(body, config.actuator, config.sim);
    Controller c(body, config.actuator, config.gait, config.controller);
    w.reset(standing_state(c));
    c.set_mode(ControlMode::Trot, 0.5);
    JointCommands cmd{};
    const long steps = std::lround(4.0 / config.sim.dt);
    for (long i = 0; i < steps; ++i) {
      if (i % control_every == 0) {
        const ControlCommand cc = c.control_tick(w.state(), Vec3(config.run.speed, 0.0, 0.0));
        check(cc.allocation);
        cmd = cc.joints;
      }
      w.step(cmd);
    }
    std::mt19937_64 rng(1011);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
      std::array<Vec3, kNumLegs> feet;
      std::array<bool, kNumLegs> stance{};
      bool any = false;
      for (int l = 0; l < kNumLegs; ++l) {
        feet[l] = body.hip_positions[l] + Vec3(0.1 * u(rng), 0.1 * u(rng), -0.3 + 0.05 * u(rng));
        stance[l] = u(rng) > -0.3;
        any = any || stance[l];
      }
      if (!any) stance[0] = true;
      Vec6 wrench;
      wrench << 30.0 * u(rng), 30.0 * u(rng), 100.0 + 60.0 * u(rng), 10.0 * u(rng), 10.0 * u(rng), 5.0 * u(rng);
      check(allocate_stance_forces(Vec3(0.05 * u(rng), 0.02 * u(rng), 0.0), feet, stance, wrench,
                                   config.controller.allocation));
    }
    ok = ok && violations == 0;
    detail += fmt::format("{} constraint violations in {} allocations", violations, allocations);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const Config config;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"jacobian correctness", jacobian_correctness},
      {"GRF round trip", grf_round_trip},
      {"zero-angle Jacobian", zero_angle_jacobian},
      {"MOI oracle", moi_oracle},
      {"COT unit check", cot_unit_check},
      {"inertia-COT ordering", [&] { return inertia_cot_ordering(config); }},
      {"GRF validation", [&] { return grf_validation(config); }},
      {"limb ratio", [&] { return limb_ratio(config); }},
      {"feasibility containment", [&] { return feasibility(config); }},
      {"determinism", [&] { return determinism(config); }},
      {"physics sanity", [&] { return physics_sanity(config); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    fmt::print("{} {:>2} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
