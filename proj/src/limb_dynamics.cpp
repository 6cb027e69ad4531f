#include "quadsim/limb_dynamics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace quadsim {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd to_dyn(const Vec3& v) { return Eigen::VectorXd(v); }

void check_consistency(const std::vector<JointSample>& s, double tol) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i].time > s[i - 1].time)) throw TrajectoryError("swing trajectory: time must be strictly increasing");
  }
  if (s.size() < 3) return;
  double qd_scale = 0.0, qdd_scale = 0.0;
  for (const auto& x : s) {
    qd_scale = std::max(qd_scale, x.qd.cwiseAbs().maxCoeff());
    qdd_scale = std::max(qdd_scale, x.qdd.cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double h = s[i + 1].time - s[i - 1].time;
    const Vec3 qd_fd = (s[i + 1].q - s[i - 1].q) / h;
    const Vec3 qdd_fd = (s[i + 1].qd - s[i - 1].qd) / h;
    if ((qd_fd - s[i].qd).cwiseAbs().maxCoeff() > tol * qd_scale + 1e-12) {
      throw TrajectoryError(fmt::format("swing trajectory: velocity inconsistent with position at t = {}", s[i].time));
    }
    if ((qdd_fd - s[i].qdd).cwiseAbs().maxCoeff() > tol * qdd_scale + 1e-12) {
      throw TrajectoryError(
          fmt::format("swing trajectory: acceleration inconsistent with velocity at t = {}", s[i].time));
    }
  }
}

Vec3 peak_torque(const LimbDynamicsModel& model, const std::vector<JointSample>& swing) {
  Vec3 peak = Vec3::Zero();
  for (const auto& x : swing) peak = peak.cwiseMax(inverse_dynamics(model, x.q, x.qd, x.qdd).cwiseAbs());
  return peak;
}

}  // namespace

LimbDynamicsModel make_limb_dynamics(const LimbMorphology& limb, Side side, double gravity) {
  return {limb, side, gravity, build_limb_model(limb, side)};
}

Vec3 inverse_dynamics(const LimbDynamicsModel& model, const Vec3& q, const Vec3& qd, const Vec3& qdd) {
  const auto& mb = model.multibody.model;
  const auto kin = compute_kinematics(mb, {}, to_dyn(q), to_dyn(qd));
  return inverse_dynamics(mb, kin, to_dyn(qd), to_dyn(qdd), Vec3(0.0, 0.0, -model.gravity));
}

Mat3 limb_mass_matrix(const LimbDynamicsModel& model, const Vec3& q) {
  const auto& mb = model.multibody.model;
  return mass_matrix(mb, compute_kinematics(mb, {}, to_dyn(q), {}));
}

std::vector<JointSample> sinusoidal_swing(const SwingSpec& spec) {
  if (spec.samples < 3 || !(spec.frequency > 0.0)) throw DegenerateInputError("swing spec: need samples >= 3, f > 0");
  const double w = 2.0 * kPi * spec.frequency;
  const double period = 1.0 / spec.frequency;
  std::vector<JointSample> out(spec.samples + 1);
  for (int i = 0; i <= spec.samples; ++i) {
    const double t = period * i / spec.samples;
    out[i].time = t;
    out[i].q = Vec3(0.0, spec.amplitude * std::sin(w * t), spec.knee_angle);
    out[i].qd = Vec3(0.0, spec.amplitude * w * std::cos(w * t), 0.0);
    out[i].qdd = Vec3(0.0, -spec.amplitude * w * w * std::sin(w * t), 0.0);
  }
  return out;
}

Vec3 max_swing_torque(const LimbDynamicsModel& model, const std::vector<JointSample>& swing,
                      double consistency_tolerance) {
  if (swing.empty()) throw TrajectoryError("swing trajectory is empty");
  check_consistency(swing, consistency_tolerance);
  return peak_torque(model, swing);
}

const FeasibilityCell& FeasibilityMap::at(int femur_index, int tibia_index) const {
  return cells.at(static_cast<std::size_t>(femur_index) * grid.tibia_steps + tibia_index);
}

int FeasibilityMap::feasible_count() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.feasible; }));
}

bool FeasibilityMap::subset_of(const FeasibilityMap& other) const {
  if (cells.size() != other.cells.size()) throw DegenerateInputError("feasibility maps use different grids");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].feasible && !other.cells[i].feasible) return false;
  }
  return true;
}

std::string FeasibilityMap::to_csv() const {
  std::string out = "femur_m,tibia_m,feasible,peak_abad_nm,peak_hip_nm,peak_knee_nm,peak_speed_rad_s\n";
  for (const auto& c : cells) {
    out += fmt::format("{},{},{},{},{},{},{}\n", c.femur, c.tibia, c.feasible ? 1 : 0, c.peak_torque.x(),
                       c.peak_torque.y(), c.peak_torque.z(), c.peak_speed);
  }
  return out;
}

FeasibilityMap feasibility_map(const ActuatorParams& actuator, const LimbMorphology& reference,
                               const SwingSpec& swing, const GridSpec& grid) {
  if (!(grid.femur_min > 0.0 && grid.tibia_min > 0.0 && grid.femur_max >= grid.femur_min &&
        grid.tibia_max >= grid.tibia_min && grid.femur_steps > 0 && grid.tibia_steps > 0)) {
    throw DegenerateInputError("feasibility grid: bounds must be positive and ordered");
  }
  const double femur_density = reference.link_masses[kFemur] / reference.l2;
  const double tibia_density = reference.link_masses[kTibia] / reference.l3;
  const auto samples = sinusoidal_swing(swing);
  double speed = 0.0;
  for (const auto& s : samples) speed = std::max(speed, s.qd.cwiseAbs().maxCoeff());

  auto axis_value = [](double lo, double hi, int steps, int i) {
    return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  };

  FeasibilityMap map;
  map.grid = grid;
  map.gear_ratio = actuator.gear_ratio;
  map.torque_limit = actuator.max_output_torque;
  map.speed_limit = actuator.max_output_speed;
  map.cells.reserve(static_cast<std::size_t>(grid.femur_steps) * grid.tibia_steps);
  for (int i = 0; i < grid.femur_steps; ++i) {
    for (int j = 0; j < grid.tibia_steps; ++j) {
      LimbMorphology limb = reference;
      limb.added_mass.reset();
      limb.l2 = axis_value(grid.femur_min, grid.femur_max, grid.femur_steps, i);
      limb.l3 = axis_value(grid.tibia_min, grid.tibia_max, grid.tibia_steps, j);
      limb.link_masses[kFemur] = femur_density * limb.l2;
      limb.link_masses[kTibia] = tibia_density * limb.l3;
      limb.set_midpoint_coms();
      FeasibilityCell cell;
      cell.femur = limb.l2;
      cell.tibia = limb.l3;
      cell.peak_torque = peak_torque(make_limb_dynamics(limb), samples);
      cell.peak_speed = speed;
      cell.feasible = cell.peak_torque.maxCoeff() <= map.torque_limit && speed <= map.speed_limit;
      map.cells.push_back(cell);
    }
  }
  return map;
}

PendulumResult pendulum_moi(const LimbMorphology& limb, double amplitude, const JointAngles& pose, double gravity) {
  if (!(amplitude > 0.0 && amplitude <= 0.1)) {
    throw DegenerateInputError("pendulum_moi: amplitude must be in (0, 0.1] rad");
  }
  if (!pose.finite() || !(gravity > 0.0)) throw DegenerateInputError("pendulum_moi: invalid pose or gravity");
  const LimbDynamicsModel model = make_limb_dynamics(limb, Side::Left, gravity);
  const auto& mb = model.multibody.model;
  const auto& chain = model.multibody.chain;

  // Swinging part: everything distal to the hip pitch joint, at hip = 0.
  const auto kin0 = compute_kinematics(mb, {}, to_dyn(Vec3(0.0, 0.0, pose.knee)), {});
  const Vec3 pivot = point_position(kin0, chain.femur, Vec3::Zero());
  double mass = 0.0;
  Vec3 moment = Vec3::Zero();
  for (int b : {chain.femur, chain.tibia, chain.tarsus}) {
    if (b < 0) continue;
    const auto& I = mb.bodies[b].inertia;
    const double m = I(5, 5);
    if (m <= 0.0) continue;
    const Mat3 mc = I.topRightCorner<3, 3>();
    const Vec3 com_local(mc(2, 1) / m, mc(0, 2) / m, mc(1, 0) / m);
    mass += m;
    moment += m * (point_position(kin0, b, com_local) - pivot);
  }
  if (mass <= 0.0) throw DegenerateInputError("pendulum_moi: limb has no mass distal to the hip");
  const Vec3 com = moment / mass;
  const double d = std::hypot(com.x(), com.z());
  if (d <= 1e-12) throw DegenerateInputError("pendulum_moi: center of mass lies on the hip axis");
  const double hip_eq = -std::atan2(com.x(), -com.z());

  // With the knee locked the swinging part is rigid, so its inertia about the
  // hip axis does not depend on the hip angle.
  const double h22 = limb_mass_matrix(model, Vec3(0.0, hip_eq, pose.knee))(1, 1);
  auto accel = [&](double hip) {
    const Vec3 q(0.0, hip, pose.knee);
    return -inverse_dynamics(model, q, Vec3::Zero(), Vec3::Zero())(1) / h22;
  };
  const double t_small = 2.0 * kPi * std::sqrt(h22 / (mass * gravity * d));
  const double dt = t_small / 1000.0;

  // RK4 on (angle, rate); period from the spacing of zero crossings.
  double x = amplitude, v = 0.0, t = 0.0;
  std::vector<double> crossings;
  while (crossings.size() < 7 && t < 20.0 * t_small) {
    const double k1x = v, k1v = accel(hip_eq + x);
    const double k2x = v + 0.5 * dt * k1v, k2v = accel(hip_eq + x + 0.5 * dt * k1x);
    const double k3x = v + 0.5 * dt * k2v, k3v = accel(hip_eq + x + 0.5 * dt * k2x);
    const double k4x = v + dt * k3v, k4v = accel(hip_eq + x + dt * k3x);
    const double x_next = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    const double v_next = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    if ((x > 0.0) != (x_next > 0.0)) crossings.push_back(t + dt * x / (x - x_next));
    x = x_next;
    v = v_next;
    t += dt;
  }
  if (crossings.size() < 3) throw DegenerateInputError("pendulum_moi: oscillation not detected");
  const double period = 2.0 * (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  return {period * period * mass * gravity * d / (4.0 * kPi * kPi), period, mass, d};
}

}  // namespace quadsim
