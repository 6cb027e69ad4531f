#include "quadsim/world.hpp"

#include <fmt/format.h>

#include <cmath>

namespace quadsim {

World::World(const BodyMorphology& body, const ActuatorParams& actuator, const SimParams& params)
    : body_(body),
      actuator_(actuator),
      params_(params),
      quad_(build_quadruped_model(body, Vec3::Constant(actuator.reflected_inertia()))),
      rng_(params.imu.seed) {
  if (params.substeps < 1) throw DegenerateInputError("sim.substeps must be at least 1");
  nu_dot_ = Eigen::VectorXd::Zero(quad_.model.nv());
  reset(RobotState{});
}

void World::reset(const RobotState& state) {
  if (!state.finite()) throw DegenerateInputError("World::reset: state must be finite");
  state_ = state;
  state_.orientation.normalize();
  step_start_ = state_;
  contacts_ = {};
  tau_.setZero();
  tau_free_.setZero();
  nu_dot_.setZero();
  imu_ = {state_.time, state_.rotation().transpose() * Vec3(0.0, 0.0, params_.gravity), state_.angular_velocity};
  actuator_work_ = 0.0;
  electrical_energy_ = 0.0;
}

Eigen::VectorXd World::generalized_velocity(const RobotState& s) const {
  Eigen::VectorXd nu(quad_.model.nv());
  nu.head<3>() = s.angular_velocity;
  nu.segment<3>(3) = s.rotation().transpose() * s.linear_velocity;
  nu.tail<12>() = s.qd;
  return nu;
}

MultibodyKinematics World::kinematics(const RobotState& s) const {
  return compute_kinematics(quad_.model, {s.rotation(), s.position}, Eigen::VectorXd(s.q), generalized_velocity(s));
}

StepOutput World::step(const JointCommands& commands, double dt) {
  if (!(dt > 0.0 && dt <= 2e-3)) throw DegenerateInputError(fmt::format("World::step: dt = {} outside (0, 2 ms]", dt));
  const RobotState before = state_;
  const Vec3 v_before = state_.linear_velocity;
  const double h = dt / params_.substeps;
  try {
    for (int k = 0; k < params_.substeps; ++k) substep(commands, h);
  } catch (const Error&) {
    state_ = before;
    throw;
  }
  if (!state_.finite() || state_.linear_velocity.norm() > params_.divergence_speed ||
      state_.angular_velocity.norm() > params_.divergence_speed ||
      state_.qd.cwiseAbs().maxCoeff() > params_.divergence_speed) {
    state_ = before;
    throw SimulationDivergedError(fmt::format("simulation diverged at t = {}", before.time + dt), before);
  }
  imu_ = sample_imu(v_before, dt);
  return {state_, contacts_};
}

void World::substep(const JointCommands& commands, double h) {
  const MultibodyModel& model = quad_.model;
  const RobotState s = state_;
  step_start_ = s;
  const Mat3 R = s.rotation();
  const auto kin = kinematics(s);
  const Eigen::VectorXd nu = generalized_velocity(s);
  const Vec3 gravity(0.0, 0.0, -params_.gravity);

  // Penalty contact with an anchored tangential spring capped by Coulomb friction.
  std::vector<PointForce> external;
  const ContactParams& cp = params_.contact;
  for (Leg leg : kAllLegs) {
    const int l = index(leg);
    FootContact& c = contacts_[l];
    const LimbChain& chain = quad_.limbs[l];
    const Vec3 p = point_position(kin, chain.foot_body, chain.foot_local);
    if (!cp.enabled || p.z() >= 0.0) {
      c = FootContact{};
      continue;
    }
    const Vec3 v = point_velocity(kin, chain.foot_body, chain.foot_local);
    c.in_contact = true;
    c.penetration = -p.z();
    const double normal = std::max(cp.stiffness * c.penetration - cp.damping * v.z(), 0.0);
    if (!c.anchored) {
      c.anchor = p.head<2>();
      c.anchored = true;
    }
    Eigen::Vector2d tangential =
        -cp.tangential_stiffness * (p.head<2>() - c.anchor) - cp.tangential_damping * v.head<2>();
    const double limit = cp.mu * normal;
    c.sliding = tangential.norm() > limit;
    if (c.sliding) {
      tangential *= tangential.norm() > 0.0 ? limit / tangential.norm() : 0.0;
      c.anchor = p.head<2>() + (tangential + cp.tangential_damping * v.head<2>()) / cp.tangential_stiffness;
    }
    c.force = Vec3(tangential.x(), tangential.y(), normal);
    external.push_back({chain.foot_body, p, c.force});
  }

  // Actuators.
  Eigen::VectorXd tau_gen = Eigen::VectorXd::Zero(model.nv());
  for (int j = 0; j < 12; ++j) {
    const JointCommand& jc = commands[j];
    tau_(j) = impedance_torque(jc.gains, jc.q_des, s.q(j), jc.qd_des, s.qd(j), actuator_.max_output_torque).torque;
    tau_gen(6 + j) = tau_(j) - params_.joint_damping * s.qd(j);
  }

  const Eigen::VectorXd bias = inverse_dynamics(model, kin, nu, Eigen::VectorXd::Zero(model.nv()), gravity, external);
  const Eigen::MatrixXd M = mass_matrix(model, kin);
  nu_dot_ = M.ldlt().solve(tau_gen - bias);
  const Eigen::VectorXd id = inverse_dynamics(model, kin, nu, nu_dot_, gravity);
  tau_free_ = id.tail<12>() + params_.joint_damping * s.qd;

  // Semi-implicit Euler. The trunk translates with its classical acceleration
  // in the world frame, and the position update is exact for pure gravity.
  const Eigen::VectorXd nu_next = nu + h * nu_dot_;
  const Vec3 accel_world = R * (nu_dot_.segment<3>(3) + s.angular_velocity.cross(nu.segment<3>(3)));
  RobotState& n = state_;
  n.time = s.time + h;
  n.angular_velocity = nu_next.head<3>();
  const Mat3 R_next = R * rotation_exp(h * n.angular_velocity);
  n.orientation = Eigen::Quaterniond(R_next).normalized();
  n.linear_velocity = s.linear_velocity + h * accel_world;
  n.position = s.position + h * n.linear_velocity - 0.5 * h * h * gravity;
  n.qd = nu_next.tail<12>();
  n.q = s.q + h * n.qd;

  for (int j = 0; j < 12; ++j) {
    actuator_work_ += tau_(j) * n.qd(j) * h;
    electrical_energy_ += electrical_power(actuator_, tau_(j), n.qd(j)).clamped * h;
  }
}

ImuSample World::sample_imu(const Vec3& v_before, double dt) {
  const ImuParams& ip = params_.imu;
  std::normal_distribution<double> unit(0.0, 1.0);
  Vec3 accel_noise, gyro_noise;
  for (int a = 0; a < 3; ++a) accel_noise(a) = ip.accel_noise * unit(rng_);
  for (int a = 0; a < 3; ++a) gyro_noise(a) = ip.gyro_noise * unit(rng_);
  const Vec3 accel_world = (state_.linear_velocity - v_before) / dt;
  ImuSample out;
  out.time = state_.time;
  out.accel = state_.rotation().transpose() * (accel_world - Vec3(0.0, 0.0, -params_.gravity)) + ip.accel_bias +
              accel_noise;
  out.gyro = state_.angular_velocity + ip.gyro_bias + gyro_noise;
  return out;
}

Vec3 World::true_grf_trunk(Leg leg) const {
  return step_start_.rotation().transpose() * contacts_[index(leg)].force;
}

std::array<PowerSample, 12> World::power_samples() const {
  std::array<PowerSample, 12> out;
  for (int j = 0; j < 12; ++j) out[j] = electrical_power(actuator_, tau_(j), state_.qd(j), state_.time);
  return out;
}

double World::kinetic_energy() const {
  return quadsim::kinetic_energy(quad_.model, kinematics(state_), generalized_velocity(state_));
}

double World::potential_energy() const {
  return quadsim::potential_energy(quad_.model, kinematics(state_), Vec3(0.0, 0.0, -params_.gravity));
}

Vec3 World::center_of_mass() const { return quadsim::center_of_mass(quad_.model, kinematics(state_)); }

Vec3 World::foot_position(Leg leg) const {
  const LimbChain& c = quad_.limbs[index(leg)];
  return point_position(kinematics(state_), c.foot_body, c.foot_local);
}

Vec3 World::foot_velocity(Leg leg) const {
  const LimbChain& c = quad_.limbs[index(leg)];
  return point_velocity(kinematics(state_), c.foot_body, c.foot_local);
}

}  // namespace quadsim
