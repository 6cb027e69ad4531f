#pragma once

// Floating-base quadruped on a flat ground plane: semi-implicit Euler
// integration of the trunk and twelve joints, penalty contact with Coulomb
// friction, joint impedance actuators, and a trunk-mounted IMU.

#include "quadsim/actuation.hpp"
#include "quadsim/robot_model.hpp"
#include "quadsim/robot_state.hpp"

#include <array>
#include <random>

namespace quadsim {

struct ContactParams {
  bool enabled = true;
  double stiffness = 2e4;    // N/m
  double damping = 200.0;    // N*s/m
  double mu = 0.6;
  double tangential_stiffness = 2e4;
  double tangential_damping = 100.0;
};

struct ImuParams {
  double accel_noise = 0.0;  // m/s^2, standard deviation per sample
  double gyro_noise = 0.0;   // rad/s
  Vec3 accel_bias = Vec3::Zero();
  Vec3 gyro_bias = Vec3::Zero();
  std::uint64_t seed = 1;
};

struct SimParams {
  double dt = 1e-3;
  int substeps = 1;
  double gravity = kStandardGravity;
  double joint_damping = 0.0;  // passive viscous damping, N*m*s/rad
  double divergence_speed = 1e3;
  ContactParams contact;
  ImuParams imu;
};

struct FootContact {
  bool in_contact = false;
  double penetration = 0.0;      // m
  Vec3 force = Vec3::Zero();     // ground on foot, world frame
  bool sliding = false;
  bool anchored = false;
  Eigen::Vector2d anchor = Eigen::Vector2d::Zero();
};

using ContactState = std::array<FootContact, kNumLegs>;
using JointCommands = std::array<JointCommand, 12>;

struct ImuSample {
  double time = 0.0;
  Vec3 accel = Vec3::Zero();  // specific force, trunk frame
  Vec3 gyro = Vec3::Zero();   // trunk frame
};

class SimulationDivergedError : public Error {
 public:
  SimulationDivergedError(const std::string& what, const RobotState& last_valid) : Error(what), last_(last_valid) {}
  const RobotState& last_valid_state() const { return last_; }

 private:
  RobotState last_;
};

struct StepOutput {
  RobotState state;
  ContactState contacts;
};

class World {
 public:
  World(const BodyMorphology& body, const ActuatorParams& actuator, const SimParams& params = {});

  void reset(const RobotState& state);
  StepOutput step(const JointCommands& commands, double dt);
  StepOutput step(const JointCommands& commands) { return step(commands, params_.dt); }

  const RobotState& state() const { return state_; }
  const ContactState& contacts() const { return contacts_; }
  ImuSample imu_read() const { return imu_; }

  // Quantities from the most recent step, evaluated at the state the step
  // started from (the state at which the forces acted).
  const RobotState& step_start_state() const { return step_start_; }
  const Vec12& joint_torques() const { return tau_; }
  const Eigen::VectorXd& acceleration() const { return nu_dot_; }
  // Joint torques the limbs need for their own motion and weight, without
  // contact: inverse dynamics at the start state with the realized acceleration.
  const Vec12& free_limb_torques() const { return tau_free_; }
  // Ground reaction on a foot, trunk frame of the step start state.
  Vec3 true_grf_trunk(Leg leg) const;

  std::array<PowerSample, 12> power_samples() const;
  double actuator_work() const { return actuator_work_; }
  double electrical_energy() const { return electrical_energy_; }

  double kinetic_energy() const;
  double potential_energy() const;
  double mechanical_energy() const { return kinetic_energy() + potential_energy(); }
  Vec3 center_of_mass() const;
  double total_mass() const { return total_mass(quad_.model); }
  Vec3 foot_position(Leg leg) const;
  Vec3 foot_velocity(Leg leg) const;

  const QuadrupedModel& model() const { return quad_; }
  const BodyMorphology& body() const { return body_; }
  const ActuatorParams& actuator() const { return actuator_; }
  const SimParams& params() const { return params_; }

 private:
  static double total_mass(const MultibodyModel& m) { return quadsim::total_mass(m); }
  Eigen::VectorXd generalized_velocity(const RobotState& s) const;
  MultibodyKinematics kinematics(const RobotState& s) const;
  void substep(const JointCommands& commands, double h);
  ImuSample sample_imu(const Vec3& v_before, double dt);

  BodyMorphology body_;
  ActuatorParams actuator_;
  SimParams params_;
  QuadrupedModel quad_;
  RobotState state_;
  RobotState step_start_;
  ContactState contacts_{};
  Vec12 tau_ = Vec12::Zero();
  Vec12 tau_free_ = Vec12::Zero();
  Eigen::VectorXd nu_dot_;
  ImuSample imu_;
  std::mt19937_64 rng_;
  double actuator_work_ = 0.0;
  double electrical_energy_ = 0.0;
};

}  // namespace quadsim
