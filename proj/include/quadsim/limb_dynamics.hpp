#pragma once

// Equations of motion for a single fixed-base limb, swing-torque analysis
// across limb lengths, and a simulated pendulum measurement of limb inertia.

#include "quadsim/actuation.hpp"
#include "quadsim/limb_kinematics.hpp"
#include "quadsim/robot_model.hpp"

#include <string>
#include <vector>

namespace quadsim {

struct LimbDynamicsModel {
  LimbMorphology limb;
  Side side = Side::Left;
  double gravity = kStandardGravity;
  LimbModel multibody;
};

LimbDynamicsModel make_limb_dynamics(const LimbMorphology& limb, Side side = Side::Left,
                                     double gravity = kStandardGravity);

// Joint torques (abad, hip, knee) for the given motion, gravity included.
Vec3 inverse_dynamics(const LimbDynamicsModel& model, const Vec3& q, const Vec3& qd, const Vec3& qdd);

Mat3 limb_mass_matrix(const LimbDynamicsModel& model, const Vec3& q);

struct JointSample {
  double time = 0.0;
  Vec3 q = Vec3::Zero();
  Vec3 qd = Vec3::Zero();
  Vec3 qdd = Vec3::Zero();
};

// Sinusoidal hip sweep about a neutral pose with the other joints held.
struct SwingSpec {
  double amplitude = 0.5235987755982988;  // rad, 30 degrees
  double frequency = 2.0;                 // Hz, one stride of a 0.5 s trot
  double knee_angle = 0.6;                // rad, held during the sweep
  int samples = 200;                      // over one cycle
};

std::vector<JointSample> sinusoidal_swing(const SwingSpec& spec);

// Per-joint peak |tau| over the trajectory. Throws TrajectoryError when q, qd
// and qdd disagree under central differences beyond the relative tolerance.
Vec3 max_swing_torque(const LimbDynamicsModel& model, const std::vector<JointSample>& swing,
                      double consistency_tolerance = 1e-2);

struct GridSpec {
  double femur_min = 0.05;
  double femur_max = 0.50;
  int femur_steps = 50;
  double tibia_min = 0.05;
  double tibia_max = 0.50;
  int tibia_steps = 50;
};

struct FeasibilityCell {
  double femur = 0.0;
  double tibia = 0.0;
  bool feasible = false;
  Vec3 peak_torque = Vec3::Zero();
  double peak_speed = 0.0;
};

struct FeasibilityMap {
  GridSpec grid;
  double gear_ratio = 0.0;
  double torque_limit = 0.0;
  double speed_limit = 0.0;
  std::vector<FeasibilityCell> cells;  // femur-major: index i * tibia_steps + j

  const FeasibilityCell& at(int femur_index, int tibia_index) const;
  int feasible_count() const;
  // Every cell feasible here is also feasible in `other`.
  bool subset_of(const FeasibilityMap& other) const;
  std::string to_csv() const;
};

// Link masses scale with length at the linear density of `reference`.
FeasibilityMap feasibility_map(const ActuatorParams& actuator, const LimbMorphology& reference,
                               const SwingSpec& swing = {}, const GridSpec& grid = {});

struct PendulumResult {
  double inertia = 0.0;   // kg*m^2 about the hip pitch axis
  double period = 0.0;    // s
  double mass = 0.0;      // kg, swinging part
  double com_distance = 0.0;  // m
};

// Releases the limb (knee locked at pose.knee) from `amplitude` off its hanging
// equilibrium, measures the oscillation period and returns I = T^2 m g d / 4 pi^2.
PendulumResult pendulum_moi(const LimbMorphology& limb, double amplitude = 0.05, const JointAngles& pose = {},
                            double gravity = kStandardGravity);

}  // namespace quadsim
