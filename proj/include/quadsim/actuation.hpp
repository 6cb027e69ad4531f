#pragma once

// Quasi-direct-drive actuator model: gearing, electrical power, and the joint
// impedance (virtual spring) law.

#include "quadsim/morphology.hpp"

#include <span>
#include <vector>

namespace quadsim {

// Default electrical constants are placeholders for a small BLDC outrunner;
// they are not measured values for any particular motor.
struct ActuatorParams {
  double gear_ratio = 7.5;
  double torque_constant = 0.08;     // N*m/A, motor side
  double back_emf_constant = 0.08;   // V*s/rad, motor side
  double phase_resistance = 0.18;    // ohm
  double max_output_torque = 18.0;   // N*m, after the gearbox
  double max_output_speed = 380.0 / 7.5;  // rad/s, after the gearbox
  double rotor_inertia = 6e-5;       // kg*m^2, motor side
  // Accept torque and back-EMF constants that differ beyond the tolerance.
  bool allow_constant_mismatch = false;
  double constant_tolerance = 0.05;  // relative
  // Literal current formula I = tau * K_tau, for auditing only.
  bool literal_current_formula = false;

  double motor_torque_limit() const { return max_output_torque / gear_ratio; }
  double motor_speed_limit() const { return max_output_speed * gear_ratio; }
  double reflected_inertia() const { return rotor_inertia * gear_ratio * gear_ratio; }
  // Same motor behind a different gearbox: output limits rescale.
  ActuatorParams with_gear_ratio(double ratio) const;
};

std::vector<Violation> validate(const ActuatorParams& p, const std::string& prefix = "actuator");

struct ImpedanceGains {
  double kp = 0.0;  // N*m/rad
  double kd = 0.0;  // N*m*s/rad
  double feedforward = 0.0;  // N*m
};

struct ImpedanceOutput {
  double torque = 0.0;
  bool saturated = false;
};

// Per-joint setpoint held by the actuator between controller ticks.
struct JointCommand {
  double q_des = 0.0;
  double qd_des = 0.0;
  ImpedanceGains gains;
};

ImpedanceOutput impedance_torque(const ImpedanceGains& g, double q_des, double q, double qd_des, double qd,
                                 double max_output_torque);

// Motor current for an output torque.
double current_from_torque(const ActuatorParams& p, double tau_out);

struct PowerSample {
  double time = 0.0;
  double torque = 0.0;   // N*m, output side
  double current = 0.0;  // A
  double voltage = 0.0;  // V
  double power = 0.0;    // W, I*V
  double clamped = 0.0;  // W, max(P, 0)
};

PowerSample electrical_power(const ActuatorParams& p, double tau_out, double omega_out, double time = 0.0);

struct EnergyTotals {
  double peak_power = 0.0;   // W, summed over actuators
  double mean_power = 0.0;
  double peak_torque = 0.0;  // N*m, summed |torque|
  double mean_torque = 0.0;
  std::size_t samples = 0;
};

// Fold over time steps; each step supplies one sample per actuator.
class EnergyAccumulator {
 public:
  void add(std::span<const PowerSample> actuators);
  EnergyTotals totals() const;
  std::size_t size() const { return count_; }

 private:
  std::size_t count_ = 0;
  double last_time_ = 0.0;
  double power_sum_ = 0.0;
  double torque_sum_ = 0.0;
  double peak_power_ = 0.0;
  double peak_torque_ = 0.0;
};

}  // namespace quadsim
