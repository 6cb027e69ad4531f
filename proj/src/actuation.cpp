#include "quadsim/actuation.hpp"

#include <algorithm>
#include <cmath>

namespace quadsim {

ActuatorParams ActuatorParams::with_gear_ratio(double ratio) const {
  ActuatorParams out = *this;
  out.gear_ratio = ratio;
  out.max_output_torque = motor_torque_limit() * ratio;
  out.max_output_speed = motor_speed_limit() / ratio;
  return out;
}

std::vector<Violation> validate(const ActuatorParams& p, const std::string& prefix) {
  std::vector<Violation> out;
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back({prefix + "." + name, "must be positive"});
  };
  positive("gear_ratio", p.gear_ratio);
  positive("torque_constant", p.torque_constant);
  positive("back_emf_constant", p.back_emf_constant);
  positive("phase_resistance", p.phase_resistance);
  positive("max_output_torque", p.max_output_torque);
  positive("max_output_speed", p.max_output_speed);
  if (!(p.rotor_inertia >= 0.0)) out.push_back({prefix + ".rotor_inertia", "must be non-negative"});
  if (!p.allow_constant_mismatch && p.torque_constant > 0.0 && p.back_emf_constant > 0.0) {
    const double rel = std::abs(p.torque_constant - p.back_emf_constant) / p.torque_constant;
    if (rel > p.constant_tolerance) {
      out.push_back({prefix + ".back_emf_constant", "must match torque_constant within tolerance"});
    }
  }
  return out;
}

ImpedanceOutput impedance_torque(const ImpedanceGains& g, double q_des, double q, double qd_des, double qd,
                                 double max_output_torque) {
  const double raw = g.kp * (q_des - q) + g.kd * (qd_des - qd) + g.feedforward;
  const double limit = std::max(max_output_torque, 0.0);
  const double tau = std::clamp(raw, -limit, limit);
  return {tau, tau != raw};
}

double current_from_torque(const ActuatorParams& p, double tau_out) {
  if (p.literal_current_formula) return tau_out * p.torque_constant;
  return tau_out / p.gear_ratio / p.torque_constant;
}

PowerSample electrical_power(const ActuatorParams& p, double tau_out, double omega_out, double time) {
  PowerSample s;
  s.time = time;
  s.torque = tau_out;
  s.current = current_from_torque(p, tau_out);
  const double omega_motor = p.gear_ratio * omega_out;
  s.voltage = omega_motor * p.back_emf_constant + s.current * p.phase_resistance;
  s.power = s.current * s.voltage;
  s.clamped = std::max(s.power, 0.0);
  return s;
}

void EnergyAccumulator::add(std::span<const PowerSample> actuators) {
  if (actuators.empty()) throw DegenerateInputError("accumulate_energy: step without actuators");
  const double t = actuators.front().time;
  if (count_ > 0 && t < last_time_) throw DegenerateInputError("accumulate_energy: samples out of time order");
  double power = 0.0, torque = 0.0;
  for (const auto& s : actuators) {
    power += s.clamped;
    torque += std::abs(s.torque);
  }
  peak_power_ = count_ == 0 ? power : std::max(peak_power_, power);
  peak_torque_ = count_ == 0 ? torque : std::max(peak_torque_, torque);
  power_sum_ += power;
  torque_sum_ += torque;
  last_time_ = t;
  ++count_;
}

EnergyTotals EnergyAccumulator::totals() const {
  if (count_ == 0) throw DegenerateInputError("accumulate_energy: empty sample stream");
  const double n = static_cast<double>(count_);
  return {peak_power_, power_sum_ / n, peak_torque_, torque_sum_ / n, count_};
}

}  // namespace quadsim
