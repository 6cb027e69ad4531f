#pragma once

// Trial telemetry: one row per logging tick, written as CSV or JSON lines
// under a versioned schema.

#include "quadsim/robot_state.hpp"

#include <array>
#include <ostream>
#include <string>
#include <vector>

namespace quadsim {

inline constexpr const char* kTelemetrySchema = "quadsim.telemetry/1";

struct LogRow {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
  Vec3 linear_velocity = Vec3::Zero();   // world frame
  Vec3 angular_velocity = Vec3::Zero();  // trunk frame
  Vec12 q = Vec12::Zero();
  Vec12 qd = Vec12::Zero();
  Vec12 tau = Vec12::Zero();
  // Ground reaction on each foot, world frame: joint-torque estimate with the
  // serial limb model, the same with exact limb dynamics, and contact truth.
  std::array<Vec3, kNumLegs> grf_estimated{};
  std::array<Vec3, kNumLegs> grf_model{};
  std::array<Vec3, kNumLegs> grf_true{};
  std::array<bool, kNumLegs> contact{};
  Vec12 power = Vec12::Zero();  // clamped electrical power per actuator, W
  double total_power = 0.0;     // sum of clamped power, W
  double total_abs_torque = 0.0;
  Vec3 imu_accel = Vec3::Zero();
  Vec3 imu_gyro = Vec3::Zero();
  double imu_speed = 0.0;  // dead-reckoned speed, m/s
};

struct TrialLog {
  double sample_period = 0.002;
  std::vector<LogRow> rows;

  bool empty() const { return rows.empty(); }
  std::size_t size() const { return rows.size(); }
  // Rows [first, first + count).
  TrialLog slice(std::size_t first, std::size_t count) const;
  // Last `count` rows; throws DegenerateInputError if fewer are available.
  TrialLog tail(std::size_t count) const;
};

std::vector<std::string> telemetry_columns();
std::vector<double> telemetry_values(const LogRow& row);

void write_csv(const TrialLog& log, std::ostream& out);
void write_jsonl(const TrialLog& log, std::ostream& out);

// Linear interpolation onto a uniform grid `factor` times finer. Contact
// flags take the value of the earlier sample.
TrialLog resample(const TrialLog& log, int factor);

}  // namespace quadsim
