#include "quadsim/telemetry.hpp"

#include <fmt/format.h>

#include <cmath>

namespace quadsim {

namespace {

constexpr std::array<const char*, 3> kAxes{"x", "y", "z"};
constexpr std::array<const char*, 3> kJoints{"abad", "hip", "knee"};

std::string joint_name(int j) { return fmt::format("{}_{}", leg_name(static_cast<Leg>(j / 3)), kJoints[j % 3]); }

}  // namespace

TrialLog TrialLog::slice(std::size_t first, std::size_t count) const {
  if (first + count > rows.size()) throw DegenerateInputError("TrialLog::slice: range exceeds the log");
  TrialLog out;
  out.sample_period = sample_period;
  out.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(first),
                  rows.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

TrialLog TrialLog::tail(std::size_t count) const {
  if (count > rows.size()) {
    throw DegenerateInputError(fmt::format("TrialLog::tail: {} rows requested, {} available", count, rows.size()));
  }
  return slice(rows.size() - count, count);
}

std::vector<std::string> telemetry_columns() {
  std::vector<std::string> c{"time"};
  for (const char* a : kAxes) c.push_back(fmt::format("trunk_p{}", a));
  for (const char* a : {"w", "x", "y", "z"}) c.push_back(fmt::format("trunk_q{}", a));
  for (const char* a : kAxes) c.push_back(fmt::format("trunk_v{}", a));
  for (const char* a : kAxes) c.push_back(fmt::format("trunk_w{}", a));
  for (const char* prefix : {"q", "qd", "tau"}) {
    for (int j = 0; j < 12; ++j) c.push_back(fmt::format("{}_{}", prefix, joint_name(j)));
  }
  for (const char* prefix : {"grf_est", "grf_model", "grf_true"}) {
    for (Leg leg : kAllLegs) {
      for (const char* a : kAxes) c.push_back(fmt::format("{}_{}_{}", prefix, leg_name(leg), a));
    }
  }
  for (Leg leg : kAllLegs) c.push_back(fmt::format("contact_{}", leg_name(leg)));
  for (int j = 0; j < 12; ++j) c.push_back(fmt::format("power_{}", joint_name(j)));
  c.push_back("power_total");
  c.push_back("abs_torque_total");
  for (const char* a : kAxes) c.push_back(fmt::format("imu_a{}", a));
  for (const char* a : kAxes) c.push_back(fmt::format("imu_g{}", a));
  c.push_back("imu_speed");
  return c;
}

std::vector<double> telemetry_values(const LogRow& r) {
  std::vector<double> v{r.time};
  auto push3 = [&](const Vec3& x) { v.insert(v.end(), {x.x(), x.y(), x.z()}); };
  push3(r.position);
  v.insert(v.end(), {r.orientation.w(), r.orientation.x(), r.orientation.y(), r.orientation.z()});
  push3(r.linear_velocity);
  push3(r.angular_velocity);
  for (const Vec12* x : {&r.q, &r.qd, &r.tau}) v.insert(v.end(), x->data(), x->data() + 12);
  for (const auto* set : {&r.grf_estimated, &r.grf_model, &r.grf_true}) {
    for (const Vec3& f : *set) push3(f);
  }
  for (bool c : r.contact) v.push_back(c ? 1.0 : 0.0);
  v.insert(v.end(), r.power.data(), r.power.data() + 12);
  v.push_back(r.total_power);
  v.push_back(r.total_abs_torque);
  push3(r.imu_accel);
  push3(r.imu_gyro);
  v.push_back(r.imu_speed);
  return v;
}

void write_csv(const TrialLog& log, std::ostream& out) {
  out << "# schema: " << kTelemetrySchema << "\n";
  const auto cols = telemetry_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const LogRow& r : log.rows) {
    const auto v = telemetry_values(r);
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << format_number(v[i]);
    out << "\n";
  }
}

void write_jsonl(const TrialLog& log, std::ostream& out) {
  const auto cols = telemetry_columns();
  out << fmt::format("{{\"schema\":\"{}\",\"sample_period\":{},\"columns\":{}}}\n", kTelemetrySchema,
                     format_number(log.sample_period), cols.size());
  for (const LogRow& r : log.rows) {
    const auto v = telemetry_values(r);
    out << "{";
    for (std::size_t i = 0; i < v.size(); ++i) {
      // JSON has no NaN; non-finite values become null.
      out << (i ? "," : "") << '"' << cols[i] << "\":" << (std::isfinite(v[i]) ? format_number(v[i]) : "null");
    }
    out << "}\n";
  }
}

TrialLog resample(const TrialLog& log, int factor) {
  if (factor < 1) throw DegenerateInputError("resample: factor must be at least 1");
  if (log.rows.size() < 2) throw DegenerateInputError("resample: need at least two rows");
  TrialLog out;
  out.sample_period = log.sample_period / factor;
  auto lerp3 = [](const Vec3& a, const Vec3& b, double s) -> Vec3 { return a + s * (b - a); };
  for (std::size_t k = 0; k + 1 < log.rows.size(); ++k) {
    const LogRow& a = log.rows[k];
    const LogRow& b = log.rows[k + 1];
    for (int i = 0; i < factor; ++i) {
      const double s = static_cast<double>(i) / factor;
      LogRow r = a;
      r.time = a.time + s * (b.time - a.time);
      r.position = lerp3(a.position, b.position, s);
      r.orientation = a.orientation.slerp(s, b.orientation);
      r.linear_velocity = lerp3(a.linear_velocity, b.linear_velocity, s);
      r.angular_velocity = lerp3(a.angular_velocity, b.angular_velocity, s);
      r.q = a.q + s * (b.q - a.q);
      r.qd = a.qd + s * (b.qd - a.qd);
      r.tau = a.tau + s * (b.tau - a.tau);
      for (int l = 0; l < kNumLegs; ++l) {
        r.grf_estimated[l] = lerp3(a.grf_estimated[l], b.grf_estimated[l], s);
        r.grf_model[l] = lerp3(a.grf_model[l], b.grf_model[l], s);
        r.grf_true[l] = lerp3(a.grf_true[l], b.grf_true[l], s);
      }
      r.power = a.power + s * (b.power - a.power);
      r.total_power = a.total_power + s * (b.total_power - a.total_power);
      r.total_abs_torque = a.total_abs_torque + s * (b.total_abs_torque - a.total_abs_torque);
      r.imu_accel = lerp3(a.imu_accel, b.imu_accel, s);
      r.imu_gyro = lerp3(a.imu_gyro, b.imu_gyro, s);
      r.imu_speed = a.imu_speed + s * (b.imu_speed - a.imu_speed);
      out.rows.push_back(r);
    }
  }
  out.rows.push_back(log.rows.back());
  return out;
}

}  // namespace quadsim
