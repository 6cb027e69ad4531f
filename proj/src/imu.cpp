#include "quadsim/imu.hpp"

#include <fmt/format.h>

#include <cmath>

namespace quadsim {

SpeedTrace integrate_velocity(std::span<const ImuSample> samples, const Vec3& initial_velocity,
                              const Mat3& initial_orientation, double gravity) {
  if (samples.size() < 2) throw DegenerateInputError("integrate_velocity: need at least two samples");
  const double dt = samples[1].time - samples[0].time;
  if (!(dt > 0.0)) throw DegenerateInputError("integrate_velocity: timestamps must increase");
  const double tolerance = 1e-9 * std::max(1.0, std::abs(samples.back().time));
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const double expected = samples[0].time + static_cast<double>(k) * dt;
    if (std::abs(samples[k].time - expected) > tolerance + 1e-6 * dt) {
      throw DegenerateInputError(fmt::format("integrate_velocity: non-uniform timestamp at sample {}", k));
    }
  }

  const Vec3 g(0.0, 0.0, -gravity);
  SpeedTrace out;
  out.time.reserve(samples.size());
  out.velocity.reserve(samples.size());
  out.speed.reserve(samples.size());
  Mat3 R = initial_orientation;
  Vec3 v = initial_velocity;
  Vec3 a_prev = R * samples[0].accel + g;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (k > 0) {
      R = R * rotation_exp(dt * samples[k].gyro);
      const Vec3 a = R * samples[k].accel + g;
      v += 0.5 * dt * (a_prev + a);
      a_prev = a;
    }
    out.time.push_back(samples[k].time);
    out.velocity.push_back(v);
    out.speed.push_back(v.norm());
    out.mean += v.norm();
  }
  out.mean /= static_cast<double>(samples.size());
  return out;
}

}  // namespace quadsim
