#pragma once

// Dead-reckoned trunk speed from a stream of IMU samples.

#include "quadsim/world.hpp"

#include <span>
#include <vector>

namespace quadsim {

struct SpeedTrace {
  std::vector<double> time;
  std::vector<Vec3> velocity;  // world frame
  std::vector<double> speed;   // Euclidean norm of velocity
  double mean = 0.0;
};

// Trapezoidal integration of gravity-compensated world-frame acceleration.
// Orientation is propagated from the gyro; initial velocity and orientation
// refer to the first sample. Each sample's specific force and rate describe
// the interval ending at its timestamp. Throws DegenerateInputError for fewer
// than two samples or non-uniform timestamps.
SpeedTrace integrate_velocity(std::span<const ImuSample> samples, const Vec3& initial_velocity,
                              const Mat3& initial_orientation = Mat3::Identity(),
                              double gravity = kStandardGravity);

}  // namespace quadsim
