#pragma once

#include "quadsim/limb_kinematics.hpp"

#include <Eigen/Geometry>

namespace quadsim {

using Vec12 = Eigen::Matrix<double, 12, 1>;

// Trunk pose and twist plus the twelve joint coordinates (leg-major, then
// abad, hip, knee).
struct RobotState {
  double time = 0.0;
  Vec3 position = Vec3::Zero();                               // world
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();  // trunk -> world
  Vec3 linear_velocity = Vec3::Zero();                        // world
  Vec3 angular_velocity = Vec3::Zero();                       // trunk frame
  Vec12 q = Vec12::Zero();
  Vec12 qd = Vec12::Zero();

  Mat3 rotation() const { return orientation.toRotationMatrix(); }
  JointAngles leg_angles(Leg leg) const { return JointAngles::from_vector(q.segment<3>(3 * index(leg))); }
  Vec3 leg_rates(Leg leg) const { return qd.segment<3>(3 * index(leg)); }
  bool finite() const;
};

// Rotation vector of a rotation matrix (axis * angle).
Vec3 rotation_log(const Mat3& R);
Mat3 rotation_exp(const Vec3& w);

}  // namespace quadsim
