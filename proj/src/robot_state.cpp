#include "quadsim/robot_state.hpp"

namespace quadsim {

bool RobotState::finite() const {
  return std::isfinite(time) && position.allFinite() && orientation.coeffs().allFinite() &&
         linear_velocity.allFinite() && angular_velocity.allFinite() && q.allFinite() && qd.allFinite();
}

Vec3 rotation_log(const Mat3& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

Mat3 rotation_exp(const Vec3& w) {
  const double angle = w.norm();
  if (angle < 1e-300) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

}  // namespace quadsim
