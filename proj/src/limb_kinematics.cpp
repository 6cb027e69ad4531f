#include "quadsim/limb_kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

namespace quadsim {

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

JointAngles JointAngles::wrapped() const { return {wrap_angle(abad), wrap_angle(hip), wrap_angle(knee)}; }

bool JointAngles::finite() const { return std::isfinite(abad) && std::isfinite(hip) && std::isfinite(knee); }

double FootJacobian::condition_number() const {
  const Eigen::JacobiSVD<Mat3> svd(matrix);
  const Vec3& s = svd.singularValues();
  if (s(2) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(2);
}

Vec3 forward_kinematics(const LimbMorphology& limb, const JointAngles& q, Side side) {
  const double d = limb.lateral_offset();
  const double upper = limb.proximal_length();
  const double lower = limb.distal_length();
  const double s1 = std::sin(q.abad), c1 = std::cos(q.abad);
  const double s2 = std::sin(q.hip), c2 = std::cos(q.hip);
  const double s23 = std::sin(q.hip + q.knee), c23 = std::cos(q.hip + q.knee);

  const double sagittal_x = upper * s2 + lower * s23;
  const double reach = upper * c2 + lower * c23;  // hip-to-foot along the leg's "down" axis
  Vec3 p(sagittal_x, d * c1 + s1 * reach, d * s1 - c1 * reach);
  p.y() *= side_sign(side);
  return p;
}

FootJacobian jacobian_foot(const LimbMorphology& limb, const JointAngles& q, Side side) {
  const double L = limb.lateral_offset();  // (L1 + L4) for the three-link limb
  const double L2 = limb.proximal_length();
  const double L3 = limb.distal_length();
  const double s1 = std::sin(q.abad), c1 = std::cos(q.abad);
  const double s2 = std::sin(q.hip), c2 = std::cos(q.hip);
  const double s3 = std::sin(q.knee), c3 = std::cos(q.knee);
  const double c23 = c2 * c3 - s2 * s3;
  const double s23 = s2 * c3 + c2 * s3;

  FootJacobian J;
  J.matrix << 0.0, L3 * c23 + L2 * c2, L3 * c23,
      L3 * c1 * c23 + L2 * c1 * c2 - L * s1, -L3 * s1 * s23 - L2 * s1 * s2, -L3 * s1 * s23,
      L3 * s1 * c23 + L2 * c2 * s1 + L * c1, L3 * c1 * s23 + L2 * c1 * s2, L3 * c1 * s23;
  J.matrix.row(1) *= side_sign(side);
  return J;
}

GrfEstimate estimate_grf(const LimbMorphology& limb, const JointAngles& q, const Vec3& tau, const Vec3& calibration,
                         Side side, const GrfOptions& options) {
  const FootJacobian J = jacobian_foot(limb, q, side);
  const Eigen::JacobiSVD<Mat3> svd(J.matrix);
  const Vec3& sv = svd.singularValues();
  const double rcond = sv(0) > 0.0 ? sv(2) / sv(0) : 0.0;
  const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(rcond >= options.min_reciprocal_condition)) {
    throw SingularConfigurationError(fmt::format("foot Jacobian near singular (condition number {:.3g})", cond), cond);
  }
  GrfEstimate out;
  out.force = J.matrix.transpose().fullPivLu().solve(tau).cwiseProduct(calibration);
  out.calibration_applied = calibration != Vec3::Ones();
  out.condition_number = cond;
  return out;
}

namespace {

double unwrap_near(double angle, double reference) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return angle + two_pi * std::round((reference - angle) / two_pi);
}

struct IkSolution {
  JointAngles q;
  bool reachable = true;
};

// Solves in the left-limb frame, clamping the target into the workspace when
// it is out of reach so the caller can report the nearest reachable point.
IkSolution solve_ik(const LimbMorphology& limb, Vec3 t, const JointAngles& seed) {
  const double d = limb.lateral_offset();
  const double upper = limb.proximal_length();
  const double lower = limb.distal_length();
  IkSolution sol;

  const double seed_reach = upper * std::cos(seed.hip) + lower * std::cos(seed.hip + seed.knee);
  const double branch = seed_reach >= 0.0 ? 1.0 : -1.0;

  double lateral_sq = t.y() * t.y() + t.z() * t.z();
  double rho_sq = lateral_sq - d * d;
  if (rho_sq < -1e-12 * (d * d + 1e-300)) {
    sol.reachable = false;
    const double n = std::sqrt(lateral_sq);
    if (n > 0.0) {
      t.y() *= d / n;
      t.z() *= d / n;
    } else {
      t.y() = d;
      t.z() = 0.0;
    }
    rho_sq = 0.0;
  }
  double reach = branch * std::sqrt(std::max(rho_sq, 0.0));
  const double abad = std::atan2(t.z(), t.y()) - std::atan2(-reach, d);

  double x = t.x();
  double r_sq = x * x + reach * reach;
  const double r_max = upper + lower;
  const double r_min = std::abs(upper - lower);
  const double r = std::sqrt(r_sq);
  const double tol = 1e-12 * r_max;
  if (r > r_max + tol || r < r_min - tol) {
    sol.reachable = false;
    const double target_r = std::clamp(r, r_min, r_max);
    if (r > 0.0) {
      x *= target_r / r;
      reach *= target_r / r;
    } else {
      reach = branch * target_r;
    }
    r_sq = target_r * target_r;
  }
  const double c3 = std::clamp((r_sq - upper * upper - lower * lower) / (2.0 * upper * lower), -1.0, 1.0);
  const double knee_sign = limb.knee_direction == KneeDirection::Backward ? 1.0 : -1.0;
  const double knee = knee_sign * std::acos(c3);
  const double hip = std::atan2(x, reach) - std::atan2(lower * std::sin(knee), upper + lower * std::cos(knee));

  sol.q = {unwrap_near(wrap_angle(abad), seed.abad), unwrap_near(wrap_angle(hip), seed.hip),
           unwrap_near(knee, seed.knee)};
  return sol;
}

}  // namespace

JointAngles inverse_kinematics(const LimbMorphology& limb, const Vec3& target, const JointAngles& seed, Side side) {
  if (!target.allFinite()) throw WorkspaceError("IK target must be finite", Vec3::Zero());
  Vec3 t = target;
  t.y() *= side_sign(side);
  const IkSolution sol = solve_ik(limb, t, seed.finite() ? seed : JointAngles{});
  if (!sol.reachable) {
    const Vec3 nearest = forward_kinematics(limb, sol.q, side);
    throw WorkspaceError(fmt::format("target ({:.4f}, {:.4f}, {:.4f}) outside the limb workspace", target.x(),
                                     target.y(), target.z()),
                         nearest);
  }
  return sol.q;
}

Vec3 calibrate_axes(const std::vector<std::pair<Vec3, Vec3>>& pairs) {
  if (pairs.size() < 2) throw DegenerateInputError("calibration needs at least two trials");
  Vec3 est_ref = Vec3::Zero();
  Vec3 est_sq = Vec3::Zero();
  for (const auto& [est, ref] : pairs) {
    est_ref += est.cwiseProduct(ref);
    est_sq += est.cwiseProduct(est);
  }
  Vec3 scale;
  for (int axis = 0; axis < 3; ++axis) {
    if (!(est_sq(axis) > 0.0)) {
      throw CalibrationError(fmt::format("axis {} has all-zero estimates; scale undetermined", axis), axis);
    }
    scale(axis) = est_ref(axis) / est_sq(axis);
  }
  return scale;
}

}  // namespace quadsim
