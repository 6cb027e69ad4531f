#pragma once

#include "quadsim/common.hpp"
#include "quadsim/morphology.hpp"

#include <utility>
#include <vector>

namespace quadsim {

// Joint coordinates of one limb under the serial-chain model.
//   abad : abduction/adduction about the fore-aft axis
//   hip  : femur pitch, zero with the femur pointing straight down
//   knee : tibia pitch relative to the femur; positive bends the knee backward
struct JointAngles {
  double abad = 0.0;
  double hip = 0.0;
  double knee = 0.0;

  Vec3 vector() const { return {abad, hip, knee}; }
  static JointAngles from_vector(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
  // Each angle wrapped to (-pi, pi].
  JointAngles wrapped() const;
  bool finite() const;
};

double wrap_angle(double angle);

// 3x3 foot Jacobian: rows are foot-velocity components (fore-aft, lateral,
// vertical) in the limb base frame, columns are (abad, hip, knee) rates.
struct FootJacobian {
  Mat3 matrix = Mat3::Zero();

  // 2-norm condition number; infinity for an exactly singular matrix.
  double condition_number() const;
};

struct GrfEstimate {
  Vec3 force = Vec3::Zero();  // N, limb base frame
  bool calibration_applied = false;
  double condition_number = 1.0;
};

struct GrfOptions {
  // Reciprocal condition number below which the estimate is refused.
  double min_reciprocal_condition = 1e-8;
};

// Limb base frame sits on the abduction axis at the hip. The foot position is
// computed for a left limb and mirrored through the sagittal plane (lateral
// coordinate negated) for a right limb. In the four-link configuration the
// tarsus is held parallel to the femur and its endpoint is returned.
Vec3 forward_kinematics(const LimbMorphology& limb, const JointAngles& q, Side side = Side::Left);

// Analytic foot Jacobian. For a three-link limb this is the textbook matrix
// with lateral offset (l1 + l4); a four-link limb substitutes the femur +
// tarsus length for the femur term and l1 for the lateral offset.
FootJacobian jacobian_foot(const LimbMorphology& limb, const JointAngles& q, Side side = Side::Left);

// F = cal .* (J^T)^-1 tau. tau is the joint torque that balances a foot
// force F (tau = J^T F). Throws SingularConfigurationError when the
// reciprocal condition number of J drops below the configured threshold.
GrfEstimate estimate_grf(const LimbMorphology& limb, const JointAngles& q, const Vec3& tau,
                         const Vec3& calibration = Vec3::Ones(), Side side = Side::Left,
                         const GrfOptions& options = {});

// Closed-form IK. The knee branch follows knee_direction; the seed selects
// whether the foot is below (usual) or above the hip pitch axis and is used
// to unwrap the result to the representation nearest the seed.
// Throws WorkspaceError carrying the nearest reachable foot position.
JointAngles inverse_kinematics(const LimbMorphology& limb, const Vec3& target, const JointAngles& seed = {},
                               Side side = Side::Left);

// Per-axis least-squares scale minimizing sum (s * est - ref)^2.
Vec3 calibrate_axes(const std::vector<std::pair<Vec3, Vec3>>& estimate_reference_pairs);

}  // namespace quadsim
