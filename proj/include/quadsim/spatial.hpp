#pragma once

// Spatial (6D) algebra in the angular-first convention: motion vectors are
// (omega, v), force vectors are (n, f).

#include "quadsim/common.hpp"

namespace quadsim::spatial {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

inline Mat3 axis_rotation(const Vec3& axis, double angle) { return Eigen::AngleAxisd(angle, axis).toRotationMatrix(); }

// Plucker transform from frame A to frame B, where B's origin sits at r
// (A coordinates) and E rotates A coordinates into B coordinates.
struct Transform {
  Mat3 E = Mat3::Identity();
  Vec3 r = Vec3::Zero();

  Vec6 apply_motion(const Vec6& m) const {
    Vec6 out;
    const Vec3 w = m.head<3>();
    out.head<3>() = E * w;
    out.tail<3>() = E * (m.tail<3>() - r.cross(w));
    return out;
  }
  // X^T f: force expressed in B back to A.
  Vec6 apply_transpose_force(const Vec6& f) const {
    Vec6 out;
    const Vec3 fl = E.transpose() * f.tail<3>();
    out.head<3>() = E.transpose() * f.head<3>() + r.cross(fl);
    out.tail<3>() = fl;
    return out;
  }
  // Returns (this) * (a_to_this_parent): composition A -> parent -> this.
  Transform operator*(const Transform& inner) const { return {E * inner.E, inner.r + inner.E.transpose() * r}; }

  Mat6 matrix() const {
    Mat6 X = Mat6::Zero();
    X.topLeftCorner<3, 3>() = E;
    X.bottomRightCorner<3, 3>() = E;
    X.bottomLeftCorner<3, 3>() = -E * skew(r);
    return X;
  }
  // Rotation of B relative to A, and B's origin, both in A coordinates.
  Mat3 rotation() const { return E.transpose(); }
  const Vec3& origin() const { return r; }
};

inline Vec6 cross_motion(const Vec6& v, const Vec6& m) {
  const Vec3 w = v.head<3>();
  Vec6 out;
  out.head<3>() = w.cross(m.head<3>());
  out.tail<3>() = v.tail<3>().cross(m.head<3>()) + w.cross(m.tail<3>());
  return out;
}

inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  const Vec3 w = v.head<3>();
  Vec6 out;
  out.head<3>() = w.cross(f.head<3>()) + v.tail<3>().cross(f.tail<3>());
  out.tail<3>() = w.cross(f.tail<3>());
  return out;
}

// Spatial inertia about the frame origin of a body with mass m, COM c and
// rotational inertia Ic about the COM.
inline Mat6 inertia(double mass, const Vec3& com, const Mat3& inertia_com) {
  const Mat3 C = skew(com);
  Mat6 I;
  I.topLeftCorner<3, 3>() = inertia_com + mass * C * C.transpose();
  I.topRightCorner<3, 3>() = mass * C;
  I.bottomLeftCorner<3, 3>() = mass * C.transpose();
  I.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
  return I;
}

inline Mat6 point_mass(double mass, const Vec3& position) { return inertia(mass, position, Mat3::Zero()); }

// Slender rod of the given length starting at `start` and running along unit
// `direction`, with its COM `com_offset` along the rod.
inline Mat6 rod(double mass, double length, const Vec3& start, const Vec3& direction, double com_offset) {
  const Mat3 P = Mat3::Identity() - direction * direction.transpose();
  return inertia(mass, start + com_offset * direction, mass * length * length / 12.0 * P);
}

}  // namespace quadsim::spatial
