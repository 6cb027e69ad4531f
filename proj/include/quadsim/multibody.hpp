#pragma once

// Tree-structured rigid multibody dynamics with revolute joints, an optional
// floating base, and linear joint coupling (mimic joints). Recursive
// Newton-Euler for inverse dynamics, composite-rigid-body for the joint-space
// mass matrix.
//
// Generalized velocity layout: [base twist (omega, v) in base coordinates]
// (floating base only), then one rate per independent joint coordinate.

#include "quadsim/spatial.hpp"

#include <span>
#include <string>
#include <vector>

namespace quadsim {

struct MultibodyBody {
  std::string name;
  int parent = -1;               // -1 is the base
  spatial::Transform tree;       // parent frame -> joint frame at zero angle
  Vec3 axis = Vec3::UnitY();     // revolute axis, joint frame
  int dof = 0;                   // index of the driving joint coordinate
  double multiplier = 1.0;       // joint angle = multiplier * q[dof]
  spatial::Mat6 inertia = spatial::Mat6::Zero();  // about the body frame origin
};

struct BasePose {
  Mat3 rotation = Mat3::Identity();  // base -> world
  Vec3 position = Vec3::Zero();
};

struct MultibodyModel {
  bool floating_base = false;
  spatial::Mat6 base_inertia = spatial::Mat6::Zero();
  std::vector<MultibodyBody> bodies;  // parents always precede children
  int num_joint_dofs = 0;
  Eigen::VectorXd armature;  // reflected rotor inertia per joint coordinate

  int base_dofs() const { return floating_base ? 6 : 0; }
  int nv() const { return base_dofs() + num_joint_dofs; }
  int add_body(MultibodyBody body);
};

struct MultibodyKinematics {
  spatial::Transform world_to_base;
  spatial::Vec6 base_velocity = spatial::Vec6::Zero();
  std::vector<spatial::Transform> parent_to_body;
  std::vector<spatial::Transform> world_to_body;
  std::vector<spatial::Vec6> velocity;  // body coordinates
};

// A force applied at a world point on a body (body -1 is the base).
struct PointForce {
  int body = -1;
  Vec3 point = Vec3::Zero();
  Vec3 force = Vec3::Zero();
};

MultibodyKinematics compute_kinematics(const MultibodyModel& model, const BasePose& base, const Eigen::VectorXd& q,
                                       const Eigen::VectorXd& nu);

// Generalized forces M(q) nu_dot + h(q, nu) - J^T f_ext (armature included).
Eigen::VectorXd inverse_dynamics(const MultibodyModel& model, const MultibodyKinematics& kin,
                                 const Eigen::VectorXd& nu, const Eigen::VectorXd& nu_dot, const Vec3& gravity_world,
                                 std::span<const PointForce> external = {});

Eigen::MatrixXd mass_matrix(const MultibodyModel& model, const MultibodyKinematics& kin);

Vec3 point_position(const MultibodyKinematics& kin, int body, const Vec3& local);
Vec3 point_velocity(const MultibodyKinematics& kin, int body, const Vec3& local);
// World-frame translational Jacobian (3 x nv) of a point fixed on a body.
Eigen::Matrix<double, 3, Eigen::Dynamic> point_jacobian(const MultibodyModel& model, const MultibodyKinematics& kin,
                                                        int body, const Vec3& local);

// Computed body by body from spatial velocities, independently of the mass matrix.
double kinetic_energy(const MultibodyModel& model, const MultibodyKinematics& kin, const Eigen::VectorXd& nu);
double potential_energy(const MultibodyModel& model, const MultibodyKinematics& kin, const Vec3& gravity_world);
Vec3 center_of_mass(const MultibodyModel& model, const MultibodyKinematics& kin);
double total_mass(const MultibodyModel& model);

}  // namespace quadsim
