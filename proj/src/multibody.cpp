#include "quadsim/multibody.hpp"

namespace quadsim {

using spatial::Mat6;
using spatial::Transform;
using spatial::Vec6;

int MultibodyModel::add_body(MultibodyBody body) {
  if (body.parent >= static_cast<int>(bodies.size())) throw Error("multibody: parent must precede child");
  num_joint_dofs = std::max(num_joint_dofs, body.dof + 1);
  bodies.push_back(std::move(body));
  if (armature.size() < num_joint_dofs) armature.conservativeResizeLike(Eigen::VectorXd::Zero(num_joint_dofs));
  return static_cast<int>(bodies.size()) - 1;
}

namespace {

Vec6 motion_subspace(const MultibodyBody& b) {
  Vec6 s = Vec6::Zero();
  s.head<3>() = b.multiplier * b.axis;
  return s;
}

// Body mass and COM (body coordinates) recovered from a spatial inertia.
std::pair<double, Vec3> mass_and_com(const Mat6& I) {
  const double m = I(5, 5);
  if (m <= 0.0) return {0.0, Vec3::Zero()};
  const Mat3 mc = I.topRightCorner<3, 3>();
  return {m, Vec3(mc(2, 1), mc(0, 2), mc(1, 0)) / m};
}

Vec6 force_in_body(const Transform& world_to_body, const PointForce& pf) {
  Vec6 f;
  f.head<3>() = world_to_body.E * (pf.point - world_to_body.r).cross(pf.force);
  f.tail<3>() = world_to_body.E * pf.force;
  return f;
}

}  // namespace

MultibodyKinematics compute_kinematics(const MultibodyModel& model, const BasePose& base, const Eigen::VectorXd& q,
                                       const Eigen::VectorXd& nu) {
  MultibodyKinematics kin;
  const int nb = static_cast<int>(model.bodies.size());
  const int off = model.base_dofs();
  const bool has_vel = nu.size() == model.nv();
  kin.world_to_base = {base.rotation.transpose(), base.position};
  if (model.floating_base && has_vel) kin.base_velocity = nu.head<6>();
  kin.parent_to_body.resize(nb);
  kin.world_to_body.resize(nb);
  kin.velocity.resize(nb);
  for (int i = 0; i < nb; ++i) {
    const MultibodyBody& b = model.bodies[i];
    const double angle = b.multiplier * q(b.dof);
    const Transform joint{spatial::axis_rotation(b.axis, angle).transpose(), Vec3::Zero()};
    kin.parent_to_body[i] = joint * b.tree;
    const Transform& parent_world = b.parent < 0 ? kin.world_to_base : kin.world_to_body[b.parent];
    kin.world_to_body[i] = kin.parent_to_body[i] * parent_world;
    const Vec6& parent_vel = b.parent < 0 ? kin.base_velocity : kin.velocity[b.parent];
    kin.velocity[i] = kin.parent_to_body[i].apply_motion(parent_vel);
    if (has_vel) kin.velocity[i] += motion_subspace(b) * nu(off + b.dof);
  }
  return kin;
}

Eigen::VectorXd inverse_dynamics(const MultibodyModel& model, const MultibodyKinematics& kin,
                                 const Eigen::VectorXd& nu, const Eigen::VectorXd& nu_dot, const Vec3& gravity_world,
                                 std::span<const PointForce> external) {
  const int nb = static_cast<int>(model.bodies.size());
  const int off = model.base_dofs();
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(model.nv());

  // Gravity enters as a fictitious upward acceleration of the base.
  Vec6 gravity_motion = Vec6::Zero();
  gravity_motion.tail<3>() = gravity_world;
  Vec6 base_acc = -kin.world_to_base.apply_motion(gravity_motion);
  if (model.floating_base) base_acc += nu_dot.head<6>();

  std::vector<Vec6> acc(nb), force(nb);
  for (int i = 0; i < nb; ++i) {
    const MultibodyBody& b = model.bodies[i];
    const Vec6 s = motion_subspace(b);
    const Vec6& parent_acc = b.parent < 0 ? base_acc : acc[b.parent];
    acc[i] = kin.parent_to_body[i].apply_motion(parent_acc) + s * nu_dot(off + b.dof) +
             spatial::cross_motion(kin.velocity[i], s * nu(off + b.dof));
    force[i] = b.inertia * acc[i] + spatial::cross_force(kin.velocity[i], b.inertia * kin.velocity[i]);
  }
  Vec6 base_force = Vec6::Zero();
  if (model.floating_base) {
    const Vec6& vb = kin.base_velocity;
    base_force = model.base_inertia * base_acc + spatial::cross_force(vb, model.base_inertia * vb);
  }
  for (const PointForce& pf : external) {
    if (pf.body < 0) {
      base_force -= force_in_body(kin.world_to_base, pf);
    } else {
      force[pf.body] -= force_in_body(kin.world_to_body[pf.body], pf);
    }
  }
  for (int i = nb - 1; i >= 0; --i) {
    const MultibodyBody& b = model.bodies[i];
    tau(off + b.dof) += motion_subspace(b).dot(force[i]);
    const Vec6 to_parent = kin.parent_to_body[i].apply_transpose_force(force[i]);
    if (b.parent < 0) {
      base_force += to_parent;
    } else {
      force[b.parent] += to_parent;
    }
  }
  if (model.floating_base) tau.head<6>() = base_force;
  for (int k = 0; k < model.num_joint_dofs; ++k) tau(off + k) += model.armature(k) * nu_dot(off + k);
  return tau;
}

Eigen::MatrixXd mass_matrix(const MultibodyModel& model, const MultibodyKinematics& kin) {
  const int nb = static_cast<int>(model.bodies.size());
  const int off = model.base_dofs();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(model.nv(), model.nv());

  std::vector<Mat6> composite(nb);
  for (int i = 0; i < nb; ++i) composite[i] = model.bodies[i].inertia;
  Mat6 base_composite = model.base_inertia;
  for (int i = nb - 1; i >= 0; --i) {
    const Mat6 X = kin.parent_to_body[i].matrix();
    const Mat6 contribution = X.transpose() * composite[i] * X;
    const int p = model.bodies[i].parent;
    if (p < 0) {
      base_composite += contribution;
    } else {
      composite[p] += contribution;
    }
  }

  for (int i = 0; i < nb; ++i) {
    const MultibodyBody& bi = model.bodies[i];
    const int a = off + bi.dof;
    Vec6 F = composite[i] * motion_subspace(bi);
    H(a, a) += motion_subspace(bi).dot(F);
    int j = i;
    while (model.bodies[j].parent >= 0) {
      F = kin.parent_to_body[j].apply_transpose_force(F);
      j = model.bodies[j].parent;
      const MultibodyBody& bj = model.bodies[j];
      const int c = off + bj.dof;
      const double value = motion_subspace(bj).dot(F);
      H(a, c) += value;
      H(c, a) += value;
    }
    if (model.floating_base) {
      F = kin.parent_to_body[j].apply_transpose_force(F);
      H.block<6, 1>(0, a) += F;
      H.block<1, 6>(a, 0) += F.transpose();
    }
  }
  if (model.floating_base) H.topLeftCorner<6, 6>() = base_composite;
  for (int k = 0; k < model.num_joint_dofs; ++k) H(off + k, off + k) += model.armature(k);
  return H;
}

Vec3 point_position(const MultibodyKinematics& kin, int body, const Vec3& local) {
  const Transform& X = body < 0 ? kin.world_to_base : kin.world_to_body[body];
  return X.r + X.E.transpose() * local;
}

Vec3 point_velocity(const MultibodyKinematics& kin, int body, const Vec3& local) {
  const Transform& X = body < 0 ? kin.world_to_base : kin.world_to_body[body];
  const Vec6& v = body < 0 ? kin.base_velocity : kin.velocity[body];
  return X.E.transpose() * (v.tail<3>() + v.head<3>().cross(local));
}

Eigen::Matrix<double, 3, Eigen::Dynamic> point_jacobian(const MultibodyModel& model, const MultibodyKinematics& kin,
                                                        int body, const Vec3& local) {
  const int off = model.base_dofs();
  Eigen::Matrix<double, 3, Eigen::Dynamic> J = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, model.nv());
  const Vec3 p = point_position(kin, body, local);
  if (model.floating_base) {
    const Mat3 R = kin.world_to_base.rotation();
    const Vec3 rel = R.transpose() * (p - kin.world_to_base.r);
    J.leftCols<3>() = -R * spatial::skew(rel);
    J.middleCols<3>(3) = R;
  }
  for (int j = body; j >= 0; j = model.bodies[j].parent) {
    const MultibodyBody& b = model.bodies[j];
    const Transform& X = kin.world_to_body[j];
    const Vec3 axis_world = X.rotation() * (b.multiplier * b.axis);
    J.col(off + b.dof) += axis_world.cross(p - X.r);
  }
  return J;
}

double kinetic_energy(const MultibodyModel& model, const MultibodyKinematics& kin, const Eigen::VectorXd& nu) {
  double ke = 0.0;
  if (model.floating_base) ke += 0.5 * kin.base_velocity.dot(model.base_inertia * kin.base_velocity);
  for (size_t i = 0; i < model.bodies.size(); ++i) {
    ke += 0.5 * kin.velocity[i].dot(model.bodies[i].inertia * kin.velocity[i]);
  }
  const int off = model.base_dofs();
  for (int k = 0; k < model.num_joint_dofs; ++k) ke += 0.5 * model.armature(k) * nu(off + k) * nu(off + k);
  return ke;
}

double potential_energy(const MultibodyModel& model, const MultibodyKinematics& kin, const Vec3& gravity_world) {
  double pe = 0.0;
  if (model.floating_base) {
    const auto [m, com] = mass_and_com(model.base_inertia);
    pe -= m * gravity_world.dot(point_position(kin, -1, com));
  }
  for (size_t i = 0; i < model.bodies.size(); ++i) {
    const auto [m, com] = mass_and_com(model.bodies[i].inertia);
    pe -= m * gravity_world.dot(point_position(kin, static_cast<int>(i), com));
  }
  return pe;
}

double total_mass(const MultibodyModel& model) {
  double m = model.floating_base ? model.base_inertia(5, 5) : 0.0;
  for (const auto& b : model.bodies) m += b.inertia(5, 5);
  return m;
}

Vec3 center_of_mass(const MultibodyModel& model, const MultibodyKinematics& kin) {
  Vec3 sum = Vec3::Zero();
  double mass = 0.0;
  if (model.floating_base) {
    const auto [m, com] = mass_and_com(model.base_inertia);
    sum += m * point_position(kin, -1, com);
    mass += m;
  }
  for (size_t i = 0; i < model.bodies.size(); ++i) {
    const auto [m, com] = mass_and_com(model.bodies[i].inertia);
    sum += m * point_position(kin, static_cast<int>(i), com);
    mass += m;
  }
  return mass > 0.0 ? Vec3(sum / mass) : Vec3::Zero();
}

}  // namespace quadsim
