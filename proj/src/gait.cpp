#include "quadsim/gait.hpp"

#include "quadsim/nnls.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace quadsim {

std::vector<Violation> validate(const GaitSchedule& g, const std::string& prefix) {
  std::vector<Violation> out;
  if (!(g.period > 0.0) || !std::isfinite(g.period)) out.push_back({prefix + ".period", "must be positive"});
  if (!(g.duty_factor > 0.0 && g.duty_factor < 1.0)) {
    out.push_back({prefix + ".duty_factor", "must lie strictly between 0 and 1"});
  }
  for (Leg leg : kAllLegs) {
    const double o = g.offsets[index(leg)];
    if (!(o >= 0.0 && o < 1.0)) {
      out.push_back({fmt::format("{}.offsets.{}", prefix, leg_name(leg)), "must lie in [0, 1)"});
    }
  }
  if (g.offsets[index(Leg::FR)] != g.offsets[index(Leg::HL)]) {
    out.push_back({prefix + ".offsets.HL", "diagonal pair FR/HL must share an offset"});
  }
  if (g.offsets[index(Leg::FL)] != g.offsets[index(Leg::HR)]) {
    out.push_back({prefix + ".offsets.HR", "diagonal pair FL/HR must share an offset"});
  }
  return out;
}

std::array<LegPhase, kNumLegs> schedule_at(const GaitSchedule& g, double t) {
  if (!(t >= 0.0)) throw DegenerateInputError("schedule_at: time must be non-negative");
  std::array<LegPhase, kNumLegs> out{};
  const double base = t / g.period;
  for (int l = 0; l < kNumLegs; ++l) {
    double c = base + g.offsets[l];
    c -= std::floor(c);
    if (c >= 1.0) c = 0.0;
    LegPhase& p = out[l];
    p.cycle = c;
    p.stance = c < g.duty_factor;
    p.progress = p.stance ? c / g.duty_factor : (c - g.duty_factor) / (1.0 - g.duty_factor);
  }
  return out;
}

double smoothstep(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }
double smoothstep_rate(double s) { return 30.0 * s * s * (1.0 - s) * (1.0 - s); }
double smoothstep_accel(double s) { return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s); }

namespace {

void check_phase(double phase) {
  if (!(phase >= 0.0 && phase <= 1.0)) throw TrajectoryError(fmt::format("swing phase {} outside [0, 1]", phase));
}

}  // namespace

Vec3 swing_position(const SwingTrajectory& traj, double phase) {
  check_phase(phase);
  const double s = smoothstep(phase);
  Vec3 p = traj.lift_off + s * (traj.touchdown - traj.lift_off);
  const double apex = traj.apex_height();
  if (phase <= 0.5) {
    p.z() = traj.lift_off.z() + (apex - traj.lift_off.z()) * smoothstep(2.0 * phase);
  } else {
    p.z() = apex + (traj.touchdown.z() - apex) * smoothstep(2.0 * phase - 1.0);
  }
  return p;
}

Vec3 swing_velocity(const SwingTrajectory& traj, double phase) {
  check_phase(phase);
  Vec3 v = smoothstep_rate(phase) * (traj.touchdown - traj.lift_off);
  const double apex = traj.apex_height();
  if (phase <= 0.5) {
    v.z() = 2.0 * (apex - traj.lift_off.z()) * smoothstep_rate(2.0 * phase);
  } else {
    v.z() = 2.0 * (traj.touchdown.z() - apex) * smoothstep_rate(2.0 * phase - 1.0);
  }
  return v;
}

namespace {

Eigen::Matrix<double, 6, 3> contact_map(const Vec3& com, const Vec3& foot) {
  Eigen::Matrix<double, 6, 3> A;
  A.topRows<3>() = Mat3::Identity();
  A.bottomRows<3>() = spatial::skew(foot - com);
  return A;
}

Eigen::Matrix<double, 3, Eigen::Dynamic> generators(double mu) {
  if (mu == 0.0) return Vec3::UnitZ();
  const double m = mu / std::numbers::sqrt2;
  Eigen::Matrix<double, 3, 4> B;
  B << m, m, -m, -m, m, -m, m, -m, 1.0, 1.0, 1.0, 1.0;
  return B;
}

}  // namespace

double allocation_objective(const Vec3& com, const std::array<Vec3, kNumLegs>& feet,
                            const std::array<bool, kNumLegs>& stance, const Vec6& wrench,
                            const std::array<Vec3, kNumLegs>& forces, const AllocationSettings& settings) {
  Vec6 net = Vec6::Zero();
  double norm2 = 0.0;
  for (int l = 0; l < kNumLegs; ++l) {
    if (!stance[l]) continue;
    net += contact_map(com, feet[l]) * forces[l];
    norm2 += forces[l].squaredNorm();
  }
  return settings.wrench_weights.cwiseProduct(net - wrench).squaredNorm() + settings.regularization * norm2;
}

StanceAllocation allocate_stance_forces(const Vec3& com, const std::array<Vec3, kNumLegs>& feet,
                                        const std::array<bool, kNumLegs>& stance, const Vec6& wrench,
                                        const AllocationSettings& settings) {
  if (!(settings.mu >= 0.0) || !(settings.regularization >= 0.0)) {
    throw DegenerateInputError("allocate_stance_forces: mu and regularization must be non-negative");
  }
  std::vector<int> legs;
  for (int l = 0; l < kNumLegs; ++l) {
    if (stance[l]) legs.push_back(l);
  }
  if (legs.empty()) throw InfeasibleAllocationError("allocate_stance_forces: no stance feet");

  const auto B = generators(settings.mu);
  const int g = static_cast<int>(B.cols());
  const int n = g * static_cast<int>(legs.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6 + 3 * legs.size(), n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());
  const double sqrt_eps = std::sqrt(settings.regularization);
  for (std::size_t k = 0; k < legs.size(); ++k) {
    const auto map = contact_map(com, feet[legs[k]]);
    A.block(0, g * k, 6, g) = settings.wrench_weights.asDiagonal() * map * B;
    A.block(6 + 3 * k, g * k, 3, g) = sqrt_eps * B;
  }
  b.head<6>() = settings.wrench_weights.cwiseProduct(wrench);

  const NnlsResult sol = nnls(A, b, settings.kkt_tolerance);
  StanceAllocation out;
  out.stance = stance;
  out.iterations = sol.iterations;
  Vec6 net = Vec6::Zero();
  out.friction_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < legs.size(); ++k) {
    const int l = legs[k];
    out.forces[l] = B * sol.x.segment(g * k, g);
    net += contact_map(com, feet[l]) * out.forces[l];
    out.friction_margin =
        std::min(out.friction_margin, settings.mu * out.forces[l].z() - out.forces[l].head<2>().norm());
  }
  for (int l = 0; l < kNumLegs; ++l) {
    if (!stance[l]) out.forces[l].setZero();
  }
  out.residual = (net - wrench).norm();
  out.objective = allocation_objective(com, feet, stance, wrench, out.forces, settings);
  return out;
}

// ---------------------------------------------------------------------------

Controller::Controller(const BodyMorphology& body, const ActuatorParams& actuator, const GaitSchedule& gait,
                       const ControllerParams& params)
    : body_(body),
      actuator_(actuator),
      gait_(gait),
      params_(params),
      whole_body_(build_quadruped_model(body)),
      total_mass_(body.total_mass()) {
  if (const auto v = validate(gait); !v.empty()) throw ConfigError(v.front().field + ": " + v.front().rule);
  for (Leg leg : kAllLegs) {
    LimbModel m = build_limb_model(body.limbs[index(leg)], side_of(leg));
    m.model.armature = Eigen::VectorXd::Constant(3, actuator.reflected_inertia());
    limb_models_[index(leg)] = std::move(m);
  }
}

void Controller::set_mode(ControlMode mode, double gait_start_time) {
  mode_ = mode;
  gait_start_ = gait_start_time;
  for (auto& m : legs_) {
    m.was_stance = true;
    m.last_target_q.reset();
  }
}

Vec3 Controller::nominal_foot(Leg leg) const {
  const auto& limb = body_.limbs[index(leg)];
  return {0.0, side_sign(side_of(leg)) * limb.lateral_offset(), -params_.stand_height};
}

Vec12 Controller::standing_joint_angles() const {
  Vec12 q;
  for (Leg leg : kAllLegs) {
    const auto& limb = body_.limbs[index(leg)];
    q.segment<3>(3 * index(leg)) = inverse_kinematics(limb, nominal_foot(leg), {}, side_of(leg)).vector();
  }
  return q;
}

Vec3 Controller::leg_gravity_torque(Leg leg, const Vec3& q, const Vec3& qd, const Vec3& qdd, const Mat3& R) const {
  const auto& mb = limb_models_[index(leg)].model;
  const Eigen::VectorXd qv = q, qdv = qd, qddv = qdd;
  const auto kin = compute_kinematics(mb, {}, qv, qdv);
  const Vec3 gravity_trunk = R.transpose() * Vec3(0.0, 0.0, -kStandardGravity);
  return inverse_dynamics(mb, kin, qdv, qddv, gravity_trunk);
}

ControlCommand Controller::control_tick(const RobotState& s, const Vec3& commanded) {
  const ControllerParams& P = params_;
  const Mat3 R = s.rotation();
  const double dt = started_ ? std::max(s.time - last_time_, 0.0) : 0.0;
  if (!started_) {
    integrated_target_ = s.position;
    started_ = true;
  }
  last_time_ = s.time;

  ControlCommand cmd;
  cmd.time = s.time;

  // Desired heading rotates with the yaw-rate command.
  if (commanded.z() != 0.0) desired_orientation_ = rotation_exp(Vec3(0, 0, commanded.z() * dt)) * desired_orientation_;
  const Vec3 heading_x = desired_orientation_.col(0);
  const double yaw = std::atan2(heading_x.y(), heading_x.x());
  const Mat3 Rz = rotation_exp(Vec3(0, 0, yaw));
  Vec3 v_goal = Rz * Vec3(commanded.x(), commanded.y(), 0.0);
  if (mode_ == ControlMode::Stand || s.time < gait_start_) v_goal.setZero();
  const Vec3 dv = v_goal - ramped_velocity_;
  const double max_dv = P.max_acceleration * dt;
  ramped_velocity_ += dv.norm() > max_dv ? (dv * (max_dv / dv.norm())).eval() : dv;
  const Vec3 v_des = ramped_velocity_;
  integrated_target_ += v_des * dt;
  const Vec3 target = (mode_ == ControlMode::Stand && hold_position_) ? *hold_position_ : integrated_target_;

  // Phase plan.
  std::array<LegPhase, kNumLegs> phase{};
  const bool trotting = mode_ == ControlMode::Trot && s.time >= gait_start_;
  if (trotting) phase = schedule_at(gait_, s.time - gait_start_);
  for (int l = 0; l < kNumLegs; ++l) cmd.stance[l] = trotting ? phase[l].stance : true;

  // Feet and center of mass.
  std::array<Vec3, kNumLegs> foot_rel{}, feet_world{};
  for (Leg leg : kAllLegs) {
    const int l = index(leg);
    foot_rel[l] = forward_kinematics(body_.limbs[l], s.leg_angles(leg), side_of(leg));
    feet_world[l] = s.position + R * (body_.hip_positions[l] + foot_rel[l]);
  }
  const Vec3 com = center_of_mass(whole_body_.model, compute_kinematics(whole_body_.model, {R, s.position},
                                                                        Eigen::VectorXd(s.q), {}));

  // Desired trunk wrench about the COM.
  const Vec3 v = s.linear_velocity;
  Vec3 accel;
  accel.head<2>() = P.kp_position * (target - s.position).head<2>() + P.kd_velocity * (v_des - v).head<2>();
  accel.z() = P.kp_height * (P.stand_height - s.position.z()) - P.kd_height * v.z();
  Vec6 wrench;
  wrench.head<3>() = total_mass_ * (accel + Vec3(0.0, 0.0, kStandardGravity));
  const Vec3 omega_world = R * s.angular_velocity;
  const Vec3 omega_des(0.0, 0.0, mode_ == ControlMode::Trot ? commanded.z() : 0.0);
  wrench.tail<3>() = P.kp_orientation * rotation_log(desired_orientation_ * R.transpose()) -
                     P.kd_orientation * (omega_world - omega_des);
  cmd.desired_wrench = wrench;

  bool any_stance = false;
  for (bool b : cmd.stance) any_stance = any_stance || b;
  if (any_stance) cmd.allocation = allocate_stance_forces(com, feet_world, cmd.stance, wrench, P.allocation);

  const Vec3 v_des_body = R.transpose() * v_des;
  const double t_stance = gait_.period * gait_.duty_factor;
  const double t_swing = gait_.period * (1.0 - gait_.duty_factor);

  for (Leg leg : kAllLegs) {
    const int l = index(leg);
    const auto& limb = body_.limbs[l];
    const Side side = side_of(leg);
    const Vec3 q = s.leg_angles(leg).vector();
    LegMemory& mem = legs_[l];
    const double knee_sign = limb.knee_direction == KneeDirection::Backward ? 1.0 : -1.0;

    Vec3 q_des = q, qd_des = Vec3::Zero(), ff;
    double kp = 0.0, kd = P.stance_kd;

    if (cmd.stance[l]) {
      const FootJacobian J = jacobian_foot(limb, s.leg_angles(leg), side);
      const Vec3 f_trunk = R.transpose() * cmd.allocation.forces[l];
      ff = -J.matrix.transpose() * f_trunk + leg_gravity_torque(leg, q, Vec3::Zero(), Vec3::Zero(), R);
      if (J.condition_number() < 1e6) qd_des = J.matrix.fullPivLu().solve(-v_des_body);
      mem.was_stance = true;
      mem.last_target_q.reset();
    } else {
      if (mem.was_stance) {
        mem.lift_off = foot_rel[l];
        mem.lift_off_q = q;
        mem.was_stance = false;
      }
      const double phi = phase[l].progress;
      // Touchdown is planned on the ground plane and mapped back into the hip frame.
      const Vec3 hip_world = s.position + R * (body_.hip_positions[l] + Vec3(0.0, nominal_foot(leg).y(), 0.0));
      Vec3 td_world = hip_world;
      td_world.head<2>() += v.head<2>() * (0.5 * t_stance) + P.raibert_gain * (v - v_des).head<2>();
      td_world.z() = P.ground_height - P.touchdown_depth;
      const Vec3 touchdown = R.transpose() * (td_world - s.position) - body_.hip_positions[l];
      const JointAngles seed = JointAngles::from_vector(mem.last_target_q.value_or(q));
      Vec3 qdd_des = Vec3::Zero();
      try {
        if (P.swing_mode == SwingMode::Cartesian) {
          const SwingTrajectory traj{mem.lift_off, touchdown, P.swing_clearance};
          const Vec3 p = swing_position(traj, phi);
          const Vec3 pd = swing_velocity(traj, phi) / t_swing;
          q_des = inverse_kinematics(limb, p, seed, side).vector();
          const FootJacobian J = jacobian_foot(limb, JointAngles::from_vector(q_des), side);
          if (J.condition_number() < 1e6) qd_des = J.matrix.fullPivLu().solve(pd);
        } else {
          const Vec3 q_td = inverse_kinematics(limb, touchdown, JointAngles::from_vector(mem.lift_off_q), side).vector();
          // Knee flexion with the hip counter-rotating so the hip-foot line keeps
          // its direction: the foot retracts toward the hip.
          const double U = limb.proximal_length(), L = limb.distal_length();
          auto line_angle = [&](double k) { return std::atan2(L * std::sin(k), U + L * std::cos(k)); };
          auto target = [&](double ph) {
            const double bump = 16.0 * ph * ph * (1.0 - ph) * (1.0 - ph);
            Vec3 qt = mem.lift_off_q + smoothstep(ph) * (q_td - mem.lift_off_q);
            const double knee = qt.z() + bump * knee_sign * P.knee_lift;
            qt.y() += line_angle(qt.z()) - line_angle(knee);
            qt.z() = knee;
            return qt;
          };
          const double h = 1e-4;
          q_des = target(phi);
          qd_des = (target(phi + h) - target(phi - h)) / (2.0 * h * t_swing);
          qdd_des = (target(phi + h) - 2.0 * q_des + target(phi - h)) / (h * h * t_swing * t_swing);
        }
      } catch (const WorkspaceError& e) {
        throw LegWorkspaceError(leg, e);
      }
      mem.last_target_q = q_des;
      ff = leg_gravity_torque(leg, q_des, qd_des, qdd_des, R);
      kp = P.swing_kp;
      kd = P.swing_kd;
    }
    for (int j = 0; j < 3; ++j) {
      JointCommand& jc = cmd.joints[3 * l + j];
      jc.q_des = q_des(j);
      jc.qd_des = qd_des(j);
      jc.gains = {kp, kd, ff(j)};
    }
  }
  return cmd;
}

}  // namespace quadsim
