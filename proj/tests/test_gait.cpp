#include "quadsim/gait.hpp"
#include "quadsim/limb_kinematics.hpp"
#include "quadsim/nnls.hpp"
#include "quadsim/world.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace quadsim;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Global NNLS optimum by enumerating supports: the optimum is the unconstrained
// least-squares solution on its own support, so the best non-negative one wins.
double brute_force_nnls(const MatrixXd& A, const VectorXd& b) {
  const int n = static_cast<int>(A.cols());
  double best = b.norm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j) {
      if (mask & (1 << j)) cols.push_back(j);
    }
    MatrixXd As(A.rows(), cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) As.col(k) = A.col(cols[k]);
    const VectorXd xs = As.colPivHouseholderQr().solve(b);
    if (xs.minCoeff() < -1e-12) continue;
    best = std::min(best, (As * xs - b).norm());
  }
  return best;
}

std::array<Vec3, kNumLegs> standing_feet() {
  return {Vec3(0.2, -0.14, 0.0), Vec3(0.2, 0.14, 0.0), Vec3(-0.2, -0.14, 0.0), Vec3(-0.2, 0.14, 0.0)};
}

Vec6 wrench(const Vec3& force, const Vec3& torque) {
  Vec6 w;
  w << force, torque;
  return w;
}

}  // namespace

TEST(Gait, DefaultIsValidDiagonalTrot) {
  EXPECT_TRUE(validate(GaitSchedule{}).empty());
  GaitSchedule g;
  g.offsets[index(Leg::HL)] = 0.25;
  EXPECT_FALSE(validate(g).empty());
  g = {};
  g.duty_factor = 1.0;
  EXPECT_FALSE(validate(g).empty());
}

TEST(Gait, DiagonalPairsMoveTogether) {
  const GaitSchedule g;
  for (int k = 0; k < 1000; ++k) {
    const double t = 0.0013 * k;
    const auto p = schedule_at(g, t);
    EXPECT_EQ(p[index(Leg::FR)].stance, p[index(Leg::HL)].stance);
    EXPECT_EQ(p[index(Leg::FL)].stance, p[index(Leg::HR)].stance);
    EXPECT_NE(p[index(Leg::FR)].stance, p[index(Leg::FL)].stance);
    for (const auto& leg : p) {
      EXPECT_GE(leg.progress, 0.0);
      EXPECT_LT(leg.progress, 1.0);
    }
  }
}

TEST(Gait, ScheduleExamples) {
  const GaitSchedule g;
  auto p = schedule_at(g, 0.0);
  EXPECT_TRUE(p[index(Leg::FR)].stance);
  EXPECT_DOUBLE_EQ(p[index(Leg::FR)].progress, 0.0);
  EXPECT_FALSE(p[index(Leg::FL)].stance);
  p = schedule_at(g, 0.125);
  EXPECT_NEAR(p[index(Leg::FR)].progress, 0.5, 1e-12);
  EXPECT_NEAR(p[index(Leg::FL)].progress, 0.5, 1e-12);
  p = schedule_at(g, 0.3);
  EXPECT_FALSE(p[index(Leg::FR)].stance);
  EXPECT_NEAR(p[index(Leg::FR)].progress, 0.2, 1e-12);
  EXPECT_THROW(schedule_at(g, -1e-3), DegenerateInputError);
}

TEST(Swing, EndpointsApexAndSymmetry) {
  const SwingTrajectory traj{Vec3(-0.05, -0.14, -0.3), Vec3(0.07, -0.13, -0.3), 0.06};
  EXPECT_LT((swing_position(traj, 0.0) - traj.lift_off).norm(), 1e-15);
  EXPECT_LT((swing_position(traj, 1.0) - traj.touchdown).norm(), 1e-15);
  EXPECT_NEAR(swing_position(traj, 0.5).z(), -0.24, 1e-15);
  double peak = -1e9;
  for (int k = 0; k <= 1000; ++k) peak = std::max(peak, swing_position(traj, k / 1000.0).z());
  EXPECT_NEAR(peak, traj.apex_height(), 1e-12);
  for (int k = 0; k <= 100; ++k) {
    const double s = k / 200.0;
    EXPECT_NEAR(swing_position(traj, s).z(), swing_position(traj, 1.0 - s).z(), 1e-12);
  }
  EXPECT_LT(swing_velocity(traj, 0.0).norm(), 1e-15);
  EXPECT_LT(swing_velocity(traj, 1.0).norm(), 1e-15);
  EXPECT_THROW(swing_position(traj, 1.01), TrajectoryError);
  EXPECT_THROW(swing_velocity(traj, -0.01), TrajectoryError);
}

TEST(Swing, VelocityIsDerivativeOfPosition) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.2, 0.2), s(0.001, 0.999);
  for (int trial = 0; trial < 500; ++trial) {
    const SwingTrajectory traj{Vec3(u(rng), u(rng), u(rng) - 0.3), Vec3(u(rng), u(rng), u(rng) - 0.3), 0.05};
    const double phi = s(rng), h = 1e-6;
    const double lo = std::max(phi - h, 0.0), hi = std::min(phi + h, 1.0);
    const Vec3 fd = (swing_position(traj, hi) - swing_position(traj, lo)) / (hi - lo);
    EXPECT_LT((swing_velocity(traj, phi) - fd).norm(), 1e-6);
  }
}

TEST(Smoothstep, DerivativesAndBoundary) {
  EXPECT_EQ(smoothstep(0.0), 0.0);
  EXPECT_EQ(smoothstep(1.0), 1.0);
  EXPECT_EQ(smoothstep_rate(0.0), 0.0);
  EXPECT_EQ(smoothstep_accel(1.0), 0.0);
  for (int k = 1; k < 100; ++k) {
    const double s = k / 100.0, h = 1e-6;
    EXPECT_NEAR(smoothstep_rate(s), (smoothstep(s + h) - smoothstep(s - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(smoothstep_accel(s), (smoothstep_rate(s + h) - smoothstep_rate(s - h)) / (2 * h), 1e-7);
  }
}

TEST(Nnls, MatchesBruteForceOptimum) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = 3 + trial % 6, cols = 2 + trial % 7;
    MatrixXd A(rows, cols);
    VectorXd b(rows);
    for (int i = 0; i < rows; ++i) {
      b(i) = n(rng);
      for (int j = 0; j < cols; ++j) A(i, j) = n(rng);
    }
    const NnlsResult r = nnls(A, b);
    ASSERT_TRUE(r.converged);
    EXPECT_GE(r.x.minCoeff(), 0.0);
    EXPECT_NEAR(r.residual, brute_force_nnls(A, b), 1e-9 * std::max(1.0, b.norm()));
    // KKT: the gradient is zero on the support and points outward elsewhere.
    const VectorXd w = A.transpose() * (b - A * r.x);
    for (int j = 0; j < cols; ++j) {
      if (r.x(j) > 0.0) EXPECT_NEAR(w(j), 0.0, 1e-8 * std::max(1.0, b.norm()));
      else EXPECT_LE(w(j), 1e-8 * std::max(1.0, b.norm()));
    }
  }
}

TEST(Nnls, DependentColumnsAndTrivialCases) {
  MatrixXd A(3, 3);
  A << 1, 2, 1, 0, 0, 0, 1, 2, 1;
  const VectorXd b = Eigen::Vector3d(1, 0, 1);
  const NnlsResult r = nnls(A, b);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.residual, 0.0, 1e-12);
  const NnlsResult neg = nnls(A, -b);
  EXPECT_EQ(neg.x.norm(), 0.0);
  EXPECT_NEAR(neg.residual, b.norm(), 1e-15);
}

TEST(Allocation, QuietStandingSharesWeightEvenly) {
  const double weight = 10.0 * kStandardGravity;
  const auto a = allocate_stance_forces(Vec3(0, 0, 0.3), standing_feet(), {true, true, true, true},
                                        wrench(Vec3(0, 0, weight), Vec3::Zero()));
  for (const Vec3& f : a.forces) {
    EXPECT_NEAR(f.z(), weight / 4, 1e-6 * weight);
    EXPECT_NEAR(f.head<2>().norm(), 0.0, 1e-6 * weight);
  }
  EXPECT_LT(a.residual, 1e-6 * weight);
}

TEST(Allocation, OffsetComShiftsLoadForward) {
  const auto a = allocate_stance_forces(Vec3(0.05, 0, 0.3), standing_feet(), {true, true, true, true},
                                        wrench(Vec3(0, 0, 98.1), Vec3::Zero()));
  EXPECT_GT(a.forces[index(Leg::FR)].z(), a.forces[index(Leg::HR)].z());
  // Moment balance about the COM: front share = (0.2 + 0.05) / 0.4.
  EXPECT_NEAR(a.forces[index(Leg::FR)].z() + a.forces[index(Leg::FL)].z(), 98.1 * 0.625, 1e-4);
}

TEST(Allocation, NoStanceFeetThrows) {
  EXPECT_THROW(allocate_stance_forces(Vec3::Zero(), standing_feet(), {false, false, false, false},
                                      wrench(Vec3(0, 0, 1), Vec3::Zero())),
               InfeasibleAllocationError);
}

TEST(Allocation, FrictionlessGroundGivesVerticalForces) {
  AllocationSettings s;
  s.mu = 0.0;
  const auto a = allocate_stance_forces(Vec3(0, 0, 0.3), standing_feet(), {true, true, true, true},
                                        wrench(Vec3(20, 0, 98.1), Vec3::Zero()), s);
  for (const Vec3& f : a.forces) EXPECT_EQ(f.head<2>().norm(), 0.0);
  EXPECT_NEAR(a.residual, 20.0, 1e-6);
}

TEST(Allocation, ConstraintsHoldForRandomWrenches) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0), mu(0.0, 1.2);
  std::bernoulli_distribution coin(0.6);
  for (int trial = 0; trial < 2000; ++trial) {
    std::array<Vec3, kNumLegs> feet = standing_feet();
    std::array<bool, kNumLegs> stance{};
    bool any = false;
    for (int l = 0; l < kNumLegs; ++l) {
      feet[l] += 0.05 * Vec3(u(rng), u(rng), 0.0);
      stance[l] = coin(rng);
      any = any || stance[l];
    }
    if (!any) stance[trial % kNumLegs] = true;
    AllocationSettings s;
    s.mu = mu(rng);
    const Vec6 w = wrench(Vec3(50 * u(rng), 50 * u(rng), 100 * u(rng)), Vec3(10 * u(rng), 10 * u(rng), 5 * u(rng)));
    const Vec3 com(0.02 * u(rng), 0.02 * u(rng), 0.3);
    const auto a = allocate_stance_forces(com, feet, stance, w, s);
    for (int l = 0; l < kNumLegs; ++l) {
      const Vec3& f = a.forces[l];
      if (!stance[l]) {
        EXPECT_EQ(f.norm(), 0.0);
        continue;
      }
      EXPECT_GE(f.z(), -1e-12);
      EXPECT_LE(f.head<2>().norm(), s.mu * f.z() + 1e-9);
    }
    EXPECT_GE(a.friction_margin, -1e-9);
    // Perturbing within the pyramid never lowers the objective.
    const double best = allocation_objective(com, feet, stance, w, a.forces, s);
    for (int k = 0; k < 5; ++k) {
      auto other = a.forces;
      for (int l = 0; l < kNumLegs; ++l) {
        if (!stance[l]) continue;
        const double fz = std::max(other[l].z() + u(rng), 0.0);
        const double r = s.mu / std::sqrt(2.0) * fz;
        other[l] = Vec3(std::clamp(other[l].x() + u(rng), -r, r), std::clamp(other[l].y() + u(rng), -r, r), fz);
      }
      EXPECT_GE(allocation_objective(com, feet, stance, w, other, s), best - 1e-9 * std::max(1.0, best));
    }
  }
}

TEST(Allocation, Deterministic) {
  const Vec6 w = wrench(Vec3(3, -2, 90), Vec3(1, 2, -0.5));
  const auto a = allocate_stance_forces(Vec3(0, 0, 0.3), standing_feet(), {true, false, false, true}, w);
  const auto b = allocate_stance_forces(Vec3(0, 0, 0.3), standing_feet(), {true, false, false, true}, w);
  for (int l = 0; l < kNumLegs; ++l) EXPECT_EQ(a.forces[l], b.forces[l]);
}

TEST(Controller, StandingPoseMatchesNominalFeet) {
  const auto body = BodyMorphology::default_robot();
  const Controller c(body, ActuatorParams{}, GaitSchedule{});
  const Vec12 q = c.standing_joint_angles();
  for (Leg leg : kAllLegs) {
    const Vec3 foot = forward_kinematics(body.limbs[index(leg)], JointAngles::from_vector(q.segment<3>(3 * index(leg))),
                                         side_of(leg));
    EXPECT_LT((foot - c.nominal_foot(leg)).norm(), 1e-9);
  }
}

TEST(Allocation, DiagonalStanceBalancesMomentAboutCom) {
  const auto feet = standing_feet();
  // COM on the support line, a quarter of the way from FR to HL.
  Vec3 com = 0.75 * feet[index(Leg::FR)] + 0.25 * feet[index(Leg::HL)];
  com.z() = 0.3;
  const auto a = allocate_stance_forces(com, feet, {true, false, false, true}, wrench(Vec3(0, 0, 98.1), Vec3::Zero()));
  EXPECT_NEAR(a.forces[index(Leg::FR)].z(), 0.75 * 98.1, 1e-4);
  Vec3 moment = Vec3::Zero(), force = Vec3::Zero();
  for (int l = 0; l < kNumLegs; ++l) {
    force += a.forces[l];
    moment += (feet[l] - com).cross(a.forces[l]);
  }
  EXPECT_LT(moment.norm(), 1e-6);
  EXPECT_NEAR(force.z(), 98.1, 1e-4);
}

TEST(Allocation, NoWorseThanSymmetricGuess) {
  const auto feet = standing_feet();
  const Vec6 w = wrench(Vec3(0, 0, 98.1), Vec3::Zero());
  for (const auto& stance : {std::array<bool, 4>{true, true, true, true}, std::array<bool, 4>{true, false, false, true},
                             std::array<bool, 4>{false, true, true, false}}) {
    const int n = static_cast<int>(std::count(stance.begin(), stance.end(), true));
    std::array<Vec3, kNumLegs> guess{};
    for (int l = 0; l < kNumLegs; ++l) guess[l] = stance[l] ? Vec3(0, 0, 98.1 / n) : Vec3::Zero();
    const Vec3 com(0, 0, 0.3);
    const auto a = allocate_stance_forces(com, feet, stance, w);
    EXPECT_LE(a.objective, allocation_objective(com, feet, stance, w, guess) + 1e-12);
  }
}

namespace {

struct ClosedLoop {
  BodyMorphology body = BodyMorphology::default_robot();
  World world{body, ActuatorParams{}};
  Controller controller;

  explicit ClosedLoop(const ControllerParams& params = {})
      : controller(body, ActuatorParams{}, GaitSchedule{}, params) {
    RobotState s;
    s.q = controller.standing_joint_angles();
    s.position = Vec3(0, 0, params.stand_height);
    world.reset(s);
    controller.set_mode(ControlMode::Trot, 0.5);
  }
};

}  // namespace

TEST(Controller, TracksSlowTrot) {
  for (SwingMode mode : {SwingMode::Cartesian, SwingMode::KneeLift}) {
    ControllerParams params;
    params.swing_mode = mode;
    ClosedLoop loop(params);
    JointCommands cmd{};
    double x0 = 0.0;
    for (int i = 0; i < 6000; ++i) {
      if (i % 2 == 0) cmd = loop.controller.control_tick(loop.world.state(), Vec3(0.1, 0, 0)).joints;
      loop.world.step(cmd);
      if (i == 2999) x0 = loop.world.state().position.x();
    }
    const double speed = (loop.world.state().position.x() - x0) / 3.0;
    EXPECT_NEAR(speed, 0.1, 0.02);
    EXPECT_LT(rotation_log(loop.world.state().rotation()).norm(), 0.05);
  }
}

TEST(Controller, SwingTargetsContinuousAndDeterministic) {
  auto run = [] {
    ClosedLoop loop;
    std::vector<ControlCommand> out;
    JointCommands cmd{};
    for (int i = 0; i < 3000; ++i) {
      if (i % 2 == 0) {
        out.push_back(loop.controller.control_tick(loop.world.state(), Vec3(0.3, 0, 0)));
        cmd = out.back().joints;
      }
      loop.world.step(cmd);
    }
    return out;
  };
  const auto a = run(), b = run();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (int j = 0; j < 12; ++j) {
      EXPECT_EQ(a[k].joints[j].q_des, b[k].joints[j].q_des);
      EXPECT_EQ(a[k].joints[j].gains.feedforward, b[k].joints[j].gains.feedforward);
    }
  }
  // At each stance-to-swing transition the swing target starts at the current pose.
  for (std::size_t k = 1; k < a.size(); ++k) {
    for (int l = 0; l < kNumLegs; ++l) {
      if (!(a[k - 1].stance[l] && !a[k].stance[l])) continue;
      for (int j = 0; j < 3; ++j) {
        EXPECT_LT(std::abs(a[k].joints[3 * l + j].q_des - a[k - 1].joints[3 * l + j].q_des), 0.05);
      }
    }
  }
}
