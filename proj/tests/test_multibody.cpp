#include "quadsim/limb_kinematics.hpp"
#include "quadsim/robot_model.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace quadsim;
using Eigen::VectorXd;

namespace {

const Vec3 kGravity(0.0, 0.0, -kStandardGravity);

LimbMorphology random_limb(std::mt19937_64& rng, LimbConfig config) {
  std::uniform_real_distribution<double> len(0.05, 0.4), mass(0.05, 0.6), frac(0.1, 0.9);
  LimbMorphology limb;
  limb.config = config;
  limb.l1 = len(rng);
  limb.l2 = len(rng);
  limb.l3 = len(rng);
  limb.l4 = config == LimbConfig::FourLink ? len(rng) : 0.5 * len(rng);
  for (int i = 0; i < 4; ++i) {
    limb.link_masses[i] = (i == kTarsus && config == LimbConfig::ThreeLink) ? 0.0 : mass(rng);
    limb.link_com_offsets[i] = frac(rng) * limb.length(i);
  }
  if (std::bernoulli_distribution(0.5)(rng)) limb.added_mass = AddedMass{0.5, kTibia, frac(rng) * limb.l3};
  return limb;
}

VectorXd random_vector(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  const VectorXd a = random_vector(rng, 3, 1.0);
  return spatial::axis_rotation(Vec3(a(0), a(1), a(2)).normalized(), 2.0 * a.norm());
}

JointAngles leg_angles(const VectorXd& q, int first) { return {q(first), q(first + 1), q(first + 2)}; }

}  // namespace

class LimbModelAgreesWithKinematics : public ::testing::TestWithParam<std::tuple<LimbConfig, Side>> {};

TEST_P(LimbModelAgreesWithKinematics, FootPositionAndJacobian) {
  const auto [config, side] = GetParam();
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const LimbMorphology limb = random_limb(rng, config);
    const LimbModel lm = build_limb_model(limb, side);
    const VectorXd q = random_vector(rng, 3, 3.0);
    const auto kin = compute_kinematics(lm.model, {}, q, {});
    const JointAngles angles = leg_angles(q, 0);
    const Vec3 foot = point_position(kin, lm.chain.foot_body, lm.chain.foot_local);
    EXPECT_LT((foot - forward_kinematics(limb, angles, side)).norm(), 1e-12);
    const auto J = point_jacobian(lm.model, kin, lm.chain.foot_body, lm.chain.foot_local);
    EXPECT_LT((J - jacobian_foot(limb, angles, side).matrix).norm(), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(AllVariants, LimbModelAgreesWithKinematics,
                         ::testing::Combine(::testing::Values(LimbConfig::ThreeLink, LimbConfig::FourLink),
                                            ::testing::Values(Side::Left, Side::Right)));

TEST(Multibody, FourLinkTarsusParallelToFemur) {
  std::mt19937_64 rng(43);
  const LimbMorphology limb = random_limb(rng, LimbConfig::FourLink);
  const LimbModel lm = build_limb_model(limb);
  const VectorXd q = random_vector(rng, 3, 2.0);
  const auto kin = compute_kinematics(lm.model, {}, q, {});
  const Mat3 femur = kin.world_to_body[lm.chain.femur].rotation();
  const Mat3 tarsus = kin.world_to_body[lm.chain.tarsus].rotation();
  EXPECT_LT((femur - tarsus).norm(), 1e-12);
}

TEST(Multibody, TotalMassMatchesMorphology) {
  auto body = BodyMorphology::default_robot();
  body.limbs[1].added_mass = AddedMass{0.5, kFemur, 0.1};
  const auto qm = build_quadruped_model(body);
  EXPECT_NEAR(total_mass(qm.model), body.total_mass(), 1e-12);
}

// Shared fixtures over a fixed-base limb and the floating quadruped.
struct Scenario {
  MultibodyModel model;
  BasePose base;
};

std::vector<Scenario> scenarios(std::mt19937_64& rng) {
  std::vector<Scenario> out;
  for (auto config : {LimbConfig::ThreeLink, LimbConfig::FourLink}) {
    out.push_back({build_limb_model(random_limb(rng, config), Side::Right).model, {}});
    BodyMorphology body = BodyMorphology::default_robot();
    for (auto& limb : body.limbs) limb = random_limb(rng, config);
    Scenario s{build_quadruped_model(body, Vec3(1e-3, 2e-3, 3e-3)).model, {}};
    s.base.rotation = random_rotation(rng);
    s.base.position = random_vector(rng, 3, 1.0);
    out.push_back(std::move(s));
  }
  return out;
}

TEST(Multibody, MassMatrixSymmetricPositiveDefinite) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    for (const auto& s : scenarios(rng)) {
      const auto kin = compute_kinematics(s.model, s.base, random_vector(rng, s.model.num_joint_dofs, 3.0), {});
      const Eigen::MatrixXd H = mass_matrix(s.model, kin);
      EXPECT_LT((H - H.transpose()).norm(), 1e-12 * H.norm());
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().minCoeff(), 0.0);
    }
  }
}

TEST(Multibody, KineticEnergyMatchesMassMatrix) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    for (const auto& s : scenarios(rng)) {
      const VectorXd q = random_vector(rng, s.model.num_joint_dofs, 3.0);
      const VectorXd nu = random_vector(rng, s.model.nv(), 2.0);
      const auto kin = compute_kinematics(s.model, s.base, q, nu);
      const double from_matrix = 0.5 * nu.dot(mass_matrix(s.model, kin) * nu);
      EXPECT_NEAR(kinetic_energy(s.model, kin, nu), from_matrix, 1e-12 * std::max(1.0, from_matrix));
    }
  }
}

TEST(Multibody, InverseDynamicsIsAffineInAcceleration) {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    for (const auto& s : scenarios(rng)) {
      const VectorXd q = random_vector(rng, s.model.num_joint_dofs, 3.0);
      const VectorXd nu = random_vector(rng, s.model.nv(), 2.0);
      const VectorXd acc = random_vector(rng, s.model.nv(), 5.0);
      const auto kin = compute_kinematics(s.model, s.base, q, nu);
      const VectorXd zero = VectorXd::Zero(s.model.nv());
      const VectorXd bias = inverse_dynamics(s.model, kin, nu, zero, kGravity);
      const VectorXd full = inverse_dynamics(s.model, kin, nu, acc, kGravity);
      const VectorXd expected = mass_matrix(s.model, kin) * acc;
      EXPECT_LT((full - bias - expected).norm(), 1e-10 * std::max(1.0, expected.norm()));
    }
  }
}

TEST(Multibody, ExternalForceMapsThroughJacobianTranspose) {
  std::mt19937_64 rng(61);
  BodyMorphology body = BodyMorphology::default_robot();
  const auto qm = build_quadruped_model(body);
  const BasePose base{random_rotation(rng), Vec3(0.1, -0.2, 0.3)};
  const VectorXd q = random_vector(rng, 12, 2.0);
  const VectorXd zero = VectorXd::Zero(qm.model.nv());
  const auto kin = compute_kinematics(qm.model, base, q, {});
  for (int l = 0; l < kNumLegs; ++l) {
    const LimbChain& c = qm.limbs[l];
    const PointForce pf{c.foot_body, point_position(kin, c.foot_body, c.foot_local), Vec3(3.0, -4.0, 20.0)};
    const VectorXd tau = inverse_dynamics(qm.model, kin, zero, zero, Vec3::Zero(), std::span(&pf, 1));
    const auto J = point_jacobian(qm.model, kin, c.foot_body, c.foot_local);
    EXPECT_LT((tau + J.transpose() * pf.force).norm(), 1e-12);
  }
}

TEST(Multibody, StaticBaseWrenchCarriesTotalWeight) {
  std::mt19937_64 rng(67);
  const auto body = BodyMorphology::default_robot();
  const auto qm = build_quadruped_model(body);
  const BasePose base{random_rotation(rng), Vec3::Zero()};
  const VectorXd zero = VectorXd::Zero(qm.model.nv());
  const auto kin = compute_kinematics(qm.model, base, random_vector(rng, 12, 1.0), {});
  const VectorXd tau = inverse_dynamics(qm.model, kin, zero, zero, kGravity);
  const Vec3 expected = base.rotation.transpose() * (-body.total_mass() * kGravity);
  EXPECT_LT((tau.segment<3>(3) - expected).norm(), 1e-10);
}

TEST(Multibody, FloatingPointJacobianMatchesFiniteDifference) {
  std::mt19937_64 rng(71);
  BodyMorphology body = BodyMorphology::default_robot();
  const auto qm = build_quadruped_model(body);
  const BasePose base{random_rotation(rng), Vec3(0.3, 0.1, 0.4)};
  const VectorXd q = random_vector(rng, 12, 2.0);
  const double h = 1e-6;
  auto foot_after = [&](int leg, const VectorXd& dnu) {
    BasePose b = base;
    const Vec3 w = dnu.head<3>();
    if (w.norm() > 0) b.rotation = base.rotation * spatial::axis_rotation(w.normalized(), w.norm());
    b.position = base.position + base.rotation * dnu.segment<3>(3);
    const auto kin = compute_kinematics(qm.model, b, q + dnu.tail(12), {});
    return point_position(kin, qm.limbs[leg].foot_body, qm.limbs[leg].foot_local);
  };
  const auto kin = compute_kinematics(qm.model, base, q, {});
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const auto J = point_jacobian(qm.model, kin, qm.limbs[leg].foot_body, qm.limbs[leg].foot_local);
    for (int k = 0; k < qm.model.nv(); ++k) {
      VectorXd d = VectorXd::Zero(qm.model.nv());
      d(k) = h;
      const Vec3 col = (foot_after(leg, d) - foot_after(leg, -d)) / (2 * h);
      EXPECT_LT((J.col(k) - col).norm(), 1e-7) << "leg " << leg << " column " << k;
    }
  }
}

TEST(Multibody, PowerBalanceOnFixedBaseLimb) {
  // d/dt (T + V) = tau . qdot along a trajectory with constant acceleration,
  // checked by central differences of the energy.
  std::mt19937_64 rng(73);
  for (auto config : {LimbConfig::ThreeLink, LimbConfig::FourLink}) {
    for (int trial = 0; trial < 50; ++trial) {
      LimbModel lm = build_limb_model(random_limb(rng, config), Side::Left);
      lm.model.armature = random_vector(rng, 3, 1e-3).cwiseAbs();
      const VectorXd q = random_vector(rng, 3, 3.0);
      const VectorXd qd = random_vector(rng, 3, 3.0);
      const VectorXd qdd = random_vector(rng, 3, 10.0);
      auto energy = [&](double t) {
        const VectorXd qt = q + t * qd + 0.5 * t * t * qdd;
        const VectorXd vt = qd + t * qdd;
        const auto kin = compute_kinematics(lm.model, {}, qt, vt);
        return kinetic_energy(lm.model, kin, vt) + potential_energy(lm.model, kin, kGravity);
      };
      const double h = 1e-5;
      const double dE = (energy(h) - energy(-h)) / (2 * h);
      const auto kin = compute_kinematics(lm.model, {}, q, qd);
      const double power = inverse_dynamics(lm.model, kin, qd, qdd, kGravity).dot(qd);
      EXPECT_NEAR(power, dE, 1e-6 * std::max(1.0, std::abs(dE)));
    }
  }
}
