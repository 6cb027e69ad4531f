#include "quadsim/actuation.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace quadsim;

TEST(Actuation, CurrentFromTorque) {
  ActuatorParams p;
  p.gear_ratio = 7.5;
  p.torque_constant = 0.1;
  EXPECT_EQ(current_from_torque(p, 0.0), 0.0);
  EXPECT_NEAR(current_from_torque(p, 7.5), 10.0, 1e-12);
  const double before = current_from_torque(p, 4.0);
  p.gear_ratio = 15.0;
  EXPECT_NEAR(current_from_torque(p, 4.0), 0.5 * before, 1e-12);
}

TEST(Actuation, LiteralCurrentFormulaIsOptIn) {
  ActuatorParams p;
  p.torque_constant = 0.1;
  p.literal_current_formula = true;
  EXPECT_NEAR(current_from_torque(p, 7.5), 0.75, 1e-12);
}

TEST(Actuation, PowerSpecialCases) {
  const ActuatorParams p;
  EXPECT_EQ(electrical_power(p, 0.0, 0.0).power, 0.0);
  const auto open = electrical_power(p, 0.0, 12.0);
  EXPECT_EQ(open.current, 0.0);
  EXPECT_EQ(open.power, 0.0);
  const auto stall = electrical_power(p, 6.0, 0.0);
  EXPECT_NEAR(stall.power, stall.current * stall.current * p.phase_resistance, 1e-12);
  EXPECT_NEAR(stall.power, std::pow(6.0 / 7.5 / 0.08, 2) * 0.18, 1e-12);
}

TEST(Actuation, PowerMatchesHandEvaluation) {
  ActuatorParams p;
  p.gear_ratio = 10.0;
  p.torque_constant = p.back_emf_constant = 0.1;
  p.phase_resistance = 0.5;
  const auto s = electrical_power(p, 2.0, 3.0, 0.25);
  // I = 2 / 10 / 0.1 = 2 A, V = 30 * 0.1 + 2 * 0.5 = 4 V.
  EXPECT_NEAR(s.current, 2.0, 1e-12);
  EXPECT_NEAR(s.voltage, 4.0, 1e-12);
  EXPECT_NEAR(s.power, 8.0, 1e-12);
  EXPECT_EQ(s.time, 0.25);
}

TEST(Actuation, PowerProperties) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> tau(-30.0, 30.0), omega(-40.0, 40.0);
  const ActuatorParams p;
  for (int i = 0; i < 10000; ++i) {
    const double t = tau(rng), w = omega(rng);
    const auto s = electrical_power(p, t, w);
    EXPECT_GE(s.clamped, 0.0);
    EXPECT_EQ(s.clamped, std::max(s.power, 0.0));
    EXPECT_NEAR(s.power, s.current * s.voltage, 1e-12 * std::max(1.0, std::abs(s.power)));
    if (t * w >= 0.0) {
      EXPECT_GE(s.power, 0.0);
    }
    // Continuity: a tiny perturbation changes P by a tiny amount.
    const auto near = electrical_power(p, t + 1e-9, w + 1e-9);
    EXPECT_NEAR(near.power, s.power, 1e-5);
  }
}

TEST(Actuation, Impedance) {
  EXPECT_EQ(impedance_torque({10.0, 1.0, 0.0}, 0.3, 0.3, 0.1, 0.1, 30.0).torque, 0.0);
  EXPECT_NEAR(impedance_torque({10.0, 0.0, 0.0}, 0.1, 0.0, 0.0, 0.0, 30.0).torque, 1.0, 1e-12);
  const auto sat = impedance_torque({0.0, 0.0, 100.0}, 0, 0, 0, 0, 30.0);
  EXPECT_EQ(sat.torque, 30.0);
  EXPECT_TRUE(sat.saturated);
  EXPECT_EQ(impedance_torque({0.0, 0.0, -100.0}, 0, 0, 0, 0, 30.0).torque, -30.0);
  EXPECT_FALSE(impedance_torque({1.0, 0.0, 0.0}, 1, 0, 0, 0, 30.0).saturated);
}

TEST(Actuation, ImpedanceNeverExceedsLimit) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-100.0, 100.0), lim(0.0, 40.0);
  for (int i = 0; i < 10000; ++i) {
    const double limit = lim(rng);
    const auto out = impedance_torque({std::abs(u(rng)), std::abs(u(rng)), u(rng)}, u(rng), u(rng), u(rng), u(rng),
                                      limit);
    EXPECT_LE(std::abs(out.torque), limit);
  }
}

TEST(Actuation, GearChangeKeepsMotorLimits) {
  const ActuatorParams p;
  const auto q = p.with_gear_ratio(15.0);
  EXPECT_NEAR(q.max_output_torque, 2.0 * p.max_output_torque, 1e-12);
  EXPECT_NEAR(q.max_output_speed, 0.5 * p.max_output_speed, 1e-12);
  EXPECT_NEAR(q.motor_torque_limit(), p.motor_torque_limit(), 1e-12);
}

TEST(Actuation, Validation) {
  EXPECT_TRUE(validate(ActuatorParams{}).empty());
  ActuatorParams p;
  p.back_emf_constant = 0.2;
  ASSERT_EQ(validate(p).size(), 1u);
  EXPECT_EQ(validate(p)[0].field, "actuator.back_emf_constant");
  p.allow_constant_mismatch = true;
  EXPECT_TRUE(validate(p).empty());
  p.gear_ratio = 0.0;
  EXPECT_EQ(validate(p)[0].field, "actuator.gear_ratio");
}

TEST(EnergyAccumulator, ConstantPowerOnTwelveActuators) {
  EnergyAccumulator acc;
  for (int k = 0; k < 10; ++k) {
    std::vector<PowerSample> step(12);
    for (auto& s : step) {
      s.time = 0.002 * k;
      s.power = s.clamped = 1.0;
      s.torque = -0.5;
    }
    acc.add(step);
  }
  const auto t = acc.totals();
  EXPECT_NEAR(t.peak_power, 12.0, 1e-12);
  EXPECT_NEAR(t.mean_power, 12.0, 1e-12);
  EXPECT_NEAR(t.mean_torque, 6.0, 1e-12);
  EXPECT_EQ(t.samples, 10u);
}

TEST(EnergyAccumulator, SpikeRaisesPeakNotMean) {
  EnergyAccumulator acc;
  for (int k = 0; k < 100; ++k) {
    PowerSample s;
    s.time = k;
    s.clamped = k == 50 ? 100.0 : 1.0;
    acc.add(std::span(&s, 1));
  }
  const auto t = acc.totals();
  EXPECT_EQ(t.peak_power, 100.0);
  EXPECT_NEAR(t.mean_power, (99.0 + 100.0) / 100.0, 1e-12);
  EXPECT_GT(t.peak_power, t.mean_power);
}

TEST(EnergyAccumulator, ClampedSumMonotoneInActuators) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  const ActuatorParams p;
  std::vector<PowerSample> step;
  double previous = 0.0;
  for (int n = 1; n <= 12; ++n) {
    step.push_back(electrical_power(p, u(rng), u(rng)));
    EnergyAccumulator acc;
    acc.add(step);
    EXPECT_GE(acc.totals().mean_power, previous);
    previous = acc.totals().mean_power;
  }
}

TEST(EnergyAccumulator, Errors) {
  EnergyAccumulator acc;
  EXPECT_THROW(acc.totals(), DegenerateInputError);
  PowerSample a, b;
  a.time = 1.0;
  b.time = 0.5;
  acc.add(std::span(&a, 1));
  EXPECT_THROW(acc.add(std::span(&b, 1)), DegenerateInputError);
}
