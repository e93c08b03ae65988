#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stochtame/control.hpp"
#include "stochtame/models.hpp"
#include "stochtame/spectral.hpp"

using namespace stochtame;

namespace {

DriftOperator linear(double rate, double nu) {
  ModelParams p;
  p.linear_rate = rate;
  p.nu = nu;
  return DriftOperator::make(DriftKind::Linear, p);
}

SpectralField mode(double amp) {
  TorusGrid g(1, 16);
  SpectralField x(g, 1);
  add_cosine(x, 0, {1, 0, 0}, amp);
  return x;
}

StepperConfig cfg(double t_end) {
  StepperConfig c;
  c.dt = 1e-3;
  c.t_end = t_end;
  return c;
}

}  // namespace

TEST(Scale, ValuesAndRoundTrip) {
  ControlSchedule s;
  EXPECT_NEAR(scale_value(std::sqrt(std::exp(1.0) - 1.0), s), 1.0, 1e-15);
  EXPECT_THROW(scale_value(-1.0, s), DomainError);
  EXPECT_THROW(scale_inverse(-0.1, s), DomainError);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> m(0.0, 1e3), c(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    ControlSchedule t;
    t.C = c(rng);
    t.K = std::max(1.0, std::log(t.C));
    const double v = m(rng);
    EXPECT_NEAR(scale_inverse(scale_value(v, t), t), v, 1e-9 * (1.0 + v));
  }
  EXPECT_NEAR(level_hi(s), std::sqrt(std::exp(2.0) - 1.0), 1e-14);
  EXPECT_NEAR(level_lo(s), std::sqrt(std::exp(1.0) - 1.0), 1e-14);
}

TEST(Schedule, ConfigErrors) {
  ControlSchedule s;
  s.C = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s.C = 100.0;
  s.K = 1.0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Control, HeatNeverSwitches) {
  auto rec = control_run(mode(0.5), linear(0.0, 1.0), NoiseSpec{3.0, 0.0}, ControlSchedule{}, cfg(1.0), 5, 1);
  EXPECT_TRUE(rec.events.empty());
  EXPECT_TRUE(rec.survived());
  for (const auto& r : rec.rows) EXPECT_EQ(r.regime, Regime::Deterministic);
  EXPECT_TRUE(validate_schedule(rec, ControlSchedule{}).passed);
}

TEST(Control, StartAboveHighLevel) {
  ControlSchedule s;
  auto rec = control_run(mode(20.0), linear(0.0, 1.0), NoiseSpec{1.0, 0.0}, s, cfg(0.1), 5, 2);
  ASSERT_FALSE(rec.events.empty());
  EXPECT_EQ(rec.events[0].kind, EventKind::Tau);
  EXPECT_EQ(rec.events[0].t, 0.0);
  EXPECT_EQ(rec.rows[0].regime, Regime::Stochastic);
  auto v = validate_schedule(rec, s);
  EXPECT_TRUE(v.passed) << (v.failures.empty() ? "" : v.failures[0]);
}

TEST(Control, GrowthIsTamedByNoise) {
  // rate 1 pushes the norm up; theta = 3 makes log-norm drift 1 - 9/2 < 0.
  // Untamed EM: taming would damp the noise at large norms.
  ControlSchedule s;
  auto c = cfg(20.0);
  c.scheme = Scheme::EulerMaruyama;
  auto rec = control_run(mode(0.2), linear(1.0, 0.0), NoiseSpec{3.0, 0.0}, s, c, 5, 11);
  ASSERT_TRUE(rec.survived());
  ASSERT_GE(rec.events.size(), 2u);
  auto v = validate_schedule(rec, s);
  EXPECT_TRUE(v.passed) << (v.failures.empty() ? "" : v.failures[0]);
  ASSERT_TRUE(v.dwell_alpha);
  EXPECT_GT(*v.dwell_alpha, 0.0);
  EXPECT_EQ(rec.envelope_residuals.size(), (rec.events.size() + 1) / 2);
}

TEST(Control, BurgersRunValidates) {
  ModelParams p;
  p.nu = 0.05;
  auto d = DriftOperator::make(DriftKind::Burgers1D, p);
  TorusGrid g(1, 64);
  SpectralField x(g, 1);
  add_sine(x, 0, {1, 0, 0}, 2.0);
  ControlSchedule s;
  s.K = 1.2;
  auto rec = control_run(x, d, NoiseSpec{2.0, 0.0}, s, cfg(2.0), 21, 5);
  ASSERT_TRUE(rec.survived());
  auto v = validate_schedule(rec, s);
  EXPECT_TRUE(v.passed) << (v.failures.empty() ? "" : v.failures[0]);
}

TEST(Schedule, DetectsBrokenRecords) {
  ControlSchedule s;
  TrajectoryRecord empty;
  EXPECT_TRUE(validate_schedule(empty, s).passed);

  TrajectoryRecord r;
  ControlEvent tau{EventKind::Tau, 0, 0.5, level_hi(s), level_hi(s), 0.0, false};
  ControlEvent rho{EventKind::Rho, 0, 0.3, level_lo(s), level_lo(s), 0.0, false};
  r.events = {tau, rho};
  auto v = validate_schedule(r, s);
  EXPECT_FALSE(v.passed);
  EXPECT_EQ(v.failing_index.value_or(-2), 1);

  r.events = {rho};
  EXPECT_FALSE(validate_schedule(r, s).passed);

  ControlEvent off = tau;
  off.norm = 0.5 * tau.level;
  r.events = {off};
  EXPECT_FALSE(validate_schedule(r, s).passed);
}
