#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "stochtame/integrators.hpp"
#include "stochtame/models.hpp"
#include "stochtame/spectral.hpp"

using namespace stochtame;

namespace {

SpdeSystem linear_system(double rate, double nu, NoiseSpec noise, int cutoff) {
  ModelParams p;
  p.linear_rate = rate;
  p.nu = nu;
  return SpdeSystem{DriftOperator::make(DriftKind::Linear, p), noise, cutoff};
}

SpectralField constant_mode(double v) {
  SpectralField x(TorusGrid(1, 4), 1);
  x.at(0, 0) = v;
  return x;
}

double max_abs(const SpectralField& f) {
  double m = 0.0;
  for (auto z : f.coeffs()) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

TEST(Steps, TrivialCases) {
  auto x = dealias(random_field(TorusGrid(1, 16), 1, 3.0, 1.0, 1));
  auto quiet = linear_system(0.0, 0.0, NoiseSpec{}, 5);
  EXPECT_EQ(em_step(x, quiet, 0.3, 0.01), x);
  auto grow = linear_system(1.0, 0.0, NoiseSpec{}, 5);
  EXPECT_LE(max_abs(em_step(x, grow, 0.3, 0.01) - 1.01 * x), 1e-16);
  SpectralField zero(TorusGrid(1, 16), 1);
  auto noisy = linear_system(1.0, 0.5, NoiseSpec{2.0, 1.0}, 5);
  EXPECT_TRUE(tamed_em_step(zero, noisy, 0.3, 0.01).is_zero());
  EXPECT_TRUE(rk4_deterministic_step(zero, noisy, 0.01).is_zero());
}

TEST(Steps, TamedMatchesEmToSecondOrder) {
  auto x = dealias(random_field(TorusGrid(1, 16), 1, 3.0, 1.0, 2));
  auto s = linear_system(0.7, 0.1, NoiseSpec{}, 5);
  for (double dt : {1e-2, 1e-3}) {
    const double a = sobolev_norm(s.drift_d(x), 0.0);
    EXPECT_LE(sobolev_norm(tamed_em_step(x, s, 0.0, dt) - em_step(x, s, 0.0, dt), 0.0), dt * dt * a * a * 1.0001);
  }
}

TEST(Steps, TamedNoiseIncrementBounded) {
  auto x = constant_mode(1.0);
  auto s = linear_system(0.0, 0.0, NoiseSpec{1e6, 0.0}, 1);
  const double dt = 1e-3, dW = 0.05;
  const double inc = std::abs((tamed_em_step(x, s, dW, dt) - x).at(0, 0));
  EXPECT_LE(inc, std::abs(dW) / (dt * 1e6) * 1.0001);
}

TEST(Steps, Rk4SingleModeHeatOrderFive) {
  TorusGrid g(1, 16);
  SpectralField x(g, 1);
  add_cosine(x, 0, {3, 0, 0}, 1.0);
  auto s = linear_system(0.0, 1.0, NoiseSpec{}, 5);
  auto err = [&](double dt) {
    auto y = rk4_deterministic_step(x, s, dt);
    return std::abs(y.at(0, g.flat_index({3, 0, 0})).real() - 0.5 * std::exp(-9.0 * dt));
  };
  const double ratio = err(0.02) / err(0.01);
  EXPECT_NEAR(std::log2(ratio), 5.0, 0.15);
}

TEST(Steps, SteadyEulerStateInvariant) {
  TorusGrid g(2, 16);
  SpectralField w(g, 1);
  add_cosine(w, 0, {1, 0, 0}, 1.0);
  add_cosine(w, 0, {0, 1, 0}, 1.0);
  SpdeSystem s{DriftOperator::make(DriftKind::Vorticity2D, ModelParams{}), NoiseSpec{}, 5};
  auto y = w;
  for (int i = 0; i < 1000; ++i) y = rk4_deterministic_step(y, s, 1e-2);
  EXPECT_LE(max_abs(y - w), 1e-10);
}

TEST(Steps, EmStrongOrderHalfOnGbm) {
  // dX = X dt + 2 X dW on a constant mode, exact X_1 = exp(-1 + 2 W_1)
  auto s = linear_system(1.0, 0.0, NoiseSpec{2.0, 0.0}, 1);
  const int levels = 4, fine = 1 << 10, paths = 400;
  std::vector<double> err(levels, 0.0);
  for (int p = 0; p < paths; ++p) {
    WienerPath w(1000 + p, 1.0 / fine);
    std::vector<double> dw(fine);
    double W = 0.0;
    for (int i = 0; i < fine; ++i) W += (dw[i] = w.increment(i));
    const double exact = std::exp(-1.0 + 2.0 * W);
    for (int l = 0; l < levels; ++l) {
      const int m = 1 << (l + 6), stride = fine / m;
      auto x = constant_mode(1.0);
      for (int i = 0; i < m; ++i) {
        double d = 0.0;
        for (int j = 0; j < stride; ++j) d += dw[i * stride + j];
        x = em_step(x, s, d, 1.0 / m);
      }
      err[l] += std::abs(x.at(0, 0).real() - exact) / paths;
    }
  }
  const double order = std::log2(err[0] / err[levels - 1]) / (levels - 1);
  EXPECT_NEAR(order, 0.5, 0.12);
}

TEST(IntegratePath, HeatDecayMatchesExact) {
  TorusGrid g(1, 32);
  ModelParams p;
  p.nu = 1.0;
  StepperConfig c;
  c.scheme = Scheme::RK4Deterministic;
  c.dt = 1e-3;
  c.t_end = 1.0;
  c.save_stride = 100;
  auto r = integrate_path(sine_field(g), DriftOperator::make(DriftKind::Linear, p), std::nullopt, c, 10);
  ASSERT_TRUE(r.survived());
  for (const auto& row : r.rows) EXPECT_NEAR(row.norm_G, std::exp(-row.t) * std::sqrt(0.5), 1e-8);
  EXPECT_EQ(r.rows.size(), 11u);
  EXPECT_EQ(r.rows.back().t, 1.0);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    EXPECT_GT(r.rows[i].t, r.rows[i - 1].t);
    EXPECT_GE(r.rows[i].int_F1sq, r.rows[i - 1].int_F1sq);
    EXPECT_EQ(r.rows[i].regime, Regime::Deterministic);
  }
}

TEST(IntegratePath, ZeroHorizonKeepsInitialSample) {
  StepperConfig c;
  c.t_end = 0.0;
  auto r = integrate_path(sine_field(TorusGrid(1, 16)), DriftOperator::make(DriftKind::Burgers1D, {}), std::nullopt,
                          c, 5);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].t, 0.0);
  EXPECT_TRUE(r.finalized);
}

TEST(IntegratePath, ConfigErrors) {
  StepperConfig c;
  c.t_end = 0.0105;
  c.dt = 1e-3;
  auto op = DriftOperator::make(DriftKind::Burgers1D, {});
  EXPECT_THROW(integrate_path(sine_field(TorusGrid(1, 16)), op, std::nullopt, c, 5), ConfigError);
  c.t_end = 0.01;
  EXPECT_THROW(integrate_path(sine_field(TorusGrid(1, 16)), op, std::nullopt, c, 9), ConfigError);
  c.dt_min = 2e-3;
  EXPECT_THROW(integrate_path(sine_field(TorusGrid(1, 16)), op, std::nullopt, c, 5), ConfigError);
}

TEST(IntegratePath, InviscidBurgersFlagsShockNearOne) {
  TorusGrid g(1, 1024);
  StepperConfig c;
  c.scheme = Scheme::RK4Deterministic;
  c.dt = 1e-3;
  c.t_end = 2.0;
  c.save_stride = 50;
  c.resolution_tol = 1e-2;
  const int d = dealias_cutoff(g);
  auto r = integrate_path(sine_field(g), DriftOperator::make(DriftKind::Burgers1D, {}), std::nullopt, c, d);
  ASSERT_TRUE(r.blowup.has_value());
  EXPECT_EQ(r.blowup->reason, "unresolved");
  EXPECT_GE(r.blowup->t, 0.9);
  EXPECT_LE(r.blowup->t, 1.1);
  EXPECT_TRUE(r.rows.back().flags & kFlagBlowup);
  // raising the detector tolerance never moves blow-up earlier
  c.resolution_tol = 5e-2;
  auto r2 = integrate_path(sine_field(g), DriftOperator::make(DriftKind::Burgers1D, {}), std::nullopt, c, d);
  ASSERT_TRUE(r2.blowup.has_value());
  EXPECT_GE(r2.blowup->t, r.blowup->t);
}

TEST(IntegratePath, ThresholdMonotone) {
  TorusGrid g(1, 32);
  ModelParams p;
  p.linear_rate = 3.0;
  auto op = DriftOperator::make(DriftKind::Linear, p);
  StepperConfig c;
  c.scheme = Scheme::TamedEulerMaruyama;
  c.dt = 1e-3;
  c.t_end = 2.0;
  double prev = 0.0;
  for (double thr : {5.0, 20.0, 100.0}) {
    c.blowup_threshold = thr;
    auto r = integrate_path(sine_field(g), op, NoiseSpec{0.5, 0.0}, c, 10, 17);
    ASSERT_TRUE(r.blowup.has_value());
    EXPECT_EQ(r.blowup->reason, "norm_threshold");
    EXPECT_GE(r.blowup->t, prev);
    prev = r.blowup->t;
  }
}

TEST(IntegratePath, ReproducibleClosedAndBookkept) {
  TorusGrid g(1, 64);
  StepperConfig c;
  c.scheme = Scheme::TamedRK4EM;
  c.dt = 1e-3;
  c.t_end = 0.5;
  c.save_stride = 10;
  c.snapshot_stride = 25;
  ModelParams p;
  p.nu = 0.02;
  auto op = DriftOperator::make(DriftKind::Burgers1D, p);
  NoiseSpec n{1.5, 1.0};
  auto x0 = dealias(random_field(g, 1, 3.0, 0.8, 4));
  auto a = integrate_path(x0, op, n, c, 16, 555);
  auto b = integrate_path(x0, op, n, c, 16, 555);
  std::ostringstream sa, sb;
  write_trajectory_csv(sa, a);
  write_trajectory_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.final_state, b.final_state);
  auto other = integrate_path(x0, op, n, c, 16, 556);
  EXPECT_NE(other.final_state, a.final_state);
  ASSERT_TRUE(a.survived());
  EXPECT_GT(a.martingale.QV, 0.0);
  for (const auto& s : a.snapshots) {
    EXPECT_TRUE(is_band_limited(s.field, 16));
    EXPECT_TRUE(s.field.is_hermitian(0.0));
    for (const auto& row : a.rows) {
      if (row.t == s.t) {
        EXPECT_NEAR(row.norm_F0, sobolev_norm(s.field, 1.0), 1e-12 * row.norm_F0);
      }
    }
  }
  EXPECT_NE(sa.str().find(kTrajectoryHeader), std::string::npos);
  EXPECT_NE(sa.str().find("seed=555"), std::string::npos);
}

TEST(IntegratePath, RefinementKeepsCoarseIncrements) {
  // the adaptive run and a run with adaptation off see the same base increments
  TorusGrid g(1, 4);
  StepperConfig c;
  c.scheme = Scheme::EulerMaruyama;
  c.dt = 0.05;
  c.t_end = 1.0;
  c.adapt_trigger = 0.05;
  auto op = DriftOperator::make(DriftKind::Linear, {});
  auto x0 = constant_mode(1.0);
  auto r = integrate_path(x0, op, NoiseSpec{1.0, 0.0}, c, 1, 9);
  EXPECT_GT(r.refinements, 0u);
  // driftless GBM: the log-martingale QV equals the sum of coef^2 h on accepted steps
  EXPECT_GT(r.martingale.QV, 0.0);
  WienerPath w(9, 0.05);
  double W = 0.0;
  for (int i = 0; i < 20; ++i) W += w.increment(i);
  // EM on dX = X dW tracks exp(W - t/2) loosely; the refined path must be consistent with W
  EXPECT_NEAR(std::log(r.final_state.at(0, 0).real()), W - 0.5, 0.6);
}

TEST(NoiseFlow, ExponentialAndPositivity) {
  EXPECT_EQ(noise_flow_factor(2.0, 0.0, 1.0, 0.3, 0.01), 1.0);
  EXPECT_DOUBLE_EQ(noise_flow_factor(2.0, 1.5, 0.0, 0.3, 0.01), std::exp(1.5 * 0.3 - 0.5 * 2.25 * 0.01));
  for (double dW : {-10.0, -1.0, 1.0, 10.0})
    for (double m : {1e-3, 1.0, 1e3}) {
      const double f = noise_flow_factor(m, 4.0, 1.55, dW, 1.0);
      EXPECT_TRUE(std::isfinite(f) && f > 0.0) << m << " " << dW;
    }
  // leading order matches the Ito increment c dW
  const double c = 2.0 * std::pow(1.5, 1.0);
  EXPECT_NEAR(noise_flow_factor(1.5, 2.0, 1.0, 1e-4, 1e-10), 1.0 + c * 1e-4, 1e-7);
}

TEST(NoiseFlow, InverseBesselMean) {
  // theta = alpha = 1: m = 1/R with R a 3-d Bessel process from 1, E m_1 = 2 Phi(1) - 1
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N01;
  const int paths = 20000, steps = 200;
  const double dt = 1.0 / steps;
  double sum = 0.0;
  for (int p = 0; p < paths; ++p) {
    double m = 1.0;
    for (int i = 0; i < steps; ++i) m *= noise_flow_factor(m, 1.0, 1.0, std::sqrt(dt) * N01(rng), dt);
    sum += m;
  }
  EXPECT_NEAR(sum / paths, std::erf(1.0 / std::sqrt(2.0)), 0.02);
}

TEST(Steps, SplitLampertiReducesToRk4WithoutNoise) {
  TorusGrid g(1, 32);
  SpdeSystem s{DriftOperator::make(DriftKind::Burgers1D, {}), NoiseSpec{}, 10};
  auto x = sine_field(g);
  EXPECT_EQ(split_rk4_lamperti_step(x, s, 0.7, 1e-3), rk4_deterministic_step(x, s, 1e-3));
  s.noise = NoiseSpec{2.0, 1.0, TamingCase::I};
  auto y = split_rk4_lamperti_step(x, s, 0.01, 1e-3);
  const double f = noise_flow_factor(sobolev_norm(x, s.ladder().s_F0), 2.0, 1.0, 0.01, 1e-3);
  EXPECT_LE(max_abs(y - f * rk4_deterministic_step(x, s, 1e-3)), 1e-15);
  EXPECT_EQ(scheme_from_string("SplitRK4Lamperti"), Scheme::SplitRK4Lamperti);
}
