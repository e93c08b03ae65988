#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stochtame/experiments.hpp"
#include "stochtame/models.hpp"

using namespace stochtame;

namespace {

EnsembleConfig heat_config(double theta) {
  EnsembleConfig c;
  ModelParams p;
  p.nu = 1.0;
  c.drift = DriftOperator::make(DriftKind::Linear, p);
  c.n_paths = 4;
  c.d_list = {4, 8};
  c.initial.type = "sine";
  c.noise = NoiseSpec{theta, 0.0};
  c.stepper.dt = 1e-2;
  c.stepper.t_end = 1.0;
  c.K_grid = {0.5, 1.0, 2.0, 4.0};
  return c;
}

}  // namespace

TEST(Statistics, WilsonCoverage) {
  std::mt19937_64 rng(42);
  for (double p : {0.05, 0.3}) {
    std::binomial_distribution<std::size_t> B(10000, p);
    int covered = 0;
    const int reps = 2000;
    for (int i = 0; i < reps; ++i) {
      auto w = wilson_interval(B(rng), 10000);
      covered += (w.lo <= p && p <= w.hi) ? 1 : 0;
    }
    EXPECT_NEAR(covered / static_cast<double>(reps), 0.95, 0.02) << p;
  }
  auto z = wilson_interval(0, 10);
  EXPECT_EQ(z.lo, 0.0);
  EXPECT_GT(z.hi, 0.0);
  EXPECT_THROW(wilson_interval(3, 2), DomainError);
}

TEST(Statistics, NormalAndKs) {
  EXPECT_NEAR(normal_cdf(normal_quantile(0.975)), 0.975, 1e-14);
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> E(1.0);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  std::vector<double> e, u;
  for (int i = 0; i < 4000; ++i) {
    e.push_back(E(rng));
    u.push_back(U(rng));
  }
  EXPECT_GT(ks_exponential(e).p_value, 0.01);
  EXPECT_LT(ks_exponential(u).p_value, 1e-6);
}

TEST(Statistics, MannKendallExact) {
  EXPECT_NEAR(mann_kendall({1, 2, 3, 4}).p_increasing, 1.0 / 24.0, 1e-15);
  EXPECT_EQ(mann_kendall({0.1, 0.1, 0.1, 0.1}).p_increasing, 1.0);
  EXPECT_EQ(mann_kendall({4, 3, 2, 1}).p_increasing, 1.0);
  EXPECT_EQ(mann_kendall({4, 3, 2, 1}).S, -6);
  auto big = mann_kendall({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  EXPECT_FALSE(big.exact);
  EXPECT_LT(big.p_increasing, 1e-3);
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
}

TEST(Ensemble, HeatNeverExceedsInitialEnergy) {
  auto c = heat_config(0.0);
  auto st = run_ensemble(c);
  const double e0 = 1.0;  // ||sin x||_F0^2 with s_F0 = 1
  for (int d : c.d_list) {
    EXPECT_EQ(st.p_sup(d, 1.0 + 1e-9).p_hat, 0.0);
    EXPECT_EQ(st.p_sup(d, 0.5).p_hat, 1.0);
    EXPECT_NEAR(st.samples(d)[0].sup_F0_sq, e0, 1e-12);
  }
  auto rep = uniform_control_report(st, 0.1);
  ASSERT_TRUE(rep.first.K);
  EXPECT_EQ(*rep.first.K, 2.0);
}

TEST(Ensemble, SinglePathIndicatorsAndDeterminism) {
  auto c = heat_config(1.5);
  c.n_paths = 1;
  auto a = run_ensemble(c);
  for (int d : c.d_list)
    for (double K : c.K_grid) {
      const double p = a.p_sup(d, K).p_hat;
      EXPECT_TRUE(p == 0.0 || p == 1.0);
    }
  EXPECT_EQ(run_ensemble(c), a);
  c.jobs = 3;
  c.n_paths = 5;
  auto par = run_ensemble(c);
  c.jobs = 1;
  EXPECT_EQ(run_ensemble(c), par);
}

TEST(Ensemble, MergeIsOrderFree) {
  auto c = heat_config(1.5);
  c.delta_grid = {0.05, 0.1};
  c.aldous_level = 0.8;
  c.n_paths = 6;
  auto whole = run_ensemble(c);
  auto part = [&](std::uint64_t base, int n) {
    auto cc = c;
    cc.base_seed = base;
    cc.n_paths = n;
    return run_ensemble(cc);
  };
  auto a = part(0, 2), b = part(2, 1), d = part(3, 3);
  auto ab_d = a;
  ab_d.merge(b).merge(d);
  auto d_ba = d;
  d_ba.merge(b).merge(a);
  EXPECT_EQ(ab_d, whole);
  EXPECT_EQ(d_ba, whole);
  EXPECT_THROW(a.merge(a), ConfigError);
}

TEST(Ensemble, ConfigErrors) {
  auto c = heat_config(0.0);
  c.d_list = {8, 4};
  EXPECT_THROW(run_ensemble(c), ConfigError);
  c = heat_config(0.0);
  c.delta_grid = {0.1, 0.9};
  EXPECT_THROW(run_ensemble(c), ConfigError);
  c = heat_config(0.0);
  auto st = run_ensemble(c);
  st.by_d.erase(8);
  EXPECT_THROW(uniform_control_report(st, 0.1), ConfigError);
}

TEST(Aldous, FrozenAndHugeEta) {
  auto c = heat_config(0.0);
  ModelParams p;
  c.drift = DriftOperator::make(DriftKind::Linear, p);
  c.delta_grid = {0.1, 0.2};
  auto frozen = aldous_stats(run_ensemble(c), 1e-12);
  for (const auto& r : frozen.rows) EXPECT_EQ(r.p.p_hat, 0.0);
  auto heat = aldous_stats(heat_config(0.0), {0.1, 0.5}, 1e6);
  ASSERT_EQ(heat.rows.size(), 4u);
  for (const auto& r : heat.rows) EXPECT_EQ(r.p.p_hat, 0.0);
}

TEST(Aldous, TamedBurgersShrinksWithDelta) {
  EnsembleConfig c;
  ModelParams p;
  p.nu = 0.05;
  c.drift = DriftOperator::make(DriftKind::Burgers1D, p);
  c.n_paths = 40;
  c.d_list = {8, 16};
  c.noise = NoiseSpec{1.0, 0.5};
  c.stepper.scheme = Scheme::TamedRK4EM;
  c.stepper.dt = 2e-3;
  c.stepper.t_end = 1.0;
  c.K_grid = {1.0, 2.0};
  c.delta_grid = {0.01, 0.05, 0.2};
  auto t = aldous_stats(run_ensemble(c));
  EXPECT_GT(t.eta, 0.0);
  for (int d : c.d_list) {
    double prev = -1.0;
    for (const auto& r : t.rows)
      if (r.d == d) {
        EXPECT_GE(r.p.p_hat, prev);
        prev = r.p.p_hat;
      }
  }
  for (const auto& r : t.at_delta(0.01)) EXPECT_LT(r.p.p_hat, 0.1);
}

TEST(Audit, LinearAndZeroOperators) {
  TorusGrid g(1, 32);
  AuditOptions o;
  ModelParams p;
  p.nu = 1.0;
  auto heat = assumption_audit(DriftOperator::make(DriftKind::Linear, p), g, o);
  EXPECT_EQ(heat.constants.C1, 0.0);
  EXPECT_GT(heat.constants.C2, 0.0);
  EXPECT_EQ(heat.interpolation_violations, 0u);
  auto zero = assumption_audit(DriftOperator::make(DriftKind::Linear, ModelParams{}), g, o);
  EXPECT_EQ(zero.constants.C1, 0.0);
  EXPECT_EQ(zero.constants.C2, 0.0);
  EXPECT_EQ(zero.constants.C3, 0.0);
  o.n_samples = 10;
  EXPECT_THROW(assumption_audit(DriftOperator::make(DriftKind::Linear, p), g, o), ConfigError);
}

TEST(Audit, InviscidBurgers) {
  TorusGrid g(1, 64);
  AuditOptions o;
  o.alpha0 = 2.0;
  auto r = assumption_audit(DriftOperator::make(DriftKind::Burgers1D, ModelParams{}), g, o);
  EXPECT_LT(r.max_rel_pair_G, 1e-13);
  EXPECT_NEAR(r.constants.gamma1, 3.0, 1e-6);
  EXPECT_GT(r.constants.C1, 0.0);
  EXPECT_NEAR(r.constants.C2, 0.0, 1e-12);
  ASSERT_TRUE(r.exponent_check);
  EXPECT_TRUE(*r.exponent_check);
  EXPECT_EQ(report_value(r.report, "gamma1"), r.constants.gamma1);
}

TEST(SdeStudies, GbmAgainstLognormalLaw) {
  GbmStudyConfig c;
  c.n_paths = 400;
  c.coarsest_level = 8;
  c.finest_level = 10;
  auto r = gbm_study(c);
  ASSERT_EQ(r.em_errors.size(), 3u);
  auto w = wilson_interval(static_cast<std::size_t>(std::llround(r.decay_fraction * c.n_paths)), c.n_paths, 3.0);
  EXPECT_LE(w.lo, r.decay_oracle);
  EXPECT_GE(w.hi, r.decay_oracle);
  EXPECT_NEAR(r.decay_oracle, normal_cdf((10.0 - std::log(100.0)) / (2.0 * std::sqrt(10.0))), 1e-15);
  c.spec = {1.0, 0.5, 1.0};
  c.T = 2.0;
  EXPECT_GT(gbm_study(c).median_fT, 1.0);
}

TEST(SdeStudies, PlainEmHasHalfOrderOnUnitHorizon) {
  GbmStudyConfig c;
  c.T = 1.0;
  c.n_paths = 2000;
  c.coarsest_level = 8;
  c.finest_level = 12;
  auto r = gbm_study(c);
  EXPECT_NEAR(r.em_order, 0.5, 0.12);
  for (std::size_t k = 0; k < r.dts.size(); ++k) EXPECT_LT(r.em_errors[k], r.strong_errors[k]);
}

TEST(SdeStudies, ExponentialLawAndRevuzYor) {
  ExpLawConfig e;
  e.n_paths = 2000;
  e.T = 30.0;
  e.dt = 2e-3;
  auto r = exp_law_study(e);
  EXPECT_GT(r.ks.p_value, 0.01);
  EXPECT_NEAR(r.survival_at_1, std::exp(-1.0), 0.04);
  RevuzYorConfig c;
  c.n_paths = 2000;
  c.dt = 2e-3;
  for (const auto& cell : revuz_yor_study(c)) {
    EXPECT_TRUE(cell.below_bound()) << cell.x << " " << cell.y;
    EXPECT_TRUE(cell.matches_reflection()) << cell.x << " " << cell.y;
  }
}
