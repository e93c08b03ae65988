#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/statistics/linear_regression.hpp>

#include "stochtame/core/errors.hpp"
#include "stochtame/experiments/statistics.hpp"
#include "stochtame/noise/martingale.hpp"
#include "stochtame/noise/sde_lab.hpp"

namespace stochtame {

struct GbmStudyConfig {
  GbmSpec spec{1.0, 2.0, 1.0};
  int n_paths = 1000;
  double T = 10.0;
  double decay_level = 1e-2;
  int coarsest_level = 10;  ///< dt = 2^-level, levels coarsest..finest
  int finest_level = 13;
  std::uint64_t seed = 1;
};

struct GbmStudy {
  double decay_fraction = 0.0;  ///< share of exact samples with f_T < decay_level
  double decay_oracle = 0.0;    ///< P(f_T < decay_level) from the lognormal law
  double median_fT = 0.0;
  std::vector<double> dts;
  std::vector<double> strong_errors;  ///< E|tamed EM - exact| at T per dt
  double order = 0.0;                 ///< log-log slope over all levels
  double order_at_coarsest = 0.0;       ///< log2 of the error ratio across the first halving
  std::vector<double> em_errors;      ///< plain EM on the same increments, for comparison
  double em_order = 0.0;
};

/// Exact-solution sampling at T plus a tamed-EM strong-error ladder on the
/// same Brownian paths.
inline GbmStudy gbm_study(const GbmStudyConfig& c) {
  if (c.n_paths < 1 || !(c.T > 0.0)) throw ConfigError("gbm_study: need n_paths >= 1 and T > 0");
  if (c.coarsest_level >= c.finest_level) throw ConfigError("gbm_study: need at least two dt levels");
  const auto& s = c.spec;
  GbmStudy r;
  const double sd = std::abs(s.b) * std::sqrt(c.T);
  const double mean = std::log(s.f0) + (s.a - 0.5 * s.b * s.b) * c.T;
  r.decay_oracle = sd > 0.0 ? normal_cdf((std::log(c.decay_level) - mean) / sd) : (mean < std::log(c.decay_level));

  const double dt_fine = std::ldexp(1.0, -c.finest_level);
  const auto n_fine = static_cast<std::size_t>(std::llround(c.T / dt_fine));
  const int levels = c.finest_level - c.coarsest_level + 1;
  for (int k = 0; k < levels; ++k) r.dts.push_back(std::ldexp(1.0, -(c.coarsest_level + k)));
  std::vector<double> err(static_cast<std::size_t>(levels), 0.0), err_em(err);

  const ScalarFn mu = [&](double x) { return s.a * x; };
  const ScalarFn sigma = [&](double x) { return s.b * x; };
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> N01;
  std::vector<double> dW(n_fine), fT;
  std::size_t decayed = 0;
  for (int p = 0; p < c.n_paths; ++p) {
    double W = 0.0;
    for (auto& w : dW) {
      w = std::sqrt(dt_fine) * N01(rng);
      W += w;
    }
    const double exact = gbm_exact(s, W, c.T);
    fT.push_back(exact);
    decayed += exact < c.decay_level ? 1 : 0;
    for (int k = 0; k < levels; ++k) {
      const std::size_t stride = std::size_t{1} << (levels - 1 - k);
      const double dt = r.dts[static_cast<std::size_t>(k)];
      double x = s.f0, y = s.f0;
      for (std::size_t i = 0; i < n_fine; i += stride) {
        double inc = 0.0;
        for (std::size_t j = i; j < i + stride; ++j) inc += dW[j];
        x = tamed_em_scalar_step(x, mu, sigma, dt, inc);
        y += dt * mu(y) + inc * sigma(y);
      }
      err[static_cast<std::size_t>(k)] += std::abs(x - exact);
      err_em[static_cast<std::size_t>(k)] += std::abs(y - exact);
    }
  }
  r.decay_fraction = static_cast<double>(decayed) / c.n_paths;
  r.median_fT = median(fT);
  std::vector<double> lx, ly, le;
  for (int k = 0; k < levels; ++k) {
    const double e = err[static_cast<std::size_t>(k)] / c.n_paths;
    r.strong_errors.push_back(e);
    r.em_errors.push_back(err_em[static_cast<std::size_t>(k)] / c.n_paths);
    lx.push_back(std::log(r.dts[static_cast<std::size_t>(k)]));
    ly.push_back(std::log(e));
    le.push_back(std::log(r.em_errors.back()));
  }
  using boost::math::statistics::simple_ordinary_least_squares;
  r.order = simple_ordinary_least_squares(lx, ly).second;
  r.em_order = simple_ordinary_least_squares(lx, le).second;
  r.order_at_coarsest = std::log2(r.strong_errors[0] / r.strong_errors[1]);
  return r;
}

struct ExpLawConfig {
  double epsilon = 1.0;
  int n_paths = 10000;
  double dt = 1e-3;
  double T = 50.0;
  std::uint64_t seed = 2;
};

struct ExpLawStudy {
  std::vector<double> E;       ///< per-path sup_t (W_t - (eps/2) t)
  double survival_at_1 = 0.0;  ///< empirical P(E >= 1)
  double oracle_at_1 = 0.0;    ///< exp(-eps)
  KsResult ks;                 ///< against Exp(eps)
};

/// E(eps) for the driftless martingale M = W, tracked with the bridge maximum.
inline ExpLawStudy exp_law_study(const ExpLawConfig& c) {
  if (c.n_paths < 1 || !(c.dt > 0.0) || !(c.T > 0.0) || !(c.epsilon > 0.0))
    throw ConfigError("exp_law_study: need n_paths >= 1 and dt, T, epsilon > 0");
  ExpLawStudy r;
  const auto steps = static_cast<std::size_t>(std::llround(c.T / c.dt));
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> N01;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::size_t above = 0;
  for (int p = 0; p < c.n_paths; ++p) {
    MartingaleDiagnostics d;
    d.epsilon = c.epsilon;
    for (std::size_t i = 0; i < steps; ++i) {
      double u = U(rng);
      while (u <= 0.0) u = U(rng);
      d = track_martingale(d, std::sqrt(c.dt) * N01(rng), c.dt, u);
    }
    r.E.push_back(d.E);
    above += d.E >= 1.0 ? 1 : 0;
  }
  r.survival_at_1 = static_cast<double>(above) / c.n_paths;
  r.oracle_at_1 = std::exp(-c.epsilon);
  r.ks = ks_exponential(r.E, c.epsilon);
  return r;
}

struct RevuzYorConfig {
  std::vector<double> x_grid{0.25, 0.5, 1.0, 1.5, 2.0};  ///< every bound >= e^-4, resolvable at n = 1e4
  std::vector<double> y_grid{0.5, 1.0, 1.5, 2.0, 4.0};
  int n_paths = 10000;
  double dt = 1e-3;
  double z = 3.090232306167813;  ///< family-wise 95% over a 5x5 grid (Bonferroni)
  std::uint64_t seed = 3;
};

struct RevuzYorCell {
  double x = 0.0, y = 0.0;
  Proportion p;           ///< empirical P(sup_{t<=y} W_t >= x)
  double bound = 0.0;     ///< exp(-x^2/2y)
  double reflection = 0.0;  ///< 2 (1 - Phi(x / sqrt y))
  bool below_bound() const { return p.hi <= bound; }
  bool matches_reflection() const { return p.lo <= reflection && reflection <= p.hi; }
};

/// Brownian running suprema (exact bridge maxima between grid points).
inline std::vector<RevuzYorCell> revuz_yor_study(const RevuzYorConfig& c) {
  if (c.x_grid.empty() || c.y_grid.empty() || c.n_paths < 1 || !(c.dt > 0.0))
    throw ConfigError("revuz_yor_study: empty grid or bad sampling parameters");
  std::vector<double> ys = c.y_grid;
  std::sort(ys.begin(), ys.end());
  if (!(ys.front() > 0.0)) throw ConfigError("revuz_yor_study: y must be > 0");
  std::vector<std::size_t> at(ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) at[j] = static_cast<std::size_t>(std::llround(ys[j] / c.dt));
  std::vector<std::size_t> hits(c.x_grid.size() * ys.size(), 0);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> N01;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int p = 0; p < c.n_paths; ++p) {
    MartingaleDiagnostics d;
    d.epsilon = 0.0;
    std::size_t step = 0;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      for (; step < at[j]; ++step) {
        double u = U(rng);
        while (u <= 0.0) u = U(rng);
        d = track_martingale(d, std::sqrt(c.dt) * N01(rng), c.dt, u);
      }
      for (std::size_t i = 0; i < c.x_grid.size(); ++i) hits[i * ys.size() + j] += d.E >= c.x_grid[i] ? 1 : 0;
    }
  }
  std::vector<RevuzYorCell> out;
  for (std::size_t i = 0; i < c.x_grid.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) {
      RevuzYorCell cell;
      cell.x = c.x_grid[i];
      cell.y = ys[j];
      cell.p = wilson_interval(hits[i * ys.size() + j], static_cast<std::size_t>(c.n_paths), c.z);
      cell.bound = revuz_yor_bound(cell.x, cell.y);
      cell.reflection = 2.0 * (1.0 - normal_cdf(cell.x / std::sqrt(cell.y)));
      out.push_back(cell);
    }
  return out;
}

}  // namespace stochtame
