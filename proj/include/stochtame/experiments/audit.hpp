#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/statistics/linear_regression.hpp>

#include "stochtame/core/errors.hpp"
#include "stochtame/models/drift_operator.hpp"
#include "stochtame/spectral/projection.hpp"
#include "stochtame/spectral/random_field.hpp"
#include "stochtame/spectral/sobolev.hpp"

namespace stochtame {

struct AuditOptions {
  int n_samples = 100;
  std::vector<double> amplitudes{0.25, 0.5, 1.0, 2.0, 4.0};  ///< F0 norms of the scaled samples
  double decay = 3.0;       ///< random sample spectrum
  int cutoff = 0;           ///< 0: 2/3 rule of the grid
  std::uint64_t seed = 1;
  std::vector<SpectralField> probes;  ///< extra states (e.g. along a deterministic orbit)
  std::optional<double> alpha0;       ///< declared noise exponent for the 2 alpha0 > gamma1 check
  double default_gamma1 = 2.0;        ///< used when no positive remainder is found
};

struct AuditResult {
  AssumptionConstants constants;
  AssumptionReport report;
  std::string argmax_C1;   ///< "seed:<n>" or "probe:<i>"
  std::string argmax_A3;
  double max_rel_pair_G = 0.0;   ///< max |<a,A a>_G| / (||a||_G ||A a||_G)
  std::size_t interpolation_violations = 0;
  std::optional<bool> exponent_check;
};

namespace detail {

struct CubicFit {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double scale = 0.0;  ///< max |P| over the grid
  double rest(double lam) const { return c1 * lam + c3 * lam * lam * lam; }
};

/// Least-squares P(lam) ~ c1 lam + c2 lam^2 + c3 lam^3 (exact for quadratic drifts).
inline CubicFit fit_cubic(const std::vector<double>& lam, const std::vector<double>& P) {
  Eigen::MatrixXd M(static_cast<Eigen::Index>(lam.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(lam.size()));
  CubicFit f;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    M(r, 0) = lam[i];
    M(r, 1) = lam[i] * lam[i];
    M(r, 2) = lam[i] * lam[i] * lam[i];
    y(r) = P[i];
    f.scale = std::max(f.scale, std::abs(P[i]));
  }
  const Eigen::Vector3d c = M.colPivHouseholderQr().solve(y);
  f.c1 = c(0);
  f.c2 = c(1);
  f.c3 = c(2);
  return f;
}

inline std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  auto [intercept, slope] = boost::math::statistics::simple_ordinary_least_squares(lx, ly);
  return {intercept, slope};
}

}  // namespace detail

/// Fits the pairing constants of (A1)-(A3) on random band-limited fields
/// (plus optional probes) at several amplitudes.
///
/// For each unit-F0 sample a, P(lam) = <lam a, A(lam a)>_S is fitted on
/// {lam, lam^2, lam^3}. The lam^2 part is the linear operator and gives
/// C2 = min -c2/||a||_F1^2; the rest R(lam) gives gamma1 by log-log regression
/// of R on ||lam a||_F0 and C1 = max R/||lam a||_F0^gamma1. The F1 pairing
/// gives gamma13 and C1_A3 the same way against ||a||_F0^gamma13 ||a||_F1^2.
inline AuditResult assumption_audit(const DriftOperator& op, const TorusGrid& grid, const AuditOptions& o) {
  if (o.n_samples < 100) throw ConfigError("assumption_audit: n_samples must be >= 100");
  if (o.amplitudes.size() < 3) throw ConfigError("assumption_audit: need at least three amplitudes");
  for (double a : o.amplitudes)
    if (!(a > 0.0)) throw ConfigError("assumption_audit: amplitudes must be > 0");
  const auto& l = op.ladder;
  const int cutoff = o.cutoff > 0 ? o.cutoff : dealias_cutoff(grid);
  const int comps = kind_components(op.kind);

  struct Sample {
    std::string tag;
    SpectralField a;
  };
  std::vector<Sample> samples;
  for (int i = 0; i < o.n_samples; ++i) {
    auto a = random_field(grid, comps, o.decay, 1.0, o.seed + static_cast<std::uint64_t>(i));
    truncate_modes(a, cutoff);
    samples.push_back({"seed:" + std::to_string(o.seed + static_cast<std::uint64_t>(i)), std::move(a)});
  }
  for (std::size_t i = 0; i < o.probes.size(); ++i) {
    auto a = o.probes[i];
    truncate_modes(a, cutoff);
    samples.push_back({"probe:" + std::to_string(i), std::move(a)});
  }

  AuditResult res;
  struct Row {
    std::size_t s;
    double lam, n0, n1, R0, R1;
  };
  std::vector<Row> rows;
  double C2 = std::numeric_limits<double>::infinity();
  std::vector<double> tx, ty;  // ||A(lam a)||_G against ||lam a||_F0 at the two largest amplitudes
  for (std::size_t si = 0; si < samples.size(); ++si) {
    SpectralField a = samples[si].a;
    const double n0 = sobolev_norm(a, l.s_F0);
    if (!(n0 > 0.0)) continue;
    a *= 1.0 / n0;
    const double n1 = sobolev_norm(a, l.s_F1);
    auto sides = interpolation_check(a, l);
    if (sides.lhs > sides.rhs * (1.0 + 1e-12)) ++res.interpolation_violations;
    std::vector<double> P0, P1;
    for (std::size_t k = 0; k < o.amplitudes.size(); ++k) {
      const double lam = o.amplitudes[k];
      const SpectralField x = lam * a;
      const SpectralField Ax = op.evaluate(x);
      P0.push_back(inner_product(x, Ax, l.s_F0));
      P1.push_back(inner_product(x, Ax, l.s_F1));
      const double nG = sobolev_norm(x, l.s_G), AG = sobolev_norm(Ax, l.s_G);
      if (nG > 0.0 && AG > 0.0)
        res.max_rel_pair_G = std::max(res.max_rel_pair_G, std::abs(inner_product(x, Ax, l.s_G)) / (nG * AG));
      if (k + 2 >= o.amplitudes.size() && AG > 0.0) {
        tx.push_back(lam);
        ty.push_back(AG);
      }
    }
    const auto f0 = detail::fit_cubic(o.amplitudes, P0);
    const auto f1 = detail::fit_cubic(o.amplitudes, P1);
    C2 = std::min(C2, n1 > 0.0 ? -f0.c2 / (n1 * n1) : 0.0);
    for (double lam : o.amplitudes) {
      double r0 = f0.rest(lam), r1 = f1.rest(lam);
      if (std::abs(r0) <= 1e-10 * f0.scale) r0 = 0.0;
      if (std::abs(r1) <= 1e-10 * f1.scale) r1 = 0.0;
      rows.push_back({si, lam, lam, lam * n1, r0, r1});
    }
  }
  auto& k = res.constants;
  k.C2 = std::isfinite(C2) ? C2 : 0.0;
  k.gamma2 = 2.0;
  k.alpha_emb = l.m;
  k.beta_emb = 1.0 - l.m;

  // (A1): R0 <= C1 ||x||_F0^gamma1
  std::vector<double> x0, y0;
  for (const auto& r : rows)
    if (r.R0 > 0.0) {
      x0.push_back(r.n0);
      y0.push_back(r.R0);
    }
  k.gamma1 = o.default_gamma1;
  if (x0.size() >= 2 && *std::max_element(x0.begin(), x0.end()) > *std::min_element(x0.begin(), x0.end()))
    k.gamma1 = detail::loglog_fit(x0, y0).second;
  for (const auto& r : rows) {
    if (r.R0 <= 0.0) continue;
    const double c = r.R0 / std::pow(r.n0, k.gamma1);
    if (c > k.C1) {
      k.C1 = c;
      res.argmax_C1 = samples[r.s].tag;
    }
  }

  // (A3): R1 <= C1 ||x||_F0^gamma13 ||x||_F1^2
  std::vector<double> x1, y1;
  for (const auto& r : rows)
    if (r.R1 > 0.0 && r.n1 > 0.0) {
      x1.push_back(r.n0);
      y1.push_back(r.R1 / (r.n1 * r.n1));
    }
  k.gamma13 = 1.0;
  if (x1.size() >= 2) k.gamma13 = detail::loglog_fit(x1, y1).second;
  for (const auto& r : rows) {
    if (r.R1 <= 0.0 || r.n1 <= 0.0) continue;
    const double c = r.R1 / (std::pow(r.n0, k.gamma13) * r.n1 * r.n1);
    if (c > k.C1_A3) {
      k.C1_A3 = c;
      res.argmax_A3 = samples[r.s].tag;
    }
  }

  // tightness bound ||A(x)||_G <= C3 (||x||_F0^gamma_sup1 + ||x||_F1 + 1)
  k.gamma_sup1 = 2.0;
  if (tx.size() >= 2 && *std::max_element(tx.begin(), tx.end()) > *std::min_element(tx.begin(), tx.end()))
    k.gamma_sup1 = detail::loglog_fit(tx, ty).second;
  k.gamma_sup2 = 1.0;
  for (const auto& s : samples) {
    SpectralField a = s.a;
    const double n0 = sobolev_norm(a, l.s_F0);
    if (!(n0 > 0.0)) continue;
    a *= 1.0 / n0;
    for (double lam : o.amplitudes) {
      const SpectralField x = lam * a;
      const double bound = std::pow(lam, k.gamma_sup1) + sobolev_norm(x, l.s_F1) + 1.0;
      k.C3 = std::max(k.C3, sobolev_norm(op.evaluate(x), l.s_G) / bound);
    }
  }

  if (o.alpha0) res.exponent_check = 2.0 * *o.alpha0 > k.gamma1;
  auto& rep = res.report;
  rep.emplace_back("C1", k.C1);
  rep.emplace_back("gamma1", k.gamma1);
  rep.emplace_back("C2", k.C2);
  rep.emplace_back("gamma2", k.gamma2);
  rep.emplace_back("C1_A3", k.C1_A3);
  rep.emplace_back("gamma13", k.gamma13);
  rep.emplace_back("C3", k.C3);
  rep.emplace_back("gamma_sup1", k.gamma_sup1);
  rep.emplace_back("gamma_sup2", k.gamma_sup2);
  rep.emplace_back("alpha_emb", k.alpha_emb);
  rep.emplace_back("beta_emb", k.beta_emb);
  rep.emplace_back("max_rel_pair_G", res.max_rel_pair_G);
  rep.emplace_back("interpolation_violations", static_cast<double>(res.interpolation_violations));
  rep.emplace_back("samples", static_cast<double>(samples.size()));
  if (res.exponent_check) rep.emplace_back("exponent_check", *res.exponent_check ? 1.0 : 0.0);
  return res;
}

}  // namespace stochtame
