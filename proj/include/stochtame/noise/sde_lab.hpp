#pragma once

// One-dimensional SDE laboratory: geometric Brownian motion, scalar
// Euler-Maruyama / Milstein steps and the scale function of a diffusion.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "stochtame/core/errors.hpp"

namespace stochtame {

struct GbmSpec {
  double a = 0.0;
  double b = 0.0;
  double f0 = 1.0;
};

/// Exact solution f0 exp((a - b^2/2) t + b W_t).
inline double gbm_exact(const GbmSpec& s, double w_t, double t) {
  if (t < 0.0) throw DomainError("gbm_exact: t must be >= 0");
  return s.f0 * std::exp((s.a - 0.5 * s.b * s.b) * t + s.b * w_t);
}

/// b^2 > 2a, strict. Values within a few ulps of the tie count as the tie,
/// so b = sqrt(2a) returns false despite rounding in b*b.
inline bool gbm_decay_criterion(const GbmSpec& s) {
  const double lhs = s.b * s.b, rhs = 2.0 * s.a;
  return lhs - rhs > 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lhs), std::abs(rhs));
}

using ScalarFn = std::function<double(double)>;

inline double em_scalar_step(double x, const ScalarFn& mu, const ScalarFn& sigma, double dt, double dW) {
  return x + mu(x) * dt + sigma(x) * dW;
}

/// Milstein step; `dsigma` is the derivative of sigma.
inline double milstein_scalar_step(double x, const ScalarFn& mu, const ScalarFn& sigma, const ScalarFn& dsigma,
                                   double dt, double dW) {
  const double s = sigma(x);
  return x + mu(x) * dt + s * dW + 0.5 * s * dsigma(x) * (dW * dW - dt);
}

/// Tamed Euler-Maruyama for scalars, same normalisation as the field scheme.
inline double tamed_em_scalar_step(double x, const ScalarFn& mu, const ScalarFn& sigma, double dt, double dW) {
  const double m = mu(x), s = sigma(x);
  return x + dt * m / (1.0 + dt * std::abs(m)) + dW * s / (1.0 + dt * s * s);
}

struct ScaleFunctionSpec {
  ScalarFn mu;
  ScalarFn sigma;
  double c = 1.0;          ///< reference point, s(c) = 0
  double rel_tol = 1e-8;   ///< quadrature tolerance
};

/// s(x) = int_c^x exp(-int_c^y 2 mu(z)/sigma(z)^2 dz) dy by nested adaptive
/// Gauss-Kronrod quadrature.
inline double scale_function(const ScaleFunctionSpec& spec, double x) {
  using boost::math::quadrature::gauss_kronrod;
  auto ratio = [&](double z) {
    const double s = spec.sigma(z);
    if (!(s > 0.0) || !std::isfinite(s))
      throw DomainError("scale_function: sigma vanishes or is invalid at z = " + std::to_string(z));
    return 2.0 * spec.mu(z) / (s * s);
  };
  auto density = [&](double y) {
    if (y == spec.c) return 1.0;
    const double inner = gauss_kronrod<double, 31>::integrate(ratio, spec.c, y, 15, spec.rel_tol * 1e-2);
    return std::exp(-inner);
  };
  if (x == spec.c) {
    ratio(x);
    return 0.0;
  }
  ratio(spec.c);
  ratio(x);
  return gauss_kronrod<double, 31>::integrate(density, spec.c, x, 15, spec.rel_tol * 1e-2);
}

}  // namespace stochtame
