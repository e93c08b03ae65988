#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

// Closed forms used as independent references. Nothing here calls the code
// under test.

namespace stochtame::oracle {

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// P(f_T < level) for f_T = f0 exp((a - b^2/2) T + b W_T).
inline double lognormal_below(double a, double b, double f0, double T, double level) {
  const double mean = std::log(f0) + (a - 0.5 * b * b) * T;
  return Phi((std::log(level) - mean) / (std::abs(b) * std::sqrt(T)));
}

/// P(sup_t (W_t - eps t / 2) >= x) = exp(-eps x).
inline double drifted_sup_survival(double eps, double x) { return std::exp(-eps * x); }

/// P(sup_{t<=y} W_t >= x) = 2 (1 - Phi(x / sqrt y)).
inline double reflection(double x, double y) { return 2.0 * (1.0 - Phi(x / std::sqrt(y))); }

inline double exponential_tail_bound(double x, double y) { return std::exp(-x * x / (2.0 * y)); }

/// Scale function of dX = a X dt + b X dW with s(c) = 0.
inline double gbm_scale(double a, double b, double c, double x) {
  const double p = 2.0 * a / (b * b);
  if (std::abs(1.0 - p) < 1e-12) return c * std::log(x / c);
  return std::pow(c, p) * (std::pow(x, 1.0 - p) - std::pow(c, 1.0 - p)) / (1.0 - p);
}

/// Breaking time -1 / min u0' of inviscid Burgers, from samples of u0' on a grid.
inline double breaking_time(const std::vector<double>& du0) {
  const double m = *std::min_element(du0.begin(), du0.end());
  return m < 0.0 ? -1.0 / m : INFINITY;
}

/// L2 norm of a heat solution started from one mode |k| = 1.
inline double heat_decay(double norm0, double t) { return norm0 * std::exp(-t); }

}  // namespace stochtame::oracle
