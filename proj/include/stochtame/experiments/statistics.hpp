#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "stochtame/core/errors.hpp"

namespace stochtame {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

struct Proportion {
  std::size_t k = 0, n = 0;
  double p_hat = 0.0, lo = 0.0, hi = 1.0;
};

/// Wilson score interval for k successes out of n; n = 0 gives [0,1].
inline Proportion wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054) {
  if (k > n) throw DomainError("wilson_interval: k > n");
  Proportion r{k, n};
  if (n == 0) return r;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double den = 1.0 + z2 / nn;
  const double mid = (p + z2 / (2.0 * nn)) / den;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / den;
  r.p_hat = p;
  r.lo = std::max(0.0, mid - half);
  r.hi = std::min(1.0, mid + half);
  // keep the point estimate inside despite rounding at p = 0 or 1
  r.lo = std::min(r.lo, p);
  r.hi = std::max(r.hi, p);
  return r;
}

/// Asymptotic Kolmogorov tail P(K > lambda).
inline double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

struct KsResult {
  double D = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// One-sample KS test against a continuous CDF (Stephens' finite-n correction).
template <class Cdf>
KsResult ks_test(std::vector<double> xs, Cdf cdf) {
  KsResult r;
  r.n = xs.size();
  if (xs.empty()) return r;
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    r.D = std::max({r.D, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  r.p_value = kolmogorov_tail((sn + 0.12 + 0.11 / sn) * r.D);
  return r;
}

inline KsResult ks_exponential(std::vector<double> xs, double rate = 1.0) {
  return ks_test(std::move(xs), [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); });
}

struct MannKendall {
  int S = 0;
  double p_increasing = 1.0;  ///< one-sided P(S' >= S) under exchangeability
  bool exact = true;
};

inline int mann_kendall_s(const std::vector<double>& x) {
  int s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) s += (x[j] > x[i]) - (x[j] < x[i]);
  return s;
}

/// Mann-Kendall test for an increasing trend. Exact permutation null for
/// n <= 8 (ties permuted as observed), normal approximation above.
inline MannKendall mann_kendall(const std::vector<double>& x) {
  MannKendall r;
  r.S = mann_kendall_s(x);
  const std::size_t n = x.size();
  if (n < 2) return r;
  if (n <= 8) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> perm(n);
    std::size_t total = 0, hits = 0;
    do {
      for (std::size_t i = 0; i < n; ++i) perm[i] = x[idx[i]];
      ++total;
      if (mann_kendall_s(perm) >= r.S) ++hits;
    } while (std::next_permutation(idx.begin(), idx.end()));
    r.p_increasing = static_cast<double>(hits) / static_cast<double>(total);
    return r;
  }
  r.exact = false;
  const double nn = static_cast<double>(n);
  const double var = nn * (nn - 1.0) * (2.0 * nn + 5.0) / 18.0;
  const double z = r.S > 0 ? (r.S - 1.0) / std::sqrt(var) : (r.S < 0 ? (r.S + 1.0) / std::sqrt(var) : 0.0);
  r.p_increasing = 1.0 - normal_cdf(z);
  return r;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  if (v.size() % 2 == 1) return v[m];
  const double hi = v[m];
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + m));
}

}  // namespace stochtame
