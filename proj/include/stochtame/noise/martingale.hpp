#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "stochtame/core/errors.hpp"
#include "stochtame/models/drift_operator.hpp"
#include "stochtame/noise/noise.hpp"

namespace stochtame {

/// Running M_t, <M>_t and E(eps) = sup_s (M_s - (eps/2) <M>_s).
struct MartingaleDiagnostics {
  double epsilon = 0.25;
  double M = 0.0;
  double QV = 0.0;
  double E = 0.0;

  double level() const { return M - 0.5 * epsilon * QV; }
  friend bool operator==(const MartingaleDiagnostics&, const MartingaleDiagnostics&) = default;
};

inline MartingaleDiagnostics track_martingale(MartingaleDiagnostics d, double dM, double d_qv) {
  if (d_qv < 0.0) throw DomainError("track_martingale: quadratic-variation increment must be >= 0");
  d.M += dM;
  d.QV += d_qv;
  d.E = std::max(d.E, d.level());
  return d;
}

/// Same update, but the sup also covers the interior of the step: given the
/// endpoint levels y0, y1 of a Brownian segment with variance d_qv, the
/// bridge maximum is sampled exactly from the uniform variate u in (0,1).
inline MartingaleDiagnostics track_martingale(MartingaleDiagnostics d, double dM, double d_qv, double u) {
  const double y0 = d.level();
  d = track_martingale(d, dM, d_qv);
  const double y1 = d.level();
  if (d_qv > 0.0) {
    const double gap = y1 - y0;
    const double peak = 0.5 * (y0 + y1 + std::sqrt(gap * gap - 2.0 * d_qv * std::log(u)));
    d.E = std::max(d.E, peak);
  }
  return d;
}

/// exp(-x^2 / (2y)): bound on P(sup_{t<=y} Y_t >= x) for a continuous local
/// martingale vanishing at 0 with <Y> <= y.
inline double revuz_yor_bound(double x, double y) {
  if (!(y > 0.0) || x < 0.0) throw DomainError("revuz_yor_bound: need x >= 0 and y > 0");
  return std::exp(-x * x / (2.0 * y));
}

struct ThetaAdvice {
  double theta = 0.0;
  double alpha = 0.0;
  std::string inequality;
};

/// Smallest (theta, alpha) meeting the sufficient condition of each case,
/// inflated by `margin` where the condition is strict.
inline ThetaAdvice theta_advisor(TamingCase c, const AssumptionConstants& k, double epsilon, double margin = 0.05) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("theta_advisor: epsilon must lie in (0, 1/2)");
  if (margin < 0.0) throw ConfigError("theta_advisor: margin must be >= 0");
  ThetaAdvice a;
  switch (c) {
    case TamingCase::I:
      a.theta = k.C1 > 0.0 ? std::sqrt(2.0 * k.C1 / (1.0 - 2.0 * epsilon)) * (1.0 + margin) : 0.0;
      a.alpha = std::max(0.0, 0.5 * k.gamma1) + margin;
      a.inequality = "theta^2 > 2 C1/(1 - 2 eps), 2 alpha0 > gamma1";
      break;
    case TamingCase::II:
      a.theta = 2.0 * k.C1 / (0.5 - epsilon);
      a.alpha = std::max(0.0, 0.5 * (k.gamma1 - 2.0)) + margin;
      a.inequality = "theta = 2 C1/(1/2 - eps), 2 alpha1 > gamma1 - 2";
      break;
    case TamingCase::III:
      a.theta = k.C1_A3 > 0.0 ? std::sqrt(k.C1_A3 / (1.0 - epsilon)) * (1.0 + margin) : 0.0;
      a.alpha = std::max(0.0, 0.5 * k.gamma13);
      a.inequality = "2 C1 - 2 (1 - eps) theta^2 < 0, alpha0 >= gamma13/2";
      break;
  }
  return a;
}

}  // namespace stochtame
