#pragma once

#include <cmath>
#include <string>

#include "stochtame/core/errors.hpp"
#include "stochtame/models/drift_operator.hpp"
#include "stochtame/noise/noise.hpp"
#include "stochtame/spectral/projection.hpp"
#include "stochtame/spectral/sobolev.hpp"

namespace stochtame {

enum class Scheme { EulerMaruyama, TamedEulerMaruyama, TamedRK4EM, SplitRK4Lamperti, Milstein1D, RK4Deterministic };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::EulerMaruyama: return "EulerMaruyama";
    case Scheme::TamedEulerMaruyama: return "TamedEulerMaruyama";
    case Scheme::TamedRK4EM: return "TamedRK4EM";
    case Scheme::SplitRK4Lamperti: return "SplitRK4Lamperti";
    case Scheme::Milstein1D: return "Milstein1D";
    case Scheme::RK4Deterministic: return "RK4Deterministic";
  }
  return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
  for (auto k : {Scheme::EulerMaruyama, Scheme::TamedEulerMaruyama, Scheme::TamedRK4EM, Scheme::SplitRK4Lamperti,
                 Scheme::Milstein1D, Scheme::RK4Deterministic})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown scheme '" + s + "'");
}

struct StepperConfig {
  Scheme scheme = Scheme::TamedEulerMaruyama;
  double dt = 1e-3;
  double dt_min = 0.0;             ///< 0 selects dt * 2^-20
  bool adapt = true;
  double adapt_trigger = 0.1;      ///< split when ||X'-X||_F0 / ||X||_F0 exceeds this
  double blowup_threshold = 0.0;   ///< on ||X||_F0; 0 selects 1e8 (1 + ||X0||_F0)
  double resolution_tol = 0.0;     ///< 0 disables the under-resolution detector
  double t_end = 1.0;
  int save_stride = 1;             ///< rows every save_stride base steps
  int snapshot_stride = 0;         ///< keep fields every k base steps (0: none)
  double epsilon = 0.25;           ///< E(eps) parameter of the path martingale
  double scale_C = 1.0;            ///< offset C in log(C + ||X||^2)

  double effective_dt_min() const { return dt_min > 0.0 ? dt_min : std::ldexp(dt, -20); }

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("stepper: dt must be > 0");
    if (dt_min < 0.0 || (dt_min > 0.0 && !(dt_min < dt))) throw ConfigError("stepper: need 0 < dt_min < dt");
    if (!(t_end >= 0.0)) throw ConfigError("stepper: t_end must be >= 0");
    if (!(adapt_trigger > 0.0)) throw ConfigError("stepper: adapt_trigger must be > 0");
    if (save_stride < 1) throw ConfigError("stepper: save_stride must be >= 1");
    if (snapshot_stride < 0) throw ConfigError("stepper: snapshot_stride must be >= 0");
    if (resolution_tol < 0.0) throw ConfigError("stepper: resolution_tol must be >= 0");
    if (!(scale_C > 0.0)) throw ConfigError("stepper: scale_C must be > 0");
  }
};

/// Projected system dX = T_d A(T_d X) dt + T_d B(X) dW.
struct SpdeSystem {
  DriftOperator drift;
  NoiseSpec noise;
  int cutoff = 1;

  const SpaceLadder& ladder() const { return drift.ladder; }

  SpectralField project(SpectralField x) const {
    truncate_modes(x, cutoff);
    x.enforce_hermitian();
    return x;
  }

  SpectralField drift_d(const SpectralField& x) const { return project(drift.evaluate(x)); }
};

namespace detail {

inline SpectralField checked(SpectralField x, const char* who) {
  if (!x.all_finite()) throw NumericError(std::string(who) + ": non-finite state");
  return x;
}

}  // namespace detail

/// X' = X + A^d(X) dt + B(X) dW, re-projected.
inline SpectralField em_step(const SpectralField& x, const SpdeSystem& s, double dW, double dt) {
  SpectralField y = x;
  y.axpy(dt, s.drift_d(x));
  if (s.noise.theta != 0.0) y.axpy(dW * s.noise.factor(x, s.ladder()), x);
  return detail::checked(s.project(std::move(y)), "em_step");
}

/// X' = X + dt A/(1 + dt ||A||_G) + dW B/(1 + dt ||B||_G^2).
inline SpectralField tamed_em_step(const SpectralField& x, const SpdeSystem& s, double dW, double dt) {
  const double sG = s.ladder().s_G;
  const SpectralField a = s.drift_d(x);
  SpectralField y = x;
  y.axpy(dt / (1.0 + dt * sobolev_norm(a, sG)), a);
  if (s.noise.theta != 0.0) {
    const double f = s.noise.factor(x, s.ladder());
    const double bG = f * sobolev_norm(x, sG);
    y.axpy(dW * f / (1.0 + dt * bG * bG), x);
  }
  return detail::checked(s.project(std::move(y)), "tamed_em_step");
}

/// Classical RK4 increment of dX = A^d(X) dt.
inline SpectralField rk4_increment(const SpectralField& x, const SpdeSystem& s, double dt) {
  const SpectralField k1 = s.drift_d(x);
  const SpectralField k2 = s.drift_d(x + (0.5 * dt) * k1);
  const SpectralField k3 = s.drift_d(x + (0.5 * dt) * k2);
  const SpectralField k4 = s.drift_d(x + dt * k3);
  SpectralField inc = k1;
  inc.axpy(2.0, k2).axpy(2.0, k3) += k4;
  inc *= dt / 6.0;
  return inc;
}

inline SpectralField rk4_deterministic_step(const SpectralField& x, const SpdeSystem& s, double dt) {
  return detail::checked(s.project(x + rk4_increment(x, s, dt)), "rk4_deterministic_step");
}

/// RK4 drift increment plus the tamed Ito noise increment at the left endpoint.
inline SpectralField tamed_rk4_em_step(const SpectralField& x, const SpdeSystem& s, double dW, double dt) {
  SpectralField y = x + rk4_increment(x, s, dt);
  if (s.noise.theta != 0.0) {
    const double f = s.noise.factor(x, s.ladder());
    const double bG = f * sobolev_norm(x, s.ladder().s_G);
    y.axpy(dW * f / (1.0 + dt * bG * bG), x);
  }
  return detail::checked(s.project(std::move(y)), "tamed_rk4_em_step");
}

/// Scale factor m'/m of the noise flow dX = theta ||X||^alpha X dW, where
/// m = ||X|| in the noise norm obeys dm = theta m^(1+alpha) dW.
///
/// alpha = 0 is solved exactly. Otherwise z = m^-alpha has additive noise,
/// dz = -alpha theta dW + alpha (alpha+1) theta^2 / (2 z) dt, and the
/// drift-implicit Euler step in z stays positive for every dt.
inline double noise_flow_factor(double m, double theta, double alpha, double dW, double dt) {
  if (theta == 0.0 || m == 0.0) return 1.0;
  if (alpha == 0.0) return std::exp(theta * dW - 0.5 * theta * theta * dt);
  const double z = std::pow(m, -alpha);
  const double b = z - alpha * theta * dW;
  const double z1 = 0.5 * (b + std::sqrt(b * b + 2.0 * alpha * (alpha + 1.0) * theta * theta * dt));
  return std::pow(z / z1, 1.0 / alpha);
}

struct SplitParts {
  SpectralField drifted;  ///< projected state after the RK4 drift substep
  double factor = 1.0;    ///< noise flow scale applied afterwards
};

/// Lie splitting: RK4 drift substep, then the noise flow with ||X|| taken at
/// the left endpoint.
inline SplitParts split_rk4_lamperti_parts(const SpectralField& x, const SpdeSystem& s, double dW, double dt) {
  SplitParts p{detail::checked(s.project(x + rk4_increment(x, s, dt)), "split_rk4_lamperti_step"), 1.0};
  if (s.noise.theta != 0.0) {
    const double m = sobolev_norm(x, s.ladder().exponent(s.noise.norm_space()));
    p.factor = noise_flow_factor(m, s.noise.theta, s.noise.alpha, dW, dt);
    if (!std::isfinite(p.factor)) throw NumericError("split_rk4_lamperti_step: non-finite noise factor");
  }
  return p;
}

inline SpectralField split_rk4_lamperti_step(const SpectralField& x, const SpdeSystem& s, double dW, double dt) {
  auto p = split_rk4_lamperti_parts(x, s, dW, dt);
  p.drifted *= p.factor;
  return detail::checked(std::move(p.drifted), "split_rk4_lamperti_step");
}

/// Euler-Maruyama plus the closed-form Milstein correction of the rank-one noise.
inline SpectralField milstein_step(const SpectralField& x, const SpdeSystem& s, double dW, double dt) {
  SpectralField y = x;
  y.axpy(dt, s.drift_d(x));
  if (s.noise.theta != 0.0) {
    y.axpy(dW * s.noise.factor(x, s.ladder()), x);
    y += milstein_correction(x, s.noise, s.ladder(), dW, dt);
  }
  return detail::checked(s.project(std::move(y)), "milstein_step");
}

/// One step of `scheme`; with noise_on false every scheme drops its noise term.
inline SpectralField scheme_step(Scheme scheme, const SpectralField& x, const SpdeSystem& s, double dW, double dt,
                                 bool noise_on) {
  if (!noise_on || scheme == Scheme::RK4Deterministic) {
    if (scheme == Scheme::RK4Deterministic || scheme == Scheme::TamedRK4EM || scheme == Scheme::SplitRK4Lamperti)
      return rk4_deterministic_step(x, s, dt);
    if (scheme == Scheme::TamedEulerMaruyama) return tamed_em_step(x, s, 0.0, dt);
    return em_step(x, s, 0.0, dt);
  }
  switch (scheme) {
    case Scheme::EulerMaruyama: return em_step(x, s, dW, dt);
    case Scheme::TamedEulerMaruyama: return tamed_em_step(x, s, dW, dt);
    case Scheme::TamedRK4EM: return tamed_rk4_em_step(x, s, dW, dt);
    case Scheme::SplitRK4Lamperti: return split_rk4_lamperti_step(x, s, dW, dt);
    case Scheme::Milstein1D: return milstein_step(x, s, dW, dt);
    case Scheme::RK4Deterministic: break;
  }
  return rk4_deterministic_step(x, s, dt);
}

}  // namespace stochtame
