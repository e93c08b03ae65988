#pragma once

#include <cmath>
#include <string>

#include "stochtame/core/errors.hpp"
#include "stochtame/spectral/sobolev.hpp"

namespace stochtame {

enum class TamingCase { I, II, III };

inline const char* to_string(TamingCase c) {
  switch (c) {
    case TamingCase::I: return "I";
    case TamingCase::II: return "II";
    case TamingCase::III: return "III";
  }
  return "?";
}

inline TamingCase taming_case_from_string(const std::string& s) {
  if (s == "I") return TamingCase::I;
  if (s == "II") return TamingCase::II;
  if (s == "III") return TamingCase::III;
  throw ConfigError("unknown case '" + s + "' (expected I, II or III)");
}

/// Norm inside the noise: F1 for Case II, F0 otherwise.
inline LadderSpace noise_norm_space(TamingCase c) { return c == TamingCase::II ? LadderSpace::F1 : LadderSpace::F0; }

/// Space in which the initial datum must lie.
inline LadderSpace required_initial_space(TamingCase c) {
  switch (c) {
    case TamingCase::I: return LadderSpace::F0;
    case TamingCase::II: return LadderSpace::D;
    case TamingCase::III: return LadderSpace::F1;
  }
  return LadderSpace::F0;
}

/// Space of the Ito computation for log(C + ||X||^2): F1 in Case III, F0 otherwise.
inline LadderSpace energy_space(TamingCase c) { return c == TamingCase::III ? LadderSpace::F1 : LadderSpace::F0; }

/// Case implied by the noise norm; an F0 norm is Case III for incompressible models.
inline TamingCase derive_case(LadderSpace norm_space, bool incompressible) {
  if (norm_space == LadderSpace::F1) return TamingCase::II;
  if (norm_space != LadderSpace::F0) throw ConfigError("noise norm must be F0 or F1");
  return incompressible ? TamingCase::III : TamingCase::I;
}

/// B(X) = theta ||X||_{F_i}^alpha X, driven by one scalar Wiener process.
struct NoiseSpec {
  double theta = 0.0;
  double alpha = 0.0;
  TamingCase case_label = TamingCase::I;

  LadderSpace norm_space() const { return noise_norm_space(case_label); }

  void validate() const {
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw ConfigError("NoiseSpec: theta must be finite and >= 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("NoiseSpec: alpha must be finite and >= 0");
  }

  /// Scalar factor theta ||X||^alpha multiplying X.
  double factor(const SpectralField& x, const SpaceLadder& l) const {
    if (theta == 0.0) return 0.0;
    if (alpha == 0.0) return theta;
    return theta * std::pow(sobolev_norm(x, l.exponent(norm_space())), alpha);
  }
};

inline SpectralField noise_coefficient(const SpectralField& x, const NoiseSpec& spec, const SpaceLadder& l) {
  SpectralField b = x;
  b *= spec.factor(x, l);
  return b;
}

/// Milstein correction for the rank-one noise,
/// (1/2) theta^2 (alpha+1) ||X||^{2 alpha} X (dW^2 - dt).
inline SpectralField milstein_correction(const SpectralField& x, const NoiseSpec& spec, const SpaceLadder& l,
                                         double dW, double dt) {
  const double f = spec.factor(x, l);
  SpectralField c = x;
  c *= 0.5 * f * f * (spec.alpha + 1.0) * (dW * dW - dt);
  return c;
}

}  // namespace stochtame
