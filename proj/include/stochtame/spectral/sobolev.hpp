#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "stochtame/core/errors.hpp"
#include "stochtame/spectral/spectral_field.hpp"

namespace stochtame {

/// Role of a space in the ladder D -> F1 -> F0 -> G.
enum class LadderSpace { G, F0, F1, D };

inline const char* to_string(LadderSpace s) {
  switch (s) {
    case LadderSpace::G: return "G";
    case LadderSpace::F0: return "F0";
    case LadderSpace::F1: return "F1";
    case LadderSpace::D: return "D";
  }
  return "?";
}

inline LadderSpace ladder_space_from_string(const std::string& s) {
  if (s == "G") return LadderSpace::G;
  if (s == "F0") return LadderSpace::F0;
  if (s == "F1") return LadderSpace::F1;
  if (s == "D") return LadderSpace::D;
  throw ConfigError("unknown ladder space '" + s + "' (expected G, F0, F1 or D)");
}

/// Four Sobolev exponents s_G < s_F0 < s_F1 < s_D instantiating the ladder.
///
/// The interpolation exponent m is fixed by s_F0 = m s_F1 + (1-m) s_G, which
/// makes ||f||_F0 <= ||f||_F1^m ||f||_G^(1-m) hold with constant 1 (Hoelder on
/// the Fourier sum).
struct SpaceLadder {
  double s_G = 0.0;
  double s_F0 = 1.0;
  double s_F1 = 2.0;
  double s_D = 3.0;
  double m = 0.5;
  double C_interp = 1.0;

  static SpaceLadder from_exponents(double g, double f0, double f1, double d, double c_interp = 1.0) {
    SpaceLadder l{g, f0, f1, d, 0.0, c_interp};
    if (!(g < f0 && f0 < f1 && f1 < d))
      throw ConfigError("SpaceLadder: exponents must satisfy s_G < s_F0 < s_F1 < s_D");
    l.m = (f0 - g) / (f1 - g);
    return l;
  }

  double exponent(LadderSpace s) const {
    switch (s) {
      case LadderSpace::G: return s_G;
      case LadderSpace::F0: return s_F0;
      case LadderSpace::F1: return s_F1;
      case LadderSpace::D: return s_D;
    }
    return s_G;
  }

  void validate() const {
    if (!(s_G < s_F0 && s_F0 < s_F1 && s_F1 < s_D))
      throw ConfigError("SpaceLadder: exponents must satisfy s_G < s_F0 < s_F1 < s_D");
    if (!(m > 0.0 && m < 1.0)) throw ConfigError("SpaceLadder: m must lie in (0,1)");
    if (std::abs(s_F0 - (m * s_F1 + (1.0 - m) * s_G)) > 1e-12)
      throw ConfigError("SpaceLadder: s_F0 != m s_F1 + (1-m) s_G");
  }

  friend bool operator==(const SpaceLadder&, const SpaceLadder&) = default;
};

/// Cached weights (1+|k|^2)^s for a grid.
inline std::shared_ptr<const std::vector<double>> sobolev_weights(const TorusGrid& g, double s) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, double>, std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(g.dim(), g.n(), s);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto tables = grid_tables(g);
  auto w = std::make_shared<std::vector<double>>(g.size());
  for (std::size_t i = 0; i < w->size(); ++i) (*w)[i] = std::pow(1.0 + tables->k_squared[i], s);
  cache.emplace(key, w);
  return w;
}

/// Squared H^s norm: sum over components and k of (1+|k|^2)^s |f_hat_k|^2.
inline double sobolev_norm_sq(const SpectralField& f, double s) {
  auto w = sobolev_weights(f.grid(), s);
  double acc = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto comp = f.component(c);
    for (std::size_t k = 0; k < comp.size(); ++k) acc += (*w)[k] * std::norm(comp[k]);
  }
  if (!std::isfinite(acc)) throw NumericError("sobolev_norm: non-finite coefficients");
  return acc;
}

inline double sobolev_norm(const SpectralField& f, double s) { return std::sqrt(sobolev_norm_sq(f, s)); }

inline double sobolev_norm(const SpectralField& f, const SpaceLadder& l, LadderSpace space) {
  return sobolev_norm(f, l.exponent(space));
}

/// H^s inner product sum_k (1+|k|^2)^s Re(a_k conj(b_k)).
inline double inner_product(const SpectralField& a, const SpectralField& b, double s) {
  if (!a.same_shape(b)) throw ShapeError("inner_product: grid or component mismatch");
  auto w = sobolev_weights(a.grid(), s);
  double acc = 0.0;
  for (int c = 0; c < a.components(); ++c) {
    auto ac = a.component(c);
    auto bc = b.component(c);
    for (std::size_t k = 0; k < ac.size(); ++k)
      acc += (*w)[k] * (ac[k].real() * bc[k].real() + ac[k].imag() * bc[k].imag());
  }
  if (!std::isfinite(acc)) throw NumericError("inner_product: non-finite coefficients");
  return acc;
}

/// Duality pairing _D<a, b>_G, realised as the F_i inner product.
inline double duality_pairing(const SpectralField& a, const SpectralField& b, const SpaceLadder& l,
                              LadderSpace fi) {
  return inner_product(a, b, l.exponent(fi));
}

struct InterpolationSides {
  double lhs = 0.0;  ///< ||f||_F0
  double rhs = 0.0;  ///< C ||f||_F1^m ||f||_G^(1-m)
};

inline InterpolationSides interpolation_check(const SpectralField& f, const SpaceLadder& l) {
  const double f0 = sobolev_norm(f, l.s_F0);
  const double f1 = sobolev_norm(f, l.s_F1);
  const double g = sobolev_norm(f, l.s_G);
  return {f0, l.C_interp * std::pow(f1, l.m) * std::pow(g, 1.0 - l.m)};
}

}  // namespace stochtame
