#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stochtame/core/errors.hpp"
#include "stochtame/models/kernels.hpp"
#include "stochtame/spectral/sobolev.hpp"

namespace stochtame {

enum class DriftKind { Burgers1D, Burgers2D, RSW_Viscous, RSW_Inviscid, Vorticity2D, Vorticity3D, Linear };

inline const char* to_string(DriftKind k) {
  switch (k) {
    case DriftKind::Burgers1D: return "Burgers1D";
    case DriftKind::Burgers2D: return "Burgers2D";
    case DriftKind::RSW_Viscous: return "RSW_Viscous";
    case DriftKind::RSW_Inviscid: return "RSW_Inviscid";
    case DriftKind::Vorticity2D: return "Vorticity2D";
    case DriftKind::Vorticity3D: return "Vorticity3D";
    case DriftKind::Linear: return "Linear";
  }
  return "?";
}

inline DriftKind drift_kind_from_string(const std::string& s) {
  for (auto k : {DriftKind::Burgers1D, DriftKind::Burgers2D, DriftKind::RSW_Viscous, DriftKind::RSW_Inviscid,
                 DriftKind::Vorticity2D, DriftKind::Vorticity3D, DriftKind::Linear})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown model kind '" + s + "'");
}

/// Spatial dimension required by a kind. Linear works on any torus.
inline int kind_dim(DriftKind k) {
  switch (k) {
    case DriftKind::Burgers1D: return 1;
    case DriftKind::Vorticity3D: return 3;
    case DriftKind::Linear: return 0;
    default: return 2;
  }
}

/// Component count; Linear takes `dim`-independent scalar fields.
inline int kind_components(DriftKind k) {
  switch (k) {
    case DriftKind::Burgers1D: return 1;
    case DriftKind::Burgers2D: return 2;
    case DriftKind::RSW_Viscous:
    case DriftKind::RSW_Inviscid: return 3;
    case DriftKind::Vorticity2D: return 1;
    case DriftKind::Vorticity3D: return 3;
    case DriftKind::Linear: return 1;
  }
  return 1;
}

inline bool kind_is_inviscid(DriftKind k) { return k == DriftKind::RSW_Inviscid; }

struct ModelParams {
  double nu = 0.0;           ///< viscosity; momentum viscosity gamma for RSW
  double nu_h = 0.0;         ///< RSW height diffusivity eta
  double linear_rate = 0.0;  ///< a in the Linear kind, A = a X + nu Lap X
  double f_coriolis = 1.0;
  double rossby = 1.0;
  double froude = 1.0;
  std::optional<SpectralField> topography;
  double epsilon_sobolev = 0.1;  ///< Euler F0 exponent is 3/2 + epsilon_sobolev
};

/// Per-kind default ladder; inviscid vorticity gets the Euler F0 exponent.
inline SpaceLadder default_ladder(DriftKind k, const ModelParams& p) {
  switch (k) {
    case DriftKind::Vorticity2D:
    case DriftKind::Vorticity3D:
      if (p.nu == 0.0) return SpaceLadder::from_exponents(0.0, 1.5 + p.epsilon_sobolev, 3.0, 4.0);
      return SpaceLadder::from_exponents(0.0, 2.0, 3.0, 4.0);
    case DriftKind::Linear: return SpaceLadder::from_exponents(0.0, 1.0, 2.0, 3.0);
    default: return SpaceLadder::from_exponents(0.0, 1.0, 3.0, 4.0);
  }
}

struct DriftDiagnostics {
  double min_height = std::numeric_limits<double>::infinity();  ///< RSW only
};

/// Model descriptor; evaluate() is a pure function of the state.
struct DriftOperator {
  DriftKind kind = DriftKind::Linear;
  ModelParams params;
  SpaceLadder ladder;

  static DriftOperator make(DriftKind k, ModelParams p) {
    if (kind_is_inviscid(k) && (p.nu != 0.0 || p.nu_h != 0.0))
      throw ConfigError("DriftOperator: inviscid kind requires nu = nu_h = 0");
    if (!(p.rossby > 0.0) || !(p.froude > 0.0)) throw ConfigError("DriftOperator: rossby and froude must be > 0");
    if (p.nu < 0.0 || p.nu_h < 0.0) throw ConfigError("DriftOperator: viscosities must be >= 0");
    auto l = default_ladder(k, p);
    return DriftOperator{k, std::move(p), l};
  }

  void check_state(const SpectralField& x) const {
    const int d = kind_dim(kind);
    if (d != 0 && x.grid().dim() != d)
      throw ShapeError(std::string(to_string(kind)) + ": expects a " + std::to_string(d) + "-D torus");
    if (x.components() != kind_components(kind))
      throw ShapeError(std::string(to_string(kind)) + ": expects " + std::to_string(kind_components(kind)) +
                       " components");
  }

  SpectralField evaluate(const SpectralField& x, DriftDiagnostics* diag = nullptr) const {
    check_state(x);
    switch (kind) {
      case DriftKind::Burgers1D:
      case DriftKind::Burgers2D: return burgers_drift(x, params.nu);
      case DriftKind::Vorticity2D:
      case DriftKind::Vorticity3D: return vorticity_drift(x, params.nu);
      case DriftKind::RSW_Viscous:
      case DriftKind::RSW_Inviscid: {
        RswParams rp{params.f_coriolis, params.rossby, params.froude, params.nu, params.nu_h,
                     params.topography ? &*params.topography : nullptr};
        RswDiagnostics rd;
        auto out = rsw_drift(x, rp, kind == DriftKind::RSW_Viscous, &rd);
        if (diag) diag->min_height = rd.min_height;
        return out;
      }
      case DriftKind::Linear: return linear_drift(x, params.linear_rate, params.nu);
    }
    throw ConfigError("DriftOperator: unhandled kind");
  }

  SpectralField operator()(const SpectralField& x) const { return evaluate(x); }
};

/// Flat key-value record of pairings and norms for one sample.
using AssumptionReport = std::vector<std::pair<std::string, double>>;

inline double report_value(const AssumptionReport& r, const std::string& key) {
  for (const auto& [k, v] : r)
    if (k == key) return v;
  throw std::out_of_range("report_value: no key " + key);
}

struct AssumptionConstants {
  double C1 = 0.0, C2 = 0.0, C3 = 0.0;
  double gamma1 = 0.0, gamma2 = 0.0;
  double gamma_sup1 = 0.0, gamma_sup2 = 0.0;
  double gamma13 = 0.0, C1_A3 = 0.0;
  double alpha_emb = 0.0, beta_emb = 0.0;
};

/// Pairings of a with A(a) in every ladder space, norms, and candidate ratios.
/// `b` (optional) adds the Lipschitz quotient ||A(a)-A(b)||_G / ||a-b||_F0.
inline AssumptionReport drift_pairing_report(const SpectralField& a, const DriftOperator& op,
                                             double gamma13 = 2.0, const SpectralField* b = nullptr) {
  const auto& l = op.ladder;
  const SpectralField Aa = op.evaluate(a);
  AssumptionReport r;
  const double nG = sobolev_norm(a, l.s_G), nF0 = sobolev_norm(a, l.s_F0), nF1 = sobolev_norm(a, l.s_F1),
               nD = sobolev_norm(a, l.s_D);
  const double pG = inner_product(a, Aa, l.s_G), pF0 = inner_product(a, Aa, l.s_F0),
               pF1 = inner_product(a, Aa, l.s_F1), pD = inner_product(a, Aa, l.s_D);
  const double AG = sobolev_norm(Aa, l.s_G);
  r.emplace_back("norm_G", nG);
  r.emplace_back("norm_F0", nF0);
  r.emplace_back("norm_F1", nF1);
  r.emplace_back("norm_D", nD);
  r.emplace_back("pair_G", pG);
  r.emplace_back("pair_F0", pF0);
  r.emplace_back("pair_F1", pF1);
  r.emplace_back("pair_D", pD);
  r.emplace_back("norm_A_G", AG);
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  r.emplace_back("ratio_F0_over_F1sq", ratio(pF0, nF1 * nF1));
  r.emplace_back("ratio_A3", ratio(pF1, std::pow(nF0, gamma13) * nF1 * nF1));
  r.emplace_back("ratio_tight1", ratio(AG, nF0 * nF0));
  if (b) {
    const SpectralField diff = a - *b;
    const double den = sobolev_norm(diff, l.s_F0);
    r.emplace_back("lipschitz_G_F0", ratio(sobolev_norm(Aa - op.evaluate(*b), l.s_G), den));
  }
  return r;
}

}  // namespace stochtame
