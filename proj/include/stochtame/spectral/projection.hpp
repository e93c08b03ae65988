#pragma once

#include <string>

#include "stochtame/core/errors.hpp"
#include "stochtame/spectral/spectral_field.hpp"

namespace stochtame {

/// Galerkin projection T_d onto the Fourier modes with |k|_inf <= cutoff.
struct GalerkinProjector {
  int cutoff = 1;
};

inline void check_projector(const GalerkinProjector& p, const TorusGrid& g) {
  if (p.cutoff < 1) throw ConfigError("GalerkinProjector: cutoff must be positive");
  if (p.cutoff > g.n() / 2)
    throw ConfigError("GalerkinProjector: cutoff " + std::to_string(p.cutoff) + " exceeds Nyquist limit " +
                      std::to_string(g.n() / 2));
}

/// Zero every mode with |k|_inf > cutoff, in place.
inline void truncate_modes(SpectralField& f, int cutoff) {
  auto tables = grid_tables(f.grid());
  for (int c = 0; c < f.components(); ++c) {
    auto comp = f.component(c);
    for (std::size_t k = 0; k < comp.size(); ++k)
      if (tables->k_inf[k] > cutoff) comp[k] = Complex{};
  }
}

inline SpectralField galerkin_project(SpectralField f, const GalerkinProjector& p) {
  check_projector(p, f.grid());
  truncate_modes(f, p.cutoff);
  return f;
}

/// Largest wavenumber kept by the 2/3 rule.
inline int dealias_cutoff(const TorusGrid& g) { return g.n() / 3; }

inline SpectralField dealias(SpectralField f) {
  truncate_modes(f, dealias_cutoff(f.grid()));
  return f;
}

/// True when every mode above `cutoff` is exactly zero.
inline bool is_band_limited(const SpectralField& f, int cutoff) {
  auto tables = grid_tables(f.grid());
  for (int c = 0; c < f.components(); ++c) {
    auto comp = f.component(c);
    for (std::size_t k = 0; k < comp.size(); ++k)
      if (tables->k_inf[k] > cutoff && comp[k] != Complex{}) return false;
  }
  return true;
}

}  // namespace stochtame
