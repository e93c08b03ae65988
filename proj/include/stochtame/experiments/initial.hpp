#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "stochtame/core/errors.hpp"
#include "stochtame/noise/wiener.hpp"
#include "stochtame/spectral/random_field.hpp"
#include "stochtame/spectral/spectral_field.hpp"

namespace stochtame {

/// Initial data that is the same function on every resolution: random modes
/// draw their phase from a key on the wavevector, not on the grid layout.
struct InitialCondition {
  std::string type = "sine";  ///< sine | cosine | random | zero
  double amplitude = 1.0;
  int mode = 1;               ///< wavenumber along x for sine/cosine
  int component = 0;
  double decay = 3.0;         ///< random: |f_k| = amplitude (1+|k|^2)^(-decay/2)
  int max_mode = 8;           ///< random: modes with |k|_inf <= max_mode
  std::uint64_t seed = 1;
  double background = 0.0;    ///< added to the mean of the last component (RSW height)

  void validate() const {
    if (type != "sine" && type != "cosine" && type != "random" && type != "zero")
      throw ConfigError("initial: unknown type '" + type + "'");
    if (mode < 0) throw ConfigError("initial: mode must be >= 0");
    if (max_mode < 0) throw ConfigError("initial: max_mode must be >= 0");
    if (component < 0) throw ConfigError("initial: component must be >= 0");
  }

  SpectralField make(const TorusGrid& grid, int components) const {
    validate();
    if (component >= components) throw ConfigError("initial: component out of range");
    SpectralField f(grid, components);
    if (type == "sine") {
      add_sine(f, component, {mode, 0, 0}, amplitude);
    } else if (type == "cosine") {
      add_cosine(f, component, {mode, 0, 0}, amplitude);
    } else if (type == "random") {
      fill_random(f);
    }
    if (background != 0.0) f.at(components - 1, 0) += Complex(background, 0.0);
    return f;
  }

 private:
  void fill_random(SpectralField& f) const {
    const auto& g = f.grid();
    const int half = g.n() / 2;
    for (int c = 0; c < f.components(); ++c) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        const auto k = g.wavevector(i);
        int kinf = 0;
        double k2 = 0.0;
        for (int d = 0; d < g.dim(); ++d) {
          kinf = std::max(kinf, std::abs(k[d]));
          k2 += static_cast<double>(k[d]) * k[d];
        }
        if (kinf > max_mode || kinf >= half || kinf == 0) continue;
        // key on the canonical member of the conjugate pair
        std::array<int, 3> key = k;
        bool flip = false;
        for (int d = 0; d < 3; ++d) {
          if (key[d] != 0) {
            flip = key[d] < 0;
            break;
          }
        }
        if (flip) key = {-k[0], -k[1], -k[2]};
        const auto a = static_cast<std::uint64_t>((key[0] + 512) + 1024 * ((key[1] + 512) + 1024 * (key[2] + 512)));
        const double ph = 2.0 * M_PI * keyed_uniform(seed, a, static_cast<std::uint64_t>(c), 7);
        const double mag = amplitude * std::pow(1.0 + k2, -0.5 * decay);
        const Complex z = std::polar(mag, ph);
        f.at(c, i) = flip ? std::conj(z) : z;
      }
    }
  }
};

}  // namespace stochtame
