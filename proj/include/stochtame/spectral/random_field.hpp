#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "stochtame/spectral/spectral_field.hpp"

namespace stochtame {

/// Hermitian field with |f_k| = amplitude (1+|k|^2)^(-decay/2) and seeded
/// uniform phases. Self-conjugate modes get a random sign. Samples lie in H^s
/// for every s < decay - dim/2.
inline SpectralField random_field(const TorusGrid& grid, int components, double decay_exponent,
                                  double amplitude, std::uint64_t seed) {
  SpectralField f(grid, components);
  if (amplitude == 0.0) return f;
  auto tables = grid_tables(grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  for (int c = 0; c < components; ++c) {
    auto comp = f.component(c);
    for (std::size_t k = 0; k < comp.size(); ++k) {
      const std::size_t mk = tables->conjugate[k];
      if (mk < k) continue;
      const double mag = amplitude * std::pow(1.0 + tables->k_squared[k], -0.5 * decay_exponent);
      const double ph = phase(rng);
      if (mk == k) {
        comp[k] = Complex(ph < M_PI ? mag : -mag, 0.0);
      } else {
        comp[k] = std::polar(mag, ph);
        comp[mk] = std::conj(comp[k]);
      }
    }
  }
  return f;
}

/// sin(x) on a 1-D (or the x axis of a higher-dimensional) grid: f_{+-1} = -+ i/2.
inline SpectralField sine_field(const TorusGrid& grid, int components = 1, int component = 0,
                                double amplitude = 1.0) {
  SpectralField f(grid, components);
  std::array<int, 3> k{1, 0, 0};
  std::array<int, 3> mk{-1, 0, 0};
  f.at(component, grid.flat_index(k)) = Complex(0.0, -0.5 * amplitude);
  f.at(component, grid.flat_index(mk)) = Complex(0.0, 0.5 * amplitude);
  return f;
}

/// cos(k.x) mode pair with amplitude a: coefficients a/2 at +-k.
inline void add_cosine(SpectralField& f, int component, std::array<int, 3> k, double amplitude) {
  std::array<int, 3> mk{-k[0], -k[1], -k[2]};
  f.at(component, f.grid().flat_index(k)) += Complex(0.5 * amplitude, 0.0);
  f.at(component, f.grid().flat_index(mk)) += Complex(0.5 * amplitude, 0.0);
}

/// sin(k.x) mode pair with amplitude a: coefficients -+ i a/2 at +-k.
inline void add_sine(SpectralField& f, int component, std::array<int, 3> k, double amplitude) {
  std::array<int, 3> mk{-k[0], -k[1], -k[2]};
  f.at(component, f.grid().flat_index(k)) += Complex(0.0, -0.5 * amplitude);
  f.at(component, f.grid().flat_index(mk)) += Complex(0.0, 0.5 * amplitude);
}

}  // namespace stochtame
