#pragma once

// Pseudo-spectral drift kernels. Every quadratic product is formed on the
// collocation grid from dealiased inputs and dealiased again on output, so the
// retained coefficients are the exact truncated convolution.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "stochtame/core/errors.hpp"
#include "stochtame/spectral/fft.hpp"
#include "stochtame/spectral/projection.hpp"
#include "stochtame/spectral/spectral_field.hpp"

namespace stochtame {

namespace detail {

inline void store_physical(SpectralField& out, int c, const std::vector<double>& values) {
  auto coeffs = from_physical(out.grid(), values);
  auto comp = out.component(c);
  std::copy(coeffs.begin(), coeffs.end(), comp.begin());
}

/// out += nu * Laplacian(f), component-wise.
inline void add_laplacian(SpectralField& out, const SpectralField& f, double nu) {
  if (nu == 0.0) return;
  auto tables = grid_tables(f.grid());
  for (int c = 0; c < f.components(); ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] -= nu * tables->k_squared[k] * src[k];
  }
}

inline void finish(SpectralField& out) {
  truncate_modes(out, dealias_cutoff(out.grid()));
  out.enforce_hermitian();
}

}  // namespace detail

/// -(u . grad) u + nu Laplacian(u) for a dim-component velocity on a dim-torus.
inline SpectralField burgers_drift(const SpectralField& u_in, double nu) {
  const int dim = u_in.grid().dim();
  if (u_in.components() != dim)
    throw ShapeError("burgers_drift: velocity needs " + std::to_string(dim) + " components");
  const SpectralField u = dealias(u_in);
  const std::size_t n = u.modes();
  std::vector<std::vector<double>> up(dim);
  for (int j = 0; j < dim; ++j) up[j] = to_physical(u, j);
  SpectralField out(u.grid(), dim);
  for (int c = 0; c < dim; ++c) {
    std::vector<double> acc(n, 0.0);
    for (int j = 0; j < dim; ++j) {
      auto d = derivative_physical(u, c, j);
      for (std::size_t i = 0; i < n; ++i) acc[i] -= up[j][i] * d[i];
    }
    detail::store_physical(out, c, acc);
  }
  detail::finish(out);
  detail::add_laplacian(out, u, nu);
  return out;
}

/// Velocity from vorticity, u = -curl Laplacian^{-1} omega, with zero mean.
///
/// 2-D: scalar omega -> (u1, u2) = (d_y psi, -d_x psi), psi_hat = omega_hat/|k|^2.
/// 3-D: u_hat = i k x omega_hat / |k|^2; omega must be divergence-free.
inline SpectralField biot_savart(const SpectralField& omega) {
  const auto& g = omega.grid();
  auto tables = grid_tables(g);
  const std::size_t n = omega.modes();
  if (g.dim() == 2) {
    if (omega.components() != 1) throw ShapeError("biot_savart: 2-D vorticity must be scalar");
    SpectralField u(g, 2);
    auto w = omega.component(0);
    for (std::size_t k = 0; k < n; ++k) {
      const double k2 = tables->k_squared[k];
      if (k2 == 0.0) continue;
      const Complex psi = w[k] / k2;
      u.at(0, k) = Complex(0.0, tables->k_axis[1][k]) * psi;
      u.at(1, k) = -Complex(0.0, tables->k_axis[0][k]) * psi;
    }
    return u;
  }
  if (g.dim() == 3) {
    if (omega.components() != 3) throw ShapeError("biot_savart: 3-D vorticity needs 3 components");
    double max_div = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      Complex div{};
      for (int j = 0; j < 3; ++j) {
        div += tables->k_axis[j][k] * omega.at(j, k);
        scale = std::max(scale, std::sqrt(tables->k_squared[k]) * std::abs(omega.at(j, k)));
      }
      max_div = std::max(max_div, std::abs(div));
    }
    if (max_div > 1e-10 * scale + 1e-300)
      throw ValidationError("biot_savart: 3-D vorticity is not divergence-free (max |k.omega| = " +
                            std::to_string(max_div) + ")");
    SpectralField u(g, 3);
    for (std::size_t k = 0; k < n; ++k) {
      const double k2 = tables->k_squared[k];
      if (k2 == 0.0) continue;
      const double kx = tables->k_axis[0][k], ky = tables->k_axis[1][k], kz = tables->k_axis[2][k];
      const Complex wx = omega.at(0, k), wy = omega.at(1, k), wz = omega.at(2, k);
      const Complex i(0.0, 1.0);
      u.at(0, k) = i * (ky * wz - kz * wy) / k2;
      u.at(1, k) = i * (kz * wx - kx * wz) / k2;
      u.at(2, k) = i * (kx * wy - ky * wx) / k2;
    }
    return u;
  }
  throw ShapeError("biot_savart: only 2-D and 3-D tori are supported");
}

/// Spectral curl. 2-D velocity -> scalar; 3-D velocity -> 3 components.
inline SpectralField curl(const SpectralField& u) {
  const auto& g = u.grid();
  auto tables = grid_tables(g);
  const Complex i(0.0, 1.0);
  if (g.dim() == 2 && u.components() == 2) {
    SpectralField w(g, 1);
    for (std::size_t k = 0; k < u.modes(); ++k)
      w.at(0, k) = i * tables->k_axis[0][k] * u.at(1, k) - i * tables->k_axis[1][k] * u.at(0, k);
    return w;
  }
  if (g.dim() == 3 && u.components() == 3) {
    SpectralField w(g, 3);
    for (std::size_t k = 0; k < u.modes(); ++k) {
      const double kx = tables->k_axis[0][k], ky = tables->k_axis[1][k], kz = tables->k_axis[2][k];
      w.at(0, k) = i * (ky * u.at(2, k) - kz * u.at(1, k));
      w.at(1, k) = i * (kz * u.at(0, k) - kx * u.at(2, k));
      w.at(2, k) = i * (kx * u.at(1, k) - ky * u.at(0, k));
    }
    return w;
  }
  throw ShapeError("curl: needs a dim-component field on a 2-D or 3-D torus");
}

/// Spectral divergence of a dim-component field.
inline SpectralField divergence(const SpectralField& u) {
  const auto& g = u.grid();
  if (u.components() != g.dim()) throw ShapeError("divergence: component count must equal dim");
  auto tables = grid_tables(g);
  SpectralField d(g, 1);
  for (std::size_t k = 0; k < u.modes(); ++k)
    for (int j = 0; j < g.dim(); ++j) d.at(0, k) += Complex(0.0, tables->k_axis[j][k]) * u.at(j, k);
  return d;
}

/// Vorticity-form drift -[(v.grad) omega - (omega.grad) v] + nu Laplacian(omega).
/// The stretching term vanishes identically in 2-D and is omitted there.
inline SpectralField vorticity_drift(const SpectralField& omega_in, double nu) {
  const SpectralField omega = dealias(omega_in);
  const auto& g = omega.grid();
  const SpectralField u = biot_savart(omega);
  const std::size_t n = omega.modes();
  const int dim = g.dim();
  std::vector<std::vector<double>> up(dim);
  for (int j = 0; j < dim; ++j) up[j] = to_physical(u, j);
  SpectralField out(g, omega.components());
  if (dim == 2) {
    std::vector<double> acc(n, 0.0);
    for (int j = 0; j < 2; ++j) {
      auto d = derivative_physical(omega, 0, j);
      for (std::size_t i = 0; i < n; ++i) acc[i] -= up[j][i] * d[i];
    }
    detail::store_physical(out, 0, acc);
  } else {
    std::vector<std::vector<double>> wp(3);
    for (int j = 0; j < 3; ++j) wp[j] = to_physical(omega, j);
    for (int c = 0; c < 3; ++c) {
      std::vector<double> acc(n, 0.0);
      for (int j = 0; j < 3; ++j) {
        auto dw = derivative_physical(omega, c, j);
        auto du = derivative_physical(u, c, j);
        for (std::size_t i = 0; i < n; ++i) acc[i] += -up[j][i] * dw[i] + wp[j][i] * du[i];
      }
      detail::store_physical(out, c, acc);
    }
  }
  detail::finish(out);
  detail::add_laplacian(out, omega, nu);
  return out;
}

/// Rotating shallow-water parameters.
struct RswParams {
  double f_coriolis = 1.0;
  double rossby = 1.0;
  double froude = 1.0;
  double gamma = 0.0;  ///< momentum viscosity
  double eta = 0.0;    ///< height diffusivity
  const SpectralField* topography = nullptr;  ///< scalar b, or null for b = 0
};

struct RswDiagnostics {
  double min_height = std::numeric_limits<double>::infinity();
};

/// Shallow-water tendency for the state (v1, v2, h) with u = v / rossby and
/// pressure p = (h - b) / (rossby * froude):
///   d_t v = -u.grad v - f z x u - grad p + gamma Lap v
///   d_t h = -div(h u) + eta Lap h
inline SpectralField rsw_drift(const SpectralField& state_in, const RswParams& p, bool viscous,
                               RswDiagnostics* diag = nullptr) {
  const auto& g = state_in.grid();
  if (g.dim() != 2 || state_in.components() != 3)
    throw ShapeError("rsw_drift: state must be (v1, v2, h) on a 2-D torus");
  if (!(p.rossby > 0.0) || !(p.froude > 0.0)) throw ConfigError("rsw_drift: rossby and froude must be > 0");
  const SpectralField s = dealias(state_in);
  auto tables = grid_tables(g);
  const std::size_t n = s.modes();
  const double inv_eps = 1.0 / p.rossby;

  std::vector<double> u[2] = {to_physical(s, 0), to_physical(s, 1)};
  for (int j = 0; j < 2; ++j)
    for (auto& x : u[j]) x *= inv_eps;
  const std::vector<double> h = to_physical(s, 2);
  if (diag) diag->min_height = *std::min_element(h.begin(), h.end());

  SpectralField out(g, 3);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> acc(n, 0.0);
    for (int j = 0; j < 2; ++j) {
      auto d = derivative_physical(s, c, j);
      for (std::size_t i = 0; i < n; ++i) acc[i] -= u[j][i] * d[i];
    }
    // -f z x u = (f u2, -f u1)
    const double sign = c == 0 ? 1.0 : -1.0;
    const auto& other = c == 0 ? u[1] : u[0];
    for (std::size_t i = 0; i < n; ++i) acc[i] += sign * p.f_coriolis * other[i];
    detail::store_physical(out, c, acc);
  }
  // -div(h u), formed spectrally from the products h u_j
  for (int j = 0; j < 2; ++j) {
    std::vector<double> flux(n);
    for (std::size_t i = 0; i < n; ++i) flux[i] = h[i] * u[j][i];
    auto fh = from_physical(g, flux);
    auto hc = out.component(2);
    for (std::size_t k = 0; k < n; ++k) hc[k] -= Complex(0.0, tables->k_axis[j][k]) * fh[k];
  }
  // -grad p, linear in h and b
  const double pscale = 1.0 / (p.rossby * p.froude);
  for (std::size_t k = 0; k < n; ++k) {
    Complex pk = s.at(2, k);
    if (p.topography) pk -= p.topography->at(0, k);
    pk *= pscale;
    out.at(0, k) -= Complex(0.0, tables->k_axis[0][k]) * pk;
    out.at(1, k) -= Complex(0.0, tables->k_axis[1][k]) * pk;
  }
  detail::finish(out);
  if (viscous) {
    for (std::size_t k = 0; k < n; ++k) {
      const double k2 = tables->k_squared[k];
      out.at(0, k) -= p.gamma * k2 * s.at(0, k);
      out.at(1, k) -= p.gamma * k2 * s.at(1, k);
      out.at(2, k) -= p.eta * k2 * s.at(2, k);
    }
  }
  return out;
}

/// Linear drift a X + nu Laplacian(X) (heat equation, GBM on a constant mode).
inline SpectralField linear_drift(const SpectralField& x, double rate, double nu) {
  SpectralField out = x;
  out *= rate;
  detail::add_laplacian(out, x, nu);
  return out;
}

}  // namespace stochtame
