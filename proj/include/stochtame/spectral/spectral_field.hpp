#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stochtame/core/errors.hpp"
#include "stochtame/spectral/torus_grid.hpp"

namespace stochtame {

using Complex = std::complex<double>;

/// Real vector field on the torus held as Hermitian-symmetric Fourier
/// coefficients, f_hat(k) = (2 pi)^-dim * integral f exp(-i k.x) dx.
///
/// Component c occupies coeffs()[c*N, (c+1)*N) with N = grid().size().
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(TorusGrid grid, int components)
      : grid_(grid), components_(components), coeffs_(grid.size() * static_cast<std::size_t>(components)) {
    if (components < 1) throw ConfigError("SpectralField: components must be >= 1");
  }

  const TorusGrid& grid() const { return grid_; }
  int components() const { return components_; }
  std::size_t modes() const { return grid_.size(); }

  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  std::span<Complex> component(int c) {
    return std::span<Complex>(coeffs_).subspan(static_cast<std::size_t>(c) * modes(), modes());
  }
  std::span<const Complex> component(int c) const {
    return std::span<const Complex>(coeffs_).subspan(static_cast<std::size_t>(c) * modes(), modes());
  }

  Complex& at(int c, std::size_t k) { return coeffs_[static_cast<std::size_t>(c) * modes() + k]; }
  const Complex& at(int c, std::size_t k) const {
    return coeffs_[static_cast<std::size_t>(c) * modes() + k];
  }

  /// Set when the field was produced after a detected blow-up; such fields may
  /// legitimately hold non-finite values.
  bool post_blowup() const { return post_blowup_; }
  void set_post_blowup(bool v) { post_blowup_ = v; }

  bool same_shape(const SpectralField& o) const {
    return grid_ == o.grid_ && components_ == o.components_;
  }

  bool all_finite() const {
    for (const auto& z : coeffs_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  bool is_zero() const {
    for (const auto& z : coeffs_)
      if (z != Complex{}) return false;
    return true;
  }

  /// Restore exact Hermitian symmetry: c(-k) = conj(c(k)).
  void enforce_hermitian() {
    auto tables = grid_tables(grid_);
    const auto& conj_idx = tables->conjugate;
    for (int c = 0; c < components_; ++c) {
      auto comp = component(c);
      for (std::size_t k = 0; k < comp.size(); ++k) {
        std::size_t mk = conj_idx[k];
        if (mk < k) continue;
        if (mk == k) {
          comp[k] = Complex(comp[k].real(), 0.0);
        } else {
          Complex avg = 0.5 * (comp[k] + std::conj(comp[mk]));
          comp[k] = avg;
          comp[mk] = std::conj(avg);
        }
      }
    }
  }

  bool is_hermitian(double tol = 0.0) const {
    auto tables = grid_tables(grid_);
    for (int c = 0; c < components_; ++c) {
      auto comp = component(c);
      for (std::size_t k = 0; k < comp.size(); ++k)
        if (std::abs(comp[k] - std::conj(comp[tables->conjugate[k]])) > tol) return false;
    }
    return true;
  }

  SpectralField& operator+=(const SpectralField& o) {
    check_shape(o, "+=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    check_shape(o, "-=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(double s) {
    for (auto& z : coeffs_) z *= s;
    return *this;
  }

  /// this += s * o
  SpectralField& axpy(double s, const SpectralField& o) {
    check_shape(o, "axpy");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * o.coeffs_[i];
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  friend bool operator==(const SpectralField& a, const SpectralField& b) {
    return a.same_shape(b) && a.coeffs_ == b.coeffs_ && a.post_blowup_ == b.post_blowup_;
  }

 private:
  void check_shape(const SpectralField& o, const char* op) const {
    if (!same_shape(o)) throw ShapeError(std::string("SpectralField ") + op + ": shape mismatch");
  }

  TorusGrid grid_;
  int components_ = 1;
  std::vector<Complex> coeffs_;
  bool post_blowup_ = false;
};

}  // namespace stochtame
