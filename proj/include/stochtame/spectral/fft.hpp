#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "stochtame/spectral/spectral_field.hpp"
#include "stochtame/spectral/torus_grid.hpp"

namespace stochtame {

/// Complex-to-complex FFT pair for one grid. Plans are created once and
/// executed through the new-array interface, which is thread-safe.
class FourierTransform {
 public:
  explicit FourierTransform(const TorusGrid& grid) : size_(grid.size()) {
    int dims[3] = {grid.n(), grid.n(), grid.n()};
    std::vector<Complex> a(size_), b(size_);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft(grid.dim(), dims, in, out, FFTW_FORWARD, flags);
    inverse_ = fftw_plan_dft(grid.dim(), dims, in, out, FFTW_BACKWARD, flags);
  }
  ~FourierTransform() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  /// Grid values -> coefficients, normalised by 1/N.
  void forward(std::span<const Complex> values, std::span<Complex> coeffs) const {
    fftw_execute_dft(forward_, const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(values.data())),
                     reinterpret_cast<fftw_complex*>(coeffs.data()));
    const double scale = 1.0 / static_cast<double>(size_);
    for (auto& z : coeffs) z *= scale;
  }

  /// Coefficients -> grid values (unnormalised synthesis).
  void inverse(std::span<const Complex> coeffs, std::span<Complex> values) const {
    fftw_execute_dft(inverse_, const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(coeffs.data())),
                     reinterpret_cast<fftw_complex*>(values.data()));
  }

  static const FourierTransform& get(const TorusGrid& grid) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<FourierTransform>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{grid.dim(), grid.n()}];
    if (!slot) slot = std::make_unique<FourierTransform>(grid);
    return *slot;
  }

 private:
  std::size_t size_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

/// Real grid values of component `c`.
inline std::vector<double> to_physical(const SpectralField& f, int c) {
  const auto& fft = FourierTransform::get(f.grid());
  std::vector<Complex> vals(f.modes());
  fft.inverse(f.component(c), vals);
  std::vector<double> out(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) out[i] = vals[i].real();
  return out;
}

/// Grid values of d/dx_axis applied to component `c`.
inline std::vector<double> derivative_physical(const SpectralField& f, int c, int axis) {
  const auto tables = grid_tables(f.grid());
  const auto& kax = tables->k_axis[axis];
  const int nyq = f.grid().n() / 2;
  auto comp = f.component(c);
  std::vector<Complex> spec(comp.size());
  for (std::size_t i = 0; i < comp.size(); ++i) {
    // odd derivative of the Nyquist mode is not representable by a real field
    double k = (std::abs(kax[i]) == nyq) ? 0.0 : kax[i];
    spec[i] = Complex(0.0, k) * comp[i];
  }
  const auto& fft = FourierTransform::get(f.grid());
  std::vector<Complex> vals(spec.size());
  fft.inverse(spec, vals);
  std::vector<double> out(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) out[i] = vals[i].real();
  return out;
}

/// Coefficients of real grid values.
inline std::vector<Complex> from_physical(const TorusGrid& grid, std::span<const double> values) {
  std::vector<Complex> vals(values.begin(), values.end());
  std::vector<Complex> coeffs(vals.size());
  FourierTransform::get(grid).forward(vals, coeffs);
  return coeffs;
}

/// Build a field from grid values, one vector per component.
inline SpectralField field_from_physical(const TorusGrid& grid, const std::vector<std::vector<double>>& comps) {
  SpectralField f(grid, static_cast<int>(comps.size()));
  for (int c = 0; c < f.components(); ++c) {
    auto coeffs = from_physical(grid, comps[c]);
    std::copy(coeffs.begin(), coeffs.end(), f.component(c).begin());
  }
  f.enforce_hermitian();
  return f;
}

}  // namespace stochtame
