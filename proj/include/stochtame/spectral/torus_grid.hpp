#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "stochtame/core/errors.hpp"

namespace stochtame {

/// Periodic grid on the torus [0, 2pi)^dim with n_per_axis modes per axis.
///
/// Coefficients are stored in FFT order along each axis (0, 1, ..., n/2-1,
/// -n/2, ..., -1) and flattened row-major with the x axis slowest.
class TorusGrid {
 public:
  TorusGrid() = default;
  TorusGrid(int dim, int n_per_axis) : dim_(dim), n_(n_per_axis) {
    if (dim < 1 || dim > 3) throw ConfigError("TorusGrid: dim must be 1, 2 or 3");
    if (n_per_axis < 4 || n_per_axis % 2 != 0)
      throw ConfigError("TorusGrid: n_per_axis must be even and >= 4");
  }

  int dim() const { return dim_; }
  int n() const { return n_; }

  std::size_t size() const {
    std::size_t s = 1;
    for (int d = 0; d < dim_; ++d) s *= static_cast<std::size_t>(n_);
    return s;
  }

  /// Signed wavenumber for FFT-ordered index i along one axis.
  int wavenumber(int i) const { return i < n_ / 2 ? i : i - n_; }

  std::array<int, 3> axis_indices(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int d = dim_ - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(flat % static_cast<std::size_t>(n_));
      flat /= static_cast<std::size_t>(n_);
    }
    return idx;
  }

  std::array<int, 3> wavevector(std::size_t flat) const {
    auto idx = axis_indices(flat);
    std::array<int, 3> k{0, 0, 0};
    for (int d = 0; d < dim_; ++d) k[d] = wavenumber(idx[d]);
    return k;
  }

  std::size_t flat_index(const std::array<int, 3>& k) const {
    std::size_t flat = 0;
    for (int d = 0; d < dim_; ++d) {
      int i = ((k[d] % n_) + n_) % n_;
      flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    return flat;
  }

  /// Physical-space coordinate of grid point `flat` along `axis`.
  double coordinate(std::size_t flat, int axis) const {
    return 2.0 * M_PI * axis_indices(flat)[axis] / n_;
  }

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_;
  }
  friend bool operator!=(const TorusGrid& a, const TorusGrid& b) { return !(a == b); }

 private:
  int dim_ = 1;
  int n_ = 4;
};

/// Per-grid lookup tables shared by every field on that grid.
struct GridTables {
  std::vector<double> k_squared;            // |k|^2
  std::vector<int> k_inf;                   // |k|_inf
  std::array<std::vector<double>, 3> k_axis;  // signed k per axis
  std::vector<std::size_t> conjugate;       // flat index of -k
};

namespace detail {

inline std::shared_ptr<const GridTables> build_tables(const TorusGrid& g) {
  auto t = std::make_shared<GridTables>();
  const std::size_t n = g.size();
  t->k_squared.resize(n);
  t->k_inf.resize(n);
  t->conjugate.resize(n);
  for (int d = 0; d < 3; ++d) t->k_axis[d].assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto k = g.wavevector(i);
    double k2 = 0.0;
    int kinf = 0;
    for (int d = 0; d < g.dim(); ++d) {
      k2 += static_cast<double>(k[d]) * k[d];
      kinf = std::max(kinf, std::abs(k[d]));
      t->k_axis[d][i] = k[d];
    }
    t->k_squared[i] = k2;
    t->k_inf[i] = kinf;
    std::array<int, 3> mk{-k[0], -k[1], -k[2]};
    t->conjugate[i] = g.flat_index(mk);
  }
  return t;
}

}  // namespace detail

/// Cached tables for a grid. Thread-safe.
inline std::shared_ptr<const GridTables> grid_tables(const TorusGrid& g) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const GridTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(g.dim(), g.n());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto t = detail::build_tables(g);
  cache.emplace(key, t);
  return t;
}

/// Smallest power-of-two resolution whose 2/3-rule band contains `cutoff`.
inline int resolution_for_cutoff(int cutoff) {
  int n = 4;
  while (n / 3 < cutoff) n *= 2;
  return n;
}

}  // namespace stochtame
