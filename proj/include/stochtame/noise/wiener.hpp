#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "stochtame/core/errors.hpp"

namespace stochtame {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based uniform on (0,1) keyed by (seed, a, b, stream).
inline double keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t stream = 0) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(a ^ splitmix64(b ^ splitmix64(stream))));
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

/// Counter-based standard normal (Box-Muller on two keyed uniforms).
inline double keyed_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const double u1 = keyed_uniform(seed, a, b, 1), u2 = keyed_uniform(seed, a, b, 2);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Scalar Brownian path on a uniform base grid with Brownian-bridge refinement.
///
/// Base increments dW_n over [n dt, (n+1) dt] come from a sequential
/// mt19937_64 stream. Sub-intervals are addressed by a heap index inside a
/// base step: node 1 is the whole step, nodes 2i and 2i+1 its halves. The
/// left half of node i given its increment D over length h is
/// D/2 + (sqrt(h)/2) Z with Z keyed by (seed, step, i), so refinements never
/// alter increments already handed out at a coarser level.
class WienerPath {
 public:
  WienerPath(std::uint64_t seed, double dt_base) : seed_(seed), dt_(dt_base), rng_(seed) {
    if (!(dt_base > 0.0)) throw ConfigError("WienerPath: dt_base must be > 0");
  }

  std::uint64_t seed() const { return seed_; }
  double dt_base() const { return dt_; }

  /// Base increment over [n dt, (n+1) dt].
  double increment(std::size_t n) {
    while (base_.size() <= n) base_.push_back(std::sqrt(dt_) * normal_(rng_));
    return base_[n];
  }

  /// Increment over the sub-interval `node` of base step n.
  double increment(std::size_t n, std::uint64_t node) {
    if (node == 0) throw ConfigError("WienerPath: node index starts at 1");
    if (node == 1) return increment(n);
    const std::uint64_t parent = node / 2;
    const double d = increment(n, parent);
    const double h = node_length(parent);
    const double left = 0.5 * d + 0.5 * std::sqrt(h) * keyed_normal(seed_, n, parent);
    return (node % 2 == 0) ? left : d - left;
  }

  /// Length of sub-interval `node`.
  double node_length(std::uint64_t node) const {
    int depth = 0;
    while (node > 1) node /= 2, ++depth;
    return std::ldexp(dt_, -depth);
  }

  /// Left endpoint of sub-interval `node` relative to the start of its base step.
  double node_offset(std::uint64_t node) const {
    double off = 0.0;
    while (node > 1) {
      if (node % 2 == 1) off += node_length(node);
      node /= 2;
    }
    return off;
  }

  /// W at the base grid time n dt.
  double value_at_step(std::size_t n) {
    increment(n == 0 ? 0 : n - 1);
    while (cumulative_.size() <= n) {
      const std::size_t k = cumulative_.size();
      cumulative_.push_back(k == 0 ? 0.0 : cumulative_[k - 1] + base_[k - 1]);
    }
    return cumulative_[n];
  }

 private:
  std::uint64_t seed_;
  double dt_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<double> base_;
  std::vector<double> cumulative_;
};

}  // namespace stochtame
