#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stochtame/experiments/ensemble.hpp"
#include "stochtame/integrators/record.hpp"

namespace stochtame {

inline constexpr const char* kUniformControlHeader = "d,K,p_hat,ci_lo,ci_hi,n";
inline constexpr const char* kAldousHeader = "d,delta,eta,p_hat,ci_lo,ci_hi";

/// Smallest grid threshold whose exceedance estimate stays <= target at every d,
/// with the across-d spread and trend at that threshold.
struct ThresholdFinding {
  std::optional<double> K;         ///< nullopt: not attained on grid
  std::vector<Proportion> per_d;   ///< at K (or at the largest grid value)
  double spread = 0.0;             ///< max_d p_hat - min_d p_hat
  bool cis_overlap = true;         ///< max_d ci_lo <= min_d ci_hi
  MannKendall trend;
  bool no_increasing_trend(double level = 0.05) const { return trend.p_increasing > level; }
};

struct ControlReport {
  double epsilon_target = 0.1;
  std::vector<int> d_list;
  ThresholdFinding first;   ///< sup ||X||^2 (F0 or D)
  ThresholdFinding second;  ///< int ||X||_F1^2 (uniform_control_report only)
  bool attained() const { return first.K.has_value() && second.K.has_value(); }
};

namespace detail {

template <class P>
ThresholdFinding find_threshold(const SummaryStats& st, const std::vector<double>& grid, double target, P prob) {
  ThresholdFinding f;
  const auto ds = st.d_list();
  auto at = [&](double K) {
    std::vector<Proportion> v;
    for (int d : ds) v.push_back(prob(d, K));
    return v;
  };
  for (double K : grid) {
    auto v = at(K);
    const bool ok = std::all_of(v.begin(), v.end(), [&](const Proportion& p) { return p.p_hat <= target; });
    if (ok) {
      f.K = K;
      f.per_d = std::move(v);
      break;
    }
  }
  if (!f.K && !grid.empty()) f.per_d = at(grid.back());
  if (f.per_d.empty()) return f;
  std::vector<double> ph;
  double lo = 0.0, hi = 1.0, pmin = 1.0, pmax = 0.0;
  for (const auto& p : f.per_d) {
    ph.push_back(p.p_hat);
    lo = std::max(lo, p.lo);
    hi = std::min(hi, p.hi);
    pmin = std::min(pmin, p.p_hat);
    pmax = std::max(pmax, p.p_hat);
  }
  f.spread = pmax - pmin;
  f.cis_overlap = lo <= hi;
  f.trend = mann_kendall(ph);
  return f;
}

}  // namespace detail

/// (K1, K2) for sup_t ||X^d||_F0^2 and int_0^T ||X^d||_F1^2.
inline ControlReport uniform_control_report(const SummaryStats& st, double epsilon_target) {
  if (st.by_d.size() < 2) throw ConfigError("uniform_control_report: needs at least two cutoffs");
  ControlReport r;
  r.epsilon_target = epsilon_target;
  r.d_list = st.d_list();
  r.first = detail::find_threshold(st, st.K_grid, epsilon_target, [&](int d, double K) { return st.p_sup(d, K); });
  r.second = detail::find_threshold(st, st.K2_grid, epsilon_target, [&](int d, double K) { return st.p_int(d, K); });
  return r;
}

/// Same search for sup_t ||X^d||_D^2 (second finding left empty and attained).
inline ControlReport d_space_control_report(const SummaryStats& st, double epsilon_target) {
  if (st.by_d.size() < 2) throw ConfigError("d_space_control_report: needs at least two cutoffs");
  ControlReport r;
  r.epsilon_target = epsilon_target;
  r.d_list = st.d_list();
  r.first = detail::find_threshold(st, st.K_grid, epsilon_target, [&](int d, double K) { return st.p_sup_D(d, K); });
  r.second.K = 0.0;
  return r;
}

struct AldousRow {
  int d = 0;
  double delta = 0.0, eta = 0.0;
  Proportion p;
};

struct AldousTable {
  double eta = 0.0;
  std::vector<AldousRow> rows;

  std::vector<AldousRow> at_delta(double delta) const {
    std::vector<AldousRow> out;
    for (const auto& r : rows)
      if (r.delta == delta) out.push_back(r);
    return out;
  }
};

/// P(sup_{t<=delta} ||X_{tau+t} - X_tau||_G >= eta) per (d, delta). eta <= 0
/// selects the median increment at the largest delta over all cutoffs.
inline AldousTable aldous_stats(const SummaryStats& st, double eta = 0.0) {
  AldousTable t;
  const std::size_t nd = st.delta_grid.size();
  if (nd == 0) return t;
  if (eta <= 0.0) {
    std::vector<double> last;
    for (const auto& [d, v] : st.by_d)
      for (const auto& p : v)
        if (p.increments.size() == 2 * nd) last.insert(last.end(), p.increments.end() - 2, p.increments.end());
    eta = median(last);
    if (!(eta > 0.0)) eta = std::numeric_limits<double>::min();
  }
  t.eta = eta;
  for (const auto& [d, v] : st.by_d) {
    for (std::size_t k = 0; k < nd; ++k) {
      std::size_t hits = 0, n = 0;
      for (const auto& p : v) {
        if (p.increments.size() != 2 * nd) continue;
        for (int j = 0; j < 2; ++j) {
          ++n;
          hits += p.increments[2 * k + static_cast<std::size_t>(j)] >= eta ? 1 : 0;
        }
      }
      t.rows.push_back({d, st.delta_grid[k], eta, wilson_interval(hits, n)});
    }
  }
  return t;
}

/// Runs the ensemble and tabulates increments.
inline AldousTable aldous_stats(EnsembleConfig c, const std::vector<double>& delta_grid, double eta = 0.0) {
  c.delta_grid = delta_grid;
  return aldous_stats(run_ensemble(c), eta);
}

inline void write_control_csv(std::ostream& os, const SummaryStats& st, bool integral, std::uint64_t config_hash,
                              std::uint64_t seed) {
  using detail::fmt17;
  write_provenance(os, config_hash, seed);
  os << kUniformControlHeader << "\n";
  const auto& grid = integral ? st.K2_grid : st.K_grid;
  for (int d : st.d_list())
    for (double K : grid) {
      const auto p = integral ? st.p_int(d, K) : st.p_sup(d, K);
      os << d << ',' << fmt17(K) << ',' << fmt17(p.p_hat) << ',' << fmt17(p.lo) << ',' << fmt17(p.hi) << ','
         << p.n << "\n";
    }
}

inline void write_d_control_csv(std::ostream& os, const SummaryStats& st, std::uint64_t config_hash,
                                std::uint64_t seed) {
  using detail::fmt17;
  write_provenance(os, config_hash, seed);
  os << kUniformControlHeader << "\n";
  for (int d : st.d_list())
    for (double K : st.K_grid) {
      const auto p = st.p_sup_D(d, K);
      os << d << ',' << fmt17(K) << ',' << fmt17(p.p_hat) << ',' << fmt17(p.lo) << ',' << fmt17(p.hi) << ','
         << p.n << "\n";
    }
}

inline void write_aldous_csv(std::ostream& os, const AldousTable& t, std::uint64_t config_hash, std::uint64_t seed) {
  using detail::fmt17;
  write_provenance(os, config_hash, seed);
  os << kAldousHeader << "\n";
  for (const auto& r : t.rows)
    os << r.d << ',' << fmt17(r.delta) << ',' << fmt17(r.eta) << ',' << fmt17(r.p.p_hat) << ',' << fmt17(r.p.lo)
       << ',' << fmt17(r.p.hi) << "\n";
}

inline void write_report(std::ostream& os, const std::string& name, const ThresholdFinding& f,
                         const std::vector<int>& ds) {
  using detail::fmt17;
  os << name << ".K=" << (f.K ? fmt17(*f.K) : std::string("not_attained")) << "\n";
  for (std::size_t i = 0; i < f.per_d.size() && i < ds.size(); ++i)
    os << name << ".p_hat[d=" << ds[i] << "]=" << fmt17(f.per_d[i].p_hat) << "\n";
  os << name << ".spread=" << fmt17(f.spread) << "\n";
  os << name << ".cis_overlap=" << (f.cis_overlap ? "true" : "false") << "\n";
  os << name << ".mann_kendall_S=" << f.trend.S << "\n";
  os << name << ".mann_kendall_p=" << fmt17(f.trend.p_increasing) << "\n";
}

}  // namespace stochtame
