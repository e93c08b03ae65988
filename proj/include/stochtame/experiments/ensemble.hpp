#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "stochtame/control/control.hpp"
#include "stochtame/experiments/initial.hpp"
#include "stochtame/experiments/statistics.hpp"
#include "stochtame/integrators/path_runner.hpp"

namespace stochtame {

struct EnsembleConfig {
  int n_paths = 100;
  std::uint64_t base_seed = 0;
  std::vector<int> d_list{8, 16, 32, 64};
  DriftOperator drift;
  int grid_dim = 0;  ///< 0: the model's dimension (1 for Linear)
  InitialCondition initial;
  NoiseSpec noise;
  StepperConfig stepper;
  std::vector<double> K_grid;   ///< thresholds on sup_t ||X||_F0^2 (and sup_t ||X||_D^2)
  std::vector<double> K2_grid;  ///< thresholds on int_0^T ||X||_F1^2; empty: K_grid
  std::vector<double> delta_grid;  ///< Aldous windows; empty: no increment statistics
  double aldous_level = 0.0;       ///< F0 level for hitting times; 0: pilot median
  std::optional<ControlSchedule> control;
  int jobs = 1;

  int dim() const {
    if (grid_dim > 0) return grid_dim;
    const int d = kind_dim(drift.kind);
    return d > 0 ? d : 1;
  }
  const std::vector<double>& k2_grid() const { return K2_grid.empty() ? K_grid : K2_grid; }

  void validate() const {
    if (n_paths < 1) throw ConfigError("ensemble: n_paths must be >= 1");
    if (d_list.empty()) throw ConfigError("ensemble: d_list is empty");
    for (std::size_t i = 0; i < d_list.size(); ++i) {
      if (d_list[i] < 1) throw ConfigError("ensemble: cutoffs must be >= 1");
      if (i > 0 && d_list[i] <= d_list[i - 1]) throw ConfigError("ensemble: d_list must be increasing");
    }
    for (const auto* g : {&K_grid, &K2_grid})
      if (!std::is_sorted(g->begin(), g->end())) throw ConfigError("ensemble: threshold grids must be sorted");
    if (!std::is_sorted(delta_grid.begin(), delta_grid.end())) throw ConfigError("ensemble: delta_grid must be sorted");
    if (!delta_grid.empty()) {
      if (!(delta_grid.front() > 0.0)) throw ConfigError("ensemble: deltas must be > 0");
      if (delta_grid.back() > 0.5 * stepper.t_end + 1e-12) throw ConfigError("ensemble: max delta must be <= T/2");
    }
    if (jobs < 1) throw ConfigError("ensemble: jobs must be >= 1");
    if (control) control->validate();
    stepper.validate();
    noise.validate();
    initial.validate();
  }
};

/// Everything kept from one path; blow-ups and numeric failures count as
/// exceeding every threshold.
struct PathSample {
  std::uint64_t seed = 0;
  bool blowup = false;
  bool numeric_failure = false;
  double t_final = 0.0;
  double sup_F0_sq = 0.0, int_F1sq = 0.0, sup_D_sq = 0.0;
  double E = 0.0;
  std::vector<double> increments;  ///< per delta, hitting-time sample then uniform-time sample
  std::optional<bool> schedule_ok;
  std::optional<double> dwell_alpha;
  std::size_t events = 0;

  bool survived() const { return !blowup && !numeric_failure; }
  friend bool operator==(const PathSample&, const PathSample&) = default;
};

struct SummaryStats {
  std::vector<double> K_grid, K2_grid, delta_grid;
  double aldous_level = 0.0;
  std::map<int, std::vector<PathSample>> by_d;  ///< sorted by seed

  std::vector<int> d_list() const {
    std::vector<int> d;
    for (const auto& [k, v] : by_d) d.push_back(k);
    return d;
  }

  const std::vector<PathSample>& samples(int d) const {
    auto it = by_d.find(d);
    if (it == by_d.end()) throw ConfigError("stats: no cutoff " + std::to_string(d));
    return it->second;
  }

  template <class Pred>
  Proportion proportion(int d, Pred exceeds) const {
    const auto& s = samples(d);
    std::size_t k = 0;
    for (const auto& p : s) k += exceeds(p) ? 1 : 0;
    return wilson_interval(k, s.size());
  }

  Proportion p_sup(int d, double K) const {
    return proportion(d, [K](const PathSample& p) { return !p.survived() || p.sup_F0_sq >= K; });
  }
  Proportion p_int(int d, double K) const {
    return proportion(d, [K](const PathSample& p) { return !p.survived() || p.int_F1sq >= K; });
  }
  Proportion p_sup_D(int d, double K) const {
    return proportion(d, [K](const PathSample& p) { return !p.survived() || p.sup_D_sq >= K; });
  }

  std::size_t count(int d, bool PathSample::*flag) const {
    std::size_t k = 0;
    for (const auto& p : samples(d)) k += (p.*flag) ? 1 : 0;
    return k;
  }

  /// Union of disjoint seed ranges; throws on grid mismatch or overlap.
  SummaryStats& merge(const SummaryStats& o) {
    if (K_grid != o.K_grid || K2_grid != o.K2_grid || delta_grid != o.delta_grid ||
        aldous_level != o.aldous_level)
      throw ConfigError("stats merge: grids differ");
    for (const auto& [d, v] : o.by_d) {
      auto& mine = by_d[d];
      std::vector<PathSample> out;
      out.reserve(mine.size() + v.size());
      std::merge(mine.begin(), mine.end(), v.begin(), v.end(), std::back_inserter(out),
                 [](const PathSample& a, const PathSample& b) { return a.seed < b.seed; });
      for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].seed == out[i - 1].seed) throw ConfigError("stats merge: seed ranges overlap");
      mine = std::move(out);
    }
    return *this;
  }

  friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

namespace detail {

inline StepperConfig with_snapshots(StepperConfig s, const std::vector<double>& deltas) {
  if (deltas.empty()) return s;
  const auto steps = static_cast<int>(std::floor(deltas.front() / s.dt * (1.0 + 1e-12)));
  s.snapshot_stride = std::max(1, steps / 4);
  return s;
}

inline TrajectoryRecord run_one(const EnsembleConfig& c, int d, std::uint64_t seed, const StepperConfig& s) {
  const TorusGrid g(c.dim(), resolution_for_cutoff(d));
  const SpectralField x0 = c.initial.make(g, kind_components(c.drift.kind));
  if (c.control) return control_run(x0, c.drift, c.noise, *c.control, s, d, seed);
  return integrate_path(x0, c.drift, c.noise, s, d, seed);
}

/// sup over snapshots in (t_j, t_j + delta] of ||X - X_j||_G; +inf when
/// the path ended inside the window.
inline double window_increment(const TrajectoryRecord& r, std::size_t j, double delta, double s_G) {
  const auto& sn = r.snapshots;
  const double t1 = sn[j].t + delta * (1.0 + 1e-12);
  if (!r.survived() && t1 > r.t_final) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t i = j + 1; i < sn.size() && sn[i].t <= t1; ++i)
    m = std::max(m, sobolev_norm(sn[i].field - sn[j].field, s_G));
  return m;
}

inline PathSample summarize(const EnsembleConfig& c, const TrajectoryRecord& r, double level) {
  PathSample p;
  p.seed = r.seed;
  p.blowup = r.blowup.has_value();
  p.numeric_failure = r.numeric_failure.has_value();
  p.t_final = r.t_final;
  p.sup_F0_sq = r.sup_F0_sq;
  p.int_F1sq = r.int_F1sq;
  p.sup_D_sq = r.sup_D_sq;
  p.E = r.martingale.E;
  p.events = r.events.size();
  if (c.control) {
    auto v = validate_schedule(r, *c.control);
    p.schedule_ok = v.passed;
    p.dwell_alpha = v.dwell_alpha;
  }
  if (c.delta_grid.empty() || r.snapshots.empty()) return p;
  const double half = 0.5 * c.stepper.t_end;
  const double sF0 = c.drift.ladder.s_F0, sG = c.drift.ladder.s_G;
  // last snapshot index with t <= T/2
  std::size_t last = 0;
  while (last + 1 < r.snapshots.size() && r.snapshots[last + 1].t <= half * (1.0 + 1e-12)) ++last;
  std::size_t hit = last;
  for (std::size_t j = 0; j <= last; ++j) {
    if (sobolev_norm(r.snapshots[j].field, sF0) >= level) {
      hit = j;
      break;
    }
  }
  const double u = keyed_uniform(r.seed, 0, 0, 11) * half;
  std::size_t uni = 0;
  while (uni + 1 <= last && r.snapshots[uni + 1].t <= u) ++uni;
  for (double delta : c.delta_grid)
    for (std::size_t j : {hit, uni}) p.increments.push_back(window_increment(r, j, delta, sG));
  return p;
}

template <class F>
void parallel_for(int n, int jobs, F&& body) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(jobs, n); ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// F0 level for Aldous hitting times: median snapshot norm on [0, T/2] over
/// the first (up to) 16 paths at the smallest cutoff.
inline double pilot_aldous_level(const EnsembleConfig& c) {
  const auto s = detail::with_snapshots(c.stepper, c.delta_grid);
  const int n = std::min(c.n_paths, 16);
  std::vector<std::vector<double>> norms(static_cast<std::size_t>(n));
  detail::parallel_for(n, c.jobs, [&](int i) {
    auto r = detail::run_one(c, c.d_list.front(), c.base_seed + static_cast<std::uint64_t>(i), s);
    for (const auto& sn : r.snapshots)
      if (sn.t <= 0.5 * c.stepper.t_end * (1.0 + 1e-12))
        norms[static_cast<std::size_t>(i)].push_back(sobolev_norm(sn.field, c.drift.ladder.s_F0));
  });
  std::vector<double> all;
  for (auto& v : norms) all.insert(all.end(), v.begin(), v.end());
  return all.empty() ? 0.0 : median(all);
}

using PathCallback = std::function<void(int d, const TrajectoryRecord&)>;

/// Paths seeded base_seed + i at every cutoff (common noise across d).
/// on_path runs on worker threads when jobs > 1.
inline SummaryStats run_ensemble(const EnsembleConfig& c, const PathCallback& on_path = {}) {
  c.validate();
  SummaryStats st;
  st.K_grid = c.K_grid;
  st.K2_grid = c.k2_grid();
  st.delta_grid = c.delta_grid;
  if (!c.delta_grid.empty()) st.aldous_level = c.aldous_level > 0.0 ? c.aldous_level : pilot_aldous_level(c);
  const auto s = detail::with_snapshots(c.stepper, c.delta_grid);
  for (int d : c.d_list) {
    std::vector<PathSample> out(static_cast<std::size_t>(c.n_paths));
    detail::parallel_for(c.n_paths, c.jobs, [&](int i) {
      auto r = detail::run_one(c, d, c.base_seed + static_cast<std::uint64_t>(i), s);
      out[static_cast<std::size_t>(i)] = detail::summarize(c, r, st.aldous_level);
      if (on_path) {
        r.snapshots.clear();
        on_path(d, r);
      }
    });
    st.by_d[d] = std::move(out);
  }
  return st;
}

}  // namespace stochtame
