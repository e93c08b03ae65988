#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "stochtame/core/errors.hpp"
#include "stochtame/integrators/record.hpp"
#include "stochtame/integrators/stepper.hpp"
#include "stochtame/noise/wiener.hpp"
#include "stochtame/spectral/fft.hpp"

namespace stochtame {

struct LadderNorms {
  double G = 0.0, F0 = 0.0, F1 = 0.0, D = 0.0;
};

inline LadderNorms ladder_norms(const SpectralField& x, const SpaceLadder& l) {
  return {sobolev_norm(x, l.s_G), sobolev_norm(x, l.s_F0), sobolev_norm(x, l.s_F1), sobolev_norm(x, l.s_D)};
}

/// Fraction of the F0-weighted energy carried by modes with |k|_inf > cutoff/2.
inline double upper_band_fraction(const SpectralField& x, double s_F0, int cutoff) {
  auto w = sobolev_weights(x.grid(), s_F0);
  auto t = grid_tables(x.grid());
  double hi = 0.0, all = 0.0;
  for (int c = 0; c < x.components(); ++c) {
    auto comp = x.component(c);
    for (std::size_t k = 0; k < comp.size(); ++k) {
      const double e = (*w)[k] * std::norm(comp[k]);
      all += e;
      if (2 * t->k_inf[k] > cutoff) hi += e;
    }
  }
  return all > 0.0 ? hi / all : 0.0;
}

/// Integrates one path base step by base step. Each base step is processed
/// recursively: a sub-step is split into its two Brownian-bridge halves when
/// the relative F0 increment exceeds the trigger, when the state turns
/// non-finite, or (with switching on) when it crosses the active threshold
/// and is still longer than dt_min.
class PathRunner {
 public:
  std::function<void(const ControlEvent&, const PathRunner&)> on_event;

  PathRunner(const SpectralField& x0, const SpdeSystem& sys, const StepperConfig& cfg, std::uint64_t seed,
             Regime initial)
      : sys_(sys), cfg_(cfg), wiener_(seed, cfg.dt), x_(sys.project(x0)), regime_(initial) {
    cfg_.validate();
    sys_.noise.validate();
    check_projector(GalerkinProjector{sys.cutoff}, x0.grid());
    if (!x0.all_finite()) throw NumericError("initial state is not finite");
    const double steps = cfg_.t_end / cfg_.dt;
    n_steps_ = static_cast<std::size_t>(std::llround(steps));
    if (std::abs(static_cast<double>(n_steps_) - steps) > 1e-9 * std::max(1.0, steps))
      throw ConfigError("stepper: t_end must be an integer multiple of dt");
    dt_min_ = cfg_.effective_dt_min();
    norms_ = ladder_norms(x_, sys_.ladder());
    threshold_ = cfg_.blowup_threshold > 0.0 ? cfg_.blowup_threshold : 1e8 * (1.0 + norms_.F0);
    if (!(threshold_ > norms_.F0)) throw ConfigError("stepper: blowup_threshold must exceed the initial F0 norm");
    rec_.seed = seed;
    rec_.martingale.epsilon = cfg_.epsilon;
    observe(x_);
    push_row();
    if (cfg_.snapshot_stride > 0) rec_.snapshots.push_back({0.0, x_});
  }

  bool done() const { return terminated_ || n_ >= n_steps_; }
  bool terminated() const { return terminated_; }
  double time() const { return t_; }
  Regime regime() const { return regime_; }
  const SpectralField& state() const { return x_; }
  const LadderNorms& norms() const { return norms_; }
  const SpdeSystem& system() const { return sys_; }
  const MartingaleDiagnostics& martingale() const { return diag_; }
  const StepperConfig& config() const { return cfg_; }
  TrajectoryRecord& record() { return rec_; }
  int completed_phases() const { return tau_count_; }

  void set_levels(double hi, double lo, bool switching) {
    L_hi_ = hi;
    L_lo_ = lo;
    switching_ = switching;
  }
  double level_hi() const { return L_hi_; }
  double level_lo() const { return L_lo_; }

  /// Record an event at the current time and flip the regime.
  void force_event(bool escalated = false) {
    ControlEvent e;
    e.kind = regime_ == Regime::Deterministic ? EventKind::Tau : EventKind::Rho;
    e.index = tau_count_;
    e.t = t_;
    e.norm = norms_.F0;
    e.level = regime_ == Regime::Deterministic ? L_hi_ : L_lo_;
    e.escalated = escalated;
    fire(e);
  }

  /// Advance one base step. Returns false once the path has terminated.
  bool step_base() {
    if (done()) return false;
    process(n_, 1);
    if (terminated_) return false;
    ++n_;
    t_ = static_cast<double>(n_) * cfg_.dt;
    if (n_ % static_cast<std::size_t>(cfg_.save_stride) == 0 || n_ == n_steps_) push_row();
    if (cfg_.snapshot_stride > 0 && n_ % static_cast<std::size_t>(cfg_.snapshot_stride) == 0)
      rec_.snapshots.push_back({t_, x_});
    return true;
  }

  void add_flag(std::uint32_t f) { pending_flags_ |= f; }

  TrajectoryRecord finish() {
    if (rec_.rows.empty() || rec_.rows.back().t < t_) push_row();
    rec_.martingale = diag_;
    rec_.t_final = t_;
    rec_.final_state = x_;
    rec_.finalized = true;
    return std::move(rec_);
  }

 private:
  bool noise_on() const { return regime_ == Regime::Stochastic && sys_.noise.theta != 0.0; }

  void fire(const ControlEvent& e) {
    regime_ = regime_ == Regime::Deterministic ? Regime::Stochastic : Regime::Deterministic;
    if (e.kind == EventKind::Rho) ++tau_count_;
    rec_.events.push_back(e);
    pending_flags_ |= kFlagEvent;
    if (!rec_.rows.empty() && rec_.rows.back().t == e.t) rec_.rows.back().regime = regime_;
    if (on_event) on_event(e, *this);
  }

  void process(std::size_t n, std::uint64_t node) {
    const double h = wiener_.node_length(node);
    const bool noisy = noise_on();
    const double dW = noisy ? wiener_.increment(n, node) : 0.0;
    std::optional<SpectralField> next;
    LadderNorms nn;
    double rel = 0.0;
    try {
      if (noisy && cfg_.scheme == Scheme::SplitRK4Lamperti) {
        // the noise substep is unconditionally stable; only the drift substep drives refinement
        auto p = split_rk4_lamperti_parts(x_, sys_, dW, h);
        rel = sobolev_norm(p.drifted - x_, sys_.ladder().s_F0);
        p.drifted *= p.factor;
        next = detail::checked(std::move(p.drifted), "split_rk4_lamperti_step");
      } else {
        next = scheme_step(cfg_.scheme, x_, sys_, dW, h, noisy);
        rel = sobolev_norm(*next - x_, sys_.ladder().s_F0);
      }
      nn = ladder_norms(*next, sys_.ladder());
    } catch (const NumericError&) {
      next.reset();
    }
    bool split = !next;
    if (next && cfg_.adapt && rel / std::max(norms_.F0, 1e-300) > cfg_.adapt_trigger) split = true;
    bool crosses = false;
    if (next && switching_)
      crosses = regime_ == Regime::Deterministic ? nn.F0 >= L_hi_ : nn.F0 <= L_lo_;
    if (split && 0.5 * h < dt_min_) {
      const double t_fail = static_cast<double>(n) * cfg_.dt + wiener_.node_offset(node);
      terminate(t_fail, next ? std::optional<std::string>("dt_min") : std::nullopt);
      return;
    }
    if (split || (crosses && 0.5 * h >= dt_min_)) {
      ++rec_.refinements;
      pending_flags_ |= kFlagRefined;
      process(n, 2 * node);
      if (!terminated_) process(n, 2 * node + 1);
      return;
    }
    accept(std::move(*next), nn, n, node, h, dW, noisy);
    if (crosses) {
      ControlEvent e;
      e.kind = regime_ == Regime::Deterministic ? EventKind::Tau : EventKind::Rho;
      e.index = tau_count_;
      e.t = t_;
      e.norm = norms_.F0;
      e.level = regime_ == Regime::Deterministic ? L_hi_ : L_lo_;
      e.step_change = last_change_;
      fire(e);
    }
    if (norms_.F0 >= threshold_) {
      terminate(t_, std::string("norm_threshold"));
    } else if (cfg_.resolution_tol > 0.0 &&
               upper_band_fraction(x_, sys_.ladder().s_F0, sys_.cutoff) > cfg_.resolution_tol) {
      terminate(t_, std::string("unresolved"));
    }
  }

  void accept(SpectralField next, const LadderNorms& nn, std::size_t n, std::uint64_t node, double h, double dW,
              bool noisy) {
    if (noisy) {
      const auto sp = sys_.ladder().exponent(energy_space(sys_.noise.case_label));
      const double s2 = sp == sys_.ladder().s_F0 ? norms_.F0 * norms_.F0 : sobolev_norm_sq(x_, sp);
      const double coef = 2.0 * sys_.noise.factor(x_, sys_.ladder()) * s2 / (cfg_.scale_C + s2);
      diag_ = track_martingale(diag_, coef * dW, coef * coef * h, keyed_uniform(rec_.seed, n, node, 3));
    }
    rec_.int_F1sq += 0.5 * h * (norms_.F1 * norms_.F1 + nn.F1 * nn.F1);
    last_change_ = std::abs(nn.F0 - norms_.F0);
    x_ = std::move(next);
    norms_ = nn;
    t_ = static_cast<double>(n) * cfg_.dt + wiener_.node_offset(node) + h;
    ++rec_.accepted_steps;
    observe(x_);
  }

  void observe(const SpectralField& x) {
    rec_.sup_F0_sq = std::max(rec_.sup_F0_sq, norms_.F0 * norms_.F0);
    rec_.sup_D_sq = std::max(rec_.sup_D_sq, norms_.D * norms_.D);
    rec_.min_norm_F0 = std::min(rec_.min_norm_F0, norms_.F0);
    const auto k = sys_.drift.kind;
    if (k == DriftKind::RSW_Viscous || k == DriftKind::RSW_Inviscid) {
      auto h = to_physical(x, 2);
      const double m = *std::min_element(h.begin(), h.end());
      rec_.min_height = std::min(rec_.min_height, m);
      if (m <= 0.0) pending_flags_ |= kFlagPositivity;
    }
  }

  void terminate(double t, std::optional<std::string> blowup_reason) {
    terminated_ = true;
    if (blowup_reason) {
      rec_.blowup = BlowupInfo{t, *blowup_reason};
      pending_flags_ |= kFlagBlowup;
    } else {
      rec_.numeric_failure = "non-finite state at t=" + detail::fmt17(t);
    }
  }

  void push_row() {
    TrajectoryRow r;
    r.t = t_;
    r.norm_G = norms_.G;
    r.norm_F0 = norms_.F0;
    r.norm_F1 = norms_.F1;
    r.norm_D = norms_.D;
    r.int_F1sq = rec_.int_F1sq;
    r.regime = regime_;
    r.M = diag_.M;
    r.QV = diag_.QV;
    r.flags = pending_flags_;
    pending_flags_ = 0;
    rec_.rows.push_back(r);
  }

  SpdeSystem sys_;
  StepperConfig cfg_;
  WienerPath wiener_;
  SpectralField x_;
  LadderNorms norms_;
  Regime regime_;
  MartingaleDiagnostics diag_;
  TrajectoryRecord rec_;
  std::size_t n_ = 0, n_steps_ = 0;
  double t_ = 0.0;
  double dt_min_ = 0.0;
  double threshold_ = 0.0;
  double L_hi_ = std::numeric_limits<double>::infinity();
  double L_lo_ = -std::numeric_limits<double>::infinity();
  bool switching_ = false;
  bool terminated_ = false;
  int tau_count_ = 0;
  double last_change_ = 0.0;
  std::uint32_t pending_flags_ = 0;
};

/// Local solution up to t_end or blow-up. Without a noise spec (or with
/// theta = 0) the path is deterministic and labelled so.
inline TrajectoryRecord integrate_path(const SpectralField& x0, const DriftOperator& drift,
                                       const std::optional<NoiseSpec>& noise, const StepperConfig& cfg, int cutoff,
                                       std::uint64_t seed = 0) {
  SpdeSystem sys{drift, noise.value_or(NoiseSpec{}), cutoff};
  const Regime r = sys.noise.theta != 0.0 ? Regime::Stochastic : Regime::Deterministic;
  PathRunner runner(x0, sys, cfg, seed, r);
  while (runner.step_base()) {
  }
  return runner.finish();
}

}  // namespace stochtame
