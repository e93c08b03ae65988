#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stochtame/noise/martingale.hpp"
#include "stochtame/spectral/spectral_field.hpp"

namespace stochtame {

enum class Regime { Deterministic, Stochastic };

inline const char* to_string(Regime r) { return r == Regime::Deterministic ? "det" : "sto"; }

/// Row flag bits.
enum RowFlag : std::uint32_t {
  kFlagBlowup = 1u,
  kFlagPositivity = 2u,  ///< RSW height <= 0 somewhere on the grid
  kFlagRefined = 4u,     ///< at least one step since the last row was split
  kFlagEvent = 8u,       ///< a control event occurred since the last row
  kFlagEscalation = 16u,
};

struct TrajectoryRow {
  double t = 0.0;
  double norm_G = 0.0, norm_F0 = 0.0, norm_F1 = 0.0, norm_D = 0.0;
  double int_F1sq = 0.0;
  Regime regime = Regime::Deterministic;
  double M = 0.0, QV = 0.0;
  std::uint32_t flags = 0;
};

enum class EventKind { Tau, Rho };

inline const char* to_string(EventKind k) { return k == EventKind::Tau ? "tau" : "rho"; }

/// Switching time; `level` is the threshold in force and `step_change` the
/// norm change over the step that crossed it (the overshoot bound).
struct ControlEvent {
  EventKind kind = EventKind::Tau;
  int index = 0;
  double t = 0.0;
  double norm = 0.0;
  double level = 0.0;
  double step_change = 0.0;
  bool escalated = false;
};

struct Escalation {
  double t = 0.0;
  double new_K = 0.0;
};

struct BlowupInfo {
  double t = 0.0;
  std::string reason;  ///< norm_threshold | dt_min | unresolved
};

struct Snapshot {
  double t = 0.0;
  SpectralField field;
};

struct TrajectoryRecord {
  std::vector<TrajectoryRow> rows;
  std::vector<ControlEvent> events;
  std::vector<Escalation> escalations;
  std::vector<double> envelope_residuals;  ///< one per completed stochastic phase
  std::vector<Snapshot> snapshots;
  std::optional<BlowupInfo> blowup;
  std::optional<std::string> numeric_failure;
  MartingaleDiagnostics martingale;
  double sup_F0_sq = 0.0;
  double sup_D_sq = 0.0;
  double int_F1sq = 0.0;
  double min_norm_F0 = std::numeric_limits<double>::infinity();
  double min_height = std::numeric_limits<double>::infinity();
  std::size_t accepted_steps = 0;
  std::size_t refinements = 0;
  double t_final = 0.0;
  SpectralField final_state;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  bool finalized = false;

  bool survived() const { return !blowup && !numeric_failure; }
};

inline constexpr const char* kTrajectoryHeader = "t,norm_G,norm_F0,norm_F1,norm_D,int_F1sq,regime,M,QV,flags";
inline constexpr const char* kEventsHeader = "kind,index,t,norm";

namespace detail {

inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Provenance comment lines shared by every output file.
inline void write_provenance(std::ostream& os, std::uint64_t config_hash, std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# config_hash=%016" PRIx64 " seed=%" PRIu64 "\n", config_hash, seed);
  os << buf;
}

inline void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& r) {
  using detail::fmt17;
  write_provenance(os, r.config_hash, r.seed);
  if (r.blowup) os << "# blowup t=" << fmt17(r.blowup->t) << " reason=" << r.blowup->reason << "\n";
  if (r.numeric_failure) os << "# numeric_failure " << *r.numeric_failure << "\n";
  os << kTrajectoryHeader << "\n";
  for (const auto& w : r.rows)
    os << fmt17(w.t) << ',' << fmt17(w.norm_G) << ',' << fmt17(w.norm_F0) << ',' << fmt17(w.norm_F1) << ','
       << fmt17(w.norm_D) << ',' << fmt17(w.int_F1sq) << ',' << to_string(w.regime) << ',' << fmt17(w.M) << ','
       << fmt17(w.QV) << ',' << w.flags << "\n";
}

inline void write_events_csv(std::ostream& os, const TrajectoryRecord& r) {
  using detail::fmt17;
  write_provenance(os, r.config_hash, r.seed);
  os << kEventsHeader << "\n";
  for (const auto& e : r.events)
    os << to_string(e.kind) << ',' << e.index << ',' << fmt17(e.t) << ',' << fmt17(e.norm) << "\n";
}

}  // namespace stochtame
