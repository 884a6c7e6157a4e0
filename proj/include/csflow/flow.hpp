#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csflow/geometry.hpp"
#include "csflow/polyline.hpp"
#include "csflow/spectral.hpp"

namespace csflow {

enum class DiffusivityMode {
  kLengthCoupled,  // diffusivity 1/L(X^n)^2, re-read every step
  kFrozen,         // diffusivity fixed at 1/L_ref^2 (plain heat flow)
};

struct FlowConfig {
  double h = 1e-4;
  std::size_t samples = 512;
  double max_time = 10.0;
  double extinction_frac = 1e-3;
  std::size_t record_every = 10;
  DiffusivityMode diffusivity = DiffusivityMode::kLengthCoupled;
  // Reference length for kFrozen; the initial length when unset.
  std::optional<double> frozen_length;
  double event_drop_threshold = std::numbers::pi / 2;
  // Snapshot every this many records (0: only first, last and event frames).
  std::size_t snapshot_every = 1;

  void validate() const {
    if (!(h > 0.0)) throw GeometryError("FlowConfig: h must be > 0");
    if (samples < 8 || samples % 2 != 0) throw GeometryError("FlowConfig: N must be even and >= 8");
    if (!(max_time >= 0.0)) throw GeometryError("FlowConfig: max_time must be >= 0");
    if (!(extinction_frac > 0.0 && extinction_frac < 1.0)) {
      throw GeometryError("FlowConfig: extinction_frac must lie in (0, 1)");
    }
    if (record_every == 0) throw GeometryError("FlowConfig: record_every must be >= 1");
    if (!(event_drop_threshold > 0.0)) throw GeometryError("FlowConfig: event threshold must be > 0");
    if (frozen_length && !(*frozen_length > 0.0)) throw GeometryError("FlowConfig: frozen length must be > 0");
  }
};

template <int Dim>
struct FlowState {
  ClosedPolyline<Dim> curve;
  double t = 0.0;
  std::size_t k = 0;
  double length = 0.0;
  double initial_length = 0.0;
};

template <int Dim>
FlowState<Dim> initial_state(const ClosedPolyline<Dim>& curve) {
  const double len = polygon_length(curve);
  return FlowState<Dim>{curve, 0.0, 0, len, len};
}

/// X^{n+1} = F^{-1} exp(h D_N^2 / L^2) F R_N(X^n).
///
/// Throws CollapseError when every new sample lies within 1e-14 L_0 of the
/// sample centroid.
template <int Dim>
FlowState<Dim> step(const FlowState<Dim>& state, const FlowConfig& cfg) {
  if (!(state.length > 0.0)) throw GeometryError("step: state length must be positive");
  const auto resampled = resample_points(state.curve, cfg.samples);
  const double diffusion_length = cfg.diffusivity == DiffusivityMode::kFrozen
                                      ? cfg.frozen_length.value_or(state.initial_length)
                                      : state.length;
  auto next = heat_step<Dim>(resampled, cfg.h, diffusion_length);

  Point<Dim> centroid = Point<Dim>::Zero();
  for (const auto& p : next) centroid += p;
  centroid /= static_cast<double>(next.size());
  double spread = 0.0;
  for (const auto& p : next) spread = std::max(spread, (p - centroid).norm());
  if (spread <= kDegenerateEdgeTol * state.initial_length) {
    throw CollapseError("step: curve collapsed to a point at t = " +
                        std::to_string(static_cast<double>(state.k + 1) * cfg.h));
  }

  std::optional<ClosedPolyline<Dim>> curve;
  try {
    curve.emplace(std::move(next));
  } catch (const GeometryError&) {
    throw CollapseError("step: fewer than 3 distinct samples remain");
  }
  const double len = polygon_length(*curve);
  const std::size_t k = state.k + 1;
  return FlowState<Dim>{std::move(*curve), static_cast<double>(k) * cfg.h, k, len, state.initial_length};
}

struct Record {
  double t = 0.0;
  std::size_t step = 0;
  double length = 0.0;
  double kappa = 0.0;
  double area = std::numeric_limits<double>::quiet_NaN();
  double aspect = std::numeric_limits<double>::quiet_NaN();
  int extremity = 0;
  // L_k / L_{k-1} of the step that produced this record; NaN for t = 0.
  double step_ratio = std::numeric_limits<double>::quiet_NaN();
};

template <int Dim>
struct Snapshot {
  double t = 0.0;
  std::size_t step = 0;
  ClosedPolyline<Dim> curve;
};

struct SingularEvent {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double drop = 0.0;
  long cusp_estimate = 0;
};

enum class Termination { kMaxTime, kExtinction, kCollapse };

inline std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::kMaxTime: return "max_time";
    case Termination::kExtinction: return "extinction";
    case Termination::kCollapse: return "collapse";
  }
  return "unknown";
}

template <int Dim>
struct Trajectory {
  std::vector<Record> records;
  std::vector<Snapshot<Dim>> snapshots;
  std::vector<SingularEvent> events;
  Termination termination = Termination::kMaxTime;
  double initial_length = 0.0;
};

template <int Dim>
Record make_record(const FlowState<Dim>& state, double step_ratio) {
  Record r;
  r.t = state.t;
  r.step = state.k;
  r.length = state.length;
  r.kappa = turning_total_curvature(state.curve);
  r.extremity = extremity_count(state.curve);
  r.step_ratio = step_ratio;
  if constexpr (Dim == 2) {
    r.area = signed_area(state.curve);
    try {
      r.aspect = aspect_ratio(state.curve);
    } catch (const DegenerateAspectError&) {
      r.aspect = std::numeric_limits<double>::infinity();
    }
  }
  return r;
}

/// Groups consecutive record-to-record drops of the turning curvature above
/// `threshold` into event windows.
inline std::vector<SingularEvent> detect_events(std::span<const double> times, std::span<const double> kappa,
                                                double threshold) {
  if (times.size() != kappa.size()) throw GeometryError("detect_events: series length mismatch");
  if (times.size() < 2) throw GeometryError("detect_events: need at least 2 records");
  std::vector<SingularEvent> events;
  std::optional<SingularEvent> open;
  for (std::size_t i = 0; i + 1 < kappa.size(); ++i) {
    const double drop = kappa[i] - kappa[i + 1];
    if (drop > threshold) {
      if (!open) open = SingularEvent{times[i], times[i + 1], 0.0, 0};
      open->t_hi = times[i + 1];
      open->drop += drop;
    } else if (open) {
      events.push_back(*open);
      open.reset();
    }
  }
  if (open) events.push_back(*open);
  for (auto& e : events) e.cusp_estimate = std::lround(e.drop / std::numbers::pi);
  return events;
}

inline std::vector<SingularEvent> detect_events(std::span<const Record> records, double threshold) {
  std::vector<double> t, kappa;
  t.reserve(records.size());
  kappa.reserve(records.size());
  for (const auto& r : records) {
    t.push_back(r.t);
    kappa.push_back(r.kappa);
  }
  return detect_events(t, kappa, threshold);
}

namespace detail {

inline bool reached_time(std::size_t k, const FlowConfig& cfg) {
  return static_cast<double>(k) * cfg.h >= cfg.max_time - 1e-9 * cfg.h;
}

}  // namespace detail

/// Iterates step() from `initial` until max_time, extinction
/// (L < extinction_frac * L_0) or collapse, recording diagnostics every
/// record_every steps plus the first and last states.
template <int Dim>
Trajectory<Dim> run(const ClosedPolyline<Dim>& initial, const FlowConfig& cfg) {
  cfg.validate();
  Trajectory<Dim> traj;
  auto state = initial_state(initial);
  traj.initial_length = state.length;
  const double extinct_below = cfg.extinction_frac * state.length;

  auto add_snapshot = [&traj](const FlowState<Dim>& s) {
    if (!traj.snapshots.empty() && traj.snapshots.back().step == s.k) return;
    traj.snapshots.push_back(Snapshot<Dim>{s.t, s.k, s.curve});
  };

  traj.records.push_back(make_record(state, std::numeric_limits<double>::quiet_NaN()));
  add_snapshot(state);
  FlowState<Dim> last_recorded = state;

  auto record = [&](const FlowState<Dim>& s, double ratio) {
    traj.records.push_back(make_record(s, ratio));
    const auto& prev = traj.records[traj.records.size() - 2];
    const bool dropped = prev.kappa - traj.records.back().kappa > cfg.event_drop_threshold;
    if (dropped) add_snapshot(last_recorded);
    const std::size_t index = traj.records.size() - 1;
    if (dropped || (cfg.snapshot_every > 0 && index % cfg.snapshot_every == 0)) add_snapshot(s);
    last_recorded = s;
  };

  double last_ratio = std::numeric_limits<double>::quiet_NaN();
  bool collapsed = false;
  while (!detail::reached_time(state.k, cfg) && state.length >= extinct_below) {
    try {
      auto next = step(state, cfg);
      last_ratio = next.length / state.length;
      state = std::move(next);
    } catch (const CollapseError&) {
      collapsed = true;
      break;
    }
    if (state.k % cfg.record_every == 0) record(state, last_ratio);
  }

  if (collapsed) {
    traj.termination = Termination::kCollapse;
  } else if (state.length < extinct_below) {
    traj.termination = Termination::kExtinction;
  } else {
    traj.termination = Termination::kMaxTime;
  }
  if (traj.records.back().step != state.k) record(state, last_ratio);
  add_snapshot(state);

  if (traj.records.size() >= 2) traj.events = detect_events(traj.records, cfg.event_drop_threshold);
  return traj;
}

/// |L_h(t_probe) - L_{h/2}(t_probe)| / L_0 for the given configuration.
template <int Dim>
double self_convergence(const ClosedPolyline<Dim>& initial, const FlowConfig& cfg, double t_probe) {
  auto length_at = [&](double h) {
    FlowConfig c = cfg;
    c.h = h;
    c.max_time = t_probe;
    c.record_every = std::numeric_limits<std::size_t>::max();
    c.snapshot_every = 0;
    const auto traj = run(initial, c);
    if (traj.termination != Termination::kMaxTime) {
      throw CollapseError("self_convergence: run ended before t_probe (" +
                          std::string(to_string(traj.termination)) + ")");
    }
    return traj.records.back().length;
  };
  const double l0 = polygon_length(initial);
  return std::abs(length_at(cfg.h) - length_at(cfg.h / 2)) / l0;
}

}  // namespace csflow
