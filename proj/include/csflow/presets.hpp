#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csflow/diagnostics.hpp"
#include "csflow/flow.hpp"
#include "csflow/geometry.hpp"
#include "csflow/shapes.hpp"

namespace csflow {

/// A named diagnostic with its target. How `expected` and `tolerance`
/// combine into pass/fail depends on the check; `param` is an extra
/// check-specific argument (a time bound or an event index).
struct CheckSpec {
  std::string name;
  double expected = 0.0;
  double tolerance = 0.0;
  double param = std::numeric_limits<double>::quiet_NaN();
};

struct CheckResult {
  std::string name;
  double value = std::numeric_limits<double>::quiet_NaN();
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExperimentPreset {
  std::string name;
  ShapeSpec shape;
  FlowConfig config;
  std::vector<CheckSpec> checks;
};

inline const std::vector<std::string_view>& known_checks() {
  static const std::vector<std::string_view> names = {
      "length_monotone", "kappa_monotone", "extinction_time",  "circle_law",
      "circle_recursion", "initial_kappa", "event_count",      "event_window",
      "event_cusps",     "event_drop",     "dcs_first_step",   "dcs_series",
      "signed_area_zero", "aspect_final",  "dcs_limit",        "isoperimetric_final",
      "terminated_by_extinction", "max_event_drop", "area_rate",
  };
  return names;
}

inline const std::vector<ExperimentPreset>& preset_catalog() {
  constexpr double pi = std::numbers::pi;
  static const std::vector<ExperimentPreset> catalog = [] {
    const std::vector<CheckSpec> monotone = {{"length_monotone", 0.0, 1e-9}, {"kappa_monotone", 0.0, 1e-3}};
    auto with_monotone = [&](std::vector<CheckSpec> extra) {
      std::vector<CheckSpec> all = monotone;
      all.insert(all.end(), extra.begin(), extra.end());
      return all;
    };
    auto config = [](double h, std::size_t n, double max_time, std::size_t record_every, std::size_t snapshot_every) {
      FlowConfig c;
      c.h = h;
      c.samples = n;
      c.max_time = max_time;
      c.record_every = record_every;
      c.snapshot_every = snapshot_every;
      return c;
    };
    auto shape = [](ShapeKind kind, std::size_t samples, std::map<std::string, double, std::less<>> params = {}) {
      return ShapeSpec{kind, std::move(params), samples};
    };

    FlowConfig frozen = config(1e-4, 512, 1.0, 10, 100);
    frozen.diffusivity = DiffusivityMode::kFrozen;

    return std::vector<ExperimentPreset>{
        {"circle", shape(ShapeKind::kCircle, 256), config(1e-5, 256, 1.0, 10, 500),
         with_monotone({{"circle_law", 2.0 * pi, 1e-3, 0.45},
                        {"circle_recursion", 0.0, 1e-7},
                        {"extinction_time", 0.5, 0.01}})},
        {"nfold2", shape(ShapeKind::kNfoldCircle, 512, {{"n", 2.0}}), config(1e-4, 512, 1.0, 10, 100),
         with_monotone({{"initial_kappa", 4.0 * pi, 1e-3}, {"extinction_time", 0.5, 0.01}})},
        {"ellipse", shape(ShapeKind::kEllipse, 512, {{"a", 1.0}, {"b", 0.5}}), config(1e-5, 512, 1.0, 10, 500),
         with_monotone({{"area_rate", -2.0 * pi, 0.02}, {"extinction_time", 0.25, 0.01}})},
        {"square", shape(ShapeKind::kSquare, 512), config(1e-4, 512, 1.0, 10, 50),
         with_monotone({{"extinction_time", 1.0 / (2.0 * pi), 0.01}})},
        {"dcs", shape(ShapeKind::kDcsSmooth, 512, {{"length", 2.0}}), config(1e-3, 512, 1.0, 1, 1),
         with_monotone({{"dcs_first_step", 0.25, 1e-9}, {"dcs_series", 0.0, 1e-4}})},
        {"infinity_xy", shape(ShapeKind::kInfinityXY, 512), config(1e-4, 512, 1.0, 10, 50),
         with_monotone({{"signed_area_zero", 0.0, 1e-8},
                        {"aspect_final", 0.0, 0.2, 0.1},
                        {"dcs_limit", 0.0, 0.05}})},
        {"infinity_y", shape(ShapeKind::kInfinityY, 512), config(1e-4, 512, 1.0, 10, 50),
         with_monotone({{"signed_area_zero", 0.0, 1e-8}})},
        {"infinity_central", shape(ShapeKind::kInfinityCentral, 512), config(1e-4, 512, 1.0, 10, 50),
         with_monotone({{"signed_area_zero", 0.0, 1e-8}})},
        {"infinity_perturbed", shape(ShapeKind::kInfinityPerturbed, 512), config(1e-4, 512, 1.0, 10, 50),
         with_monotone({{"terminated_by_extinction", 1.0, 0.0}, {"isoperimetric_final", 1.0, 0.05}})},
        {"convoluted", shape(ShapeKind::kConvoluted, 1024), config(1e-5, 1024, 2.0, 10, 500),
         with_monotone({{"event_count", 2.0, 0.0},
                        {"event_window", 0.285, 0.035, 1},
                        {"event_window", 0.54, 0.04, 2},
                        {"event_cusps", 4.0, 0.0, 1},
                        {"event_cusps", 2.0, 0.0, 2},
                        {"event_drop", 4.0 * pi, 0.5, 1},
                        {"event_drop", 2.0 * pi, 0.5, 2}})},
        {"lindiff", shape(ShapeKind::kTwoCircleInfinity, 512), frozen,
         with_monotone({{"max_event_drop", pi / 2.0, 0.0}})},
    };
  }();
  return catalog;
}

inline std::optional<ExperimentPreset> find_preset(std::string_view name) {
  for (const auto& p : preset_catalog()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : preset_catalog()) names.push_back(p.name);
  return names;
}

/// Largest increase L_{i+1} - L_i between consecutive records, relative to L_0.
inline double max_length_increase(std::span<const Record> records) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    worst = std::max(worst, (records[i + 1].length - records[i].length) / records.front().length);
  }
  return records.size() < 2 ? 0.0 : worst;
}

/// Largest increase of the turning curvature between consecutive records
/// whose interval does not touch a detected event window.
inline double max_kappa_increase(std::span<const Record> records, std::span<const SingularEvent> events) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const double lo = records[i].t;
    const double hi = records[i + 1].t;
    const bool in_event = std::any_of(events.begin(), events.end(),
                                      [&](const SingularEvent& e) { return lo <= e.t_hi && e.t_lo <= hi; });
    if (!in_event) worst = std::max(worst, records[i + 1].kappa - records[i].kappa);
  }
  return records.size() < 2 ? 0.0 : worst;
}

/// Central-difference dA/dt over the middle third of the records.
inline std::vector<double> area_rates(std::span<const Record> records) {
  std::vector<double> rates;
  const std::size_t n = records.size();
  for (std::size_t i = std::max<std::size_t>(1, n / 3); i < 2 * n / 3 && i + 1 < n; ++i) {
    rates.push_back((records[i + 1].area - records[i - 1].area) / (records[i + 1].t - records[i - 1].t));
  }
  return rates;
}

inline CheckResult evaluate_check(const CheckSpec& spec, const Trajectory<2>& traj, const FlowConfig& cfg) {
  CheckResult res{spec.name, std::numeric_limits<double>::quiet_NaN(), spec.expected, spec.tolerance, false};
  const auto& recs = traj.records;
  const double l0 = traj.initial_length;
  const auto& name = spec.name;

  auto event_at = [&](double index) -> const SingularEvent* {
    const auto i = static_cast<std::size_t>(index);
    if (!(index >= 1.0) || i > traj.events.size()) return nullptr;
    return &traj.events[i - 1];
  };

  if (name == "length_monotone") {
    res.value = max_length_increase(recs);
    res.pass = res.value <= spec.tolerance;
  } else if (name == "kappa_monotone") {
    res.value = max_kappa_increase(recs, traj.events);
    res.pass = res.value <= spec.tolerance;
  } else if (name == "extinction_time") {
    res.value = recs.back().t;
    res.pass = traj.termination != Termination::kMaxTime && std::abs(res.value - spec.expected) <= spec.tolerance;
  } else if (name == "circle_law") {
    const CircleLaw law(spec.expected);
    double worst = 0.0;
    for (const auto& r : recs) {
      if (r.t > spec.param || r.t >= law.extinction_time()) break;
      worst = std::max(worst, std::abs(r.length - circle_length(law, r.t)) / spec.expected);
    }
    res.value = worst;
    res.pass = worst < spec.tolerance;
  } else if (name == "circle_recursion") {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
      const auto steps = std::lround((recs[i + 1].t - recs[i].t) / cfg.h);
      double predicted = recs[i].length;
      for (long s = 0; s < steps && predicted > 0.0; ++s) predicted = circle_recursion(predicted, cfg.h);
      worst = std::max(worst, std::abs(recs[i + 1].length - predicted) / recs[i + 1].length);
    }
    res.value = worst;
    res.pass = worst <= spec.tolerance;
  } else if (name == "initial_kappa") {
    res.value = recs.front().kappa;
    res.pass = std::abs(res.value - spec.expected) <= spec.tolerance;
  } else if (name == "event_count") {
    res.value = static_cast<double>(traj.events.size());
    res.pass = res.value == spec.expected;
  } else if (name == "event_window") {
    if (const auto* e = event_at(spec.param)) {
      res.value = 0.5 * (e->t_lo + e->t_hi);
      res.pass = e->t_lo <= spec.expected + spec.tolerance && spec.expected - spec.tolerance <= e->t_hi;
    }
  } else if (name == "event_cusps") {
    if (const auto* e = event_at(spec.param)) {
      res.value = static_cast<double>(e->cusp_estimate);
      res.pass = res.value == spec.expected;
    }
  } else if (name == "event_drop") {
    if (const auto* e = event_at(spec.param)) {
      res.value = e->drop;
      res.pass = std::abs(e->drop - spec.expected) <= spec.tolerance;
    }
  } else if (name == "dcs_first_step" || name == "dcs_series") {
    const auto first = std::find_if(recs.begin(), recs.end(), [&](const Record& r) {
      return std::lround(r.t / cfg.h) == 1;
    });
    if (first != recs.end()) {
      if (name == "dcs_first_step") {
        res.value = first->length / l0;
        res.pass = first->length <= spec.expected * l0 + spec.tolerance;
      } else {
        const double series = dcs_first_step_length(l0, cfg.h, 101);
        res.value = std::abs(first->length - series) / series;
        res.pass = res.value <= spec.tolerance;
      }
    }
  } else if (name == "signed_area_zero") {
    double worst = 0.0;
    for (const auto& r : recs) worst = std::max(worst, std::abs(r.area) / (l0 * l0));
    res.value = worst;
    res.pass = worst < spec.tolerance;
  } else if (name == "aspect_final") {
    const double t_end = recs.back().t;
    double worst = 0.0;
    for (const auto& r : recs) {
      if (r.t >= (1.0 - spec.param) * t_end) worst = std::max(worst, r.aspect);
    }
    res.value = worst;
    res.pass = worst < spec.tolerance;
  } else if (name == "dcs_limit") {
    if (!traj.snapshots.empty()) {
      res.value = compare_to_dcs_limit(recenter_rescale(traj.snapshots.back().curve));
      res.pass = res.value < spec.tolerance;
    }
  } else if (name == "isoperimetric_final") {
    const auto& r = recs.back();
    if (std::abs(r.area) > 1e-12 * r.length * r.length) {
      res.value = r.length * r.length / (4.0 * std::numbers::pi * std::abs(r.area));
      res.pass = res.value < spec.expected + spec.tolerance;
    }
  } else if (name == "terminated_by_extinction") {
    res.value = traj.termination == Termination::kExtinction ? 1.0 : 0.0;
    res.pass = res.value == spec.expected;
  } else if (name == "max_event_drop") {
    double best = 0.0;
    for (const auto& e : traj.events) best = std::max(best, e.drop);
    res.value = best;
    res.pass = best >= spec.expected;
  } else if (name == "area_rate") {
    const auto rates = area_rates(recs);
    double worst = rates.empty() ? std::numeric_limits<double>::infinity() : 0.0;
    for (double r : rates) worst = std::max(worst, std::abs(r - spec.expected) / std::abs(spec.expected));
    res.value = worst;
    res.pass = worst <= spec.tolerance;
  } else {
    throw GeometryError("unknown check '" + name + "'");
  }
  return res;
}

inline std::vector<CheckResult> evaluate_checks(std::span<const CheckSpec> checks, const Trajectory<2>& traj,
                                                const FlowConfig& cfg) {
  std::vector<CheckResult> out;
  out.reserve(checks.size());
  for (const auto& c : checks) out.push_back(evaluate_check(c, traj, cfg));
  return out;
}

}  // namespace csflow
