#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "csflow/csflow.hpp"

namespace csflow::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kNumericalFailure = 1, kUsageError = 2, kCheckFailure = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kDefaultOutDir = "csflow_out";
inline constexpr const char* kRunInfoFile = "run_info.json";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kSweepSummaryFile = "sweep_summary.csv";

inline std::string default_out_dir() {
  if (const char* env = std::getenv("CSFLOW_OUT"); env != nullptr && *env != '\0') return env;
  return kDefaultOutDir;
}

/// Flags shared by run, analyze and sweep.
struct ExperimentOptions {
  std::string preset;
  std::string shape;
  std::vector<std::string> params;
  std::optional<double> h;
  std::optional<std::size_t> n;
  std::optional<double> tmax;
  std::optional<std::size_t> record_every;
  std::optional<std::size_t> snapshot_every;
  bool frozen = false;
  bool rescaled = false;
  bool svg = false;
  bool seedless = false;
  std::string out;
};

struct Experiment {
  std::string preset;  // empty for ad-hoc shapes
  ShapeSpec shape;
  FlowConfig config;
  std::vector<CheckSpec> checks;
};

inline void add_experiment_options(CLI::App& app, ExperimentOptions& o) {
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  auto* preset = app.add_option("--preset", o.preset, "named experiment");
  auto* shape = app.add_option("--shape", o.shape, "initial curve kind");
  preset->excludes(shape);
  app.add_option("--param", o.params, "shape parameter key=value (repeatable)");
  app.add_option("--h", o.h, "time step");
  app.add_option("--n", o.n, "samples per step");
  app.add_option("--tmax", o.tmax, "final time");
  app.add_option("--record-every", o.record_every, "steps between records");
  app.add_option("--snapshot-every", o.snapshot_every, "records between snapshots (0: first, last and events)");
  app.add_flag("--frozen-diffusivity", o.frozen, "diffusivity fixed at 1/L0^2");
  app.add_flag("--rescaled", o.rescaled, "recenter and rescale to unit length before drawing SVG");
  app.add_flag("--svg", o.svg, "also write snapshot_*.svg");
  app.add_flag("--seedless", o.seedless, "reserved");
  app.add_option("--out", o.out, "output directory");
}

inline std::pair<std::string, double> parse_param(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
  const std::string value = kv.substr(eq + 1);
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return {kv.substr(0, eq), v};
  } catch (const std::exception&) {
    throw UsageError("--param value is not a number: '" + kv + "'");
  }
}

/// Builds the experiment from the preset (or shape) and flag overrides.
inline Experiment resolve_experiment(const ExperimentOptions& o) {
  if (o.seedless) throw UsageError("--seedless is reserved: the solver has no randomness");
  Experiment ex;
  if (!o.preset.empty()) {
    const auto preset = find_preset(o.preset);
    if (!preset) throw UsageError("unknown preset '" + o.preset + "'");
    ex = Experiment{preset->name, preset->shape, preset->config, preset->checks};
  } else if (!o.shape.empty()) {
    const auto kind = parse_shape_kind(o.shape);
    if (!kind) throw UsageError("unknown shape '" + o.shape + "'");
    ex.shape.kind = *kind;
    ex.checks = {{"length_monotone", 0.0, 1e-9}, {"kappa_monotone", 0.0, 1e-3}};
  } else {
    throw UsageError("one of --preset or --shape is required");
  }
  for (const auto& kv : o.params) {
    const auto [key, value] = parse_param(kv);
    ex.shape.params[key] = value;
  }
  if (o.h) ex.config.h = *o.h;
  if (o.n) {
    ex.config.samples = *o.n;
    ex.shape.samples = *o.n;
  }
  if (o.tmax) ex.config.max_time = *o.tmax;
  if (o.record_every) ex.config.record_every = *o.record_every;
  if (o.snapshot_every) ex.config.snapshot_every = *o.snapshot_every;
  if (o.frozen) ex.config.diffusivity = DiffusivityMode::kFrozen;
  try {
    ex.shape.validate();
    ex.config.validate();
  } catch (const GeometryError& e) {
    throw UsageError(e.what());
  }
  return ex;
}

inline json to_json(const CheckSpec& c) {
  json j = {{"name", c.name}, {"expected", c.expected}, {"tolerance", c.tolerance}};
  if (!std::isnan(c.param)) j["param"] = c.param;
  return j;
}

inline json to_json(const Experiment& ex) {
  json params = json::object();
  for (const auto& [k, v] : ex.shape.params) params[k] = v;
  json checks = json::array();
  for (const auto& c : ex.checks) checks.push_back(to_json(c));
  json config = {{"h", ex.config.h},
                 {"n", ex.config.samples},
                 {"tmax", ex.config.max_time},
                 {"extinction_frac", ex.config.extinction_frac},
                 {"record_every", ex.config.record_every},
                 {"snapshot_every", ex.config.snapshot_every},
                 {"frozen_diffusivity", ex.config.diffusivity == DiffusivityMode::kFrozen},
                 {"event_threshold", ex.config.event_drop_threshold}};
  if (ex.config.frozen_length) config["frozen_length"] = *ex.config.frozen_length;
  return {{"preset", ex.preset},
          {"shape", {{"kind", std::string(to_string(ex.shape.kind))}, {"samples", ex.shape.samples}, {"params", params}}},
          {"config", config},
          {"checks", checks}};
}

inline Experiment experiment_from_json(const json& j) {
  Experiment ex;
  ex.preset = j.at("preset").get<std::string>();
  const auto kind = parse_shape_kind(j.at("shape").at("kind").get<std::string>());
  if (!kind) throw io::FormatError("unknown shape kind in run info");
  ex.shape.kind = *kind;
  ex.shape.samples = j.at("shape").at("samples").get<std::size_t>();
  for (const auto& [k, v] : j.at("shape").at("params").items()) ex.shape.params[k] = v.get<double>();
  const auto& c = j.at("config");
  ex.config.h = c.at("h").get<double>();
  ex.config.samples = c.at("n").get<std::size_t>();
  ex.config.max_time = c.at("tmax").get<double>();
  ex.config.extinction_frac = c.at("extinction_frac").get<double>();
  ex.config.record_every = c.at("record_every").get<std::size_t>();
  ex.config.snapshot_every = c.at("snapshot_every").get<std::size_t>();
  ex.config.diffusivity = c.at("frozen_diffusivity").get<bool>() ? DiffusivityMode::kFrozen
                                                                 : DiffusivityMode::kLengthCoupled;
  ex.config.event_drop_threshold = c.at("event_threshold").get<double>();
  if (c.contains("frozen_length")) ex.config.frozen_length = c.at("frozen_length").get<double>();
  for (const auto& cj : j.at("checks")) {
    CheckSpec spec{cj.at("name").get<std::string>(), cj.at("expected").get<double>(), cj.at("tolerance").get<double>()};
    if (cj.contains("param")) spec.param = cj.at("param").get<double>();
    ex.checks.push_back(spec);
  }
  return ex;
}

inline Termination parse_termination(const std::string& s) {
  for (auto t : {Termination::kMaxTime, Termination::kExtinction, Termination::kCollapse}) {
    if (to_string(t) == s) return t;
  }
  throw io::FormatError("unknown termination '" + s + "'");
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io::FormatError("cannot write " + path.string());
  os << text;
}

/// Writes every output file of a finished run into `dir`.
inline void write_run(const fs::path& dir, const Experiment& ex, const Trajectory<2>& traj, bool svg,
                      bool rescaled) {
  fs::create_directories(dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("snapshot_")) fs::remove(entry.path());
  }
  {
    std::ofstream os(dir / "trajectory.csv", std::ios::binary);
    io::write_trajectory_csv(os, traj.records);
  }
  {
    std::ofstream os(dir / "events.csv", std::ios::binary);
    io::write_events_csv(os, traj.events);
  }
  for (const auto& snap : traj.snapshots) {
    std::ofstream os(dir / io::snapshot_filename(snap.step), std::ios::binary);
    io::write_snapshot_csv(os, snap.curve);
    if (svg) {
      std::ofstream svg_os(dir / io::snapshot_filename(snap.step, "svg"), std::ios::binary);
      io::write_snapshot_svg(svg_os, rescaled ? recenter_rescale(snap.curve) : snap.curve, snap.t);
    }
  }
  json info = to_json(ex);
  info["termination"] = std::string(to_string(traj.termination));
  info["initial_length"] = traj.initial_length;
  info["final_t"] = traj.records.back().t;
  info["final_length"] = traj.records.back().length;
  info["events"] = traj.events.size();
  write_text(dir / kRunInfoFile, info.dump(2) + "\n");
}

/// Reconstructs the trajectory of a prior run from its output directory.
/// Only the first and last snapshots are loaded.
inline std::pair<Experiment, Trajectory<2>> load_run(const fs::path& dir) {
  const auto info_path = dir / kRunInfoFile;
  if (!fs::is_regular_file(info_path)) throw UsageError("no " + std::string(kRunInfoFile) + " in " + dir.string());
  std::ifstream is(info_path);
  json info;
  try {
    info = json::parse(is);
  } catch (const json::exception& e) {
    throw io::FormatError(std::string("bad run info: ") + e.what());
  }
  Experiment ex;
  Trajectory<2> traj;
  try {
    ex = experiment_from_json(info);
    traj.termination = parse_termination(info.at("termination").get<std::string>());
  } catch (const json::exception& e) {
    throw io::FormatError(std::string("bad run info: ") + e.what());
  }
  traj.records = io::read_trajectory_csv(dir / "trajectory.csv");
  if (traj.records.empty()) throw io::FormatError("trajectory.csv has no rows");
  traj.initial_length = traj.records.front().length;
  traj.events = io::read_events_csv(dir / "events.csv");

  std::vector<fs::path> snaps;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("snapshot_") && entry.path().extension() == ".csv") snaps.push_back(entry.path());
  }
  std::sort(snaps.begin(), snaps.end());
  auto load = [&](const fs::path& p) {
    const auto stem = p.stem().string();
    const auto step = static_cast<std::size_t>(std::stoull(stem.substr(stem.find('_') + 1)));
    traj.snapshots.push_back(Snapshot<2>{static_cast<double>(step) * ex.config.h, step, io::read_snapshot_csv<2>(p)});
  };
  if (!snaps.empty()) {
    load(snaps.front());
    if (snaps.size() > 1) load(snaps.back());
  }
  return {ex, traj};
}

/// Report key: event checks carry their 1-based event index.
inline std::string check_key(const CheckSpec& c) {
  if (c.name.starts_with("event_") && c.name != "event_count" && !std::isnan(c.param)) {
    return c.name + "_" + std::to_string(std::lround(c.param));
  }
  return c.name;
}

inline json report_json(std::span<const CheckSpec> specs, std::span<const CheckResult> results) {
  json report = json::object();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    report[check_key(specs[i])] = {
        {"value", r.value}, {"expected", r.expected}, {"tolerance", r.tolerance}, {"pass", r.pass}};
  }
  return report;
}

inline std::string summary_line(const Trajectory<2>& traj) {
  return "termination=" + std::string(to_string(traj.termination)) + " t=" + io::fmt(traj.records.back().t) +
         " L=" + io::fmt(traj.records.back().length) + " events=" + std::to_string(traj.events.size());
}

inline fs::path out_dir(const ExperimentOptions& o) { return o.out.empty() ? fs::path(default_out_dir()) : fs::path(o.out); }

inline int cmd_run(const ExperimentOptions& o, std::ostream& out) {
  const auto ex = resolve_experiment(o);
  const auto traj = run(generate(ex.shape), ex.config);
  write_run(out_dir(o), ex, traj, o.svg, o.rescaled);
  out << summary_line(traj) << '\n';
  if (traj.termination == Termination::kCollapse && traj.records.size() < 2) return kNumericalFailure;
  return kOk;
}

inline int cmd_analyze(const ExperimentOptions& o, std::ostream& out) {
  const fs::path dir = out_dir(o);
  Experiment ex;
  Trajectory<2> traj;
  if (!o.preset.empty() || !o.shape.empty()) {
    ex = resolve_experiment(o);
    traj = run(generate(ex.shape), ex.config);
    write_run(dir, ex, traj, o.svg, o.rescaled);
  } else {
    if (o.out.empty()) throw UsageError("analyze needs --out DIR from a prior run, or --preset");
    std::tie(ex, traj) = load_run(dir);
  }
  const auto results = evaluate_checks(ex.checks, traj, ex.config);
  write_text(dir / kReportFile, report_json(ex.checks, results).dump(2) + "\n");
  bool all = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    all = all && r.pass;
    out << (r.pass ? "PASS " : "FAIL ") << check_key(ex.checks[i]) << " value=" << io::fmt(r.value)
        << " expected=" << io::fmt(r.expected) << " tol=" << io::fmt(r.tolerance) << '\n';
  }
  return all ? kOk : kCheckFailure;
}

struct SweepGrid {
  std::string key;  // "h" or "n"
  std::vector<double> values;
};

inline SweepGrid parse_grid(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("--grid expects key=v1,v2,..., got '" + text + "'");
  SweepGrid grid{text.substr(0, eq), {}};
  if (grid.key != "h" && grid.key != "n") throw UsageError("--grid key must be h or n");
  std::string rest = text.substr(eq + 1);
  std::stringstream ss(rest);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    try {
      grid.values.push_back(io::detail::to_double(cell));
    } catch (const io::FormatError& e) {
      throw UsageError(e.what());
    }
  }
  if (grid.values.empty()) throw UsageError("sweep grid is empty");
  return grid;
}

inline std::string sweep_header() {
  return "key,value,status,termination,final_t,final_length,events,length_at_probe,error";
}

inline int cmd_sweep(const ExperimentOptions& o, const std::string& grid_text, std::optional<double> probe,
                     std::ostream& out) {
  if (o.preset.empty() && o.shape.empty()) throw UsageError("sweep needs --preset or --shape");
  const auto grid = parse_grid(grid_text);
  const fs::path dir = out_dir(o);
  fs::create_directories(dir);

  std::vector<Experiment> points;
  for (double v : grid.values) {
    ExperimentOptions po = o;
    if (grid.key == "h") {
      po.h = v;
    } else {
      if (!(v >= 8.0) || v != std::floor(v)) throw UsageError("n values must be integers >= 8");
      po.n = static_cast<std::size_t>(v);
    }
    points.push_back(resolve_experiment(po));
  }

  std::string summary = sweep_header() + "\n";
  bool all_ran = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& ex = points[i];
    const double v = grid.values[i];
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03zu", grid.key.c_str(), i);
    std::string row = grid.key + "," + io::fmt(v) + ",";
    try {
      const auto initial = generate(ex.shape);
      const auto traj = run(initial, ex.config);
      write_run(dir / name, ex, traj, o.svg, o.rescaled);
      std::string at_probe;
      if (probe) {
        FlowConfig pc = ex.config;
        pc.max_time = *probe;
        pc.record_every = std::numeric_limits<std::size_t>::max();
        pc.snapshot_every = 0;
        const auto pt = run(initial, pc);
        if (pt.termination == Termination::kMaxTime) at_probe = io::fmt(pt.records.back().length);
      }
      row += "ok," + std::string(to_string(traj.termination)) + "," + io::fmt(traj.records.back().t) + "," +
             io::fmt(traj.records.back().length) + "," + std::to_string(traj.events.size()) + "," + at_probe + ",";
      out << name << ' ' << summary_line(traj) << '\n';
    } catch (const std::exception& e) {
      all_ran = false;
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), ',', ';');
      row += "failed,,,,,," + msg;
      out << name << " failed: " << e.what() << '\n';
    }
    summary += row + "\n";
  }
  write_text(dir / kSweepSummaryFile, summary);
  return all_ran ? kOk : kNumericalFailure;
}

/// Entry point shared by the executable and the tests.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Curve shortening flow by resampling and spectral heat steps"};
  app.require_subcommand(1);
  // -h is taken by the time step
  app.set_help_flag("--help", "print help and exit");

  // Experiment flags live on the root so a --config file of plain key=value
  // lines can set them; subcommands pass them through.
  ExperimentOptions opts;
  add_experiment_options(app, opts);
  std::string grid;
  std::optional<double> probe;
  auto* run_cmd = app.add_subcommand("run", "run the flow and write trajectory, events and snapshots");
  auto* analyze_cmd = app.add_subcommand("analyze", "evaluate the diagnostic checks of a run");
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter grid");
  for (auto* sub : {run_cmd, analyze_cmd, sweep_cmd}) {
    sub->fallthrough();
    sub->footer("Experiment options (--preset, --shape, --h, --n, ...) are listed by 'csflow --help'.");
  }
  sweep_cmd->add_option("--grid", grid, "h=v1,v2,... or n=v1,v2,...")->required();
  sweep_cmd->add_option("--probe", probe, "also report the length at this time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(opts, out);
    if (analyze_cmd->parsed()) return cmd_analyze(opts, out);
    return cmd_sweep(opts, grid, probe, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace csflow::cli
