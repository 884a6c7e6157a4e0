#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "csflow/flow.hpp"
#include "csflow/geometry.hpp"
#include "csflow/polyline.hpp"

namespace csflow::io {

inline constexpr const char* kTrajectoryHeader = "t,length,kappa_tot,area,aspect,extremity";
inline constexpr const char* kEventsHeader = "t_lo,t_hi,drop,cusps";

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, enough to round-trip a double.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// snapshot_<step zero-padded to 8>.csv
inline std::string snapshot_filename(std::size_t step, const char* ext = "csv") {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%08zu.%s", step, ext);
  return buf;
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<Record>& records) {
  os << kTrajectoryHeader << '\n';
  for (const auto& r : records) {
    os << fmt(r.t) << ',' << fmt(r.length) << ',' << fmt(r.kappa) << ',' << fmt(r.area) << ',' << fmt(r.aspect)
       << ',' << r.extremity << '\n';
  }
}

inline void write_events_csv(std::ostream& os, const std::vector<SingularEvent>& events) {
  os << kEventsHeader << '\n';
  for (const auto& e : events) {
    os << fmt(e.t_lo) << ',' << fmt(e.t_hi) << ',' << fmt(e.drop) << ',' << e.cusp_estimate << '\n';
  }
}

template <int Dim>
void write_snapshot_csv(std::ostream& os, const ClosedPolyline<Dim>& curve) {
  for (const auto& p : curve) {
    for (int c = 0; c < Dim; ++c) os << (c ? "," : "") << fmt(p[c]);
    os << '\n';
  }
}

/// Standalone SVG with a single closed path; y points up.
inline void write_snapshot_svg(std::ostream& os, const Polyline2& curve, double t) {
  double xmin = curve[0].x(), xmax = xmin, ymin = curve[0].y(), ymax = ymin;
  for (const auto& p : curve) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  const double extent = std::max({xmax - xmin, ymax - ymin, 1e-300});
  const double margin = 0.05 * extent;
  const double w = xmax - xmin + 2 * margin;
  const double h = ymax - ymin + 2 * margin;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\"" << fmt(512.0 * h / w) << "\" viewBox=\""
     << fmt(xmin - margin) << ' ' << fmt(-ymax - margin) << ' ' << fmt(w) << ' ' << fmt(h) << "\">\n"
     << "<title>t = " << fmt(t) << "</title>\n"
     << "<path fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"" << fmt(0.004 * extent) << "\" d=\"";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& p = curve[static_cast<std::ptrdiff_t>(i)];
    os << (i == 0 ? "M" : " L") << fmt(p.x()) << ' ' << fmt(-p.y());
  }
  os << " Z\"/>\n</svg>\n";
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

inline double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw FormatError("trailing characters in number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw FormatError("not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    throw FormatError("number out of range: '" + s + "'");
  }
}

inline std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

}  // namespace detail

/// Parses trajectory.csv. Step indices and step ratios are not stored in the
/// file and come back as 0 / NaN.
inline std::vector<Record> read_trajectory_csv(const std::filesystem::path& path) {
  auto in = detail::open(path);
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) throw FormatError("bad trajectory header in " + path.string());
  std::vector<Record> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split(line);
    if (cells.size() != 6) throw FormatError("trajectory row must have 6 fields: " + line);
    Record r;
    r.t = detail::to_double(cells[0]);
    r.length = detail::to_double(cells[1]);
    r.kappa = detail::to_double(cells[2]);
    r.area = detail::to_double(cells[3]);
    r.aspect = detail::to_double(cells[4]);
    r.extremity = static_cast<int>(detail::to_double(cells[5]));
    records.push_back(r);
  }
  return records;
}

inline std::vector<SingularEvent> read_events_csv(const std::filesystem::path& path) {
  auto in = detail::open(path);
  std::string line;
  if (!std::getline(in, line) || line != kEventsHeader) throw FormatError("bad events header in " + path.string());
  std::vector<SingularEvent> events;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split(line);
    if (cells.size() != 4) throw FormatError("events row must have 4 fields: " + line);
    events.push_back(SingularEvent{detail::to_double(cells[0]), detail::to_double(cells[1]),
                                   detail::to_double(cells[2]), static_cast<long>(detail::to_double(cells[3]))});
  }
  return events;
}

template <int Dim>
ClosedPolyline<Dim> read_snapshot_csv(const std::filesystem::path& path) {
  auto in = detail::open(path);
  std::string line;
  std::vector<Point<Dim>> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split(line);
    if (cells.size() != static_cast<std::size_t>(Dim)) throw FormatError("snapshot row has wrong arity: " + line);
    Point<Dim> p;
    for (int c = 0; c < Dim; ++c) p[c] = detail::to_double(cells[static_cast<std::size_t>(c)]);
    pts.push_back(p);
  }
  return ClosedPolyline<Dim>(std::move(pts));
}

}  // namespace csflow::io
