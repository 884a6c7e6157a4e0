#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "csflow/polyline.hpp"

namespace csflow {

/// Aspect ratio is undefined once the curve has flattened onto the x-axis.
class DegenerateAspectError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

template <int Dim>
double polygon_length(const ClosedPolyline<Dim>& poly) {
  double sum = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) sum += poly.edge(i).norm();
  return sum;
}

template <int Dim>
ArclengthTable arclength_table(const ClosedPolyline<Dim>& poly) {
  ArclengthTable table;
  table.cumulative.reserve(poly.size() + 1);
  table.cumulative.push_back(0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    acc += poly.edge(i).norm();
    table.cumulative.push_back(acc);
  }
  return table;
}

/// Exactly `count` points at arclength j*L/count along the polygon, j = 0..count-1,
/// starting at X_0. Unlike resample_uniform the result is not deduplicated, so
/// spectral code can rely on the sample count.
template <int Dim>
std::vector<Point<Dim>> resample_points(const ClosedPolyline<Dim>& poly, std::size_t count) {
  if (count < 3) throw GeometryError("resample_uniform needs N >= 3");
  const auto table = arclength_table(poly);
  const auto& cum = table.cumulative;
  const double total = table.total();
  const std::size_t n = poly.size();

  std::vector<Point<Dim>> out;
  out.reserve(count);
  std::size_t seg = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const double s = static_cast<double>(j) * total / static_cast<double>(count);
    while (seg + 1 < n && cum[seg + 1] <= s) ++seg;
    const double span_len = cum[seg + 1] - cum[seg];
    const double tau = std::clamp((s - cum[seg]) / span_len, 0.0, 1.0);
    out.push_back(poly[static_cast<std::ptrdiff_t>(seg)] + tau * poly.edge(seg));
  }
  return out;
}

/// The discrete reparametrization R_N: N points at uniform arclength spacing
/// along the polygon, anchored at the first input vertex.
template <int Dim>
ClosedPolyline<Dim> resample_uniform(const ClosedPolyline<Dim>& poly, std::size_t count) {
  return ClosedPolyline<Dim>(resample_points(poly, count));
}

namespace detail {

template <int Dim>
std::vector<Point<Dim>> unit_edges(const ClosedPolyline<Dim>& poly) {
  std::vector<Point<Dim>> units;
  units.reserve(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) units.push_back(poly.edge(i).normalized());
  return units;
}

}  // namespace detail

/// Milnor total curvature of the polygon: the sum of turning angles in [0, pi].
template <int Dim>
double turning_total_curvature(const ClosedPolyline<Dim>& poly) {
  const auto units = detail::unit_edges(poly);
  const std::size_t n = units.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& in = units[(i + n - 1) % n];
    const double c = std::clamp(in.dot(units[i]), -1.0, 1.0);
    sum += std::acos(c);
  }
  return sum;
}

/// Length of the discrete tantrix: sum of |T_i - T_{i-1}| over vertices.
template <int Dim>
double chord_total_curvature(const ClosedPolyline<Dim>& poly) {
  const auto units = detail::unit_edges(poly);
  const std::size_t n = units.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += (units[i] - units[(i + n - 1) % n]).norm();
  return sum;
}

/// Shoelace area; positive for counterclockwise traversal.
inline double signed_area(const ClosedPolyline<2>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[static_cast<std::ptrdiff_t>(i)];
    const auto& b = poly[static_cast<std::ptrdiff_t>(i) + 1];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

/// diam_x / diam_y over the vertices.
inline double aspect_ratio(const ClosedPolyline<2>& poly) {
  double xmin = poly[0].x(), xmax = xmin, ymin = poly[0].y(), ymax = ymin;
  for (const auto& p : poly) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  const double dx = xmax - xmin;
  const double dy = ymax - ymin;
  if (dy < kDegenerateEdgeTol * dx || dy == 0.0) {
    throw DegenerateAspectError("aspect_ratio: curve has flattened (diam_y ~ 0)");
  }
  return dx / dy;
}

inline constexpr double kDefaultExtremityTol = 1e-6;

namespace detail {

// Zigzag count of alternating extrema in a cyclic sequence; a turn is only
// confirmed once the sequence retreats from the running extremum by more
// than `threshold`, which also merges plateaus.
inline int cyclic_extrema(std::span<const double> values, double threshold) {
  const std::size_t n = values.size();
  const auto start = static_cast<std::size_t>(
      std::distance(values.begin(), std::max_element(values.begin(), values.end())));
  bool seeking_min = true;
  double candidate = values[start];
  int confirmed = 0;
  for (std::size_t step = 1; step <= n; ++step) {
    const double v = values[(start + step) % n];
    if (seeking_min) {
      if (v < candidate) {
        candidate = v;
      } else if (v > candidate + threshold) {
        ++confirmed;
        seeking_min = false;
        candidate = v;
      }
    } else {
      if (v > candidate) {
        candidate = v;
      } else if (v < candidate - threshold) {
        ++confirmed;
        seeking_min = true;
        candidate = v;
      }
    }
  }
  // Ending while seeking a max means the walk closed on the starting maximum,
  // which has not been counted yet. Ending while seeking a min means the last
  // confirmed maximum is the starting one.
  return seeking_min ? confirmed : confirmed + 1;
}

}  // namespace detail

/// Number of extremity points: alternating local maxima/minima of each
/// coordinate component whose swing exceeds amplitude_tol times that
/// component's diameter, summed over components. Axis-dependent.
template <int Dim>
int extremity_count(const ClosedPolyline<Dim>& poly, double amplitude_tol = kDefaultExtremityTol) {
  int total = 0;
  std::vector<double> values(poly.size());
  for (int c = 0; c < Dim; ++c) {
    for (std::size_t i = 0; i < poly.size(); ++i) values[i] = poly[static_cast<std::ptrdiff_t>(i)][c];
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double diam = *hi - *lo;
    if (diam <= 0.0) continue;
    total += detail::cyclic_extrema(values, amplitude_tol * diam);
  }
  return total;
}

/// Edge-length weighted average of edge midpoints (centroid of the curve
/// viewed as a wire of uniform density).
template <int Dim>
Point<Dim> curve_centroid(const ClosedPolyline<Dim>& poly) {
  Point<Dim> acc = Point<Dim>::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto e = poly.edge(i);
    const double len = e.norm();
    acc += len * (poly[static_cast<std::ptrdiff_t>(i)] + 0.5 * e);
    total += len;
  }
  return acc / total;
}

/// Translates the curve centroid to the origin and scales to unit length.
template <int Dim>
ClosedPolyline<Dim> recenter_rescale(const ClosedPolyline<Dim>& poly) {
  const auto c = curve_centroid(poly);
  const double len = polygon_length(poly);
  std::vector<Point<Dim>> out;
  out.reserve(poly.size());
  for (const auto& p : poly) out.push_back((p - c) / len);
  return ClosedPolyline<Dim>(std::move(out));
}

/// Distance from `p` to the segment [a, b].
template <int Dim>
double point_segment_distance(const Point<Dim>& p, const Point<Dim>& a, const Point<Dim>& b) {
  const Point<Dim> ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double tau = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + tau * ab)).norm();
}

/// Smallest distance from `p` to any edge of the polygon.
template <int Dim>
double distance_to_polygon(const Point<Dim>& p, const ClosedPolyline<Dim>& poly) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[static_cast<std::ptrdiff_t>(i)];
    best = std::min(best, point_segment_distance<Dim>(p, a, a + poly.edge(i)));
  }
  return best;
}

}  // namespace csflow
