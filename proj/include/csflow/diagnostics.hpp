#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "csflow/geometry.hpp"
#include "csflow/polyline.hpp"

namespace csflow {

/// Exact length law of a shrinking (possibly multiply covered) circle.
struct CircleLaw {
  double L0;

  explicit CircleLaw(double initial_length) : L0(initial_length) {
    if (!(L0 > 0.0)) throw GeometryError("CircleLaw: L0 must be > 0");
  }

  double extinction_time() const { return L0 * L0 / (8.0 * std::numbers::pi * std::numbers::pi); }
};

/// sqrt(L0^2 - 8 pi^2 t) for 0 <= t < L0^2 / (8 pi^2).
inline double circle_length(const CircleLaw& law, double t) {
  if (!(t >= 0.0) || t >= law.extinction_time()) {
    throw GeometryError("circle_length: t outside [0, extinction time)");
  }
  return std::sqrt(law.L0 * law.L0 - 8.0 * std::numbers::pi * std::numbers::pi * t);
}

/// One step of the discrete circle recursion L_{k+1} = exp(-4 pi^2 h / L_k^2) L_k.
inline double circle_recursion(double length, double h) {
  if (!(length > 0.0)) throw GeometryError("circle_recursion: L_k must be > 0");
  if (!(h >= 0.0)) throw GeometryError("circle_recursion: h must be >= 0");
  return std::exp(-4.0 * std::numbers::pi * std::numbers::pi * h / (length * length)) * length;
}

/// Partial sum over odd l <= max_mode of L0 * 2/(pi^2 l^2) * exp(-4 pi^2 l^2 h / L0^2),
/// the series bound for the length of a doubly covered segment after one
/// step; never exceeds L0/4.
inline double dcs_first_step_length(double L0, double h, int max_mode) {
  if (!(L0 > 0.0) || !(h > 0.0) || max_mode < 1) {
    throw GeometryError("dcs_first_step_length: need L0 > 0, h > 0, max_mode >= 1");
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double rate = 4.0 * pi2 * h / (L0 * L0);
  double sum = 0.0;
  // smallest terms first
  const int top = max_mode % 2 == 1 ? max_mode : max_mode - 1;
  for (int l = top; l >= 1; l -= 2) {
    const double l2 = static_cast<double>(l) * static_cast<double>(l);
    sum += 2.0 / (pi2 * l2) * std::exp(-rate * l2);
  }
  return L0 * sum;
}

/// Symmetric Hausdorff distance between the polygon and the doubly covered
/// segment [-1/4, 1/4] x {0}, the unit-length limit shape. Expects a
/// recentered, unit-length curve.
inline double compare_to_dcs_limit(const Polyline2& poly) {
  const Point2 a(-0.25, 0.0);
  const Point2 b(0.25, 0.0);
  double to_segment = 0.0;
  for (const auto& p : poly) to_segment = std::max(to_segment, point_segment_distance<2>(p, a, b));

  const std::size_t m = std::max<std::size_t>(poly.size(), 256);
  double to_curve = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    const double tau = static_cast<double>(j) / static_cast<double>(m);
    to_curve = std::max(to_curve, distance_to_polygon<2>(Point2(a + tau * (b - a)), poly));
  }
  return std::max(to_segment, to_curve);
}

/// L^2 / (4 pi |A|); 1 for a circle.
inline double isoperimetric_ratio(const Polyline2& poly) {
  const double len = polygon_length(poly);
  const double area = std::abs(signed_area(poly));
  if (area <= 1e-12 * len * len) throw GeometryError("isoperimetric_ratio: enclosed area vanishes");
  return len * len / (4.0 * std::numbers::pi * area);
}

}  // namespace csflow
