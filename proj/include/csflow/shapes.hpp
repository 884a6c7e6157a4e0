#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "csflow/geometry.hpp"
#include "csflow/polyline.hpp"

namespace csflow {

enum class ShapeKind {
  kCircle,
  kNfoldCircle,
  kEllipse,
  kSquare,
  kDcsPolygon,
  kDcsSmooth,
  kInfinityXY,
  kInfinityY,
  kInfinityCentral,
  kInfinityPerturbed,
  kTwoCircleInfinity,
  kConvoluted,
};

namespace detail {

struct ShapeInfo {
  ShapeKind kind;
  std::string_view name;
  // Recognized parameters and their defaults.
  std::map<std::string, double, std::less<>> defaults;
};

inline const std::vector<ShapeInfo>& shape_table() {
  static const std::vector<ShapeInfo> table = {
      {ShapeKind::kCircle, "circle", {{"radius", 1.0}, {"cx", 0.0}, {"cy", 0.0}}},
      {ShapeKind::kNfoldCircle, "nfold_circle", {{"radius", 1.0}, {"n", 2.0}}},
      {ShapeKind::kEllipse, "ellipse", {{"a", 1.0}, {"b", 0.5}}},
      {ShapeKind::kSquare, "square", {{"side", 1.0}}},
      {ShapeKind::kDcsPolygon, "dcs_polygon", {{"p0x", -1.0}, {"p0y", 0.0}, {"p1x", 1.0}, {"p1y", 0.0}}},
      {ShapeKind::kDcsSmooth, "dcs_smooth", {{"length", 2.0}}},
      {ShapeKind::kInfinityXY, "infinity_xy", {{"scale", 1.0}}},
      {ShapeKind::kInfinityY, "infinity_y", {{"shear", 0.3}}},
      {ShapeKind::kInfinityCentral, "infinity_central", {{"shear", 0.5}}},
      {ShapeKind::kInfinityPerturbed, "infinity_perturbed", {{"amplitude", 0.15}, {"width", 1.0 / 16.0}}},
      {ShapeKind::kTwoCircleInfinity, "two_circle_infinity", {{"r_small", 0.25}, {"r_big", 0.75}}},
      {ShapeKind::kConvoluted, "convoluted", {}},
  };
  return table;
}

inline const ShapeInfo& shape_info(ShapeKind kind) {
  for (const auto& info : shape_table()) {
    if (info.kind == kind) return info;
  }
  throw GeometryError("unknown shape kind");
}

}  // namespace detail

inline std::string_view to_string(ShapeKind kind) { return detail::shape_info(kind).name; }

inline std::optional<ShapeKind> parse_shape_kind(std::string_view name) {
  for (const auto& info : detail::shape_table()) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

inline std::vector<std::string> shape_kind_names() {
  std::vector<std::string> names;
  for (const auto& info : detail::shape_table()) names.emplace_back(info.name);
  return names;
}

struct ShapeSpec {
  ShapeKind kind = ShapeKind::kCircle;
  std::map<std::string, double, std::less<>> params;  // overrides of the kind's defaults
  std::size_t samples = 512;

  double param(std::string_view key) const {
    if (auto it = params.find(key); it != params.end()) return it->second;
    const auto& defaults = detail::shape_info(kind).defaults;
    if (auto it = defaults.find(key); it != defaults.end()) return it->second;
    throw GeometryError("shape " + std::string(to_string(kind)) + " has no parameter '" + std::string(key) + "'");
  }

  void validate() const {
    if (samples < 8 || samples % 2 != 0) throw GeometryError("ShapeSpec: samples must be even and >= 8");
    const auto& defaults = detail::shape_info(kind).defaults;
    for (const auto& [key, value] : params) {
      if (!defaults.contains(key)) {
        throw GeometryError("shape " + std::string(to_string(kind)) + " has no parameter '" + key + "'");
      }
      if (!std::isfinite(value)) throw GeometryError("ShapeSpec: parameter '" + key + "' is not finite");
    }
    auto positive = [&](std::string_view key) {
      if (!(param(key) > 0.0)) throw GeometryError("ShapeSpec: '" + std::string(key) + "' must be > 0");
    };
    switch (kind) {
      case ShapeKind::kCircle: positive("radius"); break;
      case ShapeKind::kNfoldCircle: {
        positive("radius");
        const double n = param("n");
        if (n < 1.0 || n != std::floor(n)) throw GeometryError("ShapeSpec: n must be an integer >= 1");
        break;
      }
      case ShapeKind::kEllipse: positive("a"); positive("b"); break;
      case ShapeKind::kSquare: positive("side"); break;
      case ShapeKind::kDcsPolygon:
        if (param("p0x") == param("p1x") && param("p0y") == param("p1y")) {
          throw GeometryError("ShapeSpec: dcs endpoints must differ");
        }
        break;
      case ShapeKind::kDcsSmooth: positive("length"); break;
      case ShapeKind::kInfinityXY: positive("scale"); break;
      case ShapeKind::kInfinityY:
      case ShapeKind::kInfinityCentral:
        if (!(param("shear") >= 0.0)) throw GeometryError("ShapeSpec: shear must be >= 0");
        break;
      case ShapeKind::kInfinityPerturbed:
        if (!(param("amplitude") >= 0.0)) throw GeometryError("ShapeSpec: bump amplitude must be >= 0");
        if (!(param("width") > 0.0 && param("width") <= 0.5)) {
          throw GeometryError("ShapeSpec: bump width must lie in (0, 1/2]");
        }
        break;
      case ShapeKind::kTwoCircleInfinity: positive("r_small"); positive("r_big"); break;
      case ShapeKind::kConvoluted: break;
    }
  }
};

namespace detail {

inline Point2 infinity_point(double r) {
  const double two_pi = 2.0 * std::numbers::pi;
  return {std::cos(two_pi * r), std::sin(2.0 * two_pi * r)};
}

}  // namespace detail

/// Samples the shape at r_j = j / samples of its parametrization (uniform
/// arclength for the polygonal kinds).
inline Polyline2 generate(const ShapeSpec& spec) {
  spec.validate();
  const std::size_t n = spec.samples;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<Point2> pts;
  pts.reserve(n);

  auto sample = [&](auto&& fn) {
    for (std::size_t j = 0; j < n; ++j) pts.push_back(fn(static_cast<double>(j) / static_cast<double>(n)));
  };

  switch (spec.kind) {
    case ShapeKind::kCircle: {
      const double r = spec.param("radius");
      const Point2 c(spec.param("cx"), spec.param("cy"));
      sample([&](double s) { return Point2(c + r * Point2(std::cos(two_pi * s), std::sin(two_pi * s))); });
      break;
    }
    case ShapeKind::kNfoldCircle: {
      const double r = spec.param("radius");
      const double folds = spec.param("n");
      sample([&](double s) { return Point2(r * std::cos(two_pi * folds * s), r * std::sin(two_pi * folds * s)); });
      break;
    }
    case ShapeKind::kEllipse: {
      const double a = spec.param("a");
      const double b = spec.param("b");
      sample([&](double s) { return Point2(a * std::cos(two_pi * s), b * std::sin(two_pi * s)); });
      break;
    }
    case ShapeKind::kSquare: {
      const double h = 0.5 * spec.param("side");
      const Polyline2 corners({Point2(-h, -h), Point2(h, -h), Point2(h, h), Point2(-h, h)});
      pts = resample_points(corners, n);
      break;
    }
    case ShapeKind::kDcsPolygon: {
      const Point2 p0(spec.param("p0x"), spec.param("p0y"));
      const Point2 p1(spec.param("p1x"), spec.param("p1y"));
      sample([&](double s) {
        return s < 0.5 ? Point2((1.0 - 2.0 * s) * p0 + 2.0 * s * p1)
                       : Point2((2.0 - 2.0 * s) * p1 + (2.0 * s - 1.0) * p0);
      });
      break;
    }
    case ShapeKind::kDcsSmooth: {
      const double quarter = 0.25 * spec.param("length");
      sample([&](double s) { return Point2(quarter * std::cos(two_pi * s), 0.0); });
      break;
    }
    case ShapeKind::kInfinityXY: {
      const double scale = spec.param("scale");
      sample([&](double s) { return Point2(scale * detail::infinity_point(s)); });
      break;
    }
    case ShapeKind::kInfinityY: {
      // (x, y + c x^2) keeps the mirror symmetry x -> -x and breaks y -> -y.
      const double c = spec.param("shear");
      sample([&](double s) {
        const Point2 p = detail::infinity_point(s);
        return Point2(p.x(), p.y() + c * p.x() * p.x());
      });
      break;
    }
    case ShapeKind::kInfinityCentral: {
      // (x, y + c x^3) is odd, so only the point symmetry p -> -p survives.
      const double c = spec.param("shear");
      sample([&](double s) {
        const Point2 p = detail::infinity_point(s);
        return Point2(p.x(), p.y() + c * p.x() * p.x() * p.x());
      });
      break;
    }
    case ShapeKind::kInfinityPerturbed: {
      const double amplitude = spec.param("amplitude");
      const double half_width = 0.5 * spec.param("width");
      const double sigma = half_width / 4.0;
      sample([&](double s) {
        Point2 p = detail::infinity_point(s);
        const double offset = s < 0.5 ? s : s - 1.0;  // parameter distance to the rightmost point
        if (std::abs(offset) <= half_width) {
          p += amplitude * std::exp(-0.5 * (offset / sigma) * (offset / sigma)) * p.normalized();
        }
        return p;
      });
      break;
    }
    case ShapeKind::kTwoCircleInfinity: {
      // Small loop counterclockwise around (-r_small, 0), then the large loop
      // clockwise around (r_big, 0); both pass the origin heading up.
      const double rs = spec.param("r_small");
      const double rb = spec.param("r_big");
      const double split = rs / (rs + rb);
      sample([&](double s) {
        if (s < split) {
          const double a = two_pi * s / split;
          return Point2(-rs + rs * std::cos(a), rs * std::sin(a));
        }
        const double a = two_pi * (s - split) / (1.0 - split);
        return Point2(rb - rb * std::cos(a), rb * std::sin(a));
      });
      break;
    }
    case ShapeKind::kConvoluted: {
      sample([&](double s) { return Point2(3.0 * std::cos(3.0 * two_pi * s), std::sin(8.0 * two_pi * s)); });
      break;
    }
  }
  return Polyline2(std::move(pts));
}

enum class Symmetry {
  kXAxis,    // x-component relations X^1(k/4 + s) = (-1)^k X^1(k/4 - s)
  kYAxis,    // y-component relations X^2(k/8 + s) = (-1)^(k+1) X^2(k/8 - s)
  kCentral,  // p -> -p, for some cyclic index shift or reversal
};

/// Smallest, over all index maps i -> i + c and i -> c - i, of the largest
/// deviation |P_i - S P_sigma(i)|. Zero when S maps the sampled immersion to
/// itself up to where the sampling starts and its direction.
template <int Dim>
double symmetry_deviation(const ClosedPolyline<Dim>& poly, const Eigen::Matrix<double, Dim, Dim>& transform) {
  const std::size_t n = poly.size();
  std::vector<Point<Dim>> image;
  image.reserve(n);
  for (const auto& p : poly) image.push_back(transform * p);

  double best = std::numeric_limits<double>::infinity();
  for (int reverse = 0; reverse < 2; ++reverse) {
    for (std::size_t c = 0; c < n; ++c) {
      double worst = 0.0;
      for (std::size_t i = 0; i < n && worst < best; ++i) {
        const std::size_t j = reverse ? (c + n - i) % n : (c + i) % n;
        worst = std::max(worst, (poly[static_cast<std::ptrdiff_t>(i)] - image[j]).norm());
      }
      best = std::min(best, worst);
    }
  }
  return best;
}

inline double verify_symmetry(const Polyline2& poly, Symmetry sym) {
  const std::size_t n = poly.size();
  auto at = [&](std::size_t i, int c) { return poly[static_cast<std::ptrdiff_t>(i % n)][c]; };

  switch (sym) {
    case Symmetry::kXAxis: {
      if (n % 8 != 0) throw GeometryError("verify_symmetry: sample count must be divisible by 8");
      double worst = 0.0;
      for (std::size_t k = 1; k <= 4; ++k) {
        const double sign = k % 2 == 0 ? 1.0 : -1.0;
        const std::size_t anchor = k * n / 4;
        for (std::size_t j = 0; j < n; ++j) {
          worst = std::max(worst, std::abs(at(anchor + j, 0) - sign * at(anchor + n - j, 0)));
        }
      }
      return worst;
    }
    case Symmetry::kYAxis: {
      if (n % 8 != 0) throw GeometryError("verify_symmetry: sample count must be divisible by 8");
      double worst = 0.0;
      for (std::size_t k = 1; k <= 8; ++k) {
        const double sign = k % 2 == 1 ? 1.0 : -1.0;
        const std::size_t anchor = k * n / 8;
        for (std::size_t j = 0; j < n; ++j) {
          worst = std::max(worst, std::abs(at(anchor + j, 1) - sign * at(anchor + n - j, 1)));
        }
      }
      return worst;
    }
    case Symmetry::kCentral:
      return symmetry_deviation<2>(poly, -Eigen::Matrix2d::Identity());
  }
  return std::numeric_limits<double>::quiet_NaN();
}

enum class Phase { kCos, kSin };

/// (1/N) sum_j P_j[component] trig(2 pi freq j / N); `component` is 1-based
/// (1 = x, 2 = y).
template <int Dim>
double mode_projection(const ClosedPolyline<Dim>& poly, int component, int freq, Phase phase) {
  if (component < 1 || component > Dim) throw GeometryError("mode_projection: component out of range");
  const std::size_t n = poly.size();
  const double two_pi = 2.0 * std::numbers::pi;
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    // reduce freq*j mod n so the phase argument stays small
    const auto idx = (static_cast<long>(freq) * static_cast<long>(j)) % static_cast<long>(n);
    const double arg = two_pi * static_cast<double>(idx) / static_cast<double>(n);
    const double w = phase == Phase::kCos ? std::cos(arg) : std::sin(arg);
    acc += poly[static_cast<std::ptrdiff_t>(j)][component - 1] * w;
  }
  return acc / static_cast<double>(n);
}

}  // namespace csflow
