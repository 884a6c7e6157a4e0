#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace csflow {

template <int Dim>
using Point = Eigen::Matrix<double, Dim, 1>;

using Point2 = Point<2>;
using Point3 = Point<3>;

/// Raised when an input violates a precondition of a geometric operation.
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a curve has shrunk to (numerically) a single point.
class CollapseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative tolerance under which consecutive vertices are merged.
inline constexpr double kDegenerateEdgeTol = 1e-14;

/// Length of the bounding-box diagonal; within a factor sqrt(Dim) of the
/// true diameter and cheap enough to evaluate on every construction.
template <int Dim>
double bounding_diameter(std::span<const Point<Dim>> pts) {
  if (pts.empty()) return 0.0;
  Point<Dim> lo = pts.front();
  Point<Dim> hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

/// A closed polygon X_0, ..., X_{n-1}; edge i joins X_i and X_{(i+1) mod n}.
///
/// Construction merges consecutive vertices (including the closing pair)
/// that lie within 1e-14 times the bounding diameter of each other and
/// rejects inputs with fewer than three distinct vertices.
template <int Dim>
class ClosedPolyline {
  static_assert(Dim >= 2, "curves live in at least two dimensions");

 public:
  using point_type = Point<Dim>;
  static constexpr int dim = Dim;

  explicit ClosedPolyline(std::vector<point_type> pts) : pts_(std::move(pts)) {
    merge_degenerate();
    if (pts_.size() < 3) {
      throw GeometryError("ClosedPolyline needs at least 3 distinct points, got " +
                          std::to_string(pts_.size()));
    }
  }

  std::size_t size() const { return pts_.size(); }

  /// Cyclic access: any integer index is reduced modulo size().
  const point_type& operator[](std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(pts_.size());
    auto r = i % n;
    if (r < 0) r += n;
    return pts_[static_cast<std::size_t>(r)];
  }

  std::span<const point_type> points() const { return pts_; }

  auto begin() const { return pts_.begin(); }
  auto end() const { return pts_.end(); }

  point_type edge(std::size_t i) const { return (*this)[static_cast<std::ptrdiff_t>(i) + 1] - pts_[i]; }

  double diameter() const { return bounding_diameter<Dim>(pts_); }

  /// Same points traversed in the opposite direction, starting at X_0.
  ClosedPolyline reversed() const {
    std::vector<point_type> out;
    out.reserve(pts_.size());
    out.push_back(pts_.front());
    for (std::size_t i = pts_.size() - 1; i > 0; --i) out.push_back(pts_[i]);
    return ClosedPolyline(std::move(out));
  }

 private:
  void merge_degenerate() {
    if (pts_.size() < 2) return;
    const double tol = kDegenerateEdgeTol * bounding_diameter<Dim>(pts_);
    std::vector<point_type> kept;
    kept.reserve(pts_.size());
    for (const auto& p : pts_) {
      if (kept.empty() || (p - kept.back()).norm() > tol) kept.push_back(p);
    }
    while (kept.size() > 1 && (kept.back() - kept.front()).norm() <= tol) kept.pop_back();
    pts_ = std::move(kept);
  }

  std::vector<point_type> pts_;
};

using Polyline2 = ClosedPolyline<2>;

/// Cumulative chord lengths l_0 = 0 < l_1 < ... < l_n = L.
struct ArclengthTable {
  std::vector<double> cumulative;

  double total() const { return cumulative.back(); }
};

}  // namespace csflow
