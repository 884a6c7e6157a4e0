#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "csflow/geometry.hpp"
#include "csflow/shapes.hpp"

using namespace csflow;

namespace {

constexpr double kPi = std::numbers::pi;

Polyline2 make(ShapeKind kind, std::size_t samples = 512, std::map<std::string, double, std::less<>> params = {}) {
  return generate(ShapeSpec{kind, std::move(params), samples});
}

}  // namespace

TEST(ShapeNames, RoundTrip) {
  const auto names = shape_kind_names();
  EXPECT_EQ(names.size(), 12u);
  for (const auto& n : names) {
    const auto kind = parse_shape_kind(n);
    ASSERT_TRUE(kind.has_value()) << n;
    EXPECT_EQ(to_string(*kind), n);
  }
  EXPECT_FALSE(parse_shape_kind("hexagon").has_value());
}

TEST(ShapeSpec, Validation) {
  EXPECT_THROW((ShapeSpec{ShapeKind::kCircle, {{"radius", -1.0}}, 64}.validate()), GeometryError);
  EXPECT_THROW((ShapeSpec{ShapeKind::kCircle, {{"bogus", 1.0}}, 64}.validate()), GeometryError);
  EXPECT_THROW((ShapeSpec{ShapeKind::kNfoldCircle, {{"n", 1.5}}, 64}.validate()), GeometryError);
  EXPECT_THROW((ShapeSpec{ShapeKind::kCircle, {}, 7}.validate()), GeometryError);
  EXPECT_NO_THROW((ShapeSpec{ShapeKind::kEllipse, {{"a", 2.0}}, 64}.validate()));
  EXPECT_EQ((ShapeSpec{ShapeKind::kEllipse, {{"a", 2.0}}, 64}.param("b")), 0.5);
}

TEST(Generate, EveryKindProducesRequestedSamples) {
  for (const auto& n : shape_kind_names()) {
    const auto poly = make(*parse_shape_kind(n), 256);
    EXPECT_EQ(poly.size(), 256u) << n;
  }
}

TEST(Generate, Circle) {
  const auto c = make(ShapeKind::kCircle, 256);
  for (const auto& p : c) EXPECT_NEAR(p.norm(), 1.0, 1e-12);
  EXPECT_NEAR(polygon_length(c), 2.0 * kPi, 1e-3);
  EXPECT_NEAR(polygon_length(c), 512 * std::sin(kPi / 256), 1e-12);
}

TEST(Generate, ShiftedCircle) {
  const auto c = make(ShapeKind::kCircle, 64, {{"radius", 2.0}, {"cx", 1.0}, {"cy", -1.0}});
  for (const auto& p : c) EXPECT_NEAR((p - Point2(1, -1)).norm(), 2.0, 1e-12);
}

TEST(Generate, NfoldCircleLength) {
  const auto c = make(ShapeKind::kNfoldCircle, 512, {{"n", 2.0}});
  EXPECT_NEAR(polygon_length(c), 4.0 * kPi, 1e-3);
}

TEST(Generate, SquareIsUniformAlongBoundary) {
  const auto s = make(ShapeKind::kSquare, 64);
  EXPECT_NEAR(polygon_length(s), 4.0, 1e-12);
  EXPECT_NEAR(turning_total_curvature(s), 2.0 * kPi, 1e-12);
  EXPECT_NEAR(std::abs(signed_area(s)), 1.0, 1e-12);
}

TEST(Generate, DcsPolygonOutAndBack) {
  const auto d = make(ShapeKind::kDcsPolygon, 64);
  for (const auto& p : d) {
    EXPECT_EQ(p.y(), 0.0);
    EXPECT_LE(std::abs(p.x()), 1.0 + 1e-15);
  }
  EXPECT_NEAR(polygon_length(d), 4.0, 1e-12);
  EXPECT_EQ(signed_area(d), 0.0);
}

TEST(Generate, DcsSmoothLength) {
  const auto d = make(ShapeKind::kDcsSmooth, 512, {{"length", 2.0}});
  EXPECT_NEAR(polygon_length(d), 2.0, 1e-4);
  for (const auto& p : d) EXPECT_EQ(p.y(), 0.0);
}

TEST(Generate, ConvolutedExtent) {
  const auto c = make(ShapeKind::kConvoluted, 1024);
  EXPECT_NEAR(aspect_ratio(c), 3.0, 1e-3);
}

TEST(Symmetry, InfinityXY) {
  const auto inf = make(ShapeKind::kInfinityXY, 512);
  EXPECT_LT(verify_symmetry(inf, Symmetry::kXAxis), 1e-14);
  EXPECT_LT(verify_symmetry(inf, Symmetry::kYAxis), 1e-14);
  EXPECT_LT(verify_symmetry(inf, Symmetry::kCentral), 1e-14);
}

TEST(Symmetry, CircleIsCentrallySymmetric) {
  EXPECT_LT(verify_symmetry(make(ShapeKind::kCircle, 256), Symmetry::kCentral), 1e-14);
}

TEST(Symmetry, ShearedInfinityKeepsOnlyTheXRelation) {
  // a vertical shear leaves the x component untouched
  const auto y = make(ShapeKind::kInfinityY, 512);
  EXPECT_LT(verify_symmetry(y, Symmetry::kXAxis), 1e-14);
  EXPECT_GT(verify_symmetry(y, Symmetry::kYAxis), 1e-3);
  EXPECT_GT(verify_symmetry(y, Symmetry::kCentral), 1e-3);
  const auto central = make(ShapeKind::kInfinityCentral, 512);
  EXPECT_LT(verify_symmetry(central, Symmetry::kCentral), 1e-14);
  EXPECT_LT(verify_symmetry(central, Symmetry::kXAxis), 1e-14);
  EXPECT_GT(verify_symmetry(central, Symmetry::kYAxis), 1e-3);
}

TEST(Symmetry, PerturbedInfinityBreaksXAxis) {
  const double amp = 0.15;
  const auto p = make(ShapeKind::kInfinityPerturbed, 512, {{"amplitude", amp}});
  EXPECT_GE(verify_symmetry(p, Symmetry::kXAxis), amp / 2);
}

TEST(Symmetry, RequiresMultipleOfEight) {
  EXPECT_THROW(verify_symmetry(make(ShapeKind::kInfinityXY, 100), Symmetry::kXAxis), GeometryError);
}

TEST(ModeProjection, InfinityXY) {
  const auto inf = make(ShapeKind::kInfinityXY, 512);
  EXPECT_LT(std::abs(mode_projection(inf, 1, 1, Phase::kSin)), 1e-12);
  EXPECT_LT(std::abs(mode_projection(inf, 2, 1, Phase::kCos)), 1e-12);
  EXPECT_LT(std::abs(mode_projection(inf, 2, 1, Phase::kSin)), 1e-12);
  EXPECT_GT(mode_projection(inf, 2, 2, Phase::kSin), 0.0);
}

TEST(ModeProjection, TranslationOnlyMovesModeZero) {
  const auto c = make(ShapeKind::kCircle, 64);
  std::vector<Point2> shifted;
  for (const auto& p : c) shifted.push_back(p + Point2(1, 2));
  const Polyline2 s(shifted);
  for (int f = 1; f < 5; ++f) {
    for (auto ph : {Phase::kCos, Phase::kSin}) {
      for (int comp : {1, 2}) {
        EXPECT_NEAR(mode_projection(s, comp, f, ph), mode_projection(c, comp, f, ph), 1e-14);
      }
    }
  }
}

TEST(ModeProjection, RejectsBadComponent) {
  EXPECT_THROW(mode_projection(make(ShapeKind::kCircle, 16), 3, 1, Phase::kCos), GeometryError);
}
