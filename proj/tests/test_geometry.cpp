#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "detent/error.hpp"
#include "detent/geometry.hpp"

using namespace detent;

namespace {

Polyline line(std::vector<Point2> pts) { return Polyline(std::move(pts)); }

// Crossing-number test written from scratch for the oracle.
bool in_polygon(const std::vector<Point2>& poly, Point2 p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) in = !in;
    }
  }
  return in;
}

}  // namespace

TEST(ClosestPoint, FootOnVerticalSegment) {
  const auto r = closest_point(line({{0, 0}, {0, 10}}), {2, 5});
  EXPECT_DOUBLE_EQ(r.point.x, 0.0);
  EXPECT_DOUBLE_EQ(r.point.y, 5.0);
  EXPECT_DOUBLE_EQ(r.distance, 2.0);
  EXPECT_DOUBLE_EQ(r.normal.x, 1.0);
  EXPECT_DOUBLE_EQ(r.normal.y, 0.0);
}

TEST(ClosestPoint, QueryOnContour) {
  EXPECT_DOUBLE_EQ(closest_point(line({{0, 0}, {0, 10}}), {0, 3}).distance, 0.0);
}

TEST(ClosestPoint, DiagonalProjection) {
  const auto r = closest_point(line({{0, 0}, {4, 4}}), {4, 0});
  EXPECT_NEAR(r.point.x, 2.0, 1e-12);
  EXPECT_NEAR(r.point.y, 2.0, 1e-12);
  EXPECT_NEAR(r.distance, 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(ClosestPoint, VertexUsesBisectorNormal) {
  const auto r = closest_point(line({{0, 0}, {0, 5}, {-5, 10}}), {3, 5});
  EXPECT_TRUE(r.at_vertex);
  EXPECT_NEAR(r.normal.norm(), 1.0, 1e-12);
  EXPECT_GT(r.normal.x, 0.0);
}

TEST(ClosestPoint, ProfileNormalFacesAwayFromMaterial) {
  // Left profile: material at +x, so the normal faces -x toward the spring.
  const Profile left(line({{5, 0}, {5, 10}}), Side::left);
  EXPECT_DOUBLE_EQ(closest_point(left, {3, 5}).normal.x, -1.0);
  const Profile right(line({{5, 0}, {5, 10}}), Side::right);
  EXPECT_DOUBLE_EQ(closest_point(right, {7, 5}).normal.x, 1.0);
}

TEST(Penetrates, HalfPlane) {
  const Profile p(line({{5, -10}, {5, 10}}), Side::right, MaterialSide::positive_x);
  EXPECT_TRUE(penetrates(p, {6, 0}));
  EXPECT_FALSE(penetrates(p, {4, 0}));
  EXPECT_FALSE(penetrates(p, {6, 20}));  // outside the contour's span
}

TEST(Penetrates, SawtoothMatchesRayCasting) {
  std::vector<Point2> pts;
  for (int i = 0; i <= 10; ++i) pts.push_back({(i % 2) ? 2.0 : 0.0, static_cast<double>(i)});
  const Profile p(line(pts), Side::left);  // material at +x
  // Region: the contour closed off far to the +x side.
  std::vector<Point2> poly = pts;
  poly.push_back({100, 10});
  poly.push_back({100, 0});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(-3, 5), uy(0.001, 9.999);
  for (int i = 0; i < 1000; ++i) {
    const Point2 q{ux(rng), uy(rng)};
    EXPECT_EQ(penetrates(p, q), in_polygon(poly, q)) << q.x << "," << q.y;
  }
}

TEST(Translate, ShiftsEveryPoint) {
  const auto t = translate(line({{0, 0}, {0, 10}}), {0, -3});
  EXPECT_EQ(t, line({{0, -3}, {0, 7}}));
  const auto c = line({{1, 2}, {3, 5}, {-1, 9}});
  EXPECT_EQ(translate(c, {0, 0}), c);
}

TEST(Translate, ClosestPointIsEquivariant) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point2> pts;
    double y = u(rng);
    for (int i = 0; i < 6; ++i) {
      pts.push_back({u(rng), y});
      y += 0.5 + std::abs(u(rng));
    }
    const Polyline c(pts);
    const Vec2 v{u(rng), u(rng)};
    const Point2 q{u(rng), u(rng)};
    const auto a = closest_point(c, q);
    const auto b = closest_point(translate(c, v), q + v);
    EXPECT_NEAR(a.distance, b.distance, 1e-9);
    EXPECT_NEAR(a.point.x + v.x, b.point.x, 1e-9);
    EXPECT_NEAR(a.point.y + v.y, b.point.y, 1e-9);
  }
}

TEST(Profile, RejectsOverhang) {
  EXPECT_THROW(Profile(line({{0, 0}, {1, 5}, {2, 3}}), Side::left), Error);
  try {
    Profile(line({{0, 0}, {1, 5}, {2, 3}}), Side::left);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_monotonic);
  }
}

TEST(Profile, StoresIncreasingY) {
  const Profile p(line({{0, 10}, {1, 5}, {0, 0}}), Side::left);
  EXPECT_DOUBLE_EQ(p.y_min(), 0.0);
  EXPECT_DOUBLE_EQ(p.y_max(), 10.0);
  EXPECT_DOUBLE_EQ(*p.x_at(2.5), 0.5);
  EXPECT_FALSE(p.x_at(11).has_value());
}

TEST(Profile, MirrorSwapsSideAndMaterial) {
  const Profile p(line({{-9, 0}, {-10, 5}}), Side::left);
  const Profile m = mirror_x(p);
  EXPECT_EQ(m.side(), Side::right);
  EXPECT_EQ(m.material(), MaterialSide::negative_x);
  EXPECT_DOUBLE_EQ(m.contour().points()[1].x, 10.0);
}

TEST(Polyline, RejectsDegenerateInput) {
  EXPECT_THROW(Polyline({{0, 0}}), Error);
  EXPECT_THROW(Polyline({{0, 0}, {0, 0}}), Error);
  EXPECT_THROW(Polyline({{0, 0}, {NAN, 1}}), Error);
}

TEST(EvenOdd, HoleIsOutside) {
  const Polyline outer({{0, 0}, {10, 0}, {10, 10}, {0, 10}}, true);
  const Polyline hole({{4, 4}, {6, 4}, {6, 6}, {4, 6}}, true);
  const std::vector<Polyline> rings = {outer, hole};
  EXPECT_TRUE(inside_even_odd(rings, {1, 1}));
  EXPECT_FALSE(inside_even_odd(rings, {5, 5}));
  EXPECT_FALSE(inside_even_odd(rings, {11, 5}));
}
