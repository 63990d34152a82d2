#pragma once

// Planar geometry kernel. Mechanism coordinates are millimetres with the
// slider pressing along -y and side springs deflecting along x.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace detent {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  Vec2 normalized() const {
    const double n = norm();
    return {x / n, y / n};
  }
  // Rotated -90 degrees.
  constexpr Vec2 perp_cw() const { return {y, -x}; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

using Point2 = Vec2;

inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }

struct BBox {
  Point2 min;
  Point2 max;
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
};

// Minimum separation between consecutive points.
inline constexpr double kMinPointSeparation = 1e-9;

class Polyline {
 public:
  Polyline() = default;
  // Throws Error(degenerate_geometry) on fewer than two points, non-finite
  // coordinates or coincident consecutive points.
  explicit Polyline(std::vector<Point2> points, bool closed = false);

  const std::vector<Point2>& points() const { return points_; }
  bool closed() const { return closed_; }
  std::size_t size() const { return points_.size(); }
  std::size_t segment_count() const {
    return closed_ ? points_.size() : points_.size() - 1;
  }
  Point2 segment_start(std::size_t i) const { return points_[i]; }
  Point2 segment_end(std::size_t i) const {
    return points_[(i + 1) % points_.size()];
  }

  double length() const;
  BBox bounds() const;

  bool operator==(const Polyline&) const = default;

 private:
  std::vector<Point2> points_;
  bool closed_ = false;
};

enum class Side { left, right };

// +1: slider material lies at larger x than the contour; -1: at smaller x.
enum class MaterialSide : int { negative_x = -1, positive_x = 1 };

// Material of a left-edge profile is at +x (the spring sits outside it, at -x).
constexpr MaterialSide default_material(Side side) {
  return side == Side::left ? MaterialSide::positive_x : MaterialSide::negative_x;
}

constexpr double sign_of(MaterialSide m) { return static_cast<int>(m); }

// Slider edge contour, strictly increasing in y so every travel coordinate has
// exactly one contour point.
class Profile {
 public:
  Profile() = default;
  // Accepts a contour ordered either way in y; stored increasing. Throws
  // Error(non_monotonic) on overhangs or repeated y values.
  Profile(Polyline contour, Side side);
  Profile(Polyline contour, Side side, MaterialSide material);

  const Polyline& contour() const { return contour_; }
  Side side() const { return side_; }
  MaterialSide material() const { return material_; }

  double y_min() const { return contour_.points().front().y; }
  double y_max() const { return contour_.points().back().y; }
  double span() const { return y_max() - y_min(); }
  // Contour x at height y; nullopt outside [y_min, y_max].
  std::optional<double> x_at(double y) const;

  bool operator==(const Profile&) const = default;

 private:
  Polyline contour_;
  Side side_ = Side::left;
  MaterialSide material_ = MaterialSide::positive_x;
};

struct ClosestPointResult {
  Point2 point;
  double distance = 0.0;
  std::size_t segment_index = 0;
  bool at_vertex = false;
  Vec2 normal;   // unit; points away from the material side
  Vec2 tangent;  // unit; oriented toward increasing y
};

// Bare polylines treat material as lying to the right of the direction of
// increasing y, i.e. normal = tangent rotated -90 degrees.
ClosestPointResult closest_point(const Polyline& contour, Point2 query);
ClosestPointResult closest_point(const Profile& profile, Point2 query);

bool penetrates(const Profile& profile, Point2 query);

Polyline translate(const Polyline& contour, Vec2 offset);
Profile translate(const Profile& profile, Vec2 offset);

// Reflection about the slider axis x = 0. Profiles swap side and material.
Polyline mirror_x(const Polyline& contour);
Profile mirror_x(const Profile& profile);

// Even-odd containment against a set of closed rings.
bool inside_even_odd(std::span<const Polyline> rings, Point2 p);

// Parameter t along the ray origin + t*dir of the nearest crossing with
// segment [a, b], if any with t > t_min.
std::optional<double> ray_segment_hit(Point2 origin, Vec2 dir, Point2 a,
                                      Point2 b, double t_min = 0.0);

BBox bounds(std::span<const Polyline> shapes);

}  // namespace detent
