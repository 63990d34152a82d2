#include "detent/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "detent/error.hpp"

namespace detent {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::degenerate_geometry: return "degenerate_geometry";
    case ErrorCode::non_monotonic: return "non_monotonic";
    case ErrorCode::no_open_path: return "no_open_path";
    case ErrorCode::path_too_short: return "path_too_short";
    case ErrorCode::svg_parse: return "svg_parse";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::feasibility: return "feasibility";
    case ErrorCode::solver: return "solver";
    case ErrorCode::layout: return "layout";
    case ErrorCode::undefined_fit: return "undefined_fit";
    case ErrorCode::no_overlap: return "no_overlap";
    case ErrorCode::schema: return "schema";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

Polyline::Polyline(std::vector<Point2> points, bool closed)
    : points_(std::move(points)), closed_(closed) {
  if (points_.size() < 2) {
    throw Error(ErrorCode::degenerate_geometry,
                "polyline needs at least two points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].finite()) {
      throw Error(ErrorCode::degenerate_geometry,
                  "polyline point " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && distance(points_[i], points_[i - 1]) <= kMinPointSeparation) {
      throw Error(ErrorCode::degenerate_geometry,
                  "polyline points " + std::to_string(i - 1) + " and " +
                      std::to_string(i) + " coincide");
    }
  }
  if (closed_ && distance(points_.front(), points_.back()) <= kMinPointSeparation) {
    // A closing duplicate is implied by the closed flag.
    points_.pop_back();
    if (points_.size() < 2) {
      throw Error(ErrorCode::degenerate_geometry, "closed polyline collapses");
    }
  }
}

double Polyline::length() const {
  double total = 0.0;
  for (std::size_t i = 0; i < segment_count(); ++i) {
    total += distance(segment_start(i), segment_end(i));
  }
  return total;
}

BBox Polyline::bounds() const {
  BBox b{points_.front(), points_.front()};
  for (const auto& p : points_) {
    b.min.x = std::min(b.min.x, p.x);
    b.min.y = std::min(b.min.y, p.y);
    b.max.x = std::max(b.max.x, p.x);
    b.max.y = std::max(b.max.y, p.y);
  }
  return b;
}

BBox bounds(std::span<const Polyline> shapes) {
  if (shapes.empty()) {
    throw Error(ErrorCode::invalid_argument, "bounds of empty shape list");
  }
  BBox b = shapes.front().bounds();
  for (const auto& s : shapes.subspan(1)) {
    const BBox o = s.bounds();
    b.min.x = std::min(b.min.x, o.min.x);
    b.min.y = std::min(b.min.y, o.min.y);
    b.max.x = std::max(b.max.x, o.max.x);
    b.max.y = std::max(b.max.y, o.max.y);
  }
  return b;
}

namespace {

Polyline make_increasing(const Polyline& contour) {
  if (contour.closed()) {
    throw Error(ErrorCode::non_monotonic, "profile contour must be an open path");
  }
  const auto& pts = contour.points();
  std::vector<Point2> ordered(pts.begin(), pts.end());
  if (ordered.back().y < ordered.front().y) {
    std::reverse(ordered.begin(), ordered.end());
  }
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (!(ordered[i].y > ordered[i - 1].y)) {
      throw Error(ErrorCode::non_monotonic,
                  "profile contour is not monotonic in y at point " +
                      std::to_string(i) + " (y = " +
                      std::to_string(ordered[i].y) + ")");
    }
  }
  return Polyline(std::move(ordered), false);
}

// Tangent orientation used everywhere: toward +y, ties toward +x.
Vec2 orient_tangent(Vec2 t) {
  if (t.y < 0.0 || (t.y == 0.0 && t.x < 0.0)) return -t;
  return t;
}

}  // namespace

Profile::Profile(Polyline contour, Side side)
    : Profile(std::move(contour), side, default_material(side)) {}

Profile::Profile(Polyline contour, Side side, MaterialSide material)
    : contour_(make_increasing(contour)), side_(side), material_(material) {}

std::optional<double> Profile::x_at(double y) const {
  const auto& pts = contour_.points();
  if (y < pts.front().y || y > pts.back().y) return std::nullopt;
  auto it = std::lower_bound(pts.begin(), pts.end(), y,
                             [](const Point2& p, double v) { return p.y < v; });
  if (it == pts.begin()) return it->x;
  const Point2 b = *it;
  const Point2 a = *(it - 1);
  const double t = (y - a.y) / (b.y - a.y);
  return a.x + t * (b.x - a.x);
}

ClosestPointResult closest_point(const Polyline& contour, Point2 query) {
  const std::size_t n = contour.segment_count();
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  std::size_t best_i = 0;
  Point2 best_p;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = contour.segment_start(i);
    const Point2 b = contour.segment_end(i);
    const Vec2 ab = b - a;
    double t = (query - a).dot(ab) / ab.dot(ab);
    t = std::clamp(t, 0.0, 1.0);
    const Point2 p = a + ab * t;
    const double d2 = (query - p).dot(query - p);
    const double tie = 1e-9 * 1e-9 + 2e-9 * std::sqrt(std::min(d2, best_d2));
    if (d2 < best_d2 - tie) {
      best_d2 = d2;
      best_t = t;
      best_i = i;
      best_p = p;
    } else if (std::abs(d2 - best_d2) <= tie && p.y < best_p.y - 1e-12) {
      best_d2 = d2;
      best_t = t;
      best_i = i;
      best_p = p;
    }
  }

  auto segment_normal = [&](std::size_t i) {
    const Vec2 t = orient_tangent(
        (contour.segment_end(i) - contour.segment_start(i)).normalized());
    return t.perp_cw();
  };

  ClosestPointResult r;
  r.point = best_p;
  r.distance = std::sqrt(best_d2);
  r.segment_index = best_i;

  std::optional<std::size_t> vertex;
  if (best_t <= 0.0) vertex = best_i;
  if (best_t >= 1.0) vertex = (best_i + 1) % contour.size();
  bool interior = false;
  std::size_t before = 0;
  std::size_t after = 0;
  if (vertex) {
    const std::size_t v = *vertex;
    if (contour.closed()) {
      interior = true;
      before = (v + n - 1) % n;
      after = v % n;
    } else if (v > 0 && v + 1 < contour.size()) {
      interior = true;
      before = v - 1;
      after = v;
    }
  }
  Vec2 normal;
  if (interior) {
    const Vec2 sum = segment_normal(before) + segment_normal(after);
    normal = sum.norm() > 1e-12 ? sum.normalized() : segment_normal(best_i);
    r.at_vertex = true;
    r.point = contour.points()[*vertex];
  } else {
    normal = segment_normal(best_i);
    r.at_vertex = vertex.has_value();
  }
  r.normal = normal;
  r.tangent = orient_tangent(Vec2{-normal.y, normal.x});
  return r;
}

ClosestPointResult closest_point(const Profile& profile, Point2 query) {
  ClosestPointResult r = closest_point(profile.contour(), query);
  // Bare-polyline convention puts material at -x of an upward contour.
  if (profile.material() == MaterialSide::positive_x) {
    r.normal = -r.normal;
  }
  return r;
}

bool penetrates(const Profile& profile, Point2 query) {
  const auto xc = profile.x_at(query.y);
  if (!xc) return false;
  return sign_of(profile.material()) * (query.x - *xc) > 0.0;
}

Polyline translate(const Polyline& contour, Vec2 offset) {
  std::vector<Point2> pts;
  pts.reserve(contour.size());
  for (const auto& p : contour.points()) pts.push_back(p + offset);
  return Polyline(std::move(pts), contour.closed());
}

Profile translate(const Profile& profile, Vec2 offset) {
  return Profile(translate(profile.contour(), offset), profile.side(),
                 profile.material());
}

Polyline mirror_x(const Polyline& contour) {
  std::vector<Point2> pts;
  pts.reserve(contour.size());
  for (const auto& p : contour.points()) pts.push_back({-p.x, p.y});
  return Polyline(std::move(pts), contour.closed());
}

Profile mirror_x(const Profile& profile) {
  const Side side = profile.side() == Side::left ? Side::right : Side::left;
  const MaterialSide material = profile.material() == MaterialSide::positive_x
                                    ? MaterialSide::negative_x
                                    : MaterialSide::positive_x;
  return Profile(mirror_x(profile.contour()), side, material);
}

bool inside_even_odd(std::span<const Polyline> rings, Point2 p) {
  bool inside = false;
  for (const auto& ring : rings) {
    if (!ring.closed()) continue;
    const auto& pts = ring.points();
    for (std::size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
      const Point2 a = pts[i];
      const Point2 b = pts[j];
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (p.x < x) inside = !inside;
      }
    }
  }
  return inside;
}

std::optional<double> ray_segment_hit(Point2 origin, Vec2 dir, Point2 a,
                                      Point2 b, double t_min) {
  const Vec2 e = b - a;
  const double denom = dir.cross(e);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const Vec2 w = a - origin;
  const double t = w.cross(e) / denom;
  const double u = w.cross(dir) / denom;
  if (t <= t_min || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

}  // namespace detent
