#include "detent/fabrication.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "detent/error.hpp"
#include "detent/springs.hpp"

namespace detent {

const Part* SwatchDrawing::find(std::string_view name) const {
  for (const auto& p : parts) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::vector<Polyline> SwatchDrawing::cut_layer() const {
  std::vector<Polyline> out;
  for (const auto& p : parts) {
    for (const auto& c : p.cuts) out.push_back(translate(c, p.offset));
  }
  return out;
}

std::vector<Polyline> SwatchDrawing::engrave_layer() const {
  std::vector<Polyline> out;
  for (const auto& p : parts) {
    for (const auto& e : p.engrave) out.push_back(translate(e, p.offset));
  }
  return out;
}

namespace {

[[noreturn]] void layout_error(const std::string& what) { throw Error(ErrorCode::layout, what); }

const Profile* profile_on(const Mechanism& m, Side side) {
  for (const auto& p : m.profiles) {
    if (p.side() == side) return &p;
  }
  return nullptr;
}

Polyline slider_outline(const Mechanism& m, const LayoutOptions& o) {
  const double half = o.slider_blank_width / 2.0;
  const double core = o.slider_core_width / 2.0;
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -y_lo;
  for (const auto& p : m.profiles) {
    y_lo = std::min(y_lo, p.y_min());
    y_hi = std::max(y_hi, p.y_max());
    const double sx = p.side() == Side::left ? -1.0 : 1.0;
    for (const auto& pt : p.contour().points()) {
      const double outward = sx * pt.x;  // distance from the slider axis, outward positive
      if (outward > half + 1e-9 || outward < core - 1e-9) {
        layout_error(std::string(p.side() == Side::left ? "left" : "right") +
                     " profile point (" + format_number(pt.x) + ", " + format_number(pt.y) +
                     ") leaves the slider blank (|x| between " + format_number(core) + " and " +
                     format_number(half) + " mm)");
      }
    }
  }
  y_lo -= o.slider_margin;
  y_hi += o.slider_margin;

  std::vector<Point2> pts;
  if (const Profile* left = profile_on(m, Side::left)) {
    const auto& c = left->contour().points();
    pts.push_back({c.front().x, y_lo});
    pts.insert(pts.end(), c.begin(), c.end());
    pts.push_back({c.back().x, y_hi});
  } else {
    pts.push_back({-half, y_lo});
    pts.push_back({-half, y_hi});
  }
  if (const Profile* right = profile_on(m, Side::right)) {
    const auto& c = right->contour().points();
    pts.push_back({c.back().x, y_hi});
    pts.insert(pts.end(), c.rbegin(), c.rend());
    pts.push_back({c.front().x, y_lo});
  } else {
    pts.push_back({half, y_hi});
    pts.push_back({half, y_lo});
  }
  return Polyline(std::move(pts), true);
}

BBox part_bounds(const Part& p) {
  std::vector<Polyline> all = p.cuts;
  all.insert(all.end(), p.engrave.begin(), p.engrave.end());
  return bounds(all);
}

BBox merge(BBox a, BBox b) {
  return {{std::min(a.min.x, b.min.x), std::min(a.min.y, b.min.y)},
          {std::max(a.max.x, b.max.x), std::max(a.max.y, b.max.y)}};
}

Polyline rectangle(BBox b) {
  return Polyline({{b.min.x, b.min.y}, {b.max.x, b.min.y}, {b.max.x, b.max.y}, {b.min.x, b.max.y}},
                  true);
}

}  // namespace

SwatchDrawing layout_swatch(const Mechanism& mechanism, const LayoutOptions& options) {
  mechanism.validate();
  SwatchDrawing d;

  Part slider;
  slider.name = "slider";
  slider.cuts.push_back(slider_outline(mechanism, options));
  const BBox sb = slider.cuts.front().bounds();
  slider.labels.push_back({{0.0, (sb.min.y + sb.max.y) / 2.0}, "slider", 2.0});
  d.parts.push_back(std::move(slider));

  std::vector<Point2> hole_centres;
  BBox extent = sb;
  extent.min.y -= mechanism.travel;  // room for the slider to move
  for (const auto& spec : mechanism.side_springs) {
    Part spring;
    spring.name = spec.side == Side::left ? "side spring left" : "side spring right";
    const SpringOutline outline = generate_side_spring_outline(spec);
    spring.cuts = outline.cuts;
    spring.labels.push_back({spec.pivot + Vec2{0.0, -spec.geometry.ring_inner_radius - 4.0},
                             std::string("family ") + std::string(to_string(spec.family)) +
                                 " T" + format_number(spec.ring_thickness),
                             1.5});
    hole_centres.push_back(spec.pivot);
    extent = merge(extent, part_bounds(spring));
    d.parts.push_back(std::move(spring));
  }
  if (mechanism.base_spring) {
    Part base;
    base.name = "base spring";
    const BaseSpringOutline outline = generate_base_spring_outline(*mechanism.base_spring);
    // Below the slider's lowest position, centred on the slider axis.
    const Vec2 at{-mechanism.base_spring->width / 2.0,
                  sb.min.y - mechanism.travel - outline.height};
    for (const auto& c : outline.cuts) base.cuts.push_back(translate(c, at));
    hole_centres.push_back(at + Vec2{mechanism.base_spring->width / 2.0,
                                     mechanism.base_spring->tab_height / 2.0});
    extent = merge(extent, part_bounds(base));
    d.parts.push_back(std::move(base));
  }

  // Chassis plate symmetric about the slider axis.
  const double half = std::max(std::abs(extent.min.x), std::abs(extent.max.x)) +
                      options.chassis_margin;
  const BBox plate{{-half, extent.min.y - options.chassis_margin},
                   {half, extent.max.y + options.chassis_margin}};
  Part chassis;
  chassis.name = "chassis plate";
  chassis.cuts.push_back(rectangle(plate));
  chassis.labels.push_back({{0.0, plate.min.y + 2.0}, "chassis", 2.0});
  const std::size_t chassis_index = d.parts.size();
  d.parts.push_back(std::move(chassis));

  const double inset = 4.0;
  hole_centres.push_back({plate.min.x + inset, plate.min.y + inset});
  hole_centres.push_back({plate.max.x - inset, plate.min.y + inset});
  hole_centres.push_back({plate.max.x - inset, plate.max.y - inset});
  hole_centres.push_back({plate.min.x + inset, plate.max.y - inset});
  Part holes;
  holes.name = "fastener holes";
  for (const auto& c : hole_centres) holes.cuts.push_back(circle_polyline(c, kM3Clearance, 48));
  holes.rides_with = chassis_index;
  d.parts.push_back(std::move(holes));

  // Shelf nesting, tallest first.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < d.parts.size(); ++i) {
    if (!d.parts[i].rides_with) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return part_bounds(d.parts[a]).height() > part_bounds(d.parts[b]).height();
  });
  double x = 0.0;
  double y = 0.0;
  double shelf = 0.0;
  for (std::size_t i : order) {
    const BBox b = part_bounds(d.parts[i]);
    if (x > 0.0 && x + b.width() > options.sheet_width) {
      y += shelf + options.part_spacing;
      x = 0.0;
      shelf = 0.0;
    }
    d.parts[i].offset = Vec2{x - b.min.x, y - b.min.y};
    x += b.width() + options.part_spacing;
    shelf = std::max(shelf, b.height());
  }
  for (auto& p : d.parts) {
    if (p.rides_with) p.offset = d.parts[*p.rides_with].offset;
  }
  d.sheet = bounds(d.cut_layer());
  return d;
}

std::string_view to_string(ViolationKind kind) {
  return kind == ViolationKind::thin_wall ? "thin_wall" : "narrow_gap";
}

namespace {

struct Sample {
  Point2 p;
  Vec2 normal;  // unit, perpendicular to the edge
};

// Vertices where the outline turns by more than this are corners; rays cast
// right next to them measure the corner, not a wall.
constexpr double kCornerTurn = 25.0 * 3.14159265358979323846 / 180.0;

std::vector<Sample> edge_samples(const Polyline& ring, double interval, double corner_clearance) {
  const auto& pts = ring.points();
  const std::size_t n = ring.segment_count();
  std::vector<Point2> corners;
  for (std::size_t v = 0; v < pts.size(); ++v) {
    if (!ring.closed() && (v == 0 || v + 1 == pts.size())) {
      corners.push_back(pts[v]);
      continue;
    }
    const Point2 prev = pts[(v + pts.size() - 1) % pts.size()];
    const Point2 next = pts[(v + 1) % pts.size()];
    const Vec2 a = (pts[v] - prev).normalized();
    const Vec2 b = (next - pts[v]).normalized();
    const double turn = std::atan2(std::abs(a.cross(b)), a.dot(b));
    if (turn > kCornerTurn) corners.push_back(pts[v]);
  }
  std::vector<Sample> out;
  double carry = interval / 2.0;  // arclength to the next sample
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring.segment_start(i);
    const Point2 b = ring.segment_end(i);
    const double len = distance(a, b);
    const Vec2 dir = (b - a) / len;
    double t = carry;
    for (; t < len; t += interval) {
      const Point2 p = a + dir * t;
      const bool near_corner = std::any_of(corners.begin(), corners.end(), [&](Point2 c) {
        return distance(c, p) < corner_clearance;
      });
      if (!near_corner) out.push_back({p, dir.perp_cw()});
    }
    carry = t - len;
  }
  return out;
}

std::optional<double> nearest_hit(std::span<const Polyline> rings, Point2 origin, Vec2 dir) {
  std::optional<double> best;
  for (const auto& r : rings) {
    for (std::size_t i = 0; i < r.segment_count(); ++i) {
      if (auto t = ray_segment_hit(origin, dir, r.segment_start(i), r.segment_end(i), 1e-9)) {
        if (!best || *t < *best) best = t;
      }
    }
  }
  return best;
}

}  // namespace

std::vector<Violation> check_outline(std::span<const Polyline> rings, const FeasibilityRule& rules,
                                     std::string_view part) {
  std::vector<Violation> raw;
  const double kerf_loss = rules.kerf - rules.reference_kerf;
  for (const auto& ring : rings) {
    for (const auto& s : edge_samples(ring, rules.sample_interval, rules.min_wall / 2.0)) {
      const bool material_along_normal = inside_even_odd(rings, s.p + s.normal * 1e-6);
      const Vec2 into_material = material_along_normal ? s.normal : -s.normal;
      if (auto t = nearest_hit(rings, s.p, into_material)) {
        const double effective = *t - kerf_loss;
        if (effective < rules.min_wall - kWallTolerance) {
          raw.push_back({ViolationKind::thin_wall, std::string(part), s.p + into_material * (*t / 2.0),
                         *t, effective, rules.min_wall});
        }
      }
      if (auto t = nearest_hit(rings, s.p, -into_material)) {
        if (*t < rules.min_feature_spacing - kWallTolerance) {
          raw.push_back({ViolationKind::narrow_gap, std::string(part), s.p - into_material * (*t / 2.0),
                         *t, *t, rules.min_feature_spacing});
        }
      }
    }
  }
  // One report per offending feature: samples chained within a small radius
  // of each other belong together.
  constexpr double kClusterRadius = 1.5;
  std::vector<Violation> merged;
  std::vector<std::vector<Point2>> members;
  for (const auto& v : raw) {
    std::optional<std::size_t> home;
    for (std::size_t i = 0; i < merged.size() && !home; ++i) {
      if (merged[i].kind != v.kind) continue;
      for (const auto& m : members[i]) {
        if (distance(m, v.location) <= kClusterRadius) {
          home = i;
          break;
        }
      }
    }
    if (!home) {
      merged.push_back(v);
      members.push_back({v.location});
      continue;
    }
    members[*home].push_back(v.location);
    if (v.effective < merged[*home].effective) {
      merged[*home].location = v.location;
      merged[*home].measured = v.measured;
      merged[*home].effective = v.effective;
    }
  }
  return merged;
}

std::vector<Violation> check_feasibility(const SwatchDrawing& drawing, const FeasibilityRule& rules) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < drawing.parts.size(); ++i) {
    const Part& p = drawing.parts[i];
    if (p.rides_with) continue;
    std::vector<Polyline> rings;
    for (const auto& c : p.cuts) rings.push_back(translate(c, p.offset));
    for (const auto& q : drawing.parts) {
      if (q.rides_with == i) {
        for (const auto& c : q.cuts) rings.push_back(translate(c, q.offset));
      }
    }
    auto v = check_outline(rings, rules, p.name);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<std::string> laser_settings_comments() {
  return {
      "material: POM sheet, 3 mm thick; raise the sheet off the bed to avoid back burn",
      "laser pass 1: speed 3.4 mm/s, power 7.8 W, frequency 500 Hz",
      "laser pass 2: speed 3.4 mm/s, power 3.0 W, frequency 500 Hz",
      "layers: cut = through cuts, engrave = labels; units mm",
  };
}

std::string export_fabrication_svg(const SwatchDrawing& drawing) {
  std::vector<SvgLayer> layers(2);
  layers[0].name = "cut";
  layers[0].stroke = "#ff0000";
  layers[0].shapes = drawing.cut_layer();
  layers[1].name = "engrave";
  layers[1].stroke = "#0000ff";
  layers[1].shapes = drawing.engrave_layer();
  for (const auto& p : drawing.parts) {
    for (const auto& l : p.labels) {
      layers[1].labels.push_back({l.position + p.offset, l.text, l.size_mm});
    }
  }
  DrawingMetadata meta;
  meta.title = "detent swatch";
  meta.comments = laser_settings_comments();
  return export_layers_svg(layers, meta);
}

std::vector<Polyline> read_cut_layer(std::string_view svg) {
  const auto shapes = import_svg_shapes(svg);
  const bool layered = std::any_of(shapes.begin(), shapes.end(),
                                   [](const SvgShape& s) { return s.layer == "cut"; });
  std::vector<Polyline> out;
  for (const auto& s : shapes) {
    if (layered && s.layer != "cut") continue;
    if (s.polyline.closed()) out.push_back(s.polyline);
  }
  return out;
}

}  // namespace detent
