#include "detent/springs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "detent/error.hpp"
#include "detent/svg.hpp"

namespace detent {

namespace {

constexpr double kGridEps = 1e-9;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line, const char* column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::schema, "coefficient table line " + std::to_string(line) +
                                       ": bad " + column + " '" + s + "'");
  }
}

std::string fmt_range(double lo, double hi) {
  return format_number(lo) + "-" + format_number(hi) + " mm";
}

// Linear interpolation over (x, y) pairs sorted by x.
std::optional<double> interpolate(const std::vector<std::pair<double, double>>& pts, double x) {
  if (pts.empty()) return std::nullopt;
  if (x < pts.front().first - kGridEps || x > pts.back().first + kGridEps) return std::nullopt;
  for (const auto& [px, py] : pts) {
    if (std::abs(px - x) <= kGridEps) return py;
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (x < pts[i].first) {
      const auto [x0, y0] = pts[i - 1];
      const auto [x1, y1] = pts[i];
      const double t = (x - x0) / (x1 - x0);
      return y0 + t * (y1 - y0);
    }
  }
  return pts.back().second;
}

}  // namespace

std::string_view to_string(SpringFamily family) {
  switch (family) {
    case SpringFamily::A: return "A";
    case SpringFamily::B: return "B";
    case SpringFamily::C: return "C";
  }
  return "?";
}

SpringFamily parse_family(std::string_view text) {
  if (text == "A" || text == "a") return SpringFamily::A;
  if (text == "B" || text == "b") return SpringFamily::B;
  if (text == "C" || text == "c") return SpringFamily::C;
  throw Error(ErrorCode::invalid_argument,
              "unknown side spring family '" + std::string(text) + "' (expected A, B or C)");
}

const CoefficientTable& CoefficientTable::builtin() {
  static const CoefficientTable table = [] {
    CoefficientTable t;
    using F = SpringFamily;
    const SideCoefficientRow side[] = {
        {F::A, 1.0, 0.23, 0.13}, {F::A, 1.1, 0.30, 0.17}, {F::A, 1.2, 0.39, 0.22},
        {F::A, 1.3, 0.50, 0.28}, {F::A, 1.4, 0.61, 0.35}, {F::A, 1.5, 0.74, 0.42},
        {F::B, 1.6, 0.53, 0.30}, {F::B, 1.7, 0.64, 0.36}, {F::B, 1.8, 0.75, 0.43},
        {F::B, 1.9, 0.87, 0.50}, {F::B, 2.0, 1.01, 0.58}, {F::C, 2.1, 0.77, 0.44},
        {F::C, 2.2, 0.89, 0.51}, {F::C, 2.3, 1.01, 0.58}, {F::C, 2.4, 1.15, 0.65},
        {F::C, 2.5, 1.29, 0.74},
    };
    const BaseCoefficientRow base[] = {
        {16.0, 1.0, 14.14, 0.32, 0.16}, {16.0, 1.2, 13.75, 0.55, 0.27},
        {16.0, 1.4, 13.35, 0.89, 0.43}, {16.0, 1.6, 12.96, 1.33, 0.65},
        {16.0, 1.8, 12.56, 1.91, 0.94}, {20.0, 1.0, 18.11, 0.16, 0.08},
        {20.0, 1.2, 17.71, 0.28, 0.14}, {20.0, 1.4, 17.32, 0.44, 0.22},
        {20.0, 1.6, 16.92, 0.66, 0.32}, {20.0, 1.8, 16.52, 0.95, 0.47},
        {24.0, 1.0, 22.09, 0.09, 0.04}, {24.0, 1.2, 21.69, 0.16, 0.08},
        {24.0, 1.4, 21.29, 0.25, 0.12}, {24.0, 1.6, 20.90, 0.38, 0.18},
        {24.0, 1.8, 20.50, 0.54, 0.27},
    };
    for (const auto& r : side) t.side_rows_.push_back(r);
    for (const auto& r : base) t.base_rows_.push_back(r);
    return t;
  }();
  return table;
}

CoefficientTable CoefficientTable::parse_csv(std::string_view text) {
  CoefficientTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const std::string body = trim(std::string_view(s).substr(1));
      const auto colon = body.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = trim(std::string_view(body).substr(0, colon));
      const std::string value = trim(std::string_view(body).substr(colon + 1));
      if (key == "version") t.version_ = value;
      if (key == "side_factor") t.side_factor_ = parse_double(value, line_no, "side_factor");
      if (key == "base_factor") t.base_factor_ = parse_double(value, line_no, "base_factor");
      continue;
    }
    const auto cells = split_csv(s);
    if (!header_seen) {
      const std::vector<std::string> expected = {"kind", "family_or_width", "T", "B",
                                                 "fea_slope", "adjusted_slope"};
      if (cells != expected) {
        throw Error(ErrorCode::schema,
                    "coefficient table line " + std::to_string(line_no) +
                        ": expected header kind,family_or_width,T,B,fea_slope,adjusted_slope");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 6) {
      throw Error(ErrorCode::schema, "coefficient table line " + std::to_string(line_no) +
                                         ": expected 6 columns, got " +
                                         std::to_string(cells.size()));
    }
    if (cells[0] == "side") {
      SpringFamily fam;
      try {
        fam = parse_family(cells[1]);
      } catch (const Error&) {
        throw Error(ErrorCode::schema, "coefficient table line " + std::to_string(line_no) +
                                           ": unknown family '" + cells[1] + "'");
      }
      t.add_side_row({fam, parse_double(cells[2], line_no, "T"),
                      parse_double(cells[4], line_no, "fea_slope"),
                      parse_double(cells[5], line_no, "adjusted_slope")});
    } else if (cells[0] == "base") {
      t.add_base_row({parse_double(cells[1], line_no, "W"), parse_double(cells[2], line_no, "T"),
                      parse_double(cells[3], line_no, "B"),
                      parse_double(cells[4], line_no, "fea_slope"),
                      parse_double(cells[5], line_no, "adjusted_slope")});
    } else {
      throw Error(ErrorCode::schema, "coefficient table line " + std::to_string(line_no) +
                                         ": unknown kind '" + cells[0] + "'");
    }
  }
  if (!header_seen) throw Error(ErrorCode::schema, "coefficient table has no header");
  return t;
}

CoefficientTable CoefficientTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open coefficient table " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string CoefficientTable::to_csv() const {
  std::string out;
  out += "# version: " + version_ + "\n";
  out += "# side_factor: " + format_number(side_factor_) + "\n";
  out += "# base_factor: " + format_number(base_factor_) + "\n";
  out += "kind,family_or_width,T,B,fea_slope,adjusted_slope\n";
  for (const auto& r : side_rows_) {
    out += "side," + std::string(to_string(r.family)) + "," + format_number(r.thickness) +
           ",," + format_number(r.fea_slope) + "," + format_number(r.adjusted_slope) + "\n";
  }
  for (const auto& r : base_rows_) {
    out += "base," + format_number(r.width) + "," + format_number(r.thickness) + "," +
           format_number(r.beam_length) + "," + format_number(r.fea_slope) + "," +
           format_number(r.adjusted_slope) + "\n";
  }
  return out;
}

void CoefficientTable::add_side_row(const SideCoefficientRow& row) {
  if (!(row.adjusted_slope > 0.0) || !(row.thickness > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "side coefficient row needs positive T and slope");
  }
  auto it = std::find_if(side_rows_.begin(), side_rows_.end(), [&](const auto& r) {
    return r.family == row.family && std::abs(r.thickness - row.thickness) <= kGridEps;
  });
  if (it != side_rows_.end()) *it = row;
  else side_rows_.push_back(row);
}

void CoefficientTable::add_base_row(const BaseCoefficientRow& row) {
  if (!(row.adjusted_slope > 0.0) || !(row.thickness > 0.0) || !(row.width > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "base coefficient row needs positive W, T, slope");
  }
  auto it = std::find_if(base_rows_.begin(), base_rows_.end(), [&](const auto& r) {
    return std::abs(r.width - row.width) <= kGridEps &&
           std::abs(r.thickness - row.thickness) <= kGridEps;
  });
  if (it != base_rows_.end()) *it = row;
  else base_rows_.push_back(row);
}

std::pair<double, double> CoefficientTable::family_range(SpringFamily family) const {
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& r : side_rows_) {
    if (r.family != family) continue;
    lo = std::min(lo, r.thickness);
    hi = std::max(hi, r.thickness);
  }
  if (lo > hi) {
    throw Error(ErrorCode::out_of_range,
                "no coefficient rows for family " + std::string(to_string(family)));
  }
  return {lo, hi};
}

double CoefficientTable::side_coefficient(SpringFamily family, double ring_thickness) const {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : side_rows_) {
    if (r.family == family) pts.emplace_back(r.thickness, r.adjusted_slope);
  }
  std::sort(pts.begin(), pts.end());
  if (const auto v = interpolate(pts, ring_thickness)) return *v;
  const auto [lo, hi] = family_range(family);
  throw Error(ErrorCode::out_of_range,
              "ring thickness " + format_number(ring_thickness) + " mm is outside family " +
                  std::string(to_string(family)) + " (valid " + fmt_range(lo, hi) + ")");
}

template <typename Field>
double CoefficientTable::base_lookup(double width, double arm_thickness, Field field) const {
  std::map<double, std::vector<std::pair<double, double>>> by_width;
  for (const auto& r : base_rows_) by_width[r.width].emplace_back(r.thickness, field(r));
  for (auto& [w, pts] : by_width) std::sort(pts.begin(), pts.end());
  if (by_width.empty()) throw Error(ErrorCode::out_of_range, "no base spring rows");

  auto fail = [&]() -> double {
    const double wlo = by_width.begin()->first;
    const double whi = by_width.rbegin()->first;
    const auto& pts = by_width.begin()->second;
    throw Error(ErrorCode::out_of_range,
                "base spring (W " + format_number(width) + ", T " + format_number(arm_thickness) +
                    ") is outside the grid (W " + fmt_range(wlo, whi) + ", T " +
                    fmt_range(pts.front().first, pts.back().first) + ")");
  };

  auto at_width = [&](const std::vector<std::pair<double, double>>& pts) {
    const auto v = interpolate(pts, arm_thickness);
    return v ? *v : fail();
  };
  for (const auto& [w, pts] : by_width) {
    if (std::abs(w - width) <= kGridEps) return at_width(pts);
  }
  auto upper = by_width.upper_bound(width);
  if (upper == by_width.begin() || upper == by_width.end()) return fail();
  auto lower = std::prev(upper);
  const double v0 = at_width(lower->second);
  const double v1 = at_width(upper->second);
  const double t = (width - lower->first) / (upper->first - lower->first);
  return v0 + t * (v1 - v0);
}

double CoefficientTable::base_coefficient(double width, double arm_thickness) const {
  return base_lookup(width, arm_thickness, [](const BaseCoefficientRow& r) { return r.adjusted_slope; });
}

double CoefficientTable::base_beam_length(double width, double arm_thickness) const {
  return base_lookup(width, arm_thickness, [](const BaseCoefficientRow& r) { return r.beam_length; });
}

CoefficientTable load_default_table() {
  if (const char* path = std::getenv("DETENT_COEFFICIENTS"); path && *path) {
    return CoefficientTable::load(path);
  }
  return CoefficientTable::builtin();
}

// ---------------------------------------------------------------------------

SideSpringGeometry SideSpringGeometry::for_family(SpringFamily family) {
  SideSpringGeometry g;
  switch (family) {
    case SpringFamily::A: g.ring_inner_radius = 4.0; break;
    case SpringFamily::B: g.ring_inner_radius = 5.0; break;
    case SpringFamily::C: g.ring_inner_radius = 6.0; break;
  }
  return g;
}

double SideSpringSpec::arm_width() const {
  return geometry.arm_width.value_or(ring_thickness + 1.0);
}

Point2 SideSpringSpec::resolved_rest_tip() const {
  if (rest_tip) return *rest_tip;
  const double sx = side == Side::left ? 1.0 : -1.0;
  const double apex_x = arm_width() / 2.0 + geometry.tip_height;
  return pivot + Vec2{sx * apex_x, geometry.arm_reach};
}

double SideSpringSpec::arm_length() const { return distance(pivot, resolved_rest_tip()); }

SideSpringSpec make_side_spring(SpringFamily family, double ring_thickness, Side side,
                                Point2 pivot, const CoefficientTable& table) {
  SideSpringSpec spec;
  spec.family = family;
  spec.ring_thickness = ring_thickness;
  spec.coefficient_k = table.side_coefficient(family, ring_thickness);
  spec.side = side;
  spec.pivot = pivot;
  spec.geometry = SideSpringGeometry::for_family(family);
  return spec;
}

SideSpringSpec mirror_x(const SideSpringSpec& spec) {
  SideSpringSpec m = spec;
  m.side = spec.side == Side::left ? Side::right : Side::left;
  m.pivot = {-spec.pivot.x, spec.pivot.y};
  if (spec.rest_tip) m.rest_tip = Point2{-spec.rest_tip->x, spec.rest_tip->y};
  return m;
}

BaseSpringSpec make_base_spring(double width, double arm_thickness, const CoefficientTable& table) {
  BaseSpringSpec spec;
  spec.width = width;
  spec.arm_thickness = arm_thickness;
  spec.coefficient_kb = table.base_coefficient(width, arm_thickness);
  spec.beam_length = table.base_beam_length(width, arm_thickness);
  return spec;
}

// ---------------------------------------------------------------------------

Point2 ArmModel::tip(double angle) const {
  const double sx = side == Side::left ? 1.0 : -1.0;
  const double sy = arm_up ? 1.0 : -1.0;
  return {pivot.x + sx * (arm_length * std::cos(angle)),
          pivot.y + sy * (arm_length * std::sin(angle))};
}

double ArmModel::tip_deflection(double angle) const {
  return arm_length * (std::cos(rest_angle) - std::cos(angle));
}

double ArmModel::angle_for_deflection(double d) const {
  const double c = std::cos(rest_angle) - d / arm_length;
  if (c < -1.0 - 1e-12 || c > 1.0 + 1e-12) {
    throw Error(ErrorCode::out_of_range, "deflection " + format_number(d) +
                                             " mm is beyond the arm's reach");
  }
  return std::acos(std::clamp(c, -1.0, 1.0));
}

ArmModel abstract_arm(const SideSpringSpec& spec) {
  const Point2 tip = spec.resolved_rest_tip();
  const Vec2 v = tip - spec.pivot;
  const double length = v.norm();
  if (!(length > spec.max_deflection)) {
    throw Error(ErrorCode::invalid_argument,
                "arm length must exceed the maximum tip deflection");
  }
  if (!(spec.coefficient_k > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "spring coefficient must be positive");
  }
  ArmModel arm;
  arm.pivot = spec.pivot;
  arm.arm_length = length;
  arm.side = spec.side;
  arm.arm_up = v.y >= 0.0;
  arm.coefficient_k = spec.coefficient_k;
  arm.max_deflection = spec.max_deflection;
  arm.tip_radius = spec.tip_radius;
  const double sx = spec.side == Side::left ? 1.0 : -1.0;
  const double sy = arm.arm_up ? 1.0 : -1.0;
  arm.rest_angle = std::atan2(sy * v.y, sx * v.x);
  if (std::cos(arm.rest_angle) - spec.max_deflection / length < -1.0) {
    throw Error(ErrorCode::invalid_argument,
                "arm orientation cannot reach the maximum tip deflection");
  }
  arm.max_angle = arm.angle_for_deflection(spec.max_deflection);
  return arm;
}

// ---------------------------------------------------------------------------

Polyline circle_polyline(Point2 centre, double radius, int segments) {
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(segments));
  for (int k = 0; k < segments; ++k) {
    const double a = 2.0 * std::numbers::pi * k / segments;
    pts.push_back(centre + Vec2{radius * std::cos(a), radius * std::sin(a)});
  }
  return Polyline(std::move(pts), true);
}

namespace {

[[noreturn]] void infeasible(const std::string& what) {
  throw Error(ErrorCode::feasibility, what);
}

// Grid angles 2*pi*k/n strictly inside (from, to), walking in the given
// direction. The shared grid keeps concentric arcs radially aligned.
void append_arc(std::vector<Point2>& out, double radius, double from, double to, int n,
                bool ccw) {
  const double step = 2.0 * std::numbers::pi / n;
  if (ccw) {
    long k = static_cast<long>(std::floor(from / step)) + 1;
    for (; k * step < to - 1e-12; ++k) {
      const double a = k * step;
      if (a <= from + 1e-12) continue;
      const double g = std::fmod(static_cast<double>(k), static_cast<double>(n));
      const double ga = 2.0 * std::numbers::pi * (g < 0 ? g + n : g) / n;
      out.push_back({radius * std::cos(ga), radius * std::sin(ga)});
    }
  } else {
    long k = static_cast<long>(std::ceil(from / step)) - 1;
    for (; k * step > to + 1e-12; --k) {
      const double a = k * step;
      if (a >= from - 1e-12) continue;
      const double g = std::fmod(static_cast<double>(k), static_cast<double>(n));
      const double ga = 2.0 * std::numbers::pi * (g < 0 ? g + n : g) / n;
      out.push_back({radius * std::cos(ga), radius * std::sin(ga)});
    }
  }
}

Polyline place(const std::vector<Point2>& local, const SideSpringSpec& spec) {
  const double sx = spec.side == Side::left ? 1.0 : -1.0;
  std::vector<Point2> pts;
  pts.reserve(local.size());
  for (const auto& p : local) pts.push_back({spec.pivot.x + sx * p.x, spec.pivot.y + p.y});
  return Polyline(std::move(pts), true);
}

}  // namespace

SpringOutline generate_side_spring_outline(const SideSpringSpec& spec) {
  const auto& g = spec.geometry;
  const double t = spec.ring_thickness;
  const double w = spec.arm_width();
  const double hw = w / 2.0;
  const double ri = g.ring_inner_radius;
  const double ro = ri + t;
  const double rh = g.hub_radius;
  const double hb = g.bridge_width / 2.0;
  const double h = g.tip_height;
  const double reach = g.arm_reach;
  const int n = g.circle_segments;

  if (t < kMinWall) infeasible("ring thickness " + format_number(t) + " mm is below the 1 mm wall rule");
  if (w < kMinWall) infeasible("arm width " + format_number(w) + " mm is below the 1 mm wall rule");
  if (!(w > t)) infeasible("arm must be thicker than the ring");
  if (rh - g.hole_radius < kMinWall) infeasible("hub wall around the mounting hole is below 1 mm");
  if (g.bridge_width < kMinWall) infeasible("hub bridge is below 1 mm");
  if (ri - rh < kMinWall) infeasible("ring-to-hub slot is narrower than 1 mm");
  if (hb >= rh) infeasible("hub bridge is wider than the hub");
  if (hw >= ro) infeasible("arm is wider than the ring");
  if (h <= 0.0) infeasible("tip height must be positive");
  if (n < 16) infeasible("too few circle segments");
  const double y_join = std::sqrt(ro * ro - hw * hw);
  if (reach - h < y_join + kMinWall) infeasible("tip overlaps the ring");

  const double top = reach + h + g.arm_overhang;
  std::vector<Point2> outer = {
      {hw, y_join}, {hw, reach - h}, {hw + h, reach}, {hw, reach + h}, {hw, top}, {-hw, top},
      {-hw, y_join}};
  const double a_left = std::atan2(y_join, -hw);
  const double a_right = std::atan2(y_join, hw) + 2.0 * std::numbers::pi;
  append_arc(outer, ro, a_left, a_right, n, true);

  const double yi = std::sqrt(ri * ri - hb * hb);
  const double yh = std::sqrt(rh * rh - hb * hb);
  std::vector<Point2> slot = {{hb, -yh}, {hb, -yi}};
  const double bi = std::atan2(-yi, hb);
  // The slot runs the long way round, from the right of the bridge to its left.
  append_arc(slot, ri, bi, std::numbers::pi - bi, n, true);
  slot.push_back({-hb, -yi});
  slot.push_back({-hb, -yh});
  const double bh = std::atan2(-yh, hb);
  append_arc(slot, rh, std::numbers::pi - bh, bh, n, false);

  SpringOutline out;
  out.cuts.push_back(place(outer, spec));
  out.cuts.push_back(place(slot, spec));
  // An even count keeps the hole mirror-symmetric about the vertical.
  out.cuts.push_back(circle_polyline(spec.pivot, g.hole_radius, 2 * std::max(16, n / 16)));
  out.pivot = spec.pivot;
  const double sx = spec.side == Side::left ? 1.0 : -1.0;
  out.rest_tip = spec.pivot + Vec2{sx * (hw + h), reach};
  return out;
}

BaseSpringOutline generate_base_spring_outline(const BaseSpringSpec& spec) {
  const double width = spec.width;
  const double t = spec.arm_thickness;
  const double g = spec.slot_height;
  const int beams = spec.beam_count;
  if (t < kMinWall) infeasible("beam thickness " + format_number(t) + " mm is below the 1 mm wall rule");
  if (beams < 1) infeasible("base spring needs at least one beam");
  if (g < kMinWall) infeasible("slot height below 1 mm");
  if (spec.tab_height - 2.0 * 1.7 < 2.0 * kMinWall) infeasible("mounting tab too short for an M3 hole");
  // End connectors keep at least 1 mm of wall; the free span shrinks if needed.
  const double connector = std::max((width - spec.beam_length) / 2.0, kMinWall);
  const double clear = width - 2.0 * connector;
  if (clear <= 0.0) infeasible("beam length leaves no free span");

  const double tab = spec.tab_height;
  // Slot k occupies [s_k, s_k + g]; beams sit between slots.
  std::vector<double> slot_y;
  double y = tab;
  for (int k = 0; k <= beams; ++k) {
    slot_y.push_back(y);
    y += g + (k < beams ? t : 0.0);
  }
  const double height = y + tab;

  std::vector<Point2> pts = {{0.0, 0.0}, {width, 0.0}};
  for (int k = 0; k <= beams; ++k) {
    if (k % 2 == 1) {  // opens to the right
      pts.push_back({width, slot_y[k]});
      pts.push_back({connector, slot_y[k]});
      pts.push_back({connector, slot_y[k] + g});
      pts.push_back({width, slot_y[k] + g});
    }
  }
  pts.push_back({width, height});
  pts.push_back({0.0, height});
  for (int k = beams; k >= 0; --k) {
    if (k % 2 == 0) {  // opens to the left
      pts.push_back({0.0, slot_y[k] + g});
      pts.push_back({width - connector, slot_y[k] + g});
      pts.push_back({width - connector, slot_y[k]});
      pts.push_back({0.0, slot_y[k]});
    }
  }

  BaseSpringOutline out;
  out.cuts.push_back(Polyline(std::move(pts), true));
  out.cuts.push_back(circle_polyline({width / 2.0, tab / 2.0}, 1.7, 48));
  out.cuts.push_back(circle_polyline({width / 2.0, height - tab / 2.0}, 1.7, 48));
  out.clear_length = clear;
  out.connector_width = connector;
  out.height = height;
  return out;
}

}  // namespace detent
