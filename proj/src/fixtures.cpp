#include "detent/fixtures.hpp"

#include <cmath>
#include <numbers>

#include "detent/error.hpp"

namespace detent::fixtures {

namespace {

double side_sign(Side side) { return side == Side::left ? -1.0 : 1.0; }

Point2 rest_tip(Side side) { return {side_sign(side) * -kLeftRestTip.x, kLeftRestTip.y}; }

using Depths = std::vector<std::pair<double, double>>;

const Depths kBump = {{-1, 0}, {3, 0}, {5, 2}, {7, 0}, {12, 0}};
const Depths kTwoBumps = {{-1, 0}, {1.5, 0}, {3, 1.5}, {4.5, 0}, {5.5, 0},
                          {7, 2},  {8.5, 0}, {12, 0}};
const Depths kSawtooth = {{-1, 0}, {1, 0},   {3.2, 1.5}, {3.6, 0},  {4.2, 0}, {6.4, 1.5},
                          {6.8, 0}, {7.4, 0}, {9.6, 1.5}, {10, 0},   {12, 0}};
const Depths kNotch = {{-1, 0}, {1, 0}, {2.5, 1.5}, {4, 1.5}, {5, 0.5},
                       {6, 1.5}, {8, 1.5}, {9.5, 0}, {12, 0}};
constexpr double kStagger = 1.5;

Depths wave() {
  Depths d = {{-1, 0}};
  for (int i = 0; i <= 90; ++i) {
    const double y = 1.0 + 0.1 * i;
    d.emplace_back(y, 0.75 * (1.0 - std::cos(2.0 * std::numbers::pi * (y - 1.0) / 4.5)));
  }
  d.emplace_back(12, 0);
  return d;
}

Depths shifted(const Depths& in, double dy) {
  Depths out;
  for (auto [y, d] : in) {
    const double ys = y + dy;
    if (ys < kProfileBottom || ys > kProfileTop) continue;
    out.emplace_back(ys, d);
  }
  if (out.front().first > kProfileBottom) out.insert(out.begin(), {kProfileBottom, 0.0});
  if (out.back().first < kProfileTop) out.emplace_back(kProfileTop, 0.0);
  return out;
}

Mechanism mechanism_of(const Depths& left, const std::optional<Depths>& right) {
  Mechanism m;
  m.travel = kTravel;
  m.profiles.push_back(depth_profile(Side::left, left));
  m.side_springs.push_back(standard_spring(Side::left));
  if (right) {
    m.profiles.push_back(depth_profile(Side::right, *right));
    m.side_springs.push_back(standard_spring(Side::right));
  }
  return m;
}

}  // namespace

SideSpringSpec standard_spring(Side side, SpringFamily family, double ring_thickness) {
  SideSpringSpec probe = make_side_spring(family, ring_thickness, side, {0.0, 0.0});
  const Vec2 offset = probe.resolved_rest_tip();
  probe.pivot = rest_tip(side) - offset;
  return probe;
}

Profile depth_profile(Side side, const std::vector<std::pair<double, double>>& y_depth,
                      double rest_x) {
  std::vector<Point2> pts;
  for (auto [y, d] : y_depth) pts.push_back({side_sign(side) * (rest_x + d), y});
  return Profile(Polyline(std::move(pts)), side);
}

double travel_at(const ArmModel& arm, double profile_y, double d) {
  return profile_y - arm.tip(arm.angle_for_deflection(d)).y;
}

Fixture swatch(char letter) {
  Fixture f;
  f.key = std::string("swatch-") + static_cast<char>(letter - 'A' + 'a');
  f.expects_sticking = true;
  switch (letter) {
    case 'A':
      f.name = "A: single bump";
      f.description = "one 2 mm bump at 5 mm on both sides";
      f.mechanism = mechanism_of(kBump, kBump);
      f.mode = EditMode::symmetric;
      break;
    case 'B':
      f.name = "B: two bumps";
      f.description = "a 1.5 mm bump followed by a 2 mm bump";
      f.mechanism = mechanism_of(kTwoBumps, kTwoBumps);
      f.mode = EditMode::symmetric;
      break;
    case 'C':
      f.name = "C: sawtooth";
      f.description = "three slow ramps with sharp releases";
      f.mechanism = mechanism_of(kSawtooth, kSawtooth);
      f.mode = EditMode::symmetric;
      break;
    case 'D':
      f.name = "D: notch";
      f.description = "raised plateau with a detent notch in the middle";
      f.mechanism = mechanism_of(kNotch, kNotch);
      f.mode = EditMode::symmetric;
      break;
    case 'E':
      f.name = "E: wave";
      f.description = "two periods of a 1.5 mm cosine wave";
      f.mechanism = mechanism_of(wave(), wave());
      f.mode = EditMode::symmetric;
      break;
    case 'F':
      f.name = "F: staggered bump";
      f.description = "profile A on the left, the same bump 1.5 mm later on the right";
      f.mechanism = mechanism_of(kBump, shifted(kBump, kStagger));
      break;
    case 'G':
      f.name = "G: bump + sawtooth";
      f.description = "profile A on the left, profile C on the right";
      f.mechanism = mechanism_of(kBump, kSawtooth);
      break;
    default:
      throw Error(ErrorCode::invalid_argument, std::string("no fixture ") + letter);
  }
  if (letter == 'A' || letter == 'F' || letter == 'G') {
    f.feature_travel = travel_at(abstract_arm(f.mechanism.side_springs[0]), 5.0, 2.0);
  }
  return f;
}

Fixture swatch_with_base(char letter) {
  if (letter < 'A' || letter > 'C') {
    throw Error(ErrorCode::invalid_argument, std::string("no base-spring fixture ") + letter);
  }
  Fixture f = swatch(letter);
  f.key += "-base";
  f.name += " with base spring";
  f.description += "; W16 T1.0 base spring";
  f.mechanism.base_spring = make_base_spring(16.0, 1.0);
  f.expects_sticking = false;
  return f;
}

Fixture ramp() {
  Fixture f;
  f.key = "ramp";
  f.name = "45 degree ramp";
  f.description = "single-sided ramp reaching 2 mm deflection at s = 5 mm, then a 14 degree incline";
  const SideSpringSpec spring = standard_spring(Side::left, SpringFamily::A, 1.0);
  const ArmModel arm = abstract_arm(spring);
  const double x_rest = rest_tip(Side::left).x;
  const Point2 tip = arm.tip(arm.angle_for_deflection(2.0));
  const Point2 q{tip.x, tip.y + 5.0};  // contact point at s = 5 in the profile frame
  const double y_start = q.y - (x_rest - q.x);
  const Point2 knee{q.x - 0.5, q.y + 0.5};
  const double incline = std::tan(14.0 * std::numbers::pi / 180.0);
  std::vector<Point2> pts = {{x_rest, kProfileBottom},
                             {x_rest, y_start},
                             knee,
                             {knee.x - incline * (kProfileTop - knee.y), kProfileTop}};
  f.mechanism.travel = kTravel;
  f.mechanism.profiles.push_back(Profile(Polyline(std::move(pts)), Side::left));
  f.mechanism.side_springs.push_back(spring);
  f.feature_travel = 5.0;
  return f;
}

Fixture vertical_wall() {
  Fixture f;
  f.key = "wall";
  f.name = "vertical wall";
  f.description = "clear run-in, 45 degree lead-in, then a wall holding 2 mm deflection";
  const SideSpringSpec spring = standard_spring(Side::left, SpringFamily::A, 1.0);
  const ArmModel arm = abstract_arm(spring);
  const double x_rest = rest_tip(Side::left).x;
  const Point2 tip = arm.tip(arm.angle_for_deflection(2.0));
  // The tip reaches the wall at s = 4.05, midway between samples.
  const double wall_travel = 4.05;
  const double y_wall = tip.y + wall_travel;
  const double gap = 0.5;
  const double lead = (x_rest + gap) - tip.x;
  std::vector<Point2> pts = {{x_rest + gap, kProfileBottom},
                             {x_rest + gap, y_wall - lead},
                             {tip.x, y_wall},
                             {tip.x, kProfileTop}};
  f.mechanism.travel = kTravel;
  f.mechanism.profiles.push_back(Profile(Polyline(std::move(pts)), Side::left));
  f.mechanism.side_springs.push_back(spring);
  f.feature_travel = wall_travel;
  f.expects_sticking = true;
  return f;
}

Fixture spike() {
  Fixture f;
  f.key = "spike";
  f.name = "0.5 mm spike";
  f.description = "a 3 mm long, 0.5 mm wide tooth: below the 1 mm wall rule";
  f.mechanism = mechanism_of({{-1, 0}, {4.75, 0}, {4.76, 3}, {5.24, 3}, {5.25, 0}, {12, 0}},
                             std::nullopt);
  f.mode = EditMode::import;
  f.expects_sticking = true;
  return f;
}

std::vector<Fixture> bundled() {
  std::vector<Fixture> out;
  for (char c = 'A'; c <= 'G'; ++c) out.push_back(swatch(c));
  for (char c = 'A'; c <= 'C'; ++c) out.push_back(swatch_with_base(c));
  out.push_back(ramp());
  out.push_back(vertical_wall());
  out.push_back(spike());
  return out;
}

Gallery bundled_gallery() {
  Gallery g([] { return std::int64_t{0}; });
  for (auto& f : bundled()) {
    Project p;
    p.id = f.key;
    p.name = f.name;
    p.mechanism = std::move(f.mechanism);
    p.edit_mode = f.mode;
    g.insert(std::move(p));
  }
  return g;
}

}  // namespace detent::fixtures
