// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "detent/calibration.hpp"
#include "detent/contact.hpp"
#include "detent/error.hpp"
#include "detent/fabrication.hpp"
#include "detent/fixtures.hpp"
#include "detent/project_store.hpp"
#include "detent/svg.hpp"
#include "generators.hpp"

using namespace detent;
namespace fx = detent::fixtures;
using fx::Fixture;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failures for one criterion.
struct Check {
  std::vector<std::string> problems;
  std::size_t checked = 0;

  void expect(bool ok, const std::string& what) {
    ++checked;
    if (!ok && problems.size() < 5) problems.push_back(what);
    if (!ok && problems.size() == 5) problems.push_back("...");
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(15);
    s << what << ": got " << got << ", want " << want << " +- " << tol;
    expect(std::abs(got - want) <= tol, s.str());
  }
};

int failures = 0;

void report(const std::string& name, const std::function<std::string(Check&)>& body) {
  Check c;
  std::string note;
  try {
    note = body(c);
  } catch (const std::exception& e) {
    c.problems.push_back(std::string("threw: ") + e.what());
  }
  if (c.problems.empty()) {
    std::printf("PASS %s (%zu checks; %s)\n", name.c_str(), c.checked, note.c_str());
  } else {
    ++failures;
    std::printf("FAIL %s:", name.c_str());
    for (const auto& p : c.problems) std::printf(" [%s]", p.c_str());
    std::printf("\n");
  }
  std::fflush(stdout);
}

std::string timing(double secs) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f s", secs);
  return buf;
}

// Published rows, typed in independently of the library table.
struct SideRow {
  SpringFamily family;
  double t, fea, adjusted;
};
struct BaseRow {
  double w, t, b, fea, adjusted;
};

const std::vector<SideRow> kSideRows = {
    {SpringFamily::A, 1.0, 0.23, 0.13}, {SpringFamily::A, 1.1, 0.30, 0.17}, {SpringFamily::A, 1.2, 0.39, 0.22},
    {SpringFamily::A, 1.3, 0.50, 0.28}, {SpringFamily::A, 1.4, 0.61, 0.35}, {SpringFamily::A, 1.5, 0.74, 0.42},
    {SpringFamily::B, 1.6, 0.53, 0.30}, {SpringFamily::B, 1.7, 0.64, 0.36}, {SpringFamily::B, 1.8, 0.75, 0.43},
    {SpringFamily::B, 1.9, 0.87, 0.50}, {SpringFamily::B, 2.0, 1.01, 0.58}, {SpringFamily::C, 2.1, 0.77, 0.44},
    {SpringFamily::C, 2.2, 0.89, 0.51}, {SpringFamily::C, 2.3, 1.01, 0.58}, {SpringFamily::C, 2.4, 1.15, 0.65},
    {SpringFamily::C, 2.5, 1.29, 0.74}};

const std::vector<BaseRow> kBaseRows = {
    {16, 1.0, 14.14, 0.32, 0.16}, {16, 1.2, 13.75, 0.55, 0.27}, {16, 1.4, 13.35, 0.89, 0.43},
    {16, 1.6, 12.96, 1.33, 0.65}, {16, 1.8, 12.56, 1.91, 0.94}, {20, 1.0, 18.11, 0.16, 0.08},
    {20, 1.2, 17.71, 0.28, 0.14}, {20, 1.4, 17.32, 0.44, 0.22}, {20, 1.6, 16.92, 0.66, 0.32},
    {20, 1.8, 16.52, 0.95, 0.47}, {24, 1.0, 22.09, 0.09, 0.04}, {24, 1.2, 21.69, 0.16, 0.08},
    {24, 1.4, 21.29, 0.25, 0.12}, {24, 1.6, 20.90, 0.38, 0.18}, {24, 1.8, 20.50, 0.54, 0.27}};

std::string tables(Check& c) {
  const auto t0 = Clock::now();
  const CoefficientTable& table = CoefficientTable::builtin();
  for (const auto& r : kSideRows) {
    const std::string tag = std::string(to_string(r.family)) + " T" + format_number(r.t);
    c.expect(table.side_coefficient(r.family, r.t) == r.adjusted, "side " + tag + " lookup");
    c.near(r.fea * 0.57, r.adjusted, 0.01, "side " + tag + " factor");
  }
  for (const auto& r : kBaseRows) {
    const std::string tag = "W" + format_number(r.w) + " T" + format_number(r.t);
    c.expect(table.base_coefficient(r.w, r.t) == r.adjusted, "base " + tag + " lookup");
    c.near(r.fea * 0.49, r.adjusted, 0.01, "base " + tag + " factor");
  }
  c.expect(table.side_rows().size() == 16 && table.base_rows().size() == 15, "row counts");
  const double secs = seconds_since(t0);
  c.expect(secs < 1.0, "runtime " + timing(secs));
  return timing(secs);
}

// Dense sweep over rotation about the pivot, with its own geometry.
struct SweepOracle {
  Point2 pivot;
  Vec2 rest;     // rest tip relative to pivot
  double push;   // +1 when the profile lies toward +x
  double dir;    // rotation sense that moves the tip away from the profile
  double max_d;

  explicit SweepOracle(const SideSpringSpec& spec) {
    pivot = spec.pivot;
    const Point2 tip = spec.resolved_rest_tip();
    rest = Vec2{tip.x - pivot.x, tip.y - pivot.y};
    push = spec.side == Side::left ? 1.0 : -1.0;
    dir = push * (rest.y >= 0.0 ? 1.0 : -1.0);
    max_d = spec.max_deflection;
  }
  Point2 tip(double delta) const {
    const double a = dir * delta;
    return {pivot.x + rest.x * std::cos(a) - rest.y * std::sin(a),
            pivot.y + rest.x * std::sin(a) + rest.y * std::cos(a)};
  }
  double deflection(double delta) const { return push * (pivot.x + rest.x - tip(delta).x); }
  double max_delta() const {
    double lo = 0.0;
    double hi = std::numbers::pi - std::atan2(std::abs(rest.y), push * rest.x);
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (deflection(mid) < max_d ? lo : hi) = mid;
    }
    return lo;
  }
};

std::optional<double> contour_x_at(const std::vector<Point2>& pts, double y) {
  if (y < pts.front().y || y > pts.back().y) return std::nullopt;
  auto it = std::lower_bound(pts.begin(), pts.end(), y, [](const Point2& p, double v) { return p.y < v; });
  if (it == pts.begin()) return it->x;
  const Point2 b = *it;
  const Point2 a = *(it - 1);
  return a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y);
}

bool oracle_inside(const Profile& profile, Point2 q) {
  const auto x = contour_x_at(profile.contour().points(), q.y);
  const double material = profile.material() == MaterialSide::positive_x ? 1.0 : -1.0;
  return x && material * (q.x - *x) > 1e-9;
}

std::string contact_oracle(Check& c) {
  const auto t0 = Clock::now();
  constexpr int kSteps = 1 << 16;
  std::mt19937 rng(20240);
  std::size_t touching = 0, over = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Side side = trial % 2 == 0 ? Side::left : Side::right;
    const Profile profile = testgen::random_profile(rng, side, 4.2);
    const SideSpringSpec spec = fx::standard_spring(side);
    const ArmModel arm = abstract_arm(spec);
    const SweepOracle oracle(spec);
    const double dmax = oracle.max_delta();
    for (int k = 0; k < 50; ++k) {
      const double s = 10.0 * k / 49.0;
      const std::string at = "trial " + std::to_string(trial) + " s=" + format_number(s);
      auto blocked = [&](double delta) {
        const Point2 t = oracle.tip(delta);
        return oracle_inside(profile, {t.x, t.y + s});
      };
      int first_free = -1;
      for (int i = 0; i <= kSteps; ++i) {
        if (!blocked(dmax * i / kSteps)) {
          first_free = i;
          break;
        }
      }
      const ContactResult r = solve_contact(arm, profile, s);
      if (first_free < 0) {
        ++over;
        c.expect(r.state == ContactState::over_deflection, at + ": expected over-deflection");
        continue;
      }
      c.expect(r.state != ContactState::over_deflection, at + ": unexpected over-deflection");
      c.expect(!oracle_inside(profile, {r.tip.x, r.tip.y + s}), at + ": returned tip penetrates");
      if (first_free == 0) {
        c.near(r.tip_deflection_d, 0.0, 0.0, at + " rest");
        continue;
      }
      ++touching;
      const double d_hi = oracle.deflection(dmax * first_free / kSteps);
      const double d_lo = oracle.deflection(dmax * (first_free - 1) / kSteps);
      c.near(r.tip_deflection_d, d_hi, kDefaultContactTolerance + (d_hi - d_lo), at + " deflection");
    }
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 30.0, "runtime " + timing(secs));
  return std::to_string(touching) + " in contact, " + std::to_string(over) + " over-deflected, " + timing(secs);
}

std::string free_body(Check& c) {
  const double mu = 0.21;
  const double k = 0.13;
  const double d = 2.0;
  const EstimateOptions tight{.tolerance = 1e-10};

  const Mechanism ramp = fx::ramp().mechanism;
  c.near(ramp.friction_mu, mu, 0.0, "ramp friction");
  c.near(ramp.side_springs[0].coefficient_k, k, 0.0, "ramp k");
  const Reaction r = reaction_at(ramp, 5.0, tight);
  c.near(r.sides[0].contact.tip_deflection_d, d, 1e-6, "ramp deflection at s=5");
  // 45 degree incline: the normal and tangent are both at 1/sqrt(2) to y.
  c.near(r.forward, 0.5 * k * d * (1.0 + mu), 1e-6, "ramp forward");
  c.near(r.reverse, 0.5 * k * d * (1.0 - mu), 1e-6, "ramp reverse");
  c.near(r.forward, 0.1573, 1e-6, "ramp forward literal");
  c.near(r.reverse, 0.1027, 1e-6, "ramp reverse literal");

  const Mechanism wall = fx::vertical_wall().mechanism;
  for (double s : {5.0, 7.5, 10.0}) {
    const Reaction w = reaction_at(wall, s, tight);
    c.near(w.forward, mu * k * d, 1e-6, "wall forward at " + format_number(s));
    c.near(w.reverse, -mu * k * d, 1e-6, "wall reverse at " + format_number(s));
  }
  c.near(mu * k * d, 0.0546, 1e-12, "wall literal");
  return "tolerance 1e-10";
}

FDCurve frictionless(const Fixture& f) {
  Mechanism m = f.mechanism;
  m.friction_mu = 0.0;
  return estimate_curve(m, 0.1);
}

std::string hysteresis(Check& c) {
  for (const auto& f : fx::bundled()) {
    const FDCurve curve = frictionless(f);
    double worst = 0.0;
    double work = 0.0;
    for (std::size_t i = 0; i < curve.samples.size(); ++i) {
      const auto& p = curve.samples[i];
      worst = std::max(worst, std::abs(p.forward - p.reverse));
      if (i > 0) {
        const auto& q = curve.samples[i - 1];
        const double h = p.displacement - q.displacement;
        work += 0.5 * h * ((p.forward - p.reverse) + (q.forward - q.reverse));
      }
    }
    c.expect(worst < 1e-12, f.key + ": max |forward - reverse| = " + std::to_string(worst));
    c.expect(std::abs(work) < 1e-9, f.key + ": loop work " + std::to_string(work));
    c.expect(std::abs(loop_work(curve)) < 1e-9, f.key + ": library loop work");
  }
  return std::to_string(fx::bundled().size()) + " fixtures";
}

Mechanism one_side(const Mechanism& m, std::size_t i) {
  Mechanism out;
  out.travel = m.travel;
  out.friction_mu = m.friction_mu;
  out.profiles.push_back(m.profiles[i]);
  out.side_springs.push_back(m.side_springs[i]);
  return out;
}

std::string superposition(Check& c) {
  std::size_t n = 0;
  std::vector<Fixture> cases;
  for (const auto& f : fx::bundled()) {
    if (f.mechanism.double_sided()) cases.push_back(f);
  }
  // A base spring on an asymmetric pair as well.
  Fixture g = fx::swatch('G');
  g.key += " + base";
  g.mechanism.base_spring = make_base_spring(20.0, 1.4);
  cases.push_back(g);
  bool asymmetric = false;
  for (const auto& f : cases) {
    const Mechanism& m = f.mechanism;
    asymmetric |= !(mirror_x(m.profiles[0]).contour() == m.profiles[1].contour());
    const FDCurve both = estimate_curve(m);
    const FDCurve l = estimate_curve(one_side(m, 0));
    const FDCurve r = estimate_curve(one_side(m, 1));
    const double kb = m.base_spring ? m.base_spring->coefficient_kb : 0.0;
    for (std::size_t i = 0; i < both.samples.size(); ++i) {
      const double s = both.samples[i].displacement;
      const std::string at = f.key + " s=" + format_number(s);
      c.near(both.samples[i].forward, l.samples[i].forward + r.samples[i].forward + kb * s, 1e-12, at + " fwd");
      c.near(both.samples[i].reverse, l.samples[i].reverse + r.samples[i].reverse + kb * s, 1e-12, at + " rev");
    }
    ++n;
  }
  c.expect(asymmetric, "no asymmetric fixture was covered");
  return std::to_string(n) + " double-sided fixtures";
}

std::string sticking(Check& c) {
  const Fixture wall = fx::vertical_wall();
  const FDCurve w = estimate_curve(wall.mechanism);
  // Sampled contact span: first grid point at or past the wall, to full travel.
  const double start = std::ceil(*wall.feature_travel / w.step - 1e-9) * w.step;
  std::vector<Warning> stick;
  for (const auto& x : w.warnings) {
    if (x.kind == WarningKind::sticking) stick.push_back(x);
  }
  c.expect(stick.size() == 1, "wall: expected one sticking span, got " + std::to_string(stick.size()));
  if (!stick.empty()) {
    c.near(stick[0].from, start, 1e-9, "wall sticking start");
    c.near(stick[0].to, wall.mechanism.travel, 1e-9, "wall sticking end");
  }
  for (const auto& p : w.samples) {
    const bool on_wall = p.displacement >= start - 1e-9;
    c.expect((p.reverse < 0.0) == on_wall, "wall reverse sign at " + format_number(p.displacement));
  }
  const FDCurve ramp = estimate_curve(fx::ramp().mechanism);
  for (const auto& x : ramp.warnings) c.expect(x.kind != WarningKind::sticking, "ramp reported sticking");
  for (const auto& p : ramp.samples) c.expect(p.reverse >= 0.0, "ramp reverse below zero");
  return "wall " + format_number(std::round(start * 1e9) / 1e9) + " to " + format_number(wall.mechanism.travel) + " mm";
}

std::string calibration(Check& c) {
  const auto t0 = Clock::now();
  const MeasurementSeries sim = series_from_curve(estimate_curve(fx::swatch_with_base('A').mechanism));
  auto scaled = [&](double a) {
    MeasurementSeries m = sim;
    for (auto& x : m.samples) x.force *= a;
    return m;
  };
  c.near(fit_scale_factor(sim, scaled(0.57)), 0.57, 1e-12, "noiseless 0.57");

  std::mt19937 rng(49);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> fits;
  for (int t = 0; t < 100; ++t) {
    MeasurementSeries m = scaled(0.49);
    for (auto& x : m.samples) x.force += noise(rng);
    fits.push_back(fit_scale_factor(sim, m));
    c.near(fits.back(), 0.49, 0.02, "noisy trial " + std::to_string(t));
  }
  const FactorSummary summary = aggregate_factors(fits);
  c.near(summary.mean, 0.49, 0.02, "noisy mean");

  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < 100; ++t) {
    const double slope = u(rng);
    std::vector<std::pair<double, double>> xy;
    for (int i = 0; i < 20; ++i) {
      const double x = u(rng);
      xy.emplace_back(x, slope * x);
    }
    const FitResult r = fit_zero_intercept(xy);
    c.near(r.slope, slope, 1e-12, "planted slope");
    c.near(r.r_squared, 1.0, 1e-12, "R^2");
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 10.0, "runtime " + timing(secs));
  char buf[96];
  std::snprintf(buf, sizeof buf, "noisy mean %.4f sd %.4f, %s", summary.mean, summary.sd, timing(secs).c_str());
  return buf;
}

std::string round_trips(Check& c) {
  std::mt19937 rng(200);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Profile p = testgen::random_profile(rng, t % 2 ? Side::right : Side::left);
    const Polyline& line = p.contour();
    const Profile back = import_profile_svg(export_polyline_svg(std::span(&line, 1)));
    c.expect(back.contour().size() == line.size(), "profile vertex count");
    for (std::size_t i = 0; i < std::min(line.size(), back.contour().size()); ++i) {
      worst = std::max(worst, distance(back.contour().points()[i], line.points()[i]));
    }
  }
  for (const auto& f : fx::bundled()) {
    const SwatchDrawing d = layout_swatch(f.mechanism);
    const auto cuts = d.cut_layer();
    const auto back = read_cut_layer(export_fabrication_svg(d));
    c.expect(back.size() == cuts.size(), f.key + ": cut shape count");
    for (std::size_t i = 0; i < std::min(back.size(), cuts.size()); ++i) {
      c.expect(back[i].size() == cuts[i].size(), f.key + ": vertex count");
      for (std::size_t k = 0; k < std::min(back[i].size(), cuts[i].size()); ++k) {
        worst = std::max(worst, distance(back[i].points()[k], cuts[i].points()[k]));
      }
    }
  }
  c.expect(worst <= 1e-6, "svg round trip error " + std::to_string(worst));

  auto tick = std::make_shared<std::int64_t>(1700000000000);
  Gallery g([tick] { return (*tick)++; });
  const EditMode modes[] = {EditMode::create, EditMode::import, EditMode::symmetric};
  for (int i = 0; i < 200; ++i) {
    const Project& p = g.add("project " + std::to_string(i) + (i % 7 ? "" : " \xc3\xa9\"quoted\""),
                             testgen::random_mechanism(rng), modes[i % 3]);
    if (i % 20 == 0) g.set_cached_curve(p.id, estimate_curve(p.mechanism));
  }
  const std::string text = save_archive(g);
  const Gallery back = load_archive(text);
  c.expect(back.size() == 200, "archive project count");
  for (std::size_t i = 0; i < std::min(back.size(), g.size()); ++i) {
    const Project& a = g.projects()[i];
    const Project& b = back.projects()[i];
    c.expect(a.same_design(b), a.id + ": design differs after reload");
    c.expect(a.cached_curve == b.cached_curve, a.id + ": cached curve differs");
  }
  c.expect(save_archive(back) == text, "archive text not reproduced");
  char buf[64];
  std::snprintf(buf, sizeof buf, "max svg error %.2e mm, 200 projects", worst);
  return buf;
}

std::string feasibility(Check& c) {
  const auto spike = check_feasibility(layout_swatch(fx::spike().mechanism));
  c.expect(!spike.empty(), "spike fixture not flagged");
  for (const auto& v : spike) c.expect(v.effective < 1.0, "violation above the wall rule");
  std::size_t outlines = 0;
  for (const auto& r : kSideRows) {
    for (Side side : {Side::left, Side::right}) {
      const auto o = generate_side_spring_outline(make_side_spring(r.family, r.t, side, {0, 0}));
      c.expect(check_outline(o.cuts, FeasibilityRule{}).empty(),
               "side " + std::string(to_string(r.family)) + " T" + format_number(r.t));
      ++outlines;
    }
  }
  for (const auto& r : kBaseRows) {
    const auto o = generate_base_spring_outline(make_base_spring(r.w, r.t));
    c.expect(check_outline(o.cuts, FeasibilityRule{}).empty(),
             "base W" + format_number(r.w) + " T" + format_number(r.t));
    ++outlines;
  }
  return std::to_string(spike.size()) + " spike violation, " + std::to_string(outlines) + " outlines pass";
}

std::string fixture_shape(Check& c) {
  const Fixture a = fx::swatch('A');
  const FDCurve curve = estimate_curve(a.mechanism);
  // Interior local maxima of the forward trace. A plateau counts once, and
  // only when the trace falls after it; a flat run to the end is not a peak.
  std::vector<double> peaks;
  const auto& s = curve.samples;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (!(s[i].forward > s[i - 1].forward)) continue;
    std::size_t j = i + 1;
    while (j < s.size() && std::abs(s[j].forward - s[i].forward) <= 1e-12) ++j;
    if (j < s.size() && s[j].forward < s[i].forward) peaks.push_back(s[i].displacement);
  }
  c.expect(peaks.size() == 1, "expected one forward peak, got " + std::to_string(peaks.size()));
  if (!peaks.empty()) c.near(peaks[0], *a.feature_travel, curve.step, "peak location");

  const FDCurve based = estimate_curve(fx::swatch_with_base('A').mechanism);
  const double kb = 0.16;  // W16 T1.0 published row
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = s[i].displacement;
    c.near(based.samples[i].forward - s[i].forward, kb * x, 1e-9, "base shift fwd at " + format_number(x));
    c.near(based.samples[i].reverse - s[i].reverse, kb * x, 1e-9, "base shift rev at " + format_number(x));
  }
  return peaks.empty() ? "no peak" : "peak at " + format_number(peaks[0]) + " mm";
}

}  // namespace

int main() {
  report("coefficient tables", tables);
  report("contact oracle", contact_oracle);
  report("analytic free-body", free_body);
  report("hysteresis without friction", hysteresis);
  report("superposition", superposition);
  report("sticking detection", sticking);
  report("calibration recovery", calibration);
  report("round trips", round_trips);
  report("feasibility", feasibility);
  report("qualitative fixture check", fixture_shape);
  return failures == 0 ? 0 : 1;
}
