#include "detent/contact.hpp"

#include <algorithm>
#include <cmath>

#include "detent/error.hpp"
#include "detent/svg.hpp"

namespace detent {

std::string_view to_string(ContactState state) {
  switch (state) {
    case ContactState::contact: return "contact";
    case ContactState::no_contact: return "no_contact";
    case ContactState::over_deflection: return "over_deflection";
  }
  return "?";
}

namespace {

// Tip positions are tested against the unshifted profile: a profile moved by
// (0, -s) meets p exactly where the original meets p + (0, s).
Point2 to_profile_frame(Point2 p, double s) { return {p.x, p.y + s}; }

// Penetration shallower than this is rounding noise from a tip that merely
// touches the contour at rest.
constexpr double kTouchEpsilon = 1e-9;  // mm

bool blocked_at(const ArmModel& arm, const Profile& profile, Point2 q) {
  const auto xc = profile.x_at(q.y);
  if (xc && sign_of(profile.material()) * (q.x - *xc) > kTouchEpsilon) return true;
  if (arm.tip_radius > 0.0) {
    return closest_point(profile, q).distance < arm.tip_radius;
  }
  return false;
}

void fill_geometry(ContactResult& r, const ArmModel& arm, const Profile& profile, double s,
                   double angle) {
  r.deflection_angle = angle;
  r.tip = arm.tip(angle);
  const auto cp = closest_point(profile, to_profile_frame(r.tip, s));
  r.contact_point = {cp.point.x, cp.point.y - s};
  r.distance = cp.distance;
  r.normal = cp.normal;
  r.tangent = cp.tangent;
}

}  // namespace

bool tip_blocked(const ArmModel& arm, const Profile& profile, double displacement_s,
                 double angle) {
  return blocked_at(arm, profile, to_profile_frame(arm.tip(angle), displacement_s));
}

ContactResult solve_contact(const ArmModel& arm, const Profile& profile, double s,
                            double tolerance) {
  if (!(tolerance > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "contact tolerance must be positive");
  }
  if (!std::isfinite(s)) throw Error(ErrorCode::invalid_argument, "displacement is not finite");

  auto blocked = [&](double angle) { return tip_blocked(arm, profile, s, angle); };
  auto gap = [&](double angle) {
    return closest_point(profile, to_profile_frame(arm.tip(angle), s)).distance - arm.tip_radius;
  };

  ContactResult r;
  const double lo0 = arm.rest_angle;
  const double hi0 = arm.max_angle;

  if (!blocked(lo0)) {
    fill_geometry(r, arm, profile, s, lo0);
    r.tip_deflection_d = 0.0;
    r.state = (r.distance - arm.tip_radius) <= tolerance + kTouchEpsilon ? ContactState::contact
                                                         : ContactState::no_contact;
    return r;
  }

  if (blocked(hi0)) {
    fill_geometry(r, arm, profile, s, hi0);
    r.state = ContactState::over_deflection;
    r.tip_deflection_d = arm.max_deflection;
    // Look past the limit to report how much deflection the profile demands.
    const double reach = arm.arm_length * (1.0 + std::cos(arm.rest_angle));
    const double guard_d = std::min(2.0 * arm.max_deflection, reach * (1.0 - 1e-9));
    const double guard = arm.angle_for_deflection(guard_d);
    if (!blocked(guard)) {
      double lo = hi0;
      double hi = guard;
      for (int i = 0; i < kMaxBisectionIterations && arm.arm_length * (hi - lo) > tolerance; ++i) {
        const double mid = 0.5 * (lo + hi);
        (blocked(mid) ? lo : hi) = mid;
      }
      r.required_deflection = arm.tip_deflection(hi);
    }
    const std::string need =
        r.required_deflection
            ? format_number(std::round(*r.required_deflection * 1000.0) / 1000.0) + " mm"
            : "more than " + format_number(guard_d) + " mm";
    if (s == 0.0) {
      r.diagnostic = "assembly interference at rest: the undeflected spring overlaps the "
                     "profile and clearing it needs " + need;
    } else {
      r.diagnostic = "profile demands " + need + " of tip deflection (limit " +
                     format_number(arm.max_deflection) + " mm)";
    }
    return r;
  }

  // Invariant: lo blocked, hi free. Keep the free side.
  double lo = lo0;
  double hi = hi0;
  int it = 0;
  while (true) {
    if (arm.arm_length * (hi - lo) <= tolerance && gap(hi) <= tolerance + kTouchEpsilon) break;
    if (it == kMaxBisectionIterations) {
      throw Error(ErrorCode::solver,
                  "contact bisection did not converge at s = " + format_number(s) +
                      " mm; last bracket [" + format_number(lo) + ", " + format_number(hi) +
                      "] rad");
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      // Bracket exhausted in floating point before the distance test passed.
      throw Error(ErrorCode::solver,
                  "contact bracket collapsed at s = " + format_number(s) + " mm; [" +
                      format_number(lo) + ", " + format_number(hi) + "] rad");
    }
    (blocked(mid) ? lo : hi) = mid;
    ++it;
  }
  fill_geometry(r, arm, profile, s, hi);
  r.state = ContactState::contact;
  r.iterations = it;
  r.tip_deflection_d = std::clamp(arm.tip_deflection(hi), 0.0, arm.max_deflection);
  return r;
}

ContactResult solve_contact(const ContactQuery& query) {
  return solve_contact(query.arm, query.profile, query.displacement_s, query.tolerance);
}

}  // namespace detent
