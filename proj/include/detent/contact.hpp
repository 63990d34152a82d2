#pragma once

// Quasi-static contact between a side-spring tip and a travelling profile,
// found by bisecting the arm's deflection angle.

#include <optional>
#include <string>

#include "detent/geometry.hpp"
#include "detent/springs.hpp"

namespace detent {

inline constexpr double kDefaultContactTolerance = 0.005;  // mm
inline constexpr int kMaxBisectionIterations = 64;

enum class ContactState { contact, no_contact, over_deflection };

std::string_view to_string(ContactState state);

struct ContactQuery {
  ArmModel arm;
  Profile profile;            // unshifted; the solver applies displacement_s
  double displacement_s = 0.0;
  double tolerance = kDefaultContactTolerance;
};

struct ContactResult {
  ContactState state = ContactState::no_contact;
  double deflection_angle = 0.0;  // canonical arm angle
  double tip_deflection_d = 0.0;  // mm, clamped to the arm's limit
  Point2 tip;                     // tip position at deflection_angle
  Point2 contact_point;           // on the shifted profile
  double distance = 0.0;          // tip to contact point
  Vec2 normal;                    // away from the slider material
  Vec2 tangent;
  int iterations = 0;
  // over_deflection only: deflection the profile would demand, when it is
  // within the guard range.
  std::optional<double> required_deflection;
  std::string diagnostic;
};

ContactResult solve_contact(const ArmModel& arm, const Profile& profile, double displacement_s,
                            double tolerance = kDefaultContactTolerance);
ContactResult solve_contact(const ContactQuery& query);

// True when the tip at this canonical angle is blocked by the profile shifted
// by displacement_s (penetration, or closer than the tip radius).
bool tip_blocked(const ArmModel& arm, const Profile& profile, double displacement_s,
                 double angle);

}  // namespace detent
