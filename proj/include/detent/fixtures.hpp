#pragma once

// Bundled example mechanisms: reconstructions of the double-sided profile
// swatches (A-G), base-spring variants, and analytic test fixtures.

#include <optional>
#include <string>
#include <vector>

#include "detent/estimator.hpp"
#include "detent/project_store.hpp"

namespace detent::fixtures {

// Rest tip of the left spring; the right one mirrors it.
inline constexpr Point2 kLeftRestTip{-9.0, 0.0};
inline constexpr double kTravel = 10.0;
inline constexpr double kProfileBottom = -1.0;
inline constexpr double kProfileTop = 12.0;

// Family/thickness spring with its tip placed at the mirrored rest point.
SideSpringSpec standard_spring(Side side, SpringFamily family = SpringFamily::A,
                               double ring_thickness = 1.2);

// y-monotonic contour from (rest x + offsets) samples; x offsets are depths
// toward the spring (positive = deflects the tip) at the given heights.
Profile depth_profile(Side side, const std::vector<std::pair<double, double>>& y_depth,
                      double rest_x = -kLeftRestTip.x);

struct Fixture {
  std::string key;
  std::string name;
  std::string description;
  Mechanism mechanism;
  EditMode mode = EditMode::create;
  // Travel coordinates of designed features (bump apex, wall start, ...).
  std::optional<double> feature_travel;
  // Whether sticking is inherent in the design (falling flanks, walls).
  bool expects_sticking = false;
};

Fixture swatch(char letter);         // 'A'..'G'
Fixture swatch_with_base(char letter);  // 'A'..'C', W16 T1.0 base spring
Fixture ramp();                    // 45 degree ramp, d = 2 mm at s = 5 mm
Fixture vertical_wall();           // constant 2 mm deflection on a wall
Fixture spike();                   // 0.5 mm wide spike, fails the wall rule

std::vector<Fixture> bundled();
Gallery bundled_gallery();

// Displacement at which an arm reaches profile height y with deflection d.
double travel_at(const ArmModel& arm, double profile_y, double d);

}  // namespace detent::fixtures
