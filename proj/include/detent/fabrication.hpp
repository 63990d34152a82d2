#pragma once

// Laser-cut swatch layout, wall-thickness checks and the cutting drawing.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "detent/estimator.hpp"
#include "detent/geometry.hpp"
#include "detent/svg.hpp"

namespace detent {

inline constexpr double kSheetThickness = 3.0;   // mm POM
inline constexpr double kPartSpacing = 3.0;      // mm between nested parts
inline constexpr double kM3Clearance = 1.7;      // hole radius
// Measured widths within this of the rule count as meeting it; covers the
// chordal error of 360-segment arcs.
inline constexpr double kWallTolerance = 1e-3;

struct LayoutOptions {
  double slider_blank_width = 30.0;
  double slider_core_width = 6.0;  // material kept between two profiles
  double slider_margin = 1.0;      // above and below the contours
  double chassis_margin = 6.0;
  double sheet_width = 300.0;
  double part_spacing = kPartSpacing;
};

struct Part {
  std::string name;
  std::vector<Polyline> cuts;     // assembly coordinates
  std::vector<Polyline> engrave;  // assembly coordinates
  std::vector<SvgText> labels;
  Vec2 offset;                    // assembly -> sheet translation
  std::optional<std::size_t> rides_with;  // shares another part's placement
};

struct SwatchDrawing {
  std::vector<Part> parts;
  double sheet_thickness = kSheetThickness;
  BBox sheet;

  std::size_t part_count() const { return parts.size(); }
  const Part* find(std::string_view name) const;
  // Sheet-coordinate geometry per layer.
  std::vector<Polyline> cut_layer() const;
  std::vector<Polyline> engrave_layer() const;
};

// Throws Error(layout) when a profile leaves the slider blank.
SwatchDrawing layout_swatch(const Mechanism& mechanism, const LayoutOptions& options = {});

struct FeasibilityRule {
  double min_wall = kMinWall;
  double min_feature_spacing = 1.0;
  double kerf = 0.2;
  double reference_kerf = 0.2;  // kerf the wall rule was derived at
  double sample_interval = 0.25;
};

enum class ViolationKind { thin_wall, narrow_gap };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind = ViolationKind::thin_wall;
  std::string part;
  Point2 location;    // sheet coordinates of the thinnest sample
  double measured = 0.0;
  double effective = 0.0;  // after the kerf adjustment
  double required = 0.0;
};

// Medial widths sampled along every cut edge; nearby offending samples merge
// into one violation. Rings are interpreted by even-odd containment.
std::vector<Violation> check_outline(std::span<const Polyline> rings, const FeasibilityRule& rules,
                                     std::string_view part = {});
std::vector<Violation> check_feasibility(const SwatchDrawing& drawing,
                                         const FeasibilityRule& rules = {});

// Layers "cut" and "engrave" plus the laser settings comment block.
std::string export_fabrication_svg(const SwatchDrawing& drawing);

// Closed shapes of the document's "cut" layer (or every closed shape when no
// such layer exists) as placed on the sheet.
std::vector<Polyline> read_cut_layer(std::string_view svg);

std::vector<std::string> laser_settings_comments();

}  // namespace detent
