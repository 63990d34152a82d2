#pragma once

// Side and base spring models: coefficient lookup, the pivoting-arm
// abstraction of a side spring, and laser-cut outline generation.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "detent/geometry.hpp"

namespace detent {

enum class SpringFamily { A, B, C };

std::string_view to_string(SpringFamily family);
SpringFamily parse_family(std::string_view text);

inline constexpr double kMaxTipDeflection = 4.0;  // mm
inline constexpr double kMinWall = 1.0;           // mm, laser-cut POM

struct SideCoefficientRow {
  SpringFamily family;
  double thickness;       // ring thickness T, mm
  double fea_slope;       // N/mm
  double adjusted_slope;  // N/mm
};

struct BaseCoefficientRow {
  double width;        // W, mm
  double thickness;    // arm thickness T, mm
  double beam_length;  // B, mm
  double fea_slope;
  double adjusted_slope;
};

// Spring coefficient lookup table. Rows may be appended (e.g. from
// calibration); a row with an existing key replaces the earlier one.
class CoefficientTable {
 public:
  CoefficientTable() = default;

  // Published FEA slopes with their laser-cut adjustment.
  static const CoefficientTable& builtin();

  // CSV columns: kind,family_or_width,T,B,fea_slope,adjusted_slope.
  // "# version: x", "# side_factor: x" and "# base_factor: x" comments are
  // recognised. Throws Error(schema) with the line number on bad input.
  static CoefficientTable parse_csv(std::string_view text);
  static CoefficientTable load(const std::filesystem::path& path);
  std::string to_csv() const;

  void add_side_row(const SideCoefficientRow& row);
  void add_base_row(const BaseCoefficientRow& row);

  const std::vector<SideCoefficientRow>& side_rows() const { return side_rows_; }
  const std::vector<BaseCoefficientRow>& base_rows() const { return base_rows_; }
  const std::string& version() const { return version_; }
  double side_factor() const { return side_factor_; }
  double base_factor() const { return base_factor_; }

  // Exact at grid points, linear between neighbouring rows of one family.
  // Throws Error(out_of_range) naming the valid interval.
  double side_coefficient(SpringFamily family, double ring_thickness) const;
  std::pair<double, double> family_range(SpringFamily family) const;

  // Bilinear over (W, T). Throws Error(out_of_range) outside the grid.
  double base_coefficient(double width, double arm_thickness) const;
  double base_beam_length(double width, double arm_thickness) const;

 private:
  template <typename Field>
  double base_lookup(double width, double arm_thickness, Field field) const;

  std::vector<SideCoefficientRow> side_rows_;
  std::vector<BaseCoefficientRow> base_rows_;
  std::string version_ = "1";
  double side_factor_ = 0.57;
  double base_factor_ = 0.49;
};

// DETENT_COEFFICIENTS names a table file to use instead of the builtin one.
CoefficientTable load_default_table();

// Dimensions of the parametric side spring other than ring thickness. The
// defaults are reproduction choices; see docs/springs.md.
struct SideSpringGeometry {
  double ring_inner_radius = 4.0;
  double hub_radius = 3.0;
  double hole_radius = 1.7;  // M3 clearance
  double bridge_width = 2.0;
  std::optional<double> arm_width;  // default: ring thickness + 1 mm
  double arm_reach = 19.0;          // pivot to tip along the arm
  double tip_height = 1.5;          // protrusion of the 45 degree tip
  double arm_overhang = 1.0;        // arm beyond the tip flank
  int circle_segments = 360;

  static SideSpringGeometry for_family(SpringFamily family);

  bool operator==(const SideSpringGeometry&) const = default;
};

struct SideSpringSpec {
  SpringFamily family = SpringFamily::A;
  double ring_thickness = 1.2;
  double coefficient_k = 0.22;  // N per mm of horizontal tip deflection
  Side side = Side::left;
  Point2 pivot;                     // ring centre, mechanism coordinates
  std::optional<Point2> rest_tip;   // overrides the outline-derived apex
  double max_deflection = kMaxTipDeflection;
  double tip_radius = 0.0;
  SideSpringGeometry geometry;

  double arm_width() const;
  // Tip apex at rest: the override if set, else derived from the outline.
  Point2 resolved_rest_tip() const;
  double arm_length() const;

  bool operator==(const SideSpringSpec&) const = default;
};

// Looks up k for (family, T); throws out_of_range outside the family.
SideSpringSpec make_side_spring(SpringFamily family, double ring_thickness, Side side,
                                Point2 pivot,
                                const CoefficientTable& table = CoefficientTable::builtin());

SideSpringSpec mirror_x(const SideSpringSpec& spec);

struct BaseSpringSpec {
  double width = 16.0;
  double arm_thickness = 1.0;
  double beam_length = 14.14;
  double coefficient_kb = 0.16;
  int beam_count = 4;
  double slot_height = 1.5;
  double tab_height = 6.0;

  bool operator==(const BaseSpringSpec&) const = default;
};

BaseSpringSpec make_base_spring(double width, double arm_thickness,
                                const CoefficientTable& table = CoefficientTable::builtin());

// Side spring reduced to a rigid arm rotating about the ring centre. Angles
// live in a canonical frame where deflection increases the angle; world tip
// positions are recovered by reflecting x for right-side springs and y for
// arms that hang below their pivot.
struct ArmModel {
  Point2 pivot;
  double arm_length = 0.0;
  double rest_angle = 0.0;
  double max_angle = 0.0;  // angle at which the tip has moved max_deflection
  double coefficient_k = 0.0;
  double max_deflection = kMaxTipDeflection;
  double tip_radius = 0.0;
  Side side = Side::left;
  bool arm_up = true;

  Point2 tip(double angle) const;
  // Horizontal tip travel from rest; strictly increasing on [rest, max].
  double tip_deflection(double angle) const;
  // Inverse of tip_deflection for d in [0, arm_length*(1 + cos(rest))].
  double angle_for_deflection(double d) const;
  // Horizontal unit vector from the spring toward its profile.
  double push_sign() const { return side == Side::left ? 1.0 : -1.0; }
};

ArmModel abstract_arm(const SideSpringSpec& spec);

struct SpringOutline {
  std::vector<Polyline> cuts;  // closed rings; outer boundary first
  Point2 pivot;
  Point2 rest_tip;
};

// Throws Error(feasibility) for any wall below 1 mm.
SpringOutline generate_side_spring_outline(const SideSpringSpec& spec);

struct BaseSpringOutline {
  std::vector<Polyline> cuts;  // outer boundary first, then mounting holes
  double clear_length = 0.0;   // free span of each beam
  double connector_width = 0.0;
  double height = 0.0;
};

// Local frame: bottom-left corner at the origin, compression along y.
BaseSpringOutline generate_base_spring_outline(const BaseSpringSpec& spec);

Polyline circle_polyline(Point2 centre, double radius, int segments);

}  // namespace detent
