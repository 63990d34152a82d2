#pragma once

// SVG 1.1 subset reader/writer for profile import and laser drawings.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "detent/geometry.hpp"

namespace detent {

// Documents without physical units are read at this density.
inline constexpr double kDefaultPxPerMm = 96.0 / 25.4;
// Maximum chord deviation when flattening curves, in mm.
inline constexpr double kFlattenTolerance = 0.02;

struct SvgImportOptions {
  std::optional<double> px_per_mm;  // overrides document units
  bool flip_y = true;               // SVG y grows downward
  Vec2 offset{0.0, 0.0};            // added after unit conversion
  double flatten_tolerance = kFlattenTolerance;
  std::size_t path_index = 0;  // which open path becomes the profile
  Side side = Side::left;
  std::optional<MaterialSide> material;
  double required_span = 0.0;  // minimum y extent of the profile, mm
};

struct SvgShape {
  Polyline polyline;
  std::string id;     // id of the source element, if any
  std::string layer;  // id of the nearest enclosing <g>, if any
};

// Every path/polyline/polygon/line/rect/circle/ellipse, flattened and
// converted to mechanism millimetres.
std::vector<SvgShape> import_svg_shapes(std::string_view document,
                                        const SvgImportOptions& options = {});

// Errors: no_open_path, non_monotonic, path_too_short, svg_parse.
Profile import_profile_svg(std::string_view document,
                           const SvgImportOptions& options = {});

struct SvgText {
  Point2 position;
  std::string text;
  double size_mm = 2.0;
};

struct SvgLayer {
  std::string name;
  std::vector<Polyline> shapes;
  std::vector<SvgText> labels;
  std::string stroke = "#000000";
};

struct DrawingMetadata {
  std::string title;
  // Emitted verbatim as XML comments, one per entry.
  std::vector<std::string> comments;
  double margin_mm = 2.0;
};

// Stroke-only paths in mm user units. Throws invalid_argument when empty.
std::string export_polyline_svg(std::span<const Polyline> shapes,
                                const DrawingMetadata& metadata = {});
std::string export_layers_svg(std::span<const SvgLayer> layers,
                              const DrawingMetadata& metadata = {});

// Shortest round-trip decimal form used for all emitted coordinates.
std::string format_number(double value);

}  // namespace detent
