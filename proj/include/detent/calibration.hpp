#pragma once

// Fitting simulated stiffness to rig measurements and scoring estimates.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "detent/estimator.hpp"

namespace detent {

struct FitResult {
  double slope = 0.0;
  double r_squared = 0.0;  // uncentered, against the zero-intercept model
  std::size_t n = 0;
};

// Least squares through the origin. Throws Error(undefined_fit) for n < 2 or
// all-zero x.
FitResult fit_zero_intercept(std::span<const std::pair<double, double>> xy);

struct MeasurementSample {
  double displacement = 0.0;  // mm
  double force = 0.0;         // N
  Direction direction = Direction::forward;

  bool operator==(const MeasurementSample&) const = default;
};

struct MeasurementSeries {
  std::vector<MeasurementSample> samples;
  std::string source_label;

  // (displacement, force) pairs of one direction, sorted by displacement.
  std::vector<std::pair<double, double>> trace(Direction direction) const;
};

// Both traces of a curve as a series, e.g. to compare two simulations.
MeasurementSeries series_from_curve(const FDCurve& curve, std::string label = "estimate");

// Columns displacement_mm,force_N,direction; '#' starts a comment line.
// Throws Error(schema) with a line number on malformed input.
MeasurementSeries parse_measurement_csv(std::string_view text, std::string label = {});
MeasurementSeries load_measurement_csv(const std::filesystem::path& path);
std::string measurement_csv(const MeasurementSeries& series);

// A simulated trace given either as estimator output (fd csv) or in the
// measurement format. curve is set for the former.
struct SimulatedInput {
  MeasurementSeries series;
  std::optional<FDCurve> curve;
};
SimulatedInput parse_simulated_csv(std::string_view text, std::string label = "simulated");

// alpha minimising sum (m - alpha*s)^2, with the measured trace linearly
// interpolated onto the simulated displacements of each direction.
// Throws Error(no_overlap) or Error(undefined_fit).
double fit_scale_factor(const MeasurementSeries& simulated, const MeasurementSeries& measured);

struct FactorSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single fit
  std::size_t n = 0;
};

FactorSummary aggregate_factors(std::span<const double> factors);

struct DirectionScore {
  double rmse = 0.0;                  // N
  double peak_location_offset = 0.0;  // mm, |estimated - measured|
  double peak_value_offset = 0.0;     // N, |estimated - measured|
  std::size_t compared = 0;           // grid points inside the overlap
};

struct CurveScore {
  DirectionScore forward;
  DirectionScore reverse;
};

// Measured traces are resampled onto the estimate's grid within their range.
CurveScore score_curve(const FDCurve& estimated, const MeasurementSeries& measured);

}  // namespace detent
