#include <gtest/gtest.h>

#include <random>

#include "detent/calibration.hpp"
#include "detent/error.hpp"
#include "detent/fixtures.hpp"

using namespace detent;
namespace fx = detent::fixtures;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::io;
}

MeasurementSeries scaled(const MeasurementSeries& s, double a, double offset = 0.0) {
  MeasurementSeries out = s;
  for (auto& m : out.samples) m.force = a * m.force + offset;
  return out;
}

const FDCurve& bump_curve() {
  static const FDCurve c = estimate_curve(fx::swatch_with_base('A').mechanism);
  return c;
}

}  // namespace

TEST(FitZeroIntercept, ExactLine) {
  const std::vector<std::pair<double, double>> xy = {{1, 2}, {2, 4}, {3, 6}};
  const FitResult r = fit_zero_intercept(xy);
  EXPECT_DOUBLE_EQ(r.slope, 2.0);
  EXPECT_DOUBLE_EQ(r.r_squared, 1.0);
  EXPECT_EQ(r.n, 3u);
}

TEST(FitZeroIntercept, HandFormula) {
  const std::vector<std::pair<double, double>> xy = {{1, 1}, {2, 4}};
  EXPECT_DOUBLE_EQ(fit_zero_intercept(xy).slope, 9.0 / 5.0);
}

TEST(FitZeroIntercept, Degenerate) {
  const std::vector<std::pair<double, double>> zero_x = {{0, 0}, {0, 1}};
  EXPECT_EQ(code_of([&] { fit_zero_intercept(zero_x); }), ErrorCode::undefined_fit);
  const std::vector<std::pair<double, double>> one = {{1, 1}};
  EXPECT_EQ(code_of([&] { fit_zero_intercept(one); }), ErrorCode::undefined_fit);
}

TEST(FitScaleFactor, ExactRecovery) {
  const auto sim = series_from_curve(bump_curve());
  EXPECT_NEAR(fit_scale_factor(sim, scaled(sim, 0.57)), 0.57, 1e-12);
}

TEST(FitScaleFactor, NoisyRecovery) {
  const auto sim = series_from_curve(bump_curve());
  std::mt19937 rng(2024);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> fits;
  for (int t = 0; t < 100; ++t) {
    auto meas = scaled(sim, 0.49);
    for (auto& m : meas.samples) m.force += noise(rng);
    fits.push_back(fit_scale_factor(sim, meas));
    EXPECT_NEAR(fits.back(), 0.49, 0.02);
  }
  const FactorSummary s = aggregate_factors(fits);
  EXPECT_NEAR(s.mean, 0.49, 0.005);
  EXPECT_GT(s.sd, 0.0);
}

TEST(FitScaleFactor, InterpolatesMeasurementOntoSimulation) {
  // A measurement on a coarser, offset grid of the same straight line.
  MeasurementSeries sim, meas;
  for (int i = 0; i <= 10; ++i) sim.samples.push_back({i * 1.0, 0.3 * i, Direction::forward});
  for (int i = 0; i <= 4; ++i) meas.samples.push_back({i * 2.5, 0.6 * 0.3 * i * 2.5, Direction::forward});
  EXPECT_NEAR(fit_scale_factor(sim, meas), 0.6, 1e-12);
}

TEST(FitScaleFactor, Errors) {
  MeasurementSeries zero;
  zero.samples = {{0, 0, Direction::forward}, {1, 0, Direction::forward}};
  MeasurementSeries meas;
  meas.samples = {{0, 1, Direction::forward}, {1, 1, Direction::forward}};
  EXPECT_EQ(code_of([&] { fit_scale_factor(zero, meas); }), ErrorCode::undefined_fit);
  MeasurementSeries far;
  far.samples = {{20, 1, Direction::forward}, {21, 1, Direction::forward}};
  EXPECT_EQ(code_of([&] { fit_scale_factor(meas, far); }), ErrorCode::no_overlap);
}

TEST(ScoreCurve, IdenticalIsZero) {
  const auto c = bump_curve();
  const CurveScore s = score_curve(c, series_from_curve(c));
  EXPECT_EQ(s.forward.rmse, 0.0);
  EXPECT_EQ(s.forward.peak_location_offset, 0.0);
  EXPECT_EQ(s.forward.peak_value_offset, 0.0);
  EXPECT_EQ(s.reverse.rmse, 0.0);
  EXPECT_EQ(s.forward.compared, c.samples.size());
}

TEST(ScoreCurve, ConstantShift) {
  const auto c = bump_curve();
  const CurveScore s = score_curve(c, scaled(series_from_curve(c), 1.0, 0.1));
  EXPECT_NEAR(s.forward.rmse, 0.1, 1e-12);
  EXPECT_NEAR(s.forward.peak_value_offset, 0.1, 1e-12);
  EXPECT_EQ(s.forward.peak_location_offset, 0.0);
}

TEST(ScoreCurve, TranslatedPeak) {
  // Without a base spring the bump crest is the global maximum.
  const auto c = estimate_curve(fx::swatch('A').mechanism);
  auto meas = series_from_curve(c);
  for (auto& m : meas.samples) m.displacement += 0.5;
  const CurveScore s = score_curve(c, meas);
  EXPECT_NEAR(s.forward.peak_location_offset, 0.5, c.step);
}

TEST(MeasurementCsv, ThreeRows) {
  const auto s = parse_measurement_csv(
      "displacement_mm,force_N,direction\n0,0,forward\n1,0.2,forward\n2,0.35,forward\n");
  EXPECT_EQ(s.samples.size(), 3u);
  EXPECT_DOUBLE_EQ(s.samples[2].force, 0.35);
}

TEST(MeasurementCsv, UnitsMustBeNewtons) {
  EXPECT_EQ(code_of([] { parse_measurement_csv("displacement_mm,force_g,direction\n0,10,forward\n"); }),
            ErrorCode::schema);
}

TEST(MeasurementCsv, EmptyFile) {
  EXPECT_EQ(code_of([] { parse_measurement_csv(""); }), ErrorCode::schema);
}

TEST(MeasurementCsv, BadRowNamesLine) {
  try {
    parse_measurement_csv("displacement_mm,force_N,direction\n0,0,forward\n1,abc,forward\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse_measurement_csv("displacement_mm,force_N,direction\n0,0,sideways\n"); }),
            ErrorCode::schema);
}

TEST(MeasurementCsv, RoundTrip) {
  const auto s = series_from_curve(bump_curve());
  EXPECT_EQ(parse_measurement_csv(measurement_csv(s)).samples, s.samples);
}

TEST(SimulatedCsv, AcceptsBothFormats) {
  const auto c = bump_curve();
  const auto a = parse_simulated_csv(fd_csv(c));
  ASSERT_TRUE(a.curve.has_value());
  EXPECT_EQ(a.curve->samples, c.samples);
  const auto b = parse_simulated_csv(measurement_csv(series_from_curve(c)));
  EXPECT_FALSE(b.curve.has_value());
  EXPECT_EQ(b.series.samples, a.series.samples);
}
