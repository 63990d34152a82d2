#include <gtest/gtest.h>

#include <cmath>

#include "detent/error.hpp"
#include "detent/estimator.hpp"
#include "detent/fixtures.hpp"

using namespace detent;
namespace fx = detent::fixtures;

namespace {

constexpr EstimateOptions kTight{.tolerance = 1e-10};

std::vector<double> forward_of(const FDCurve& c) {
  std::vector<double> v;
  for (const auto& s : c.samples) v.push_back(s.forward);
  return v;
}

std::vector<Warning> of_kind(const FDCurve& c, WarningKind k) {
  std::vector<Warning> out;
  for (const auto& w : c.warnings) {
    if (w.kind == k) out.push_back(w);
  }
  return out;
}

Mechanism clear_mechanism() {
  Mechanism m;
  m.profiles.push_back(fx::depth_profile(Side::left, {{-1, -3}, {12, -3}}));
  m.side_springs.push_back(fx::standard_spring(Side::left));
  return m;
}

}  // namespace

TEST(ReactionAt, RampFreeBody) {
  const auto m = fx::ramp().mechanism;
  // k d / 2 (1 +- mu) with k = 0.13, d = 2, mu = 0.21.
  EXPECT_NEAR(reaction_at(m, 5.0, Direction::forward, kTight), 0.13 * 2 / 2 * 1.21, 1e-6);
  EXPECT_NEAR(reaction_at(m, 5.0, Direction::reverse, kTight), 0.13 * 2 / 2 * 0.79, 1e-6);
}

TEST(ReactionAt, WallFreeBody) {
  const auto m = fx::vertical_wall().mechanism;
  for (double s : {5.0, 7.5, 10.0}) {
    const Reaction r = reaction_at(m, s, kTight);
    EXPECT_NEAR(r.forward, 0.21 * 0.13 * 2, 1e-6);
    EXPECT_NEAR(r.reverse, -0.21 * 0.13 * 2, 1e-6);
  }
}

TEST(ReactionAt, BaseSpringAlone) {
  Mechanism m = clear_mechanism();
  m.base_spring = make_base_spring(16.0, 1.0);
  const Reaction r = reaction_at(m, 5.0);
  EXPECT_EQ(r.sides[0].contact.state, ContactState::no_contact);
  EXPECT_NEAR(r.forward, 0.80, 1e-12);
  EXPECT_NEAR(r.reverse, 0.80, 1e-12);
}

TEST(ReactionAt, FrictionlessDirectionsAgree) {
  for (auto f : fx::bundled()) {
    f.mechanism.friction_mu = 0.0;
    for (double s = 0; s <= 10; s += 0.7) {
      const Reaction r = reaction_at(f.mechanism, s);
      EXPECT_EQ(r.forward, r.reverse) << f.key << " s=" << s;
    }
  }
}

TEST(ReactionAt, SymmetricDoubleRampIsTwiceSingle) {
  Mechanism single = fx::ramp().mechanism;
  Mechanism both = single;
  both.profiles.push_back(mirror_x(single.profiles[0]));
  both.side_springs.push_back(mirror_x(single.side_springs[0]));
  for (double s = 0; s <= 10; s += 0.5) {
    EXPECT_NEAR(reaction_at(both, s, Direction::forward), 2 * reaction_at(single, s, Direction::forward),
                1e-12);
  }
}

TEST(ReactionAt, DisplacementOutsideTravel) {
  const auto m = fx::ramp().mechanism;
  EXPECT_THROW(reaction_at(m, -0.1), Error);
  EXPECT_THROW(reaction_at(m, 10.1), Error);
}

TEST(Mechanism, ValidateCatchesMismatch) {
  Mechanism m = fx::ramp().mechanism;
  m.side_springs.push_back(fx::standard_spring(Side::right));
  EXPECT_THROW(m.validate(), Error);
  m = fx::ramp().mechanism;
  m.friction_mu = -0.1;
  EXPECT_THROW(m.validate(), Error);
}

TEST(SampleDisplacements, GridAndCount) {
  EXPECT_EQ(sample_displacements(10, 0.1).size(), 101u);
  const auto g = sample_displacements(10, 0.3);
  EXPECT_DOUBLE_EQ(g.back(), 10.0);
  EXPECT_DOUBLE_EQ(g[g.size() - 2], 9.9);
  EXPECT_EQ(sample_displacements(10, 0.1)[41], 4.1);
}

TEST(EstimateCurve, ClearProfileIsAllZeroWithNoContactSpan) {
  const FDCurve c = estimate_curve(clear_mechanism());
  ASSERT_EQ(c.samples.size(), 101u);
  for (const auto& s : c.samples) {
    EXPECT_EQ(s.forward, 0.0);
    EXPECT_EQ(s.reverse, 0.0);
  }
  const auto w = of_kind(c, WarningKind::no_contact_span);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].from, 0.0);
  EXPECT_EQ(w[0].to, 10.0);
}

TEST(EstimateCurve, SingleBumpHasOnePeakAtTheBump) {
  const auto f = fx::swatch('A');
  const FDCurve c = estimate_curve(f.mechanism);
  const auto peaks = find_peaks(forward_of(c), 0.01);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_NEAR(c.samples[peaks[0]].displacement, *f.feature_travel, c.step);
}

TEST(EstimateCurve, ThreadedSamplingMatchesSerial) {
  const auto m = fx::swatch('G').mechanism;
  EXPECT_EQ(estimate_curve(m, 0.1, {.threads = 4}), estimate_curve(m, 0.1));
}

TEST(EstimateCurve, CancelReturnsPrefix) {
  std::atomic<bool> cancel{true};
  const FDCurve c = estimate_curve(fx::swatch('A').mechanism, 0.1, {}, &cancel);
  EXPECT_LT(c.samples.size(), 101u);
}

TEST(EstimateCurve, SamplerMatchesBatch) {
  const auto m = fx::swatch('E').mechanism;
  CurveSampler sampler(m, 0.1);
  std::vector<FDSample> streamed;
  double last = -1;
  while (!sampler.done()) {
    for (const auto& s : sampler.next(7)) {
      EXPECT_GT(s.displacement, last);
      last = s.displacement;
      streamed.push_back(s);
    }
  }
  const FDCurve batch = estimate_curve(m);
  EXPECT_EQ(streamed, batch.samples);
  EXPECT_EQ(sampler.curve(), batch);
}

TEST(EstimateCurve, OverDeflectionSpanCarriesDiagnostic) {
  Mechanism m;
  m.profiles.push_back(fx::depth_profile(Side::left, {{-1, 0}, {3, 0}, {6, 5}, {12, 5}}));
  m.side_springs.push_back(fx::standard_spring(Side::left));
  const FDCurve c = estimate_curve(m);
  const auto w = of_kind(c, WarningKind::over_deflection);
  ASSERT_FALSE(w.empty());
  EXPECT_NE(w[0].detail.find("limit 4 mm"), std::string::npos) << w[0].detail;
  EXPECT_TRUE(c.has_actionable_warnings());
}

TEST(DetectWarnings, WallSticksOverItsContactSpan) {
  const auto f = fx::vertical_wall();
  const FDCurve c = estimate_curve(f.mechanism);
  const auto w = of_kind(c, WarningKind::sticking);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_DOUBLE_EQ(w[0].from, 4.1);
  EXPECT_DOUBLE_EQ(w[0].to, 10.0);
  EXPECT_EQ(detect_warnings(c), c.warnings);
}

TEST(DetectWarnings, RampAndFrictionlessNeverStick) {
  EXPECT_TRUE(of_kind(estimate_curve(fx::ramp().mechanism), WarningKind::sticking).empty());
  // Holds where the normal pushes the slider outward: rising profiles, or
  // a base spring strong enough to outweigh the falling flanks.
  std::vector<fx::Fixture> outward = {fx::ramp(), fx::vertical_wall(), fx::swatch_with_base('A'),
                                      fx::swatch_with_base('B'), fx::swatch_with_base('C')};
  for (auto f : outward) {
    f.mechanism.friction_mu = 0.0;
    EXPECT_TRUE(of_kind(estimate_curve(f.mechanism), WarningKind::sticking).empty()) << f.key;
  }
}

TEST(DetectWarnings, FallingFlankPullsEvenWithoutFriction) {
  auto m = fx::swatch('A').mechanism;
  m.friction_mu = 0.0;
  const FDCurve c = estimate_curve(m);
  const auto w = of_kind(c, WarningKind::sticking);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_GT(w[0].from, 4.8);
}

TEST(DetectWarnings, ForceEnvelopeIsAdvisory) {
  FDCurve c;
  c.samples = {{0, 0, 0}, {0.1, 6, 6}, {0.2, 1, 1}};
  const auto w = detect_warnings(c);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].kind, WarningKind::force_envelope);
  EXPECT_FALSE(is_actionable(w[0].kind));
}

TEST(FindPeaks, ProminenceAndPlateaus) {
  const std::vector<double> v = {0, 1, 1, 1, 0, 0.05, 0.04, 2, 0};
  const auto p = find_peaks(v, 0.5);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], 1u);
  EXPECT_EQ(p[1], 7u);
  EXPECT_TRUE(find_peaks(std::vector<double>{3, 2, 1}, 0.1).empty());
}

TEST(Overlay, SelfHasZeroDelta) {
  const FDCurve c = estimate_curve(fx::swatch('B').mechanism);
  const std::vector<FDCurve> curves = {c, c};
  const auto t = overlay(curves);
  for (double d : t.max_delta_forward[0]) EXPECT_EQ(d, 0.0);
  for (double d : t.max_delta_reverse[0]) EXPECT_EQ(d, 0.0);
}

TEST(Overlay, StaggeredBumpPeaksOffsetByStagger) {
  const FDCurve a = estimate_curve(fx::swatch('A').mechanism);
  const FDCurve f = estimate_curve(fx::swatch('F').mechanism);
  const auto pa = find_peaks(forward_of(a), 0.01);
  const auto pf = find_peaks(forward_of(f), 0.01);
  ASSERT_EQ(pa.size(), 1u);
  ASSERT_EQ(pf.size(), 2u);
  EXPECT_NEAR(f.samples[pf[0]].displacement, a.samples[pa[0]].displacement, a.step);
  EXPECT_NEAR(f.samples[pf[1]].displacement - a.samples[pa[0]].displacement, 1.5, a.step);
}

TEST(Overlay, DifferentStepsAreResampled) {
  const auto m = fx::swatch('A').mechanism;
  const std::vector<FDCurve> curves = {estimate_curve(m, 0.1), estimate_curve(m, 0.25)};
  const auto t = overlay(curves);
  EXPECT_EQ(t.displacements.size(), 101u);
  ASSERT_EQ(t.series.size(), 2u);
  EXPECT_EQ(t.series[1].size(), 101u);
  // Linear interpolation of the coarse curve at its own grid points is exact.
  EXPECT_EQ(t.series[1][5].forward, curves[1].samples[2].forward);
}

TEST(LoopWork, FrictionlessIsZero) {
  auto m = fx::swatch('C').mechanism;
  m.friction_mu = 0.0;
  EXPECT_EQ(loop_work(estimate_curve(m)), 0.0);
  m.friction_mu = 0.21;
  EXPECT_GT(loop_work(estimate_curve(m)), 0.0);
}

TEST(FdCsv, RoundTrip) {
  const FDCurve c = estimate_curve(fx::vertical_wall().mechanism);
  const std::string text = fd_csv(c);
  EXPECT_EQ(text.rfind("displacement_mm,force_forward_N,force_reverse_N\n", 0), 0u);
  EXPECT_NE(text.find("# warning: sticking from 4.1 to 10 mm"), std::string::npos);
  const FDCurve back = parse_fd_csv(text);
  EXPECT_EQ(back.samples, c.samples);
  EXPECT_EQ(back.warnings, c.warnings);
  EXPECT_THROW(parse_fd_csv("x,y\n1,2\n"), Error);
}
