#pragma once

// Reaction forces and force-displacement curves for a mechanism.

#include <atomic>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detent/contact.hpp"
#include "detent/geometry.hpp"
#include "detent/springs.hpp"

namespace detent {

inline constexpr double kDefaultFriction = 0.21;
inline constexpr double kDefaultStep = 0.1;        // mm
inline constexpr double kDefaultTravel = 10.0;     // mm
inline constexpr double kForceEnvelope = 5.0;      // N, advisory only

enum class Direction { forward, reverse };

struct Mechanism {
  std::vector<Profile> profiles;  // one or two, matched by index with springs
  std::vector<SideSpringSpec> side_springs;
  std::optional<BaseSpringSpec> base_spring;
  double travel = kDefaultTravel;
  double friction_mu = kDefaultFriction;

  bool double_sided() const { return profiles.size() == 2; }
  // Throws Error(invalid_argument) describing the first broken invariant.
  void validate() const;

  bool operator==(const Mechanism&) const = default;
};

struct SideReaction {
  ContactResult contact;
  Vec2 spring_force;  // F_S, on the slider
  Vec2 normal_force;  // F_P
  double forward = 0.0;
  double reverse = 0.0;
};

struct Reaction {
  double forward = 0.0;
  double reverse = 0.0;
  double base = 0.0;
  std::vector<SideReaction> sides;
};

struct EstimateOptions {
  double tolerance = kDefaultContactTolerance;
  unsigned threads = 1;
};

// Per-side contact plus the summed reaction. Positive force opposes pressing.
Reaction reaction_at(const Mechanism& mechanism, double s, const EstimateOptions& options = {});
double reaction_at(const Mechanism& mechanism, double s, Direction direction,
                   const EstimateOptions& options = {});

enum class WarningKind { over_deflection, sticking, no_contact_span, force_envelope };

std::string_view to_string(WarningKind kind);
std::optional<WarningKind> parse_warning_kind(std::string_view text);

struct Warning {
  WarningKind kind;
  double from = 0.0;  // mm, inclusive sample displacements
  double to = 0.0;
  std::string detail;

  bool operator==(const Warning&) const = default;
};

// Sticking and over-deflection are the ones a designer must act on.
bool is_actionable(WarningKind kind);

struct FDSample {
  double displacement = 0.0;
  double forward = 0.0;
  double reverse = 0.0;

  bool operator==(const FDSample&) const = default;
};

struct FDCurve {
  std::vector<FDSample> samples;
  double step = kDefaultStep;
  std::vector<Warning> warnings;

  bool has_actionable_warnings() const;
  bool operator==(const FDCurve&) const = default;
};

// s_i = i * step, with travel appended when step does not divide it.
std::vector<double> sample_displacements(double travel, double step);

// Incremental evaluation in displacement order; stop calling next() to cancel.
class CurveSampler {
 public:
  CurveSampler(Mechanism mechanism, double step, EstimateOptions options = {});

  bool done() const { return index_ >= grid_.size(); }
  std::size_t size() const { return grid_.size(); }
  std::size_t position() const { return index_; }
  // Computes up to `count` further samples (in parallel when configured).
  std::vector<FDSample> next(std::size_t count = 1);
  // Samples so far plus their warnings. Callable at any point.
  FDCurve curve() const;

 private:
  struct Flags {
    bool over = false;
    bool none = false;
    std::string diagnostic;
  };
  std::pair<FDSample, Flags> evaluate(double s) const;

  Mechanism mechanism_;
  std::vector<ArmModel> arms_;
  EstimateOptions options_;
  double step_;
  std::vector<double> grid_;
  std::size_t index_ = 0;
  std::vector<FDSample> samples_;
  std::vector<Flags> flags_;
};

// Throws Error(solver) annotated with the displacement on solver failure.
// `cancel` is polled between samples; a cancelled run returns the prefix.
FDCurve estimate_curve(const Mechanism& mechanism, double step = kDefaultStep,
                       const EstimateOptions& options = {},
                       const std::atomic<bool>* cancel = nullptr);

// Sticking spans recomputed from the samples, plus the spans the sampler
// recorded for over-deflection, missing contact and the force envelope.
std::vector<Warning> detect_warnings(const FDCurve& curve);

// Maximal runs of consecutive samples where pred holds, as [from, to].
std::vector<std::pair<double, double>> spans_where(std::span<const FDSample> samples,
                                                   const std::function<bool(const FDSample&)>& pred);

// Linear interpolation of both traces onto the given displacements (clamped
// to the curve's end values outside its range).
FDCurve resample(const FDCurve& curve, std::span<const double> displacements);

struct OverlayTable {
  std::vector<double> displacements;
  std::vector<std::vector<FDSample>> series;  // one per input curve
  std::vector<std::vector<double>> max_delta_forward;
  std::vector<std::vector<double>> max_delta_reverse;
};

// Aligns every curve on the grid of the first one.
OverlayTable overlay(std::span<const FDCurve> curves);

// Local maxima whose prominence is at least min_prominence. Plateaus count
// once, at their first sample.
std::vector<std::size_t> find_peaks(std::span<const double> values, double min_prominence);

// Trapezoid-rule loop work: integral of forward minus integral of reverse.
double loop_work(const FDCurve& curve);

// displacement_mm,force_forward_N,force_reverse_N plus "# warning" lines.
std::string fd_csv(const FDCurve& curve);
// Reads fd_csv output back; warning lines are restored. Throws Error(schema).
FDCurve parse_fd_csv(std::string_view text);

}  // namespace detent
