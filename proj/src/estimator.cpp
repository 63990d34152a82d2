#include "detent/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "detent/error.hpp"
#include "detent/svg.hpp"

namespace detent {

void Mechanism::validate() const {
  if (!(travel > 0.0) || !std::isfinite(travel)) {
    throw Error(ErrorCode::invalid_argument, "travel must be a positive length");
  }
  if (!(friction_mu >= 0.0) || !std::isfinite(friction_mu)) {
    throw Error(ErrorCode::invalid_argument, "friction coefficient must be non-negative");
  }
  if (profiles.empty() || profiles.size() > 2) {
    throw Error(ErrorCode::invalid_argument, "a mechanism needs one or two profiles");
  }
  if (side_springs.size() != profiles.size()) {
    throw Error(ErrorCode::invalid_argument, "every profile needs exactly one side spring");
  }
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (side_springs[i].side != profiles[i].side()) {
      throw Error(ErrorCode::invalid_argument,
                  "side spring " + std::to_string(i) + " is not on its profile's side");
    }
    if (!(side_springs[i].coefficient_k > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "spring coefficient must be positive");
    }
  }
  if (double_sided() && profiles[0].side() == profiles[1].side()) {
    throw Error(ErrorCode::invalid_argument, "double-sided mechanisms need a left and a right profile");
  }
  if (base_spring && !(base_spring->coefficient_kb >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "base spring coefficient must be non-negative");
  }
}

namespace {

std::vector<ArmModel> arms_of(const Mechanism& m) {
  std::vector<ArmModel> arms;
  for (const auto& spec : m.side_springs) arms.push_back(abstract_arm(spec));
  return arms;
}

SideReaction side_reaction(const ArmModel& arm, const Profile& profile, double s, double mu,
                           double tolerance) {
  SideReaction r;
  r.contact = solve_contact(arm, profile, s, tolerance);
  if (r.contact.state == ContactState::no_contact) return r;
  const double d = r.contact.tip_deflection_d;
  r.spring_force = {arm.push_sign() * arm.coefficient_k * d, 0.0};
  const Vec2 n = r.contact.normal;
  r.normal_force = n * r.spring_force.dot(n);
  const double friction = mu * r.normal_force.norm() * std::abs(r.contact.tangent.y);
  r.forward = r.normal_force.y + friction;
  r.reverse = r.normal_force.y - friction;
  return r;
}

Reaction reaction_with(const Mechanism& m, std::span<const ArmModel> arms, double s,
                       double tolerance) {
  Reaction r;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    try {
      r.sides.push_back(side_reaction(arms[i], m.profiles[i], s, m.friction_mu, tolerance));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::solver) throw;
      throw Error(ErrorCode::solver, std::string(m.side_springs[i].side == Side::left
                                                     ? "left spring: "
                                                     : "right spring: ") + e.what());
    }
    r.forward += r.sides.back().forward;
    r.reverse += r.sides.back().reverse;
  }
  if (m.base_spring) {
    r.base = m.base_spring->coefficient_kb * s;
    r.forward += r.base;
    r.reverse += r.base;
  }
  return r;
}

void check_displacement(const Mechanism& m, double s) {
  if (!(s >= 0.0) || s > m.travel) {
    throw Error(ErrorCode::out_of_range, "displacement " + format_number(s) +
                                             " mm is outside the travel [0, " +
                                             format_number(m.travel) + "]");
  }
}

}  // namespace

Reaction reaction_at(const Mechanism& mechanism, double s, const EstimateOptions& options) {
  mechanism.validate();
  check_displacement(mechanism, s);
  const auto arms = arms_of(mechanism);
  return reaction_with(mechanism, arms, s, options.tolerance);
}

double reaction_at(const Mechanism& mechanism, double s, Direction direction,
                   const EstimateOptions& options) {
  const Reaction r = reaction_at(mechanism, s, options);
  return direction == Direction::forward ? r.forward : r.reverse;
}

std::string_view to_string(WarningKind kind) {
  switch (kind) {
    case WarningKind::over_deflection: return "over_deflection";
    case WarningKind::sticking: return "sticking";
    case WarningKind::no_contact_span: return "no_contact_span";
    case WarningKind::force_envelope: return "force_envelope";
  }
  return "?";
}

std::optional<WarningKind> parse_warning_kind(std::string_view text) {
  for (auto k : {WarningKind::over_deflection, WarningKind::sticking,
                 WarningKind::no_contact_span, WarningKind::force_envelope}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

bool is_actionable(WarningKind kind) {
  return kind == WarningKind::over_deflection || kind == WarningKind::sticking;
}

bool FDCurve::has_actionable_warnings() const {
  return std::any_of(warnings.begin(), warnings.end(),
                     [](const Warning& w) { return is_actionable(w.kind); });
}

std::vector<double> sample_displacements(double travel, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::invalid_argument, "sampling step must be positive");
  }
  if (!(travel > 0.0)) throw Error(ErrorCode::invalid_argument, "travel must be positive");
  const double slack = 1e-9 * std::max(1.0, travel);
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    // Snapped to 1e-9 mm so 41 * 0.1 prints as 4.1 in the CSV.
    const double s = std::round(static_cast<double>(i) * step * 1e9) / 1e9;
    if (s >= travel - slack) break;
    grid.push_back(s);
  }
  grid.push_back(travel);
  return grid;
}

std::vector<std::pair<double, double>> spans_where(
    std::span<const FDSample> samples, const std::function<bool(const FDSample&)>& pred) {
  std::vector<std::pair<double, double>> spans;
  std::optional<std::size_t> start;
  for (std::size_t i = 0; i <= samples.size(); ++i) {
    const bool on = i < samples.size() && pred(samples[i]);
    if (on && !start) start = i;
    if (!on && start) {
      spans.emplace_back(samples[*start].displacement, samples[i - 1].displacement);
      start.reset();
    }
  }
  return spans;
}

namespace {

void sort_warnings(std::vector<Warning>& w) {
  std::stable_sort(w.begin(), w.end(), [](const Warning& a, const Warning& b) {
    if (a.from != b.from) return a.from < b.from;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
}

std::vector<Warning> value_warnings(std::span<const FDSample> samples) {
  std::vector<Warning> out;
  for (auto [a, b] : spans_where(samples, [](const FDSample& x) { return x.reverse < 0.0; })) {
    out.push_back({WarningKind::sticking, a, b,
                   "reverse force below zero; the slider will not return"});
  }
  for (auto [a, b] : spans_where(samples, [](const FDSample& x) {
         return std::abs(x.forward) > kForceEnvelope || std::abs(x.reverse) > kForceEnvelope;
       })) {
    out.push_back({WarningKind::force_envelope, a, b, "force exceeds the 5 N design envelope"});
  }
  return out;
}

}  // namespace

std::vector<Warning> detect_warnings(const FDCurve& curve) {
  std::vector<Warning> out;
  for (const auto& w : curve.warnings) {
    if (w.kind == WarningKind::over_deflection || w.kind == WarningKind::no_contact_span) {
      out.push_back(w);
    }
  }
  auto derived = value_warnings(curve.samples);
  out.insert(out.end(), derived.begin(), derived.end());
  sort_warnings(out);
  return out;
}

CurveSampler::CurveSampler(Mechanism mechanism, double step, EstimateOptions options)
    : mechanism_(std::move(mechanism)), options_(options), step_(step) {
  mechanism_.validate();
  arms_ = arms_of(mechanism_);
  grid_ = sample_displacements(mechanism_.travel, step);
  samples_.reserve(grid_.size());
  flags_.reserve(grid_.size());
}

std::pair<FDSample, CurveSampler::Flags> CurveSampler::evaluate(double s) const {
  const Reaction r = reaction_with(mechanism_, arms_, s, options_.tolerance);
  Flags f;
  f.none = true;
  for (const auto& side : r.sides) {
    if (side.contact.state != ContactState::no_contact) f.none = false;
    if (side.contact.state == ContactState::over_deflection) {
      f.over = true;
      if (f.diagnostic.empty()) f.diagnostic = side.contact.diagnostic;
    }
  }
  return {{s, r.forward, r.reverse}, f};
}

std::vector<FDSample> CurveSampler::next(std::size_t count) {
  const std::size_t n = std::min(count, grid_.size() - index_);
  std::vector<std::pair<FDSample, Flags>> results(n);
  const unsigned threads = std::max(1u, std::min<unsigned>(options_.threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = evaluate(grid_[index_ + i]);
  } else {
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n; i += threads) {
          try {
            results[i] = evaluate(grid_[index_ + i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<FDSample> out;
  out.reserve(n);
  for (auto& [sample, flags] : results) {
    samples_.push_back(sample);
    flags_.push_back(std::move(flags));
    out.push_back(sample);
  }
  index_ += n;
  return out;
}

FDCurve CurveSampler::curve() const {
  FDCurve c;
  c.samples = samples_;
  c.step = step_;
  auto flagged = [&](auto member, WarningKind kind, const std::string& fallback) {
    std::optional<std::size_t> start;
    for (std::size_t i = 0; i <= flags_.size(); ++i) {
      const bool on = i < flags_.size() && flags_[i].*member;
      if (on && !start) start = i;
      if (!on && start) {
        std::string detail = fallback;
        if (kind == WarningKind::over_deflection && !flags_[*start].diagnostic.empty()) {
          detail = flags_[*start].diagnostic;
        }
        c.warnings.push_back({kind, samples_[*start].displacement, samples_[i - 1].displacement,
                              detail});
        start.reset();
      }
    }
  };
  flagged(&Flags::over, WarningKind::over_deflection, "side spring beyond its deflection limit");
  flagged(&Flags::none, WarningKind::no_contact_span, "no side spring touches its profile");
  auto derived = value_warnings(c.samples);
  c.warnings.insert(c.warnings.end(), derived.begin(), derived.end());
  sort_warnings(c.warnings);
  return c;
}

FDCurve estimate_curve(const Mechanism& mechanism, double step, const EstimateOptions& options,
                       const std::atomic<bool>* cancel) {
  CurveSampler sampler(mechanism, step, options);
  const std::size_t chunk = options.threads > 1 ? options.threads * 8 : 1;
  while (!sampler.done()) {
    if (cancel && cancel->load()) break;
    sampler.next(chunk);
  }
  return sampler.curve();
}

namespace {

double interp_at(const std::vector<FDSample>& s, double x, double FDSample::*field) {
  if (x <= s.front().displacement) return s.front().*field;
  if (x >= s.back().displacement) return s.back().*field;
  auto it = std::lower_bound(s.begin(), s.end(), x, [](const FDSample& a, double v) {
    return a.displacement < v;
  });
  if (it->displacement == x) return (*it).*field;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double t = (x - a.displacement) / (b.displacement - a.displacement);
  return a.*field + t * (b.*field - a.*field);
}

}  // namespace

FDCurve resample(const FDCurve& curve, std::span<const double> displacements) {
  if (curve.samples.empty()) throw Error(ErrorCode::invalid_argument, "cannot resample an empty curve");
  FDCurve out;
  out.warnings = curve.warnings;
  out.step = displacements.size() > 1 ? displacements[1] - displacements[0] : curve.step;
  for (double x : displacements) {
    out.samples.push_back({x, interp_at(curve.samples, x, &FDSample::forward),
                           interp_at(curve.samples, x, &FDSample::reverse)});
  }
  return out;
}

OverlayTable overlay(std::span<const FDCurve> curves) {
  OverlayTable t;
  if (curves.empty()) return t;
  for (const auto& s : curves.front().samples) t.displacements.push_back(s.displacement);
  for (const auto& c : curves) t.series.push_back(resample(c, t.displacements).samples);
  const std::size_t n = curves.size();
  t.max_delta_forward.assign(n, std::vector<double>(n, 0.0));
  t.max_delta_reverse.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      double df = 0.0;
      double dr = 0.0;
      for (std::size_t i = 0; i < t.displacements.size(); ++i) {
        df = std::max(df, std::abs(t.series[a][i].forward - t.series[b][i].forward));
        dr = std::max(dr, std::abs(t.series[a][i].reverse - t.series[b][i].reverse));
      }
      t.max_delta_forward[a][b] = df;
      t.max_delta_reverse[a][b] = dr;
    }
  }
  return t;
}

std::vector<std::size_t> find_peaks(std::span<const double> v, double min_prominence) {
  std::vector<std::size_t> peaks;
  const std::size_t n = v.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(v[i] > v[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;
    if (j + 1 >= n || !(v[j + 1] < v[i])) {
      i = j + 1;
      continue;
    }
    // Prominence: height above the higher of the two flanking minima, each
    // taken up to the nearest strictly higher sample (or the end).
    double left_min = v[i];
    for (std::size_t k = i; k-- > 0;) {
      if (v[k] > v[i]) break;
      left_min = std::min(left_min, v[k]);
    }
    double right_min = v[i];
    for (std::size_t k = j + 1; k < n; ++k) {
      if (v[k] > v[i]) break;
      right_min = std::min(right_min, v[k]);
    }
    if (v[i] - std::max(left_min, right_min) >= min_prominence) peaks.push_back(i);
    i = j + 1;
  }
  return peaks;
}

double loop_work(const FDCurve& curve) {
  double fwd = 0.0;
  double rev = 0.0;
  for (std::size_t i = 1; i < curve.samples.size(); ++i) {
    const auto& a = curve.samples[i - 1];
    const auto& b = curve.samples[i];
    const double h = b.displacement - a.displacement;
    fwd += 0.5 * h * (a.forward + b.forward);
    rev += 0.5 * h * (a.reverse + b.reverse);
  }
  return fwd - rev;
}

std::string fd_csv(const FDCurve& curve) {
  std::string out = "displacement_mm,force_forward_N,force_reverse_N\n";
  for (const auto& s : curve.samples) {
    out += format_number(s.displacement);
    out += ',';
    out += format_number(s.forward);
    out += ',';
    out += format_number(s.reverse);
    out += '\n';
  }
  for (const auto& w : curve.warnings) {
    out += "# warning: ";
    out += to_string(w.kind);
    out += " from " + format_number(w.from) + " to " + format_number(w.to) + " mm";
    if (!w.detail.empty()) out += ": " + w.detail;
    out += '\n';
  }
  return out;
}

namespace {

double csv_number(const std::string& cell, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used == cell.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::schema,
              "fd csv line " + std::to_string(line) + ": bad number '" + cell + "'");
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  const auto b = s.find_first_not_of(' ');
  return b == std::string::npos ? std::string{} : s.substr(b);
}

// "<kind> from <a> to <b> mm[: detail]"
Warning parse_warning_line(const std::string& body, std::size_t line) {
  const auto bad = [&] {
    return Error(ErrorCode::schema, "fd csv line " + std::to_string(line) + ": bad warning line");
  };
  const auto from = body.find(" from ");
  const auto to = body.find(" to ", from == std::string::npos ? 0 : from);
  const auto mm = body.find(" mm", to == std::string::npos ? 0 : to);
  if (from == std::string::npos || to == std::string::npos || mm == std::string::npos) throw bad();
  const auto kind = parse_warning_kind(body.substr(0, from));
  if (!kind) throw bad();
  Warning w{*kind, csv_number(body.substr(from + 6, to - from - 6), line),
            csv_number(body.substr(to + 4, mm - to - 4), line), {}};
  if (body.compare(mm, 5, " mm: ") == 0) w.detail = body.substr(mm + 5);
  return w;
}

}  // namespace

FDCurve parse_fd_csv(std::string_view text) {
  FDCurve curve;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = strip(raw);
    if (s.empty()) continue;
    if (s.starts_with("# warning: ")) {
      curve.warnings.push_back(parse_warning_line(s.substr(11), line));
      continue;
    }
    if (s[0] == '#') continue;
    if (!header) {
      if (s != "displacement_mm,force_forward_N,force_reverse_N") {
        throw Error(ErrorCode::schema,
                    "fd csv line " + std::to_string(line) +
                        ": expected header displacement_mm,force_forward_N,force_reverse_N");
      }
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream row(s);
    for (std::string c; std::getline(row, c, ',');) cells.push_back(strip(c));
    if (cells.size() != 3) {
      throw Error(ErrorCode::schema, "fd csv line " + std::to_string(line) +
                                         ": expected 3 columns, got " +
                                         std::to_string(cells.size()));
    }
    curve.samples.push_back(
        {csv_number(cells[0], line), csv_number(cells[1], line), csv_number(cells[2], line)});
  }
  if (!header) throw Error(ErrorCode::schema, "fd csv has no header");
  if (curve.samples.size() >= 2) {
    curve.step = curve.samples[1].displacement - curve.samples[0].displacement;
  }
  return curve;
}

}  // namespace detent
