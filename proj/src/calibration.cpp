#include "detent/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "detent/error.hpp"
#include "detent/svg.hpp"

namespace detent {

FitResult fit_zero_intercept(std::span<const std::pair<double, double>> xy) {
  if (xy.size() < 2) throw Error(ErrorCode::undefined_fit, "a fit needs at least two samples");
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (auto [x, y] : xy) {
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  if (sxx == 0.0) throw Error(ErrorCode::undefined_fit, "all x values are zero");
  FitResult r;
  r.n = xy.size();
  r.slope = sxy / sxx;
  double ss_res = 0.0;
  for (auto [x, y] : xy) {
    const double e = y - r.slope * x;
    ss_res += e * e;
  }
  r.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return r;
}

std::vector<std::pair<double, double>> MeasurementSeries::trace(Direction direction) const {
  std::vector<std::pair<double, double>> out;
  for (const auto& s : samples) {
    if (s.direction == direction) out.emplace_back(s.displacement, s.force);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

MeasurementSeries series_from_curve(const FDCurve& curve, std::string label) {
  MeasurementSeries m;
  m.source_label = std::move(label);
  for (const auto& s : curve.samples) m.samples.push_back({s.displacement, s.forward, Direction::forward});
  for (const auto& s : curve.samples) m.samples.push_back({s.displacement, s.reverse, Direction::reverse});
  return m;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void schema_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::schema, "line " + std::to_string(line) + ": " + what);
}

double parse_cell(const std::string& s, std::size_t line, const char* column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  schema_error(line, std::string("bad ") + column + " value '" + s + "'");
}

std::optional<double> interp(const std::vector<std::pair<double, double>>& t, double x) {
  if (t.empty() || x < t.front().first || x > t.back().first) return std::nullopt;
  auto it = std::lower_bound(t.begin(), t.end(), x,
                             [](const auto& p, double v) { return p.first < v; });
  if (it->first == x) return it->second;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (x - a.first) / (b.first - a.first);
  return a.second + w * (b.second - a.second);
}

}  // namespace

MeasurementSeries parse_measurement_csv(std::string_view text, std::string label) {
  MeasurementSeries series;
  series.source_label = std::move(label);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(s);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(trim(c));
    if (!header) {
      if (cells.size() == 3 && cells[0] == "displacement_mm" && cells[1] == "force_N" &&
          cells[2] == "direction") {
        header = true;
        continue;
      }
      for (const auto& c : cells) {
        if (c.rfind("force_", 0) == 0 && c != "force_N") {
          schema_error(line_no, "force column '" + c + "' must be in newtons (force_N)");
        }
        if (c.rfind("displacement_", 0) == 0 && c != "displacement_mm") {
          schema_error(line_no, "displacement column '" + c + "' must be in millimetres");
        }
      }
      schema_error(line_no, "expected header displacement_mm,force_N,direction");
    }
    if (cells.size() != 3) {
      schema_error(line_no, "expected 3 columns, got " + std::to_string(cells.size()));
    }
    MeasurementSample m;
    m.displacement = parse_cell(cells[0], line_no, "displacement_mm");
    m.force = parse_cell(cells[1], line_no, "force_N");
    if (m.displacement < 0.0) schema_error(line_no, "negative displacement");
    if (cells[2] == "forward") m.direction = Direction::forward;
    else if (cells[2] == "reverse") m.direction = Direction::reverse;
    else schema_error(line_no, "direction must be forward or reverse, got '" + cells[2] + "'");
    series.samples.push_back(m);
  }
  if (!header) throw Error(ErrorCode::schema, "measurement file is empty (no header)");
  for (auto dir : {Direction::forward, Direction::reverse}) {
    const auto n = std::count_if(series.samples.begin(), series.samples.end(),
                                 [&](const auto& m) { return m.direction == dir; });
    if (n == 1) {
      throw Error(ErrorCode::schema, std::string("only one ") +
                                         (dir == Direction::forward ? "forward" : "reverse") +
                                         " sample; a direction needs at least two");
    }
  }
  if (series.samples.empty()) throw Error(ErrorCode::schema, "measurement file has no samples");
  return series;
}

MeasurementSeries load_measurement_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_measurement_csv(ss.str(), path.filename().string());
}

std::string measurement_csv(const MeasurementSeries& series) {
  std::string out;
  if (!series.source_label.empty()) out += "# source: " + series.source_label + "\n";
  out += "displacement_mm,force_N,direction\n";
  for (const auto& s : series.samples) {
    out += format_number(s.displacement) + "," + format_number(s.force) + "," +
           (s.direction == Direction::forward ? "forward" : "reverse") + "\n";
  }
  return out;
}

double fit_scale_factor(const MeasurementSeries& simulated, const MeasurementSeries& measured) {
  double sm = 0.0;
  double ss = 0.0;
  std::size_t used = 0;
  for (auto dir : {Direction::forward, Direction::reverse}) {
    const auto sim = simulated.trace(dir);
    const auto meas = measured.trace(dir);
    for (auto [x, s] : sim) {
      const auto m = interp(meas, x);
      if (!m) continue;
      sm += *m * s;
      ss += s * s;
      ++used;
    }
  }
  if (used == 0) throw Error(ErrorCode::no_overlap, "simulated and measured series do not overlap");
  if (ss == 0.0) throw Error(ErrorCode::undefined_fit, "simulated series carries no force");
  return sm / ss;
}

FactorSummary aggregate_factors(std::span<const double> factors) {
  if (factors.empty()) throw Error(ErrorCode::undefined_fit, "no factors to aggregate");
  FactorSummary s;
  s.n = factors.size();
  s.mean = std::accumulate(factors.begin(), factors.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double acc = 0.0;
    for (double f : factors) acc += (f - s.mean) * (f - s.mean);
    s.sd = std::sqrt(acc / static_cast<double>(s.n - 1));
  }
  return s;
}

CurveScore score_curve(const FDCurve& estimated, const MeasurementSeries& measured) {
  CurveScore score;
  bool any = false;
  for (auto dir : {Direction::forward, Direction::reverse}) {
    const auto meas = measured.trace(dir);
    DirectionScore& out = dir == Direction::forward ? score.forward : score.reverse;
    double sq = 0.0;
    std::optional<std::pair<double, double>> est_peak;
    std::optional<std::pair<double, double>> meas_peak;
    for (const auto& s : estimated.samples) {
      const auto m = interp(meas, s.displacement);
      if (!m) continue;
      const double e = dir == Direction::forward ? s.forward : s.reverse;
      sq += (e - *m) * (e - *m);
      ++out.compared;
      if (!est_peak || e > est_peak->second) est_peak = {s.displacement, e};
      if (!meas_peak || *m > meas_peak->second) meas_peak = {s.displacement, *m};
    }
    if (out.compared == 0) continue;
    any = true;
    out.rmse = std::sqrt(sq / static_cast<double>(out.compared));
    out.peak_location_offset = std::abs(est_peak->first - meas_peak->first);
    out.peak_value_offset = std::abs(est_peak->second - meas_peak->second);
  }
  if (!any) throw Error(ErrorCode::no_overlap, "measurement does not overlap the estimate");
  return score;
}

SimulatedInput parse_simulated_csv(std::string_view text, std::string label) {
  const auto first = text.find_first_not_of(" \t\r\n");
  std::string_view rest = first == std::string_view::npos ? text : text.substr(first);
  // Skip leading comment lines to find the header.
  while (rest.starts_with("#")) {
    const auto nl = rest.find('\n');
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
  }
  if (rest.starts_with("displacement_mm,force_forward_N")) {
    FDCurve curve = parse_fd_csv(text);
    MeasurementSeries series = series_from_curve(curve, std::move(label));
    return {std::move(series), std::move(curve)};
  }
  return {parse_measurement_csv(text, std::move(label)), std::nullopt};
}

}  // namespace detent
