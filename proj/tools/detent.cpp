// Command-line front end: batch estimation, fabrication export and checks,
// calibration, and the HTTP service.
//
// Exit codes: 0 success, 1 failure, 2 finished with warnings the caller
// should look at (sticking spans, violations, ...).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "detent/calibration.hpp"
#include "detent/error.hpp"
#include "detent/estimator.hpp"
#include "detent/fabrication.hpp"
#include "detent/fixtures.hpp"
#include "detent/project_store.hpp"
#include "detent/service.hpp"
#include "detent/svg.hpp"

namespace fs = std::filesystem;
using namespace detent;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kWarnings = 2;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << text;
}

// "-" means stdout.
void emit(const std::string& target, std::string_view text) {
  if (target.empty() || target == "-") {
    std::cout << text;
  } else {
    write_file(target, text);
  }
}

// The force envelope is advisory and does not change the exit code.
bool needs_attention(const FDCurve& curve) {
  for (const auto& w : curve.warnings) {
    if (w.kind != WarningKind::force_envelope) return true;
  }
  return false;
}

void print_warnings(const FDCurve& curve) {
  for (const auto& w : curve.warnings) {
    std::cerr << "warning: " << to_string(w.kind) << " from " << format_number(w.from) << " to "
              << format_number(w.to) << " mm";
    if (!w.detail.empty()) std::cerr << ": " << w.detail;
    std::cerr << '\n';
  }
}

std::string fixed4(double v) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(4);
  ss << v;
  return ss.str();
}

struct Args {
  std::string project;
  std::string id;
  double step = kDefaultStep;
  std::string out;
  std::string svg;
  unsigned threads = 1;
  double kerf = 0.2;
  double min_wall = kMinWall;
  std::string measured;
  std::string simulated;
  bool report = false;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string dir = "fixtures";
};

int run_estimate(const Args& a) {
  const Gallery gallery = load_archive_file(a.project);
  const Project& p = gallery.get(a.id);
  const FDCurve curve = estimate_curve(p.mechanism, a.step, {.threads = a.threads});
  emit(a.out, fd_csv(curve));
  print_warnings(curve);
  return needs_attention(curve) ? kWarnings : kOk;
}

int run_export(const Args& a) {
  const Gallery gallery = load_archive_file(a.project);
  const SwatchDrawing drawing = layout_swatch(gallery.get(a.id).mechanism);
  emit(a.svg, export_fabrication_svg(drawing));
  const auto violations = check_feasibility(drawing);
  for (const auto& v : violations) {
    std::cerr << "warning: " << to_string(v.kind) << " in " << v.part << " at ("
              << format_number(v.location.x) << ", " << format_number(v.location.y)
              << "): " << fixed4(v.effective) << " mm < " << format_number(v.required) << " mm\n";
  }
  return violations.empty() ? kOk : kWarnings;
}

int run_check(const Args& a) {
  const auto rings = read_cut_layer(read_file(a.svg));
  FeasibilityRule rules;
  rules.kerf = a.kerf;
  rules.min_wall = a.min_wall;
  const auto violations = check_outline(rings, rules, "drawing");
  for (const auto& v : violations) {
    std::cout << to_string(v.kind) << " at (" << format_number(v.location.x) << ", "
              << format_number(v.location.y) << "): measured " << fixed4(v.measured)
              << " mm, effective " << fixed4(v.effective) << " mm, required "
              << format_number(v.required) << " mm\n";
  }
  if (violations.empty()) std::cout << "ok: " << rings.size() << " cut shapes pass\n";
  return violations.empty() ? kOk : kWarnings;
}

int run_calibrate(const Args& a) {
  const MeasurementSeries measured = parse_measurement_csv(read_file(a.measured), a.measured);
  const SimulatedInput simulated = parse_simulated_csv(read_file(a.simulated), a.simulated);
  const double alpha = fit_scale_factor(simulated.series, measured);
  std::cout << "alpha = " << fixed4(alpha) << '\n';
  if (a.report) {
    if (!simulated.curve) {
      std::cerr << "error: --report needs the simulated file in fd csv form\n";
      return kFailed;
    }
    const CurveScore score = score_curve(*simulated.curve, measured);
    for (const auto& [name, s] : {std::pair{"forward", score.forward}, std::pair{"reverse", score.reverse}}) {
      std::cout << name << ": rmse " << fixed4(s.rmse) << " N, peak location offset "
                << fixed4(s.peak_location_offset) << " mm, peak value offset "
                << fixed4(s.peak_value_offset) << " N over " << s.compared << " points\n";
    }
  }
  return kOk;
}

int run_serve(const Args& a) {
  Gallery gallery = fs::exists(a.project) ? load_archive_file(a.project) : fixtures::bundled_gallery();
  ServiceOptions options;
  options.archive_path = a.project;
  options.threads = a.threads;
  SandboxService service(std::move(gallery), load_default_table(), options);
  std::cerr << "serving " << a.project << " on http://" << a.host << ":" << a.port << '\n';
  if (!run_server(service, a.host, a.port)) {
    std::cerr << "error: cannot listen on " << a.host << ":" << a.port << '\n';
    return kFailed;
  }
  return kOk;
}

int run_fixtures(const Args& a) {
  const fs::path dir = a.dir;
  fs::create_directories(dir);
  save_archive_file(fixtures::bundled_gallery(), dir / "examples.json");
  for (const auto& f : fixtures::bundled()) {
    write_file(dir / (f.key + ".svg"), export_fabrication_svg(layout_swatch(f.mechanism)));
  }
  std::cout << "wrote " << fixtures::bundled().size() << " fixtures to " << dir.string() << '\n';
  return kOk;
}

int run_table(const Args& a) {
  emit(a.out, load_default_table().to_csv());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"detent: passive haptic profile design tools"};
  app.require_subcommand(1);
  Args a;

  auto* estimate = app.add_subcommand("estimate", "Write the FD curve of a project as CSV");
  estimate->add_option("--project", a.project, "Gallery archive")->required()->check(CLI::ExistingFile);
  estimate->add_option("--id", a.id, "Project id")->required();
  estimate->add_option("--step", a.step, "Sampling step in mm")->check(CLI::PositiveNumber);
  estimate->add_option("--out", a.out, "Output CSV (default stdout)");
  estimate->add_option("--threads", a.threads, "Worker threads")->check(CLI::Range(1u, 256u));

  auto* exp = app.add_subcommand("export", "Write the laser-cut swatch drawing of a project");
  exp->add_option("--project", a.project, "Gallery archive")->required()->check(CLI::ExistingFile);
  exp->add_option("--id", a.id, "Project id")->required();
  exp->add_option("--svg", a.svg, "Output SVG (default stdout)");

  auto* check = app.add_subcommand("check", "Check a cutting drawing against the wall rules");
  check->add_option("--svg", a.svg, "Drawing to check")->required()->check(CLI::ExistingFile);
  check->add_option("--kerf", a.kerf, "Laser kerf in mm");
  check->add_option("--min-wall", a.min_wall, "Minimum wall in mm");

  auto* calibrate = app.add_subcommand("calibrate", "Fit a stiffness factor to a measurement");
  calibrate->add_option("--measured", a.measured, "Measured CSV")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--simulated", a.simulated, "Simulated FD or measurement CSV")
      ->required()
      ->check(CLI::ExistingFile);
  calibrate->add_flag("--report", a.report, "Also print curve comparison metrics");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--project", a.project, "Gallery archive, created from the fixtures if missing")
      ->required();
  serve->add_option("--host", a.host, "Bind address");
  serve->add_option("--port", a.port, "Port")->check(CLI::Range(1, 65535));
  serve->add_option("--threads", a.threads, "Worker threads per curve")->check(CLI::Range(1u, 256u));

  auto* fx = app.add_subcommand("fixtures", "Write the bundled example gallery and drawings");
  fx->add_option("--out", a.dir, "Output directory");

  auto* table = app.add_subcommand("table", "Write the active coefficient table");
  table->add_option("--out", a.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kFailed;
  }

  try {
    if (*estimate) return run_estimate(a);
    if (*exp) return run_export(a);
    if (*check) return run_check(a);
    if (*calibrate) return run_calibrate(a);
    if (*serve) return run_serve(a);
    if (*fx) return run_fixtures(a);
    if (*table) return run_table(a);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kFailed;
}
