#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "detent/calibration.hpp"
#include "detent/fixtures.hpp"
#include "detent/project_store.hpp"

using namespace detent;
namespace fs = std::filesystem;
namespace fx = detent::fixtures;

namespace {

// Scratch directory holding the example archive, removed afterwards.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("detent_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    save_archive_file(fx::bundled_gallery(), path("examples.json"));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(DETENT_CLI) + " " + args + " >" + path("stdout.txt") + " 2>" +
                            path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  fs::path dir_;
};

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_F(CliTest, EstimateWritesCsv) {
  ASSERT_EQ(run("estimate --project " + path("examples.json") + " --id swatch-a-base --out " + path("a.csv")), 0)
      << read("stderr.txt");
  const std::string csv = read("a.csv");
  EXPECT_EQ(line_count(csv), 102u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "displacement_mm,force_forward_N,force_reverse_N");
  EXPECT_EQ(csv, fd_csv(estimate_curve(fx::swatch_with_base('A').mechanism)));
}

TEST_F(CliTest, EstimateToStdoutMatchesFile) {
  ASSERT_EQ(run("estimate --project " + path("examples.json") + " --id ramp"), 0);
  EXPECT_EQ(read("stdout.txt"), fd_csv(estimate_curve(fx::ramp().mechanism)));
}

TEST_F(CliTest, WarningsExitTwo) {
  EXPECT_EQ(run("estimate --project " + path("examples.json") + " --id wall --out " + path("w.csv")), 2);
  EXPECT_NE(read("stderr.txt").find("warning: sticking from 4.1 to 10 mm"), std::string::npos)
      << read("stderr.txt");
  // The curve is still written, with the warnings as comment lines.
  const std::string csv = read("w.csv");
  EXPECT_EQ(line_count(csv), 102u + estimate_curve(fx::vertical_wall().mechanism).warnings.size());
  EXPECT_NE(csv.find("# warning: sticking"), std::string::npos);
}

TEST_F(CliTest, UnknownIdExitsOne) {
  EXPECT_EQ(run("estimate --project " + path("examples.json") + " --id nope"), 1);
  EXPECT_NE(read("stderr.txt").find("error:"), std::string::npos);
}

TEST_F(CliTest, MissingArchiveExitsOne) {
  EXPECT_EQ(run("estimate --project " + path("absent.json") + " --id ramp"), 1);
  EXPECT_EQ(run("estimate --id ramp"), 1);
}

TEST_F(CliTest, ExportThenCheck) {
  ASSERT_EQ(run("export --project " + path("examples.json") + " --id swatch-a --svg " + path("a.svg")), 0);
  EXPECT_NE(read("a.svg").find("<svg"), std::string::npos);
  EXPECT_EQ(run("check --svg " + path("a.svg")), 0);
  EXPECT_NE(read("stdout.txt").find("ok:"), std::string::npos);
  EXPECT_EQ(run("check --svg " + path("a.svg") + " --kerf 0.6"), 2);
}

TEST_F(CliTest, SpikeFailsCheck) {
  EXPECT_EQ(run("export --project " + path("examples.json") + " --id spike --svg " + path("s.svg")), 2);
  EXPECT_EQ(run("check --svg " + path("s.svg")), 2);
  EXPECT_NE(read("stdout.txt").find("thin_wall"), std::string::npos) << read("stdout.txt");
}

TEST_F(CliTest, CalibratePrintsAlpha) {
  const FDCurve curve = estimate_curve(fx::swatch_with_base('A').mechanism);
  MeasurementSeries meas = series_from_curve(curve);
  for (auto& m : meas.samples) m.force *= 0.57;
  write("sim.csv", fd_csv(curve));
  write("meas.csv", measurement_csv(meas));
  ASSERT_EQ(run("calibrate --measured " + path("meas.csv") + " --simulated " + path("sim.csv")), 0)
      << read("stderr.txt");
  EXPECT_NE(read("stdout.txt").find("alpha = 0.5700"), std::string::npos) << read("stdout.txt");
  ASSERT_EQ(run("calibrate --measured " + path("meas.csv") + " --simulated " + path("sim.csv") + " --report"), 0);
  EXPECT_NE(read("stdout.txt").find("rmse"), std::string::npos);
}

TEST_F(CliTest, CalibrateRejectsBadMeasurement) {
  write("sim.csv", fd_csv(estimate_curve(fx::ramp().mechanism)));
  write("bad.csv", "displacement_mm,force_g,direction\n0,1,forward\n");
  EXPECT_EQ(run("calibrate --measured " + path("bad.csv") + " --simulated " + path("sim.csv")), 1);
}

TEST_F(CliTest, TableRoundTrips) {
  ASSERT_EQ(run("table --out " + path("t.csv")), 0);
  EXPECT_EQ(read("t.csv"), CoefficientTable::builtin().to_csv());
}

TEST_F(CliTest, FixturesCommand) {
  ASSERT_EQ(run("fixtures --out " + path("fx")), 0);
  EXPECT_EQ(load_archive_file(path("fx/examples.json")).size(), fx::bundled().size());
  EXPECT_TRUE(fs::exists(path("fx/swatch-a.svg")));
}
