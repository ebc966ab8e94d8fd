#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "gaitphase/harness/csv.hpp"
#include "support/tempdir.hpp"

namespace gaitphase {
namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd =
      std::string(GAITPHASE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_config(const fs::path& path, const std::string& body) {
  harness::write_text(path, R"({"schema_version": 1, "kind": "gaitphase.run", )" +
                                body + "}");
}

TEST(Cli, UsageErrorsExitWithConfigCode) {
  EXPECT_EQ(run(""), 4);
  EXPECT_EQ(run("frobnicate"), 4);
  EXPECT_EQ(run("replay"), 4);  // --config is required
  EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, ConfigErrors) {
  const auto dir = testing::temp_dir();
  EXPECT_EQ(run("simulate --config " + (dir / "absent.json").string()), 4);
  write_config(dir / "typo.json", R"("controler": "pvic")");
  EXPECT_EQ(run("simulate --config " + (dir / "typo.json").string()), 4);
  write_config(dir / "missing.json",
               R"("input": {"synth": {}}, "calibration": "nope.json")");
  EXPECT_EQ(run("replay --config " + (dir / "missing.json").string()), 4);
}

TEST(Cli, CalibrateWritesProfile) {
  const auto dir = testing::temp_dir();
  write_config(dir / "cal.json",
               R"("input": {"synth": {"stride_count": 6}}, "output_dir": "out")");
  ASSERT_EQ(run("calibrate --config " + (dir / "cal.json").string()), 0);
  const auto first = harness::read_text(dir / "out" / "calibration.json");
  ASSERT_EQ(run("calibrate --config " + (dir / "cal.json").string()), 0);
  EXPECT_EQ(harness::read_text(dir / "out" / "calibration.json"), first);
}

TEST(Cli, CalibrationErrors) {
  const auto dir = testing::temp_dir();
  write_config(dir / "short.json",
               R"("input": {"synth": {"stride_count": 3}}, "output_dir": "out")");
  EXPECT_EQ(run("calibrate --config " + (dir / "short.json").string()), 3);
  EXPECT_FALSE(fs::exists(dir / "out" / "calibration.json"));
}

TEST(Cli, DataErrors) {
  const auto dir = testing::temp_dir();
  harness::write_text(dir / "bad.csv", "t,theta_tib\n0,1\n");
  write_config(dir / "csv.json", R"("input": {"csv": "bad.csv"}, "output_dir": "out")");
  EXPECT_EQ(run("calibrate --config " + (dir / "csv.json").string()), 2);
  EXPECT_EQ(run("report --out " + dir.string()), 2);
}

TEST(Cli, SimulateThenReplayAndReport) {
  const auto dir = testing::temp_dir();
  write_config(dir / "sim.json",
               R"("input": {"synth": {"stride_count": 6, "noise_fraction": 0.02}}, "output_dir": "sim")");
  ASSERT_EQ(run("simulate --config " + (dir / "sim.json").string()), 0);
  const auto tel = harness::read_text(dir / "sim" / "telemetry.csv");
  ASSERT_EQ(run("simulate --config " + (dir / "sim.json").string()), 0);
  EXPECT_EQ(harness::read_text(dir / "sim" / "telemetry.csv"), tel);
  ASSERT_EQ(run("simulate --seed 99 --out " + (dir / "other").string() +
                " --config " + (dir / "sim.json").string()),
            0);
  EXPECT_NE(harness::read_text(dir / "other" / "telemetry.csv"), tel);

  ASSERT_EQ(run("synth --config " + (dir / "sim.json").string()), 0);
  write_config(dir / "replay.json",
               R"("input": {"csv": "sim/stream.csv"},
                  "calibration": "sim/calibration.json",
                  "pipeline": true, "output_dir": "replay")");
  ASSERT_EQ(run("replay --config " + (dir / "replay.json").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "replay" / "report.json"));

  ASSERT_EQ(run("report --out " + (dir / "cmp").string() + " " +
                (dir / "sim" / "telemetry.csv").string() + " " +
                (dir / "replay" / "telemetry.csv").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "cmp" / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "cmp" / "plot_data.csv"));
}

TEST(Cli, DefaultsAreDeterministic) {
  const auto dir = testing::temp_dir();
  ASSERT_EQ(run("defaults --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run("defaults --out " + (dir / "b").string()), 0);
  for (const char* f : {"pvic_profile.json", "reference_trajectories.csv"}) {
    EXPECT_EQ(harness::read_text(dir / "a" / f), harness::read_text(dir / "b" / f));
  }
  const fs::path shipped = fs::path(GAITPHASE_SOURCE_DIR) / "data";
  EXPECT_EQ(harness::read_text(dir / "a" / "pvic_profile.json"),
            harness::read_text(shipped / "pvic_profile.json"));
}

}  // namespace
}  // namespace gaitphase
