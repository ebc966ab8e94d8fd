#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaitphase/error.hpp"
#include "gaitphase/harness/commands.hpp"
#include "gaitphase/harness/config.hpp"

namespace fs = std::filesystem;
using gaitphase::Error;
namespace harness = gaitphase::harness;

int main(int argc, char** argv) {
  CLI::App app{"Phase-variable impedance control harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> telemetry;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "run config (JSON)");
    if (config_required) opt->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "output directory");
  };
  auto* calibrate = app.add_subcommand("calibrate", "fit phase (and volitional) calibration");
  auto* replay = app.add_subcommand("replay", "replay a stream through a controller");
  auto* simulate = app.add_subcommand("simulate", "closed loop with the toy plant");
  auto* report = app.add_subcommand("report", "compare telemetry files");
  auto* synth = app.add_subcommand("synth", "write a synthetic stream as CSV");
  auto* defaults = app.add_subcommand("defaults", "export the built-in profile and references");
  add_common(calibrate, true);
  add_common(replay, true);
  add_common(simulate, true);
  add_common(synth, true);
  add_common(report, false);
  report->add_option("telemetry", telemetry, "telemetry CSV files");
  defaults->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  try {
    if (defaults->parsed()) {
      std::cout << harness::cmd_defaults(out_dir ? fs::path(*out_dir) : fs::path("data"));
      return 0;
    }
    harness::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = harness::read_config(config_path);
    } else {
      cfg.metrics.insert(harness::metric_names().begin(),
                         harness::metric_names().end());
    }
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;

    std::string summary;
    if (calibrate->parsed()) {
      summary = harness::cmd_calibrate(cfg);
    } else if (replay->parsed()) {
      summary = harness::cmd_replay(cfg);
    } else if (simulate->parsed()) {
      summary = harness::cmd_simulate(cfg);
    } else if (synth->parsed()) {
      summary = harness::cmd_synth(cfg);
    } else if (report->parsed()) {
      std::vector<fs::path> paths(telemetry.begin(), telemetry.end());
      for (const auto& p : paths) {
        if (!fs::exists(p)) {
          throw Error(gaitphase::ErrorCode::kDataError,
                      "telemetry file not found: " + p.string());
        }
      }
      summary = harness::cmd_report(cfg, paths);
    }
    std::cout << summary;
    return 0;
  } catch (const Error& e) {
    std::cerr << "gaitphase: " << e.what() << "\n";
    return gaitphase::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "gaitphase: " << e.what() << "\n";
    return 2;
  }
}
