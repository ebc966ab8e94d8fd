#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "gaitphase/harness/commands.hpp"
#include "support/random.hpp"
#include "support/tempdir.hpp"

namespace gaitphase {
namespace harness {
namespace {

namespace fs = std::filesystem;
using testing::Gen;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kInvalidParameter;
}

Json run_json(const std::string& controller, std::size_t strides = 8) {
  Json j;
  j["schema_version"] = 1;
  j["kind"] = "gaitphase.run";
  j["controller"] = controller;
  j["input"]["synth"]["stride_count"] = strides;
  j["seed"] = 7;
  return j;
}

Json with_volitional(Json j) {
  j["volitional"]["synth"]["mva_gas_v"] = 0.4;
  j["volitional"]["synth"]["mva_ta_v"] = 0.3;
  return j;
}

RunConfig config(const Json& j, const fs::path& dir) {
  auto c = config_from_json(j, dir, "test");
  c.output_dir = dir / "out";
  return c;
}

// --- numbers and CSV -------------------------------------------------------

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(2.5), "2.5");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  Gen gen(51);
  for (int i = 0; i < 20000; ++i) {
    const double v = gen.normal(0.0, 1.0) * std::pow(10.0, gen.integer(-12, 12));
    ASSERT_EQ(parse_number(format_number(v), "t"), v);
  }
  EXPECT_TRUE(std::isnan(parse_number("nan", "t")));
}

TEST(ParseNumber, RejectsGarbage) {
  EXPECT_EQ(code_of([] { parse_number("1.5x", "t"); }), ErrorCode::kDataError);
  EXPECT_EQ(code_of([] { parse_number("", "t"); }), ErrorCode::kDataError);
}

TEST(ParseCsv, CommentsAndMeta) {
  std::istringstream in("# note\n# stride_period_s=1.8\na,b\n1,2\n\n3,4\n");
  const auto t = parse_csv(in, "mem");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.meta.at("stride_period_s"), "1.8");
  EXPECT_EQ(t.column("b"), 1u);
  EXPECT_EQ(code_of([&] { t.column("c"); }), ErrorCode::kDataError);
}

TEST(ParseCsv, RaggedRowIsDataError) {
  std::istringstream in("a,b\n1,2\n3\n");
  EXPECT_EQ(code_of([&] { parse_csv(in, "mem"); }), ErrorCode::kDataError);
}

TEST(Frames, CsvRoundTripIsExact) {
  plant::GaitSynthParams p;
  p.stride_count = 3;
  p.noise_fraction = 0.05;
  const auto frames = plant::synth_gait(p).frames;
  std::istringstream in(frames_to_csv(frames));
  EXPECT_EQ(frames_from_table(parse_csv(in, "mem"), "mem"), frames);
}

TEST(Frames, RejectsNonMonotoneTime) {
  std::string text = "t,theta_tib,theta_dot_tib,p_heel,p_toe,emg_gas,emg_ta,"
                     "theta_ankle,theta_dot_ankle\n"
                     "0,0,0,0,0,0,0,0,0\n0,0,0,0,0,0,0,0,0\n";
  std::istringstream in(text);
  EXPECT_EQ(code_of([&] { frames_from_table(parse_csv(in, "mem"), "mem"); }),
            ErrorCode::kDataError);
}

TEST(Frames, RejectsMissingColumn) {
  std::istringstream in("t,theta_tib\n0,1\n");
  EXPECT_EQ(code_of([&] { frames_from_table(parse_csv(in, "mem"), "mem"); }),
            ErrorCode::kDataError);
}

// --- JSON profiles ---------------------------------------------------------

TEST(CalibrationJson, RoundTripIsByteIdentical) {
  const auto dir = testing::temp_dir();
  const auto cfg = config(with_volitional(run_json("pvihvc")), dir);
  const auto cal = calibrate_all(cfg, load_input(cfg));
  ASSERT_TRUE(cal.volitional.has_value());
  write_calibration(dir / "a.json", cal);
  const auto back = read_calibration(dir / "a.json");
  EXPECT_EQ(back, cal);
  write_calibration(dir / "b.json", back);
  EXPECT_EQ(read_text(dir / "a.json"), read_text(dir / "b.json"));
}

TEST(CalibrationJson, RejectsWrongKindAndVersion) {
  const auto dir = testing::temp_dir();
  write_text(dir / "x.json", R"({"schema_version": 1, "kind": "other"})");
  EXPECT_EQ(code_of([&] { read_calibration(dir / "x.json"); }),
            ErrorCode::kConfigError);
  write_text(dir / "y.json",
             R"({"schema_version": 2, "kind": "gaitphase.calibration"})");
  EXPECT_EQ(code_of([&] { read_calibration(dir / "y.json"); }),
            ErrorCode::kConfigError);
  write_text(dir / "z.json", "{not json");
  EXPECT_EQ(code_of([&] { read_calibration(dir / "z.json"); }),
            ErrorCode::kConfigError);
}

TEST(ImpedanceJson, RoundTripIsByteIdentical) {
  const auto dir = testing::temp_dir();
  write_impedance(dir / "a.json", defaults::pvic_profile());
  EXPECT_EQ(read_impedance(dir / "a.json"), defaults::pvic_profile());
  write_impedance(dir / "b.json", read_impedance(dir / "a.json"));
  EXPECT_EQ(read_text(dir / "a.json"), read_text(dir / "b.json"));
}

TEST(ImpedanceJson, InvalidProfileIsRejectedOnRead) {
  const auto dir = testing::temp_dir();
  auto p = defaults::pvic_profile();
  p.theta_eq.v[20] = 22.0;
  write_text(dir / "bad.json", dump(to_json(p)));
  EXPECT_EQ(code_of([&] { read_impedance(dir / "bad.json"); }),
            ErrorCode::kConfigError);
}

TEST(References, CsvRoundTripIsExact) {
  std::istringstream in(references_to_csv(defaults::reference_trajectories()));
  const auto r = references_from_table(parse_csv(in, "mem"), "mem");
  const auto d = defaults::reference_trajectories();
  EXPECT_EQ(r.theta, d.theta);
  EXPECT_EQ(r.power, d.power);
  EXPECT_EQ(r.stride_period_s, d.stride_period_s);
}

// --- run configs -----------------------------------------------------------

TEST(RunConfig, Defaults) {
  const auto c = config_from_json(run_json("pvic"), "/tmp", "test");
  EXPECT_EQ(c.controller, control::ControllerKind::kPvic);
  EXPECT_EQ(c.rate_hz, 220.0);
  EXPECT_EQ(c.body_mass, 70.0);
  EXPECT_EQ(c.torque_limit, 2.5);
  EXPECT_EQ(c.metrics.size(), metric_names().size());
  EXPECT_EQ(c.seed, 7u);
}

TEST(RunConfig, UnknownKeysAreConfigErrors) {
  auto j = run_json("pvic");
  j["torque_limt"] = 2.0;
  EXPECT_EQ(code_of([&] { config_from_json(j, "/tmp", "t"); }),
            ErrorCode::kConfigError);
  auto k = run_json("pvic");
  k["input"]["synth"]["strides"] = 3;
  EXPECT_EQ(code_of([&] { config_from_json(k, "/tmp", "t"); }),
            ErrorCode::kConfigError);
  auto m = run_json("pvic");
  m["metrics"] = {"estimation", "bogus"};
  EXPECT_EQ(code_of([&] { config_from_json(m, "/tmp", "t"); }),
            ErrorCode::kConfigError);
}

TEST(RunConfig, BadValuesAreConfigErrors) {
  auto a = run_json("bang-bang");
  EXPECT_EQ(code_of([&] { config_from_json(a, "/tmp", "t"); }),
            ErrorCode::kConfigError);
  auto b = run_json("pvic");
  b["heel_threshold"] = 1.5;
  EXPECT_EQ(code_of([&] { config_from_json(b, "/tmp", "t"); }),
            ErrorCode::kConfigError);
  auto c = run_json("pvic");
  c["body_mass_kg"] = "heavy";
  EXPECT_EQ(code_of([&] { config_from_json(c, "/tmp", "t"); }),
            ErrorCode::kConfigError);
  auto d = run_json("pvic");
  d["input"]["csv"] = "x.csv";
  EXPECT_EQ(code_of([&] { config_from_json(d, "/tmp", "t"); }),
            ErrorCode::kConfigError);
}

TEST(RunConfig, MissingFilesAreConfigErrors) {
  const auto dir = testing::temp_dir();
  Json j = run_json("pvic");
  j["calibration"] = "nowhere.json";
  EXPECT_EQ(code_of([&] { config_from_json(j, dir, "t"); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] { read_config(dir / "absent.json"); }),
            ErrorCode::kConfigError);
}

TEST(RunConfig, RelativePathsResolveAgainstConfigDir) {
  const auto dir = testing::temp_dir();
  fs::create_directories(dir / "cfg");
  write_impedance(dir / "prof.json", defaults::pvic_profile());
  Json j = run_json("pvic");
  j["impedance_profile"] = "../prof.json";
  j["output_dir"] = "results";
  write_text(dir / "cfg" / "run.json", j.dump());
  const auto c = read_config(dir / "cfg" / "run.json");
  EXPECT_EQ(fs::weakly_canonical(*c.impedance_profile),
            fs::weakly_canonical(dir / "prof.json"));
  EXPECT_EQ(c.output_dir, dir / "cfg" / "results");
}

TEST(RunConfig, RateMismatchWithCalibration) {
  const auto dir = testing::temp_dir();
  auto cfg = config(run_json("pvic"), dir);
  auto cal = calibrate_all(cfg, load_input(cfg));
  cal.rate_hz = 200.0;
  EXPECT_EQ(code_of([&] { controller_config(cfg, cal); }),
            ErrorCode::kInvalidCalibration);
}

// --- telemetry and reports -------------------------------------------------

TEST(Telemetry, CsvRoundTrip) {
  const auto dir = testing::temp_dir();
  const auto out = run_simulate(config(run_json("pvic", 4), dir));
  std::istringstream in(telemetry_to_csv(out.telemetry));
  const auto back = telemetry_from_table(parse_csv(in, "mem"), "mem");
  EXPECT_EQ(back.controller, "pvic");
  EXPECT_EQ(back.body_mass, 70.0);
  ASSERT_EQ(back.rows.size(), out.telemetry.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    const auto& a = back.rows[i];
    const auto& b = out.telemetry.rows[i];
    ASSERT_EQ(a.t, b.t);
    ASSERT_EQ(a.stride, b.stride);
    ASSERT_EQ(a.tau_total, b.tau_total);
    ASSERT_EQ(std::isnan(a.s_true), std::isnan(b.s_true));
  }
}

TEST(Telemetry, TorqueAndPowerColumnsAgree) {
  const auto dir = testing::temp_dir();
  const auto out = run_simulate(config(run_json("pvic", 4), dir));
  for (const auto& r : out.telemetry.rows) {
    ASSERT_DOUBLE_EQ(r.tau_total_nm, 70.0 * r.tau_total);
    ASSERT_NEAR(r.power, r.tau_total * r.theta_dot_ankle * M_PI / 180.0, 1e-12);
  }
}

TEST(Report, AggregatesAreMeansOfStrides) {
  const auto dir = testing::temp_dir();
  const auto out = run_simulate(config(run_json("pvic", 8), dir));
  const auto& rep = out.report;
  ASSERT_EQ(rep.strides.size(), 7u);
  for (const auto& [name, group] : stride_fields()) {
    double sum = 0.0;
    for (const auto& m : rep.strides) sum += stride_field(m, name);
    EXPECT_NEAR(rep.aggregate.at(name), sum / 7.0, 1e-12) << name;
  }
  double worst = 0.0;
  for (const auto& m : rep.strides) {
    EXPECT_GT(m.t_end, m.t_start);
    EXPECT_LE(m.est_mean_error, m.est_max_error);
    worst = std::max(worst, m.est_max_error);
  }
  EXPECT_EQ(rep.pooled.max_error, worst);
}

TEST(Report, RmseIsZeroWhenTrackingReferences) {
  // Hand-built telemetry that follows the references exactly on the grid.
  const auto refs = defaults::reference_trajectories();
  Telemetry tel;
  tel.controller = "pvic";
  for (int k = 0; k < 3; ++k) {
    for (int g = 0; g < 100; ++g) {
      TelemetryRow r;
      r.t = k + g / 100.0;
      r.stride = k;
      r.s_true = g;
      r.s_est = g;
      r.theta_ankle = refs.theta[g];
      r.tau_total = refs.tau[g];
      r.power = refs.power[g];
      tel.rows.push_back(r);
    }
  }
  TelemetryRow last;
  last.t = 3.0;
  tel.rows.push_back(last);
  const auto rep = make_report(tel, refs);
  ASSERT_EQ(rep.strides.size(), 3u);
  for (const auto& m : rep.strides) {
    EXPECT_NEAR(m.rmse_angle, 0.0, 1e-12);
    EXPECT_NEAR(m.rmse_torque, 0.0, 1e-12);
    EXPECT_NEAR(m.rmse_power, 0.0, 1e-12);
    EXPECT_EQ(m.est_max_error, 0.0);
    EXPECT_EQ(m.peak_pf_angle, 20.0);
    EXPECT_EQ(m.peak_pf_torque, 1.4);
  }
  EXPECT_EQ(rep.band_coverage.at("angle"), 1.0);
}

TEST(Report, NoisyBandsCoverMostSamples) {
  const auto dir = testing::temp_dir();
  auto j = run_json("pvic", 21);
  j["input"]["synth"]["noise_fraction"] = 0.05;
  j["input"]["synth"]["stride_period_jitter"] = 0.03;
  j["input"]["synth"]["amplitude_jitter"] = 0.05;
  const auto out = run_simulate(config(j, dir));
  for (const auto& channel : band_channels()) {
    EXPECT_GE(out.report.band_coverage.at(channel), 0.95) << channel;
  }
}

TEST(Report, JsonHonoursMetricSelection) {
  const auto dir = testing::temp_dir();
  const auto out = run_simulate(config(run_json("pvic", 4), dir));
  const Json all = report_to_json(out.report, {});
  const Json est = report_to_json(out.report, {"estimation"});
  EXPECT_TRUE(all.at("aggregate_mean").contains("rmse_angle_deg"));
  EXPECT_FALSE(est.at("aggregate_mean").contains("rmse_angle_deg"));
  EXPECT_TRUE(est.at("aggregate_mean").contains("est_mean_error_pct"));
  EXPECT_EQ(all.at("kind"), "gaitphase.report");
}

// --- pipelines and commands --------------------------------------------------

TEST(Pipeline, MatchesSequential) {
  const auto dir = testing::temp_dir();
  for (auto name : {"passive", "pvic", "pvihvc"}) {
    const auto cfg = config(with_volitional(run_json(name, 6)), dir);
    const auto frames = load_input(cfg);
    const auto cal = calibrate_all(cfg, frames);
    for (std::size_t capacity : {1u, 7u, 256u}) {
      control::Controller a(controller_config(cfg, cal));
      control::Controller b(controller_config(cfg, cal));
      const auto seq = run_sequential(a, frames);
      const auto pip = run_pipelined(b, frames, capacity);
      ASSERT_EQ(seq.size(), pip.size());
      for (std::size_t i = 0; i < seq.size(); ++i) {
        ASSERT_EQ(seq[i].tau_total, pip[i].tau_total);
        ASSERT_EQ(seq[i].t, pip[i].t);
      }
    }
  }
}

TEST(Calibrate, InsufficientStrides) {
  const auto dir = testing::temp_dir();
  auto cfg = config(run_json("pvic", 3), dir);  // two complete strides
  try {
    cmd_calibrate(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewStrides);
    EXPECT_NE(std::string(e.what()).find("insufficient strides"), std::string::npos);
    EXPECT_EQ(exit_code_for(e.code()), 3);
  }
  EXPECT_FALSE(fs::exists(cfg.output_dir / "calibration.json"));
}

TEST(Calibrate, DeterministicOutput) {
  const auto dir = testing::temp_dir();
  auto cfg = config(with_volitional(run_json("pvihvc")), dir);
  cmd_calibrate(cfg);
  const auto first = read_text(cfg.output_dir / "calibration.json");
  cmd_calibrate(cfg);
  EXPECT_EQ(read_text(cfg.output_dir / "calibration.json"), first);
}

TEST(Calibrate, CsvFilesMatchSynthetic) {
  // MVIC trials and a walk written to disk calibrate to the same values.
  const auto dir = testing::temp_dir();
  auto j = with_volitional(run_json("pvihvc"));
  const auto synth_cfg = config(j, dir);
  const auto frames = load_input(synth_cfg);
  const auto synth_cal = calibrate_all(synth_cfg, frames);

  const SeedPlan seeds = seed_plan(synth_cfg.seed);
  const auto& sv = *synth_cfg.volitional->synth;
  const auto gas = plant::synth_mvic_trials(sv.mva_gas, sv.trials, seeds.mvic_gas);
  const auto ta = plant::synth_mvic_trials(sv.mva_ta, sv.trials, seeds.mvic_ta);
  auto write_trials = [&](const std::string& stem, const auto& trials) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < trials.size(); ++k) {
      std::string text = "t,emg\n";
      for (std::size_t i = 0; i < trials[k].size(); ++i) {
        text += format_number(i / 220.0) + "," + format_number(trials[k][i]) + "\n";
      }
      const std::string name = stem + std::to_string(k) + ".csv";
      write_text(dir / name, text);
      names.push_back(name);
    }
    return names;
  };
  auto walk_p = sv.walk;
  walk_p.seed = seeds.walk;
  write_text(dir / "walk.csv", frames_to_csv(plant::synth_gait(walk_p).frames));
  j["volitional"] = Json::object();
  j["volitional"]["mvic_gas"] = write_trials("gas", gas);
  j["volitional"]["mvic_ta"] = write_trials("ta", ta);
  j["volitional"]["walk"] = "walk.csv";
  const auto csv_cfg = config(j, dir);
  const auto csv_cal = calibrate_all(csv_cfg, frames);
  ASSERT_TRUE(csv_cal.volitional && synth_cal.volitional);
  EXPECT_EQ(*csv_cal.volitional, *synth_cal.volitional);
}

TEST(Replay, EstimatesPhaseOnCleanStream) {
  const auto dir = testing::temp_dir();
  auto cfg = config(run_json("pvic", 11), dir);
  const auto frames = load_input(cfg);
  const auto out = run_replay(cfg, frames, calibrate_all(cfg, frames));
  EXPECT_LT(out.report.pooled.mean_error, 1.0);
  EXPECT_EQ(out.report.strides.size(), 10u);
}

TEST(Replay, ZeroEmgPviHvcMatchesPvic) {
  const auto dir = testing::temp_dir();
  auto j = with_volitional(run_json("pvic"));
  auto pvic_cfg = config(j, dir);
  const auto frames = load_input(pvic_cfg);  // EMG channels are zero
  const auto cal = calibrate_all(pvic_cfg, frames);
  j["controller"] = "pvihvc";
  const auto hvc_cfg = config(j, dir);
  const auto a = run_replay(pvic_cfg, frames, cal);
  const auto b = run_replay(hvc_cfg, frames, cal);
  ASSERT_EQ(a.telemetry.rows.size(), b.telemetry.rows.size());
  for (std::size_t i = 0; i < a.telemetry.rows.size(); ++i) {
    ASSERT_EQ(a.telemetry.rows[i].tau_total, b.telemetry.rows[i].tau_total);
    ASSERT_EQ(b.telemetry.rows[i].tau_vc, 0.0);
  }
}

TEST(Replay, PassiveHasNoVolitionalTerm) {
  const auto dir = testing::temp_dir();
  const auto out = run_simulate(config(run_json("passive", 4), dir));
  for (const auto& r : out.telemetry.rows) {
    ASSERT_EQ(r.tau_vc, 0.0);
    ASSERT_EQ(r.stiffness, 0.09);
  }
}

TEST(Replay, MissingCalibration) {
  const auto dir = testing::temp_dir();
  auto cfg = config(run_json("pvic"), dir);
  EXPECT_EQ(code_of([&] { run_replay(cfg, load_input(cfg), std::nullopt); }),
            ErrorCode::kCalibrationMissing);
}

TEST(Simulate, DefaultsNeverClamp) {
  const auto dir = testing::temp_dir();
  for (auto name : {"pvic", "pvihvc"}) {
    const auto out = run_simulate(config(with_volitional(run_json(name, 12)), dir));
    EXPECT_EQ(out.report.clamp_events, 0u) << name;
  }
}

TEST(Simulate, Reproducible) {
  const auto dir = testing::temp_dir();
  auto cfg = config(run_json("pvic", 5), dir);
  cmd_simulate(cfg);
  const auto a = read_text(cfg.output_dir / "telemetry.csv");
  const auto ra = read_text(cfg.output_dir / "report.json");
  cmd_simulate(cfg);
  EXPECT_EQ(read_text(cfg.output_dir / "telemetry.csv"), a);
  EXPECT_EQ(read_text(cfg.output_dir / "report.json"), ra);
  EXPECT_TRUE(fs::exists(cfg.output_dir / "bands.csv"));
  EXPECT_TRUE(fs::exists(cfg.output_dir / "calibration.json"));
}

TEST(Simulate, RequiresSynthInput) {
  const auto dir = testing::temp_dir();
  auto cfg = config(run_json("pvic"), dir);
  cfg.input_synth.reset();
  EXPECT_EQ(code_of([&] { run_simulate(cfg); }), ErrorCode::kConfigError);
}

TEST(Synth, WritesReadableStream) {
  const auto dir = testing::temp_dir();
  auto cfg = config(run_json("pvic", 3), dir);
  cmd_synth(cfg);
  EXPECT_EQ(read_frames(cfg.output_dir / "stream.csv"), load_input(cfg));
}

TEST(ReportCommand, OneRowPerMetric) {
  const auto dir = testing::temp_dir();
  auto cfg = config(run_json("pvic", 5), dir);
  cmd_simulate(cfg);
  const fs::path tel = cfg.output_dir / "telemetry.csv";
  RunConfig rc;
  rc.output_dir = dir / "report";
  rc.metrics.insert(metric_names().begin(), metric_names().end());
  const std::string summary = cmd_report(rc, {tel, tel});
  std::istringstream in(summary);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "metric,out,out_2");
  std::set<std::string> names;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto cells = split_commas(line);
    ASSERT_EQ(cells.size(), 3u) << line;
    EXPECT_TRUE(names.insert(std::string(cells[0])).second) << line;
    EXPECT_EQ(cells[1], cells[2]);
    ++rows;
  }
  EXPECT_EQ(names.size(), rows);
  EXPECT_TRUE(names.count("rmse_angle_deg"));
  EXPECT_TRUE(names.count("pooled_est_max_error_pct"));
  EXPECT_TRUE(fs::exists(rc.output_dir / "plot_data.csv"));
}

TEST(ReportCommand, EmptyInputIsDataError) {
  const auto dir = testing::temp_dir();
  RunConfig rc;
  rc.output_dir = dir;
  EXPECT_EQ(code_of([&] { cmd_report(rc); }), ErrorCode::kDataError);
  write_text(dir / "empty.csv", "# controller=pvic\n# body_mass_kg=70\n" +
                                    std::string("t,stride\n"));
  EXPECT_EQ(code_of([&] { cmd_report(rc, {dir / "empty.csv"}); }),
            ErrorCode::kDataError);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ErrorCode::kDataError), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::kSignalFault), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::kTooFewStrides), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::kCalibrationFailed), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::kConfigError), 4);
}

}  // namespace
}  // namespace harness
}  // namespace gaitphase
