#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gaitphase/control.hpp"
#include "gaitphase/defaults.hpp"
#include "gaitphase/harness/config.hpp"
#include "gaitphase/harness/csv.hpp"
#include "gaitphase/harness/profile_io.hpp"
#include "gaitphase/harness/report.hpp"
#include "gaitphase/harness/telemetry.hpp"
#include "gaitphase/phase.hpp"
#include "gaitphase/plant.hpp"
#include "gaitphase/signals.hpp"
#include "gaitphase/spsc_queue.hpp"
#include "gaitphase/volitional.hpp"

namespace gaitphase {
namespace harness {

/// Seeds for the independent random streams of one run.
struct SeedPlan {
  std::uint64_t input;
  std::uint64_t mvic_gas;
  std::uint64_t mvic_ta;
  std::uint64_t walk;
};

inline SeedPlan seed_plan(std::uint64_t seed) {
  return {seed, seed + 101, seed + 102, seed + 103};
}

inline std::vector<signals::SensorFrame> load_input(const RunConfig& cfg) {
  if (cfg.input_csv) return read_frames(*cfg.input_csv);
  if (cfg.input_synth) {
    plant::GaitSynthParams p = *cfg.input_synth;
    p.seed = seed_plan(cfg.seed).input;
    return plant::synth_gait(p).frames;
  }
  throw Error(ErrorCode::kConfigError, "config has no input source");
}

inline impedance::ReferenceTrajectories load_references(const RunConfig& cfg) {
  return cfg.references ? read_references(*cfg.references)
                        : defaults::reference_trajectories();
}

inline impedance::ImpedanceProfile load_impedance(const RunConfig& cfg) {
  return cfg.impedance_profile ? read_impedance(*cfg.impedance_profile)
                               : defaults::pvic_profile();
}

// ---------------------------------------------------------------------------
// Calibration

inline CalibrationProfile calibrate_phase(
    std::span<const signals::SensorFrame> raw, double rate_hz,
    double heel_threshold, phase::CriticalPointRule rule) {
  const auto conditioned = signals::condition_stream(raw, rate_hz);
  const auto strides = signals::segment_strides(conditioned, heel_threshold);
  phase::CpcOptions opts;
  opts.heel_threshold = heel_threshold;
  opts.rule = rule;
  CalibrationProfile p;
  p.phase = phase::calibrate_cpc(strides, opts);
  p.map = phase::build_phase_map(strides, p.phase);
  p.strides = strides.size();
  p.rate_hz = rate_hz;
  p.heel_threshold = heel_threshold;
  p.rule = rule;
  return p;
}

/// Rectify, smooth with the EMG window and take the peak of each trial.
inline double mva_from_trials(const std::vector<std::vector<double>>& trials,
                              double rate_hz) {
  std::vector<double> peaks;
  for (const auto& trial : trials) {
    auto filter = signals::make_filter(signals::kEmgWindowMs, rate_hz);
    std::vector<double> smoothed;
    smoothed.reserve(trial.size());
    for (double x : trial) smoothed.push_back(filter.step(std::fabs(x)));
    peaks.push_back(volitional::trial_peak(smoothed));
  }
  return volitional::calibrate_mva(peaks);
}

inline volitional::VolitionalCalibration calibrate_volitional(
    const VolitionalSource& src, std::span<const signals::SensorFrame> main,
    double rate_hz, std::uint64_t seed) {
  const SeedPlan seeds = seed_plan(seed);
  std::vector<std::vector<double>> gas_trials, ta_trials;
  std::vector<signals::SensorFrame> walk;
  if (src.synth) {
    const auto& s = *src.synth;
    gas_trials = plant::synth_mvic_trials(s.mva_gas, s.trials, seeds.mvic_gas,
                                          rate_hz, s.mvic_noise_fraction);
    ta_trials = plant::synth_mvic_trials(s.mva_ta, s.trials, seeds.mvic_ta,
                                         rate_hz, s.mvic_noise_fraction);
    plant::GaitSynthParams w = s.walk;
    w.rate_hz = rate_hz;
    w.seed = seeds.walk;
    walk = plant::synth_gait(w).frames;
  } else {
    for (const auto& p : src.mvic_gas) gas_trials.push_back(read_emg_trial(p));
    for (const auto& p : src.mvic_ta) ta_trials.push_back(read_emg_trial(p));
  }
  if (src.walk) {
    walk = read_frames(*src.walk);
  } else if (walk.empty()) {
    walk.assign(main.begin(), main.end());
  }

  volitional::VolitionalCalibration cal;
  cal.mva_gas = mva_from_trials(gas_trials, rate_hz);
  cal.mva_ta = mva_from_trials(ta_trials, rate_hz);
  cal.noise_floor = src.noise_floor;
  std::vector<volitional::IntentSample> samples;
  samples.reserve(walk.size());
  for (const auto& f : signals::condition_stream(walk, rate_hz)) {
    volitional::IntentSample s;
    s.u_p = volitional::normalize_emg(f.emg_gas, cal.mva_gas);
    s.u_d = volitional::normalize_emg(f.emg_ta, cal.mva_ta);
    samples.push_back(s);
  }
  const auto cc = volitional::calibrate_cocontraction(samples, src.bisector);
  cal.m_gas = cc.m_gas;
  cal.m_ta = cc.m_ta;
  cal.m0 = cc.m0;
  volitional::validate(cal);
  return cal;
}

inline CalibrationProfile calibrate_all(
    const RunConfig& cfg, std::span<const signals::SensorFrame> frames) {
  CalibrationProfile p = calibrate_phase(frames, cfg.rate_hz,
                                         cfg.heel_threshold,
                                         cfg.critical_point_rule);
  if (cfg.volitional) {
    p.volitional =
        calibrate_volitional(*cfg.volitional, frames, cfg.rate_hz, cfg.seed);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Controller runs

inline control::ControllerConfig controller_config(
    const RunConfig& cfg, const std::optional<CalibrationProfile>& cal) {
  control::ControllerConfig cc;
  cc.kind = cfg.controller;
  cc.profile = load_impedance(cfg);
  cc.body_mass = cfg.body_mass;
  cc.torque_limit = cfg.torque_limit;
  cc.rate_hz = cfg.rate_hz;
  if (cal) {
    cc.phase_cal = cal->phase;
    cc.phase_map = cal->map;
    cc.volitional = cal->volitional;
    if (cal->rate_hz != cfg.rate_hz) {
      throw Error(ErrorCode::kInvalidCalibration,
                  "calibration was made at " + format_number(cal->rate_hz) +
                      " Hz but the run is at " + format_number(cfg.rate_hz) +
                      " Hz");
    }
  }
  return cc;
}

inline std::vector<control::TorqueCommand> run_sequential(
    control::Controller& controller,
    std::span<const signals::SensorFrame> frames) {
  std::vector<control::TorqueCommand> out;
  out.reserve(frames.size());
  std::size_t next = 0;
  control::ReplayClock clock;
  control::run_loop(
      controller,
      [&]() -> std::optional<signals::SensorFrame> {
        if (next == frames.size()) return std::nullopt;
        return frames[next++];
      },
      [&](const signals::SensorFrame&, const control::TorqueCommand& c) {
        out.push_back(c);
      },
      clock);
  return out;
}

/// Ingest, control stepping and collection on separate threads joined by
/// bounded queues. Produces the same commands as run_sequential.
inline std::vector<control::TorqueCommand> run_pipelined(
    control::Controller& controller,
    std::span<const signals::SensorFrame> frames, std::size_t capacity) {
  SpscQueue<signals::SensorFrame> ingest(capacity);
  SpscQueue<control::TorqueCommand> commands(capacity);
  std::exception_ptr failure;

  std::thread reader([&] {
    for (const auto& f : frames) ingest.push(f);
    ingest.close();
  });
  std::thread stepper([&] {
    bool failed = false;
    while (auto f = ingest.pop()) {
      if (failed) continue;  // keep draining so the reader can finish
      try {
        commands.push(controller.step(*f));
      } catch (...) {
        failure = std::current_exception();
        failed = true;
      }
    }
    commands.close();
  });
  std::vector<control::TorqueCommand> out;
  out.reserve(frames.size());
  while (auto c = commands.pop()) out.push_back(*c);
  reader.join();
  stepper.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline Telemetry build_telemetry(const RunConfig& cfg,
                                 std::span<const signals::SensorFrame> frames,
                                 std::span<const control::TorqueCommand> cmds) {
  const GroundTruth gt = ground_truth(frames, cfg.rate_hz, cfg.heel_threshold);
  Telemetry tel;
  tel.controller = control::to_string(cfg.controller);
  tel.body_mass = cfg.body_mass;
  tel.rows.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    tel.rows.push_back(
        make_row(frames[i], cmds[i], gt.stride[i], gt.pct[i], cfg.body_mass));
  }
  return tel;
}

struct RunOutput {
  Telemetry telemetry;
  StrideReport report;
  std::optional<CalibrationProfile> calibration;
};

inline std::optional<CalibrationProfile> load_calibration(const RunConfig& cfg) {
  if (cfg.calibration) return read_calibration(*cfg.calibration);
  return std::nullopt;
}

inline RunOutput run_replay(const RunConfig& cfg,
                            std::span<const signals::SensorFrame> frames,
                            const std::optional<CalibrationProfile>& cal) {
  control::Controller controller(controller_config(cfg, cal));
  const auto cmds = cfg.pipeline
                        ? run_pipelined(controller, frames, cfg.queue_capacity)
                        : run_sequential(controller, frames);
  RunOutput out;
  out.telemetry = build_telemetry(cfg, frames, cmds);
  out.report = make_report(out.telemetry, load_references(cfg));
  out.calibration = cal;
  return out;
}

inline RunOutput run_simulate(const RunConfig& cfg) {
  if (!cfg.input_synth) {
    throw Error(ErrorCode::kConfigError, "simulate needs a synth input");
  }
  plant::GaitSynthParams p = *cfg.input_synth;
  p.seed = seed_plan(cfg.seed).input;
  const plant::SynthGait gait = plant::synth_gait(p);
  std::optional<CalibrationProfile> cal = load_calibration(cfg);
  // The tibia channels do not depend on the plant, so the open-loop stream
  // serves as the calibration walk.
  if (!cal) cal = calibrate_all(cfg, gait.frames);
  control::Controller controller(controller_config(cfg, cal));
  const auto loop = plant::simulate_closed_loop(controller, gait, cfg.plant);
  RunOutput out;
  out.telemetry = build_telemetry(cfg, loop.frames, loop.commands);
  out.report = make_report(out.telemetry, load_references(cfg));
  out.calibration = cal;
  return out;
}

// ---------------------------------------------------------------------------
// Commands. Each returns a printable summary and writes under output_dir.

inline std::string calibration_summary(const CalibrationProfile& p) {
  std::ostringstream ss;
  ss << "strides: " << p.strides << "\n"
     << "x0_deg: " << format_number(p.phase.x0) << "\n"
     << "y0_deg_per_s: " << format_number(p.phase.y0) << "\n"
     << "k_s: " << format_number(p.phase.k) << "\n"
     << "phi_heel_strike_deg: " << format_number(p.map.phi_start()) << "\n";
  if (p.volitional) {
    const auto& v = *p.volitional;
    ss << "mva_gas_v: " << format_number(v.mva_gas) << "\n"
       << "mva_ta_v: " << format_number(v.mva_ta) << "\n"
       << "m_gas: " << format_number(v.m_gas) << "\n"
       << "m_ta: " << format_number(v.m_ta) << "\n"
       << "m0: " << format_number(v.m0) << "\n";
  }
  return ss.str();
}

inline std::string cmd_calibrate(const RunConfig& cfg) {
  const auto frames = load_input(cfg);
  const CalibrationProfile p = calibrate_all(cfg, frames);
  write_calibration(cfg.output_dir / "calibration.json", p);
  return calibration_summary(p);
}

inline std::string run_summary(const StrideReport& rep) {
  std::ostringstream ss;
  ss << "controller: " << rep.controller << "\n"
     << "strides: " << rep.strides.size() << "\n";
  for (const auto& [name, value] : rep.aggregate) {
    ss << name << ": " << format_number(value) << "\n";
  }
  ss << "pooled_est_max_error_pct: " << format_number(rep.pooled.max_error)
     << "\n"
     << "pooled_est_max_at_gait_pct: " << format_number(rep.pooled.max_at_pct)
     << "\n"
     << "clamp_events: " << rep.clamp_events << "\n";
  return ss.str();
}

inline void write_run(const RunConfig& cfg, const RunOutput& out) {
  write_text(cfg.output_dir / "telemetry.csv", telemetry_to_csv(out.telemetry));
  write_text(cfg.output_dir / "report.json",
             dump(report_to_json(out.report, cfg.metrics)));
  write_text(cfg.output_dir / "bands.csv", bands_to_csv(out.report, cfg.metrics));
}

inline std::string cmd_replay(const RunConfig& cfg) {
  const auto frames = load_input(cfg);
  const auto cal = load_calibration(cfg);
  const RunOutput out = run_replay(cfg, frames, cal);
  write_run(cfg, out);
  return run_summary(out.report);
}

inline std::string cmd_simulate(const RunConfig& cfg) {
  const RunOutput out = run_simulate(cfg);
  write_run(cfg, out);
  if (out.calibration && !cfg.calibration) {
    write_calibration(cfg.output_dir / "calibration.json", *out.calibration);
  }
  return run_summary(out.report);
}

/// Stream synthesis only; writes the standard frame CSV.
inline std::string cmd_synth(const RunConfig& cfg) {
  if (!cfg.input_synth) {
    throw Error(ErrorCode::kConfigError, "synth needs a synth input");
  }
  const auto frames = load_input(cfg);
  write_text(cfg.output_dir / "stream.csv", frames_to_csv(frames));
  return "frames: " + std::to_string(frames.size()) + "\n";
}

inline std::string report_label(const fs::path& p) {
  const std::string stem = p.stem().string();
  if (stem == "telemetry" && p.has_parent_path() &&
      !p.parent_path().filename().empty()) {
    return p.parent_path().filename().string();
  }
  return stem;
}

struct ComparisonTable {
  std::vector<std::string> labels;
  std::vector<std::string> controllers;
  std::vector<std::string> metrics;
  std::vector<std::vector<double>> values;  // [metric][file]
};

inline ComparisonTable compare_reports(
    const std::vector<std::string>& labels,
    const std::vector<StrideReport>& reports,
    const std::set<std::string>& selection) {
  ComparisonTable t;
  t.labels = labels;
  for (const auto& r : reports) t.controllers.push_back(r.controller);
  auto add = [&](const std::string& name, auto&& get) {
    t.metrics.push_back(name);
    std::vector<double> row;
    for (const auto& r : reports) row.push_back(get(r));
    t.values.push_back(std::move(row));
  };
  add("stride_count",
      [](const StrideReport& r) { return static_cast<double>(r.strides.size()); });
  for (const auto& [name, group] : stride_fields()) {
    if (!detail::selected(selection, group)) continue;
    add(name, [&](const StrideReport& r) { return r.aggregate.at(name); });
  }
  if (detail::selected(selection, "estimation")) {
    add("pooled_est_mean_error_pct",
        [](const StrideReport& r) { return r.pooled.mean_error; });
    add("pooled_est_max_error_pct",
        [](const StrideReport& r) { return r.pooled.max_error; });
    add("pooled_est_max_at_gait_pct",
        [](const StrideReport& r) { return r.pooled.max_at_pct; });
  }
  add("clamp_events",
      [](const StrideReport& r) { return static_cast<double>(r.clamp_events); });
  return t;
}

inline std::string comparison_to_csv(const ComparisonTable& t) {
  std::string out = "metric";
  for (const auto& l : t.labels) out += ',' + l;
  out += "\ncontroller";
  for (const auto& c : t.controllers) out += ',' + c;
  out += '\n';
  for (std::size_t m = 0; m < t.metrics.size(); ++m) {
    out += t.metrics[m];
    for (double v : t.values[m]) out += ',' + format_number(v);
    out += '\n';
  }
  return out;
}

inline std::string cmd_report(const RunConfig& cfg,
                              std::vector<fs::path> paths = {}) {
  if (paths.empty()) paths = cfg.telemetry;
  if (paths.empty()) {
    throw Error(ErrorCode::kDataError, "report needs at least one telemetry file");
  }
  const auto refs = load_references(cfg);
  std::vector<std::string> labels;
  std::vector<StrideReport> reports;
  for (const auto& p : paths) {
    const Telemetry tel = read_telemetry(p);
    if (tel.rows.empty()) {
      throw Error(ErrorCode::kDataError, p.string() + ": no telemetry rows");
    }
    reports.push_back(make_report(tel, refs));
    std::string label = report_label(p);
    std::string unique = label;
    for (int n = 2; std::find(labels.begin(), labels.end(), unique) != labels.end();
         ++n) {
      unique = label + "_" + std::to_string(n);
    }
    labels.push_back(unique);
  }
  const ComparisonTable table = compare_reports(labels, reports, cfg.metrics);
  const std::string summary = comparison_to_csv(table);
  write_text(cfg.output_dir / "summary.csv", summary);
  std::string plot = "label,controller,channel,s,mean,sd,lo,hi\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::string body = bands_to_csv(reports[i], cfg.metrics, labels[i]);
    plot += body.substr(body.find('\n') + 1);
  }
  write_text(cfg.output_dir / "plot_data.csv", plot);
  return summary;
}

/// Writes the built-in impedance profile and reference trajectories.
inline std::string cmd_defaults(const fs::path& out_dir) {
  write_impedance(out_dir / "pvic_profile.json", defaults::pvic_profile());
  write_text(out_dir / "reference_trajectories.csv",
             references_to_csv(defaults::reference_trajectories()));
  return "wrote " + (out_dir / "pvic_profile.json").string() + " and " +
         (out_dir / "reference_trajectories.csv").string() + "\n";
}

}  // namespace harness
}  // namespace gaitphase
