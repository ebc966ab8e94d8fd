#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include "gaitphase/error.hpp"
#include "gaitphase/impedance.hpp"
#include "gaitphase/phase.hpp"
#include "gaitphase/signals.hpp"
#include "gaitphase/volitional.hpp"

namespace gaitphase {
namespace control {

using signals::SensorFrame;

enum class ControllerKind { kPassive, kPvic, kPviHvc };

inline const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kPassive: return "passive";
    case ControllerKind::kPvic: return "pvic";
    case ControllerKind::kPviHvc: return "pvihvc";
  }
  return "unknown";
}

inline ControllerKind parse_kind(const std::string& name) {
  if (name == "passive") return ControllerKind::kPassive;
  if (name == "pvic") return ControllerKind::kPvic;
  if (name == "pvihvc" || name == "pvi-hvc") return ControllerKind::kPviHvc;
  throw Error(ErrorCode::kConfigError, "unknown controller kind '" + name + "'");
}

inline constexpr double kDefaultTorqueLimit = 2.5;  // Nm/kg
inline constexpr double kFaultHoldS = 0.050;

struct ControllerConfig {
  ControllerKind kind = ControllerKind::kPvic;
  impedance::ImpedanceProfile profile = impedance::passive_profile();
  std::optional<phase::PhaseCalibration> phase_cal;
  std::optional<phase::PhaseMap> phase_map;
  std::optional<volitional::VolitionalCalibration> volitional;
  double body_mass = 70.0;  // kg
  double torque_limit = kDefaultTorqueLimit;
  double rate_hz = signals::kDefaultRateHz;
  double fault_hold_s = kFaultHoldS;
};

inline void validate(const ControllerConfig& cfg) {
  if (!(cfg.torque_limit > 0.0) || !(cfg.rate_hz > 0.0) ||
      !(cfg.body_mass > 0.0)) {
    throw Error(ErrorCode::kConfigError,
                "torque limit, rate and body mass must be positive");
  }
  if (cfg.kind != ControllerKind::kPassive &&
      (!cfg.phase_cal || !cfg.phase_map)) {
    throw Error(ErrorCode::kCalibrationMissing,
                std::string(to_string(cfg.kind)) +
                    " requires a phase calibration and map");
  }
  if (cfg.kind == ControllerKind::kPviHvc) {
    if (!cfg.volitional) {
      throw Error(ErrorCode::kCalibrationMissing,
                  "pvihvc requires a volitional calibration");
    }
    volitional::validate(*cfg.volitional);
  }
  if (cfg.kind != ControllerKind::kPassive) {
    const auto report = impedance::validate_profile(cfg.profile);
    if (!report.ok()) {
      throw Error(ErrorCode::kConfigError,
                  "impedance profile invalid: " +
                      report.violations.front().message);
    }
  }
}

enum class FaultState { kNone = 0, kHold = 1, kSafe = 2 };

struct TorqueCommand {
  double t = 0.0;
  double tau_total = 0.0;  // Nm/kg, after clamping
  double tau_pvic = 0.0;
  double tau_vc = 0.0;
  double s_est = std::numeric_limits<double>::quiet_NaN();
  double phi = std::numeric_limits<double>::quiet_NaN();
  double theta_eq = 0.0;
  double stiffness = 0.0;
  double damping = 0.0;
  double u = 0.0;
  double u_p = 0.0;
  double u_d = 0.0;
  bool clamped = false;
  FaultState fault = FaultState::kNone;
};

struct ClampResult {
  double value = 0.0;
  bool clamped = false;
};

inline ClampResult clamp_command(double tau, double limit) {
  const double v = std::fmin(limit, std::fmax(-limit, tau));
  return {v, v != tau};
}

/// One fixed-rate controller instance. Owns its filters and the phase
/// estimator; not shared between loops.
class Controller {
 public:
  explicit Controller(ControllerConfig cfg)
      : cfg_(std::move(cfg)), conditioner_(cfg_.rate_hz) {
    validate(cfg_);
    if (cfg_.kind == ControllerKind::kPassive) {
      cfg_.profile = impedance::passive_profile();
    }
    if (cfg_.phase_cal && cfg_.phase_map) {
      estimator_.emplace(*cfg_.phase_cal, *cfg_.phase_map);
    }
  }

  const ControllerConfig& config() const { return cfg_; }

  TorqueCommand step(const SensorFrame& raw) {
    SensorFrame f;
    try {
      f = conditioner_.step(raw);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSignalFault) throw;
      return on_fault(raw.t);
    }
    fault_samples_ = 0;

    TorqueCommand cmd;
    cmd.t = f.t;
    if (estimator_) {
      const auto est = estimator_->update(f.theta_tib, f.theta_dot_tib);
      cmd.phi = est.phi;
      cmd.s_est = est.pct;
    }
    // Passive control ignores the estimate; it is kept only for monitoring.
    const double s = cfg_.kind == ControllerKind::kPassive ? 0.0 : cmd.s_est;
    const auto params = impedance::eval_profile(cfg_.profile, s);
    cmd.theta_eq = params.theta_eq;
    cmd.stiffness = params.stiffness;
    cmd.damping = params.damping;
    cmd.tau_pvic = impedance::pvic_torque(f.theta_ankle, f.theta_dot_ankle,
                                          params);
    if (cfg_.kind == ControllerKind::kPviHvc) {
      const auto& vc = *cfg_.volitional;
      cmd.u_p = volitional::normalize_emg(f.emg_gas, vc.mva_gas);
      cmd.u_d = volitional::normalize_emg(f.emg_ta, vc.mva_ta);
      cmd.u = volitional::decode_intent(cmd.u_p, cmd.u_d, vc);
      cmd.tau_vc = volitional::volitional_torque(
          cmd.u, params.stiffness, params.theta_eq, cfg_.profile.theta_max);
    }
    const auto clamped =
        clamp_command(cmd.tau_pvic + cmd.tau_vc, cfg_.torque_limit);
    cmd.tau_total = clamped.value;
    cmd.clamped = clamped.clamped;
    last_ = cmd;
    return cmd;
  }

 private:
  // Hold the last good command for up to fault_hold_s, then command zero.
  TorqueCommand on_fault(double t) {
    ++fault_samples_;
    TorqueCommand cmd = last_;
    cmd.t = t;
    const double elapsed = static_cast<double>(fault_samples_) / cfg_.rate_hz;
    if (elapsed <= cfg_.fault_hold_s + 1e-12) {
      cmd.fault = FaultState::kHold;
    } else {
      cmd = TorqueCommand{};
      cmd.t = t;
      cmd.fault = FaultState::kSafe;
    }
    return cmd;
  }

  ControllerConfig cfg_;
  signals::ChannelConditioner conditioner_;
  std::optional<phase::PhaseEstimator> estimator_;
  TorqueCommand last_;
  std::size_t fault_samples_ = 0;
};

inline TorqueCommand controller_step(Controller& controller,
                                     const SensorFrame& frame) {
  return controller.step(frame);
}

/// Clock for offline replay: never waits.
struct ReplayClock {
  void wait_until(double /*t*/) {}
};

/// Wall clock anchored at construction; waits until stream time t.
class SteadyClock {
 public:
  SteadyClock() : start_(std::chrono::steady_clock::now()) {}
  void wait_until(double t) {
    std::this_thread::sleep_until(
        start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(t)));
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Drives a controller from `source` (returns std::optional<SensorFrame>)
/// into `sink(frame, command)`, pacing on `clock`. Returns steps taken.
template <class Source, class Sink, class Clock>
std::size_t run_loop(Controller& controller, Source&& source, Sink&& sink,
                     Clock& clock) {
  std::size_t steps = 0;
  double t0 = 0.0;
  while (std::optional<SensorFrame> frame = source()) {
    if (steps == 0) t0 = frame->t;
    if (std::isfinite(frame->t)) clock.wait_until(frame->t - t0);
    sink(*frame, controller.step(*frame));
    ++steps;
  }
  return steps;
}

}  // namespace control
}  // namespace gaitphase
