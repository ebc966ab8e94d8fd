#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "gaitphase/control.hpp"
#include "gaitphase/defaults.hpp"
#include "gaitphase/error.hpp"
#include "gaitphase/impedance.hpp"
#include "gaitphase/signals.hpp"

namespace gaitphase {
namespace plant {

using signals::SensorFrame;

inline constexpr double kDegPerRad = 180.0 / std::numbers::pi;

/// Activation window over gait percentage with raised-cosine edges.
struct EmgBurst {
  double amplitude = 0.0;  // V
  double start_pct = 0.0;
  double end_pct = 0.0;
  double edge_pct = 5.0;

  double operator()(double pct) const {
    if (amplitude == 0.0 || end_pct <= start_pct) return 0.0;
    if (pct < start_pct || pct > end_pct) return 0.0;
    const double edge = std::min(edge_pct, 0.5 * (end_pct - start_pct));
    double w = 1.0;
    if (edge > 0.0) {
      if (pct < start_pct + edge) {
        w = 0.5 - 0.5 * std::cos(std::numbers::pi * (pct - start_pct) / edge);
      } else if (pct > end_pct - edge) {
        w = 0.5 - 0.5 * std::cos(std::numbers::pi * (end_pct - pct) / edge);
      }
    }
    return amplitude * w;
  }
};

struct GaitSynthParams {
  double rate_hz = signals::kDefaultRateHz;
  std::size_t stride_count = 10;
  double stride_period_s = 1.8;
  double stride_period_jitter = 0.0;  // relative std dev per stride
  double lead_in_fraction = 0.3;      // partial stride before the first strike

  double tibia_amplitude_deg = 18.0;
  double tibia_offset_deg = 3.0;
  double tibia_phase_deg = 150.0;  // portrait angle at heel strike is ~300
  double tibia_harmonic_ratio = 0.12;
  double tibia_harmonic_phase_deg = 30.0;
  double amplitude_jitter = 0.0;  // relative std dev per stride

  double stance_fraction = 0.68;
  double heel_off_fraction = 0.40;
  double toe_on_fraction = 0.10;
  double pressure_ramp_s = 0.02;

  double emg_gas_baseline = 0.0;  // V
  double emg_ta_baseline = 0.0;
  EmgBurst gas_burst;
  EmgBurst ta_burst;
  bool emg_carrier = false;  // rectified Gaussian carrier on the envelopes

  double noise_fraction = 0.0;  // per-channel Gaussian std as a share of range
  std::uint64_t seed = 1;
};

inline void validate(const GaitSynthParams& p) {
  const bool ok = p.rate_hz > 0.0 && p.stride_count > 0 &&
                  p.stride_period_s > 0.0 && p.stride_period_jitter >= 0.0 &&
                  p.stride_period_jitter < 0.5 && p.lead_in_fraction >= 0.0 &&
                  p.lead_in_fraction < 1.0 && p.stance_fraction > 0.0 &&
                  p.stance_fraction < 1.0 && p.heel_off_fraction > 0.0 &&
                  p.heel_off_fraction <= p.stance_fraction &&
                  p.toe_on_fraction >= 0.0 &&
                  p.toe_on_fraction < p.stance_fraction &&
                  p.pressure_ramp_s >= 0.0 && p.tibia_amplitude_deg > 0.0 &&
                  p.amplitude_jitter >= 0.0 && p.noise_fraction >= 0.0 &&
                  p.emg_gas_baseline >= 0.0 && p.emg_ta_baseline >= 0.0;
  if (!ok) {
    throw Error(ErrorCode::kInvalidParameter, "invalid gait synthesis params");
  }
}

/// Smooth periodic ankle trajectory: the reference angle softly saturated
/// inside the range of motion, truncated to its first harmonics.
class AnkleKinematics {
 public:
  explicit AnkleKinematics(
      const impedance::ReferenceTrajectories& refs =
          defaults::reference_trajectories(),
      std::size_t harmonics = 25, double knee_deg = -5.0,
      double span_deg = 3.0) {
    // Rows 0..n-2 are one period; the last row repeats the first.
    const std::size_t n = refs.size() - 1;
    std::vector<double> feasible(n);
    for (std::size_t i = 0; i < n; ++i) {
      feasible[i] = saturate(refs.theta[i], knee_deg, span_deg);
    }
    harmonics = std::min(harmonics, n / 2);
    coeffs_.resize(harmonics + 1);
    for (std::size_t k = 0; k <= harmonics; ++k) {
      std::complex<double> c = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double a = -2.0 * std::numbers::pi * static_cast<double>(k * i) /
                         static_cast<double>(n);
        c += feasible[i] * std::complex<double>(std::cos(a), std::sin(a));
      }
      coeffs_[k] = c * ((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
    }
  }

  static double saturate(double theta, double knee, double span) {
    if (theta >= knee) return theta;
    return knee - span * std::tanh((knee - theta) / span);
  }

  /// Angle (deg) at stride fraction `phase` in [0, 1).
  double angle(double phase) const {
    double out = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) * phase;
      out += (coeffs_[k] * std::complex<double>(std::cos(a), std::sin(a))).real();
    }
    return out;
  }

  /// d(angle)/d(phase), deg per stride.
  double slope(double phase) const {
    double out = 0.0;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k);
      const double a = w * phase;
      out += (coeffs_[k] * std::complex<double>(0.0, w) *
              std::complex<double>(std::cos(a), std::sin(a)))
                 .real();
    }
    return out;
  }

 private:
  std::vector<std::complex<double>> coeffs_;
};

/// A synthetic stream plus the generator's own truth per frame.
struct SynthGait {
  std::vector<SensorFrame> frames;
  std::vector<double> pct;    // generator gait percentage (lead-in included)
  std::vector<bool> stance;   // clean heel or toe contact
  std::vector<double> heel_strike_t;
};

namespace detail {

inline double pulse(double tau_s, double on_s, double off_s, double ramp_s) {
  if (tau_s < on_s || tau_s >= off_s) return 0.0;
  if (ramp_s <= 0.0) return 1.0;
  const double up = (tau_s - on_s) / ramp_s;
  const double down = (off_s - tau_s) / ramp_s;
  return std::clamp(std::min(up, down), 0.0, 1.0);
}

}  // namespace detail

inline SynthGait synth_gait(const GaitSynthParams& p,
                            const AnkleKinematics& ankle = AnkleKinematics()) {
  validate(p);
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Stride schedule: heel strike times and per-stride amplitude scale.
  std::vector<double> periods, scales;
  for (std::size_t i = 0; i < p.stride_count; ++i) {
    periods.push_back(p.stride_period_s *
                      (1.0 + p.stride_period_jitter * normal(rng)));
    scales.push_back(1.0 + p.amplitude_jitter * normal(rng));
  }
  const double lead_in = p.lead_in_fraction * p.stride_period_s;
  std::vector<double> hs{lead_in};
  for (double T : periods) hs.push_back(hs.back() + T);
  const double t_end = hs.back();

  SynthGait out;
  out.heel_strike_t.assign(hs.begin(), hs.end() - 1);
  const double dt = 1.0 / p.rate_hz;
  const std::size_t n = static_cast<std::size_t>(std::floor(t_end * p.rate_hz));
  const double psi = p.tibia_phase_deg / kDegPerRad;
  const double psi2 = p.tibia_harmonic_phase_deg / kDegPerRad;
  const double two_pi = 2.0 * std::numbers::pi;
  std::size_t stride = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    while (stride < p.stride_count && t >= hs[stride + 1]) ++stride;
    double T, tau, scale;
    if (t < hs[0]) {
      T = p.stride_period_s;
      tau = 1.0 - (hs[0] - t) / T;
      scale = 1.0;
    } else {
      T = periods[stride];
      tau = (t - hs[stride]) / T;
      scale = scales[stride];
    }
    const double a = p.tibia_amplitude_deg * scale;
    const double arg = two_pi * tau + psi;
    const double arg2 = 2.0 * two_pi * tau + psi2;
    SensorFrame f;
    f.t = t;
    f.theta_tib = p.tibia_offset_deg +
                  a * (std::sin(arg) + p.tibia_harmonic_ratio * std::sin(arg2));
    f.theta_dot_tib = a * (two_pi / T) *
                      (std::cos(arg) +
                       2.0 * p.tibia_harmonic_ratio * std::cos(arg2));
    const double tau_s = tau * T;
    // Lead-in frames belong to the tail of the previous stride; no contact.
    const bool in_stride = t >= hs[0];
    f.p_heel = in_stride ? detail::pulse(tau_s, -1.0, p.heel_off_fraction * T,
                                         p.pressure_ramp_s)
                         : 0.0;
    f.p_toe = in_stride ? detail::pulse(tau_s, p.toe_on_fraction * T,
                                        p.stance_fraction * T,
                                        p.pressure_ramp_s)
                        : 0.0;
    const double pct = 100.0 * tau;
    f.emg_gas = p.emg_gas_baseline + p.gas_burst(pct);
    f.emg_ta = p.emg_ta_baseline + p.ta_burst(pct);
    f.theta_ankle = ankle.angle(tau);
    f.theta_dot_ankle = ankle.slope(tau) / T;
    out.frames.push_back(f);
    out.pct.push_back(pct);
    out.stance.push_back(f.p_heel >= 0.5 || f.p_toe >= 0.5);
  }

  if (p.emg_carrier) {
    const double mean_abs_gauss = std::sqrt(2.0 / std::numbers::pi);
    for (auto& f : out.frames) {
      f.emg_gas *= std::fabs(normal(rng)) / mean_abs_gauss;
      f.emg_ta *= std::fabs(normal(rng)) / mean_abs_gauss;
    }
  }

  if (p.noise_fraction > 0.0) {
    struct Range {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      void add(double v) { lo = std::min(lo, v); hi = std::max(hi, v); }
      double width() const { return hi > lo ? hi - lo : 0.0; }
    };
    double SensorFrame::*channels[] = {
        &SensorFrame::theta_tib,   &SensorFrame::theta_dot_tib,
        &SensorFrame::p_heel,      &SensorFrame::p_toe,
        &SensorFrame::emg_gas,     &SensorFrame::emg_ta,
        &SensorFrame::theta_ankle, &SensorFrame::theta_dot_ankle};
    Range ranges[8];
    for (const auto& f : out.frames) {
      for (int c = 0; c < 8; ++c) ranges[c].add(f.*channels[c]);
    }
    for (auto& f : out.frames) {
      for (int c = 0; c < 8; ++c) {
        f.*channels[c] += p.noise_fraction * ranges[c].width() * normal(rng);
      }
      f.p_heel = std::clamp(f.p_heel, 0.0, 1.0);
      f.p_toe = std::clamp(f.p_toe, 0.0, 1.0);
      f.emg_gas = std::max(f.emg_gas, 0.0);
      f.emg_ta = std::max(f.emg_ta, 0.0);
    }
  }
  return out;
}

/// Raw EMG for `trials` maximal isometric contractions peaking near `mva`.
/// The strongest trial plateaus exactly at `mva`.
inline std::vector<std::vector<double>> synth_mvic_trials(
    double mva, std::size_t trials, std::uint64_t seed,
    double rate_hz = signals::kDefaultRateHz, double noise_fraction = 0.0) {
  if (!(mva > 0.0) || trials == 0) {
    throw Error(ErrorCode::kInvalidParameter, "invalid MVIC synthesis params");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(0.85, 0.98);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, trials - 1);
  const std::size_t best = pick(rng);
  std::vector<std::vector<double>> out;
  const std::size_t n = static_cast<std::size_t>(3.0 * rate_hz);
  for (std::size_t k = 0; k < trials; ++k) {
    const double peak = k == best ? mva : level(rng) * mva;
    std::vector<double> trial(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / rate_hz;
      const double env = detail::pulse(t, 0.5, 2.5, 0.2);
      double v = peak * env;
      if (noise_fraction > 0.0) v += noise_fraction * mva * normal(rng);
      trial[i] = std::max(v, 0.0);
    }
    out.push_back(std::move(trial));
  }
  return out;
}

/// Point inertia with joint damping, a ground spring-damper while in stance
/// and hard-stop springs at the range-of-motion limits.
struct PlantParams {
  double inertia = 0.03;            // kg m^2 per kg body mass
  double joint_damping = 0.002;     // Nms/deg/kg
  double ground_stiffness = 0.3;    // Nm/deg/kg
  double ground_damping = 0.005;    // Nms/deg/kg
  double stop_angle_deg = 15.0;
  double stop_stiffness = 8.0;      // Nm/deg/kg
  double stop_damping = 0.02;       // Nms/deg/kg
};

struct AnkleState {
  double theta = 0.0;          // deg
  double theta_dot = 0.0;      // deg/s
  double ground_target = 0.0;  // deg, angle the ground drives toward in stance
};

/// Torque from everything except the controller, in Nm/kg.
inline double passive_torque(const AnkleState& s, bool stance,
                             const PlantParams& p) {
  double tau = -p.joint_damping * s.theta_dot;
  if (stance) {
    tau += -p.ground_stiffness * (s.theta - s.ground_target) -
           p.ground_damping * s.theta_dot;
  }
  const double over = std::fabs(s.theta) - p.stop_angle_deg;
  if (over > 0.0) {
    const double sign = s.theta > 0.0 ? 1.0 : -1.0;
    tau += -sign * p.stop_stiffness * over - p.stop_damping * s.theta_dot;
  }
  return tau;
}

/// Mechanical energy in J/kg: kinetic plus stored hard-stop spring energy.
inline double plant_energy(const AnkleState& s, const PlantParams& p) {
  const double omega = s.theta_dot / kDegPerRad;
  double e = 0.5 * p.inertia * omega * omega;
  const double over = std::fabs(s.theta) - p.stop_angle_deg;
  if (over > 0.0) {
    // Stiffness per degree times degrees squared, converted to Nm*rad.
    e += 0.5 * p.stop_stiffness * over * over / kDegPerRad;
  }
  return e;
}

/// Semi-implicit Euler step.
inline AnkleState plant_step(const AnkleState& state, double tau, bool stance,
                             double dt, const PlantParams& params = {}) {
  if (!std::isfinite(tau)) {
    throw Error(ErrorCode::kSignalFault, "non-finite plant torque");
  }
  if (!(dt > 0.0 && dt <= 0.1)) {
    throw Error(ErrorCode::kInvalidParameter, "plant dt must be in (0, 0.1]");
  }
  const double total = tau + passive_torque(state, stance, params);
  const double accel = total / params.inertia * kDegPerRad;  // deg/s^2
  AnkleState next = state;
  next.theta_dot = state.theta_dot + dt * accel;
  next.theta = state.theta + dt * next.theta_dot;
  return next;
}

struct ClosedLoopResult {
  std::vector<SensorFrame> frames;  // what the controller saw
  std::vector<control::TorqueCommand> commands;
};

/// Closed loop of a controller and the toy plant over a synthetic gait. The
/// plant state replaces the stream's ankle channels; the ground drives toward
/// the stream's own ankle trajectory during stance.
inline ClosedLoopResult simulate_closed_loop(control::Controller& controller,
                                             const SynthGait& gait,
                                             const PlantParams& params = {}) {
  ClosedLoopResult out;
  if (gait.frames.empty()) return out;
  const double dt = 1.0 / controller.config().rate_hz;
  AnkleState state;
  state.theta = gait.frames.front().theta_ankle;
  out.frames.reserve(gait.frames.size());
  out.commands.reserve(gait.frames.size());
  for (std::size_t i = 0; i < gait.frames.size(); ++i) {
    SensorFrame f = gait.frames[i];
    state.ground_target = f.theta_ankle;
    f.theta_ankle = state.theta;
    f.theta_dot_ankle = state.theta_dot;
    const auto cmd = controller.step(f);
    out.frames.push_back(f);
    out.commands.push_back(cmd);
    state = plant_step(state, cmd.tau_total, gait.stance[i], dt, params);
  }
  return out;
}

}  // namespace plant
}  // namespace gaitphase
