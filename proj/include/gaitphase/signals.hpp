#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gaitphase/error.hpp"

namespace gaitphase {
namespace signals {

inline constexpr double kDefaultRateHz = 220.0;
inline constexpr double kEmgWindowMs = 300.0;
inline constexpr double kPressureWindowMs = 60.0;
inline constexpr double kTibiaVelocityWindowMs = 70.0;
inline constexpr double kDefaultHeelThreshold = 0.5;
inline constexpr double kDefaultRefractoryS = 0.300;

/// One sample of the sensing suite. Angles in degrees, rates in deg/s,
/// pressures normalized to [0, 1], EMG in volts.
struct SensorFrame {
  double t = 0.0;
  double theta_tib = 0.0;
  double theta_dot_tib = 0.0;
  double p_heel = 0.0;
  double p_toe = 0.0;
  double emg_gas = 0.0;
  double emg_ta = 0.0;
  double theta_ankle = 0.0;
  double theta_dot_ankle = 0.0;

  bool operator==(const SensorFrame&) const = default;
};

/// Name of the first non-finite channel, or nullptr when all are finite.
inline const char* first_nonfinite_channel(const SensorFrame& f) {
  if (!std::isfinite(f.t)) return "t";
  if (!std::isfinite(f.theta_tib)) return "theta_tib";
  if (!std::isfinite(f.theta_dot_tib)) return "theta_dot_tib";
  if (!std::isfinite(f.p_heel)) return "p_heel";
  if (!std::isfinite(f.p_toe)) return "p_toe";
  if (!std::isfinite(f.emg_gas)) return "emg_gas";
  if (!std::isfinite(f.emg_ta)) return "emg_ta";
  if (!std::isfinite(f.theta_ankle)) return "theta_ankle";
  if (!std::isfinite(f.theta_dot_ankle)) return "theta_dot_ankle";
  return nullptr;
}

/// Causal moving average over the last `window_len` samples. During startup
/// the output is the mean of the samples seen so far.
class MovingAverage {
 public:
  explicit MovingAverage(std::size_t window_len = 1)
      : buffer_(window_len == 0 ? 1 : window_len, 0.0) {}

  std::size_t window_len() const { return buffer_.size(); }
  std::size_t samples_seen() const { return seen_; }

  double step(double x) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kSignalFault, "non-finite filter input");
    }
    const std::size_t n = buffer_.size();
    if (count_ == n) {
      sum_ -= buffer_[head_];
    } else {
      ++count_;
    }
    buffer_[head_] = x;
    sum_ += x;
    head_ = (head_ + 1) % n;
    ++seen_;
    if (head_ == 0) {
      // Re-sum once per revolution so rounding drift stays bounded.
      sum_ = 0.0;
      for (std::size_t i = 0; i < count_; ++i) sum_ += buffer_[i];
    }
    return sum_ / static_cast<double>(count_);
  }

  void reset() {
    std::fill(buffer_.begin(), buffer_.end(), 0.0);
    head_ = count_ = seen_ = 0;
    sum_ = 0.0;
  }

 private:
  std::vector<double> buffer_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  std::size_t seen_ = 0;
  double sum_ = 0.0;
};

/// Window length in samples: round-half-to-even of window_ms * rate / 1000,
/// never less than one.
inline std::size_t window_samples(double window_ms, double rate_hz) {
  if (!(window_ms > 0.0) || !(rate_hz > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                "filter window and rate must be positive");
  }
  const double exact = window_ms * rate_hz / 1000.0;
  // nearbyint honours the default FE_TONEAREST mode (ties to even).
  const double rounded = std::nearbyint(exact);
  return rounded < 1.0 ? 1 : static_cast<std::size_t>(rounded);
}

inline MovingAverage make_filter(double window_ms, double rate_hz) {
  return MovingAverage(window_samples(window_ms, rate_hz));
}

inline double filter_step(MovingAverage& state, double x) {
  return state.step(x);
}

/// Rising-edge test on heel pressure.
inline bool detect_heel_strike(double prev_p, double curr_p,
                               double threshold) {
  return prev_p < threshold && curr_p >= threshold;
}

/// Rising-edge detector with a refractory lockout after each strike.
class HeelStrikeDetector {
 public:
  explicit HeelStrikeDetector(double threshold = kDefaultHeelThreshold,
                              double refractory_s = kDefaultRefractoryS)
      : threshold_(threshold), refractory_s_(refractory_s) {}

  bool update(double t, double p) {
    bool fired = false;
    if (has_prev_ && detect_heel_strike(prev_p_, p, threshold_)) {
      if (!has_strike_ || t - last_strike_ >= refractory_s_) {
        has_strike_ = true;
        last_strike_ = t;
        fired = true;
      }
    }
    prev_p_ = p;
    has_prev_ = true;
    return fired;
  }

  double threshold() const { return threshold_; }
  double refractory_s() const { return refractory_s_; }

 private:
  double threshold_;
  double refractory_s_;
  double last_strike_ = 0.0;
  bool has_strike_ = false;
  double prev_p_ = 0.0;
  bool has_prev_ = false;
};

/// 100 * (t - t_hs) / (t_hs_next - t_hs).
inline double ground_truth_pct(double t, double t_hs, double t_hs_next) {
  const double duration = t_hs_next - t_hs;
  if (!(duration > 0.0)) {
    throw Error(ErrorCode::kDegenerateStride,
                "stride duration must be positive");
  }
  return 100.0 * (t - t_hs) / duration;
}

/// Frames between two consecutive heel strikes. The closing strike belongs to
/// the next stride.
struct Stride {
  std::vector<SensorFrame> frames;
  std::vector<double> pct;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t first_index = 0;  // index of frames[0] in the source stream
};

/// Indices of heel-strike frames in a stream.
inline std::vector<std::size_t> heel_strike_indices(
    std::span<const SensorFrame> stream,
    double threshold = kDefaultHeelThreshold,
    double refractory_s = kDefaultRefractoryS) {
  HeelStrikeDetector detector(threshold, refractory_s);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (detector.update(stream[i].t, stream[i].p_heel)) out.push_back(i);
  }
  return out;
}

inline std::vector<Stride> segment_strides(
    std::span<const SensorFrame> stream,
    double threshold = kDefaultHeelThreshold,
    double refractory_s = kDefaultRefractoryS) {
  const auto strikes = heel_strike_indices(stream, threshold, refractory_s);
  std::vector<Stride> strides;
  if (strikes.size() < 2) return strides;
  strides.reserve(strikes.size() - 1);
  for (std::size_t k = 0; k + 1 < strikes.size(); ++k) {
    Stride stride;
    stride.first_index = strikes[k];
    stride.t_start = stream[strikes[k]].t;
    stride.t_end = stream[strikes[k + 1]].t;
    for (std::size_t i = strikes[k]; i < strikes[k + 1]; ++i) {
      stride.frames.push_back(stream[i]);
      stride.pct.push_back(
          ground_truth_pct(stream[i].t, stride.t_start, stride.t_end));
    }
    strides.push_back(std::move(stride));
  }
  return strides;
}

/// Per-channel conditioning used by both calibration and the control loop:
/// rectified EMG (300 ms), pressures (60 ms) and tibia velocity (70 ms) pass
/// through moving averages; the remaining channels pass through untouched.
class ChannelConditioner {
 public:
  explicit ChannelConditioner(double rate_hz = kDefaultRateHz)
      : emg_gas_(make_filter(kEmgWindowMs, rate_hz)),
        emg_ta_(make_filter(kEmgWindowMs, rate_hz)),
        p_heel_(make_filter(kPressureWindowMs, rate_hz)),
        p_toe_(make_filter(kPressureWindowMs, rate_hz)),
        theta_dot_tib_(make_filter(kTibiaVelocityWindowMs, rate_hz)) {}

  /// Throws kSignalFault on any non-finite channel, leaving state unchanged.
  SensorFrame step(const SensorFrame& raw) {
    if (const char* bad = first_nonfinite_channel(raw)) {
      throw Error(ErrorCode::kSignalFault,
                  std::string("non-finite sample on channel ") + bad);
    }
    SensorFrame out = raw;
    out.emg_gas = emg_gas_.step(std::fabs(raw.emg_gas));
    out.emg_ta = emg_ta_.step(std::fabs(raw.emg_ta));
    out.p_heel = p_heel_.step(raw.p_heel);
    out.p_toe = p_toe_.step(raw.p_toe);
    out.theta_dot_tib = theta_dot_tib_.step(raw.theta_dot_tib);
    return out;
  }

 private:
  MovingAverage emg_gas_;
  MovingAverage emg_ta_;
  MovingAverage p_heel_;
  MovingAverage p_toe_;
  MovingAverage theta_dot_tib_;
};

inline std::vector<SensorFrame> condition_stream(
    std::span<const SensorFrame> raw, double rate_hz = kDefaultRateHz) {
  ChannelConditioner conditioner(rate_hz);
  std::vector<SensorFrame> out;
  out.reserve(raw.size());
  for (const auto& f : raw) out.push_back(conditioner.step(f));
  return out;
}

}  // namespace signals
}  // namespace gaitphase
