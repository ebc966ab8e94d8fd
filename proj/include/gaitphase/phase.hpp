#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "gaitphase/error.hpp"
#include "gaitphase/signals.hpp"

namespace gaitphase {
namespace phase {

using signals::SensorFrame;
using signals::Stride;

/// Shift and scale applied to the tibia portrait before taking its angle.
/// `k` has units of seconds so k * theta_dot is commensurate with theta.
struct PhaseCalibration {
  double x0 = 0.0;  // deg
  double y0 = 0.0;  // deg/s
  double k = 1.0;   // s

  bool operator==(const PhaseCalibration&) const = default;
};

struct ScaledPortrait {
  double angle = 0.0;     // deg
  double velocity = 0.0;  // deg, after scaling by k
};

inline ScaledPortrait scale_shift(double theta, double theta_dot,
                                  const PhaseCalibration& cal) {
  return {theta - cal.x0, cal.k * (theta_dot - cal.y0)};
}

/// Portrait angle in [0, 360) degrees, measured counter-clockwise from the
/// positive angle axis. Walking traverses the portrait clockwise, so the
/// value decreases over a stride.
inline double phase_variable(double angle, double velocity) {
  if (angle == 0.0 && velocity == 0.0) {
    throw Error(ErrorCode::kUndefinedPhase, "portrait origin has no angle");
  }
  double phi = std::atan2(velocity, angle) * (180.0 / std::numbers::pi);
  if (phi < 0.0) phi += 360.0;
  if (phi >= 360.0) phi -= 360.0;
  return phi;
}

inline double phase_variable(const ScaledPortrait& p) {
  return phase_variable(p.angle, p.velocity);
}

/// Wraps an angle difference into (-180, 180].
inline double wrap_delta(double d) {
  d = std::fmod(d, 360.0);
  if (d > 180.0) d -= 360.0;
  if (d <= -180.0) d += 360.0;
  return d;
}

enum class CriticalPointRule {
  /// Stance sample with the largest |theta_dot|. Stance tibia velocity is
  /// negative in walking, so this is its most negative value.
  kPeakSpeed,
  /// Stance sample with the largest signed theta_dot.
  kSignedMax,
};

struct CpcOptions {
  double heel_threshold = signals::kDefaultHeelThreshold;
  CriticalPointRule rule = CriticalPointRule::kPeakSpeed;
  std::size_t min_strides = 3;
};

/// Critical Point Centering. Per stride: the critical point is the tibia
/// angle at the stance velocity peak; extrema of angle and velocity are
/// taken per stride and then averaged across strides.
inline PhaseCalibration calibrate_cpc(std::span<const Stride> strides,
                                      const CpcOptions& opts = {}) {
  if (strides.size() < opts.min_strides) {
    throw Error(ErrorCode::kTooFewStrides,
                "need at least " + std::to_string(opts.min_strides) +
                    " complete strides, got " +
                    std::to_string(strides.size()));
  }
  double sum_critical = 0.0;
  double sum_theta_max = 0.0, sum_theta_min = 0.0;
  double sum_vel_max = 0.0, sum_vel_min = 0.0;
  for (const auto& stride : strides) {
    if (stride.frames.empty()) {
      throw Error(ErrorCode::kDegenerateCalibration, "empty stride");
    }
    const SensorFrame* critical = nullptr;
    double best = 0.0;
    double theta_max = stride.frames.front().theta_tib;
    double theta_min = theta_max;
    double vel_max = stride.frames.front().theta_dot_tib;
    double vel_min = vel_max;
    for (const auto& f : stride.frames) {
      theta_max = std::max(theta_max, f.theta_tib);
      theta_min = std::min(theta_min, f.theta_tib);
      vel_max = std::max(vel_max, f.theta_dot_tib);
      vel_min = std::min(vel_min, f.theta_dot_tib);
      if (f.p_heel < opts.heel_threshold) continue;
      const double score = opts.rule == CriticalPointRule::kPeakSpeed
                               ? std::fabs(f.theta_dot_tib)
                               : f.theta_dot_tib;
      if (critical == nullptr || score > best) {
        critical = &f;
        best = score;
      }
    }
    if (critical == nullptr) {
      throw Error(ErrorCode::kDegenerateCalibration,
                  "stride without stance samples");
    }
    sum_critical += critical->theta_tib;
    sum_theta_max += theta_max;
    sum_theta_min += theta_min;
    sum_vel_max += vel_max;
    sum_vel_min += vel_min;
  }
  const double n = static_cast<double>(strides.size());
  const double theta_max = sum_theta_max / n;
  const double theta_min = sum_theta_min / n;
  const double vel_max = sum_vel_max / n;
  const double vel_min = sum_vel_min / n;
  const double vel_range = std::fabs(vel_max - vel_min);
  if (!(vel_range > 0.0)) {
    throw Error(ErrorCode::kDegenerateCalibration,
                "tibia velocity has zero range");
  }
  PhaseCalibration cal;
  cal.x0 = sum_critical / n;
  cal.y0 = 0.5 * (vel_max + vel_min);
  cal.k = std::fabs(theta_max - theta_min) / vel_range;
  if (!(cal.k > 0.0)) {
    throw Error(ErrorCode::kDegenerateCalibration,
                "tibia angle has zero range");
  }
  return cal;
}

inline constexpr std::size_t kMapKnots = 101;

/// Monotone map between unwrapped phase variable and gait percentage. Knot
/// phases strictly decrease while percentages rise from 0 to 100; the first
/// and last knots are exactly one revolution apart.
class PhaseMap {
 public:
  PhaseMap() = default;

  PhaseMap(std::vector<double> phi, std::vector<double> pct)
      : phi_(std::move(phi)), pct_(std::move(pct)) {
    validate();
  }

  const std::vector<double>& phi() const { return phi_; }
  const std::vector<double>& pct() const { return pct_; }
  bool empty() const { return phi_.empty(); }
  double phi_start() const { return phi_.front(); }
  double phi_end() const { return phi_.back(); }

  /// Representative of `phi` (mod 360) in (phi_end, phi_start].
  double unwrap(double phi) const {
    double d = std::fmod(phi_start() - phi, 360.0);
    if (d < 0.0) d += 360.0;
    return phi_start() - d;
  }

  /// Linear interpolation on an unwrapped phase, clamped to the end knots.
  double percent_at(double phi_unwrapped) const {
    if (phi_unwrapped >= phi_.front()) return pct_.front();
    if (phi_unwrapped <= phi_.back()) return pct_.back();
    // First knot strictly below the query.
    const auto it = std::upper_bound(phi_.begin(), phi_.end(), phi_unwrapped,
                                     [](double q, double k) { return q > k; });
    const std::size_t hi = static_cast<std::size_t>(it - phi_.begin());
    const std::size_t lo = hi - 1;
    if (phi_unwrapped == phi_[lo]) return pct_[lo];
    const double frac = (phi_[lo] - phi_unwrapped) / (phi_[lo] - phi_[hi]);
    return pct_[lo] + frac * (pct_[hi] - pct_[lo]);
  }

  /// Inverse lookup: unwrapped phase at a gait percentage.
  double phi_at(double pct) const {
    if (pct <= pct_.front()) return phi_.front();
    if (pct >= pct_.back()) return phi_.back();
    const auto it = std::upper_bound(pct_.begin(), pct_.end(), pct);
    const std::size_t hi = static_cast<std::size_t>(it - pct_.begin());
    const std::size_t lo = hi - 1;
    const double frac = (pct - pct_[lo]) / (pct_[hi] - pct_[lo]);
    return phi_[lo] + frac * (phi_[hi] - phi_[lo]);
  }

  bool operator==(const PhaseMap&) const = default;

 private:
  void validate() const {
    if (phi_.size() != pct_.size() || phi_.size() < 2) {
      throw Error(ErrorCode::kInvalidCalibration,
                  "phase map needs matching knot arrays of length >= 2");
    }
    for (std::size_t i = 1; i < phi_.size(); ++i) {
      if (!(phi_[i] < phi_[i - 1]) || !(pct_[i] > pct_[i - 1])) {
        throw Error(ErrorCode::kInvalidCalibration,
                    "phase map knots are not strictly monotone at index " +
                        std::to_string(i));
      }
    }
    if (pct_.front() != 0.0 || pct_.back() != 100.0) {
      throw Error(ErrorCode::kInvalidCalibration,
                  "phase map must span 0 to 100 percent");
    }
  }

  std::vector<double> phi_;
  std::vector<double> pct_;
};

struct MapBuildOptions {
  double separation_deg = 1e-6;
  double max_violation_span_pct = 10.0;
};

namespace detail {

/// Least-squares non-increasing fit (pool adjacent violators). Returns the
/// fitted values and the total percent span covered by pooled blocks.
inline std::vector<double> isotonic_decreasing(std::span<const double> y,
                                               std::span<const double> x,
                                               double* pooled_span) {
  struct Block {
    double sum;
    std::size_t count;
    std::size_t first;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({y[i], 1, i});
    while (blocks.size() > 1) {
      const Block& b = blocks.back();
      const Block& a = blocks[blocks.size() - 2];
      if (a.sum / a.count >= b.sum / b.count) break;
      Block merged{a.sum + b.sum, a.count + b.count, a.first};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  std::vector<double> fit(y.size());
  double span = 0.0;
  for (const auto& b : blocks) {
    const double mean = b.sum / static_cast<double>(b.count);
    for (std::size_t i = 0; i < b.count; ++i) fit[b.first + i] = mean;
    if (b.count > 1) span += x[b.first + b.count - 1] - x[b.first];
  }
  if (pooled_span) *pooled_span = span;
  return fit;
}

/// Per-frame phase of a stride, unwrapped so it decreases continuously.
inline std::vector<double> unwrapped_phase(const Stride& stride,
                                           const PhaseCalibration& cal) {
  std::vector<double> out;
  out.reserve(stride.frames.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < stride.frames.size(); ++i) {
    const auto& f = stride.frames[i];
    const double phi =
        phase_variable(scale_shift(f.theta_tib, f.theta_dot_tib, cal));
    if (i == 0) {
      prev = phi;
    } else {
      prev += wrap_delta(phi - std::fmod(prev, 360.0));
    }
    out.push_back(prev);
  }
  return out;
}

}  // namespace detail

/// Averages the unwrapped phase of every stride on a 1 % grid and enforces a
/// strictly decreasing, invertible relationship.
inline PhaseMap build_phase_map(std::span<const Stride> strides,
                                const PhaseCalibration& cal,
                                const MapBuildOptions& opts = {}) {
  if (strides.empty()) {
    throw Error(ErrorCode::kTooFewStrides, "no strides to build a map from");
  }
  if (!(cal.k > 0.0)) {
    throw Error(ErrorCode::kInvalidCalibration, "calibration k must be > 0");
  }
  constexpr std::size_t kGrid = kMapKnots - 1;  // knots 0..99 from data
  std::vector<double> sum(kGrid, 0.0);
  double reference_start = 0.0;
  for (std::size_t si = 0; si < strides.size(); ++si) {
    const Stride& stride = strides[si];
    if (stride.frames.size() < 2 || stride.pct.size() != stride.frames.size()) {
      throw Error(ErrorCode::kDegenerateCalibration,
                  "stride needs >= 2 frames with ground truth");
    }
    std::vector<double> phi = detail::unwrapped_phase(stride, cal);
    // Keep every stride on the same revolution as the first.
    if (si == 0) {
      reference_start = phi.front();
    } else {
      const double shift =
          360.0 * std::round((reference_start - phi.front()) / 360.0);
      for (double& p : phi) p += shift;
    }
    std::vector<double> pct = stride.pct;
    // Close the stride at the next heel strike, one revolution on.
    pct.push_back(100.0);
    phi.push_back(phi.front() - 360.0);
    std::size_t j = 0;
    for (std::size_t g = 0; g < kGrid; ++g) {
      const double s = static_cast<double>(g);
      while (j + 2 < pct.size() && pct[j + 1] <= s) ++j;
      const double frac = (s - pct[j]) / (pct[j + 1] - pct[j]);
      sum[g] += phi[j] + frac * (phi[j + 1] - phi[j]);
    }
  }
  const double n = static_cast<double>(strides.size());
  std::vector<double> raw(kMapKnots);
  std::vector<double> grid(kMapKnots);
  for (std::size_t g = 0; g < kGrid; ++g) {
    raw[g] = sum[g] / n;
    grid[g] = static_cast<double>(g);
  }
  raw[kGrid] = raw[0] - 360.0;
  grid[kGrid] = 100.0;

  double pooled_span = 0.0;
  std::vector<double> fit = detail::isotonic_decreasing(raw, grid, &pooled_span);
  if (pooled_span > opts.max_violation_span_pct) {
    throw Error(ErrorCode::kCalibrationFailed,
                "phase map non-monotonic over " + std::to_string(pooled_span) +
                    "% of gait");
  }
  for (std::size_t i = 1; i < fit.size(); ++i) {
    if (fit[i] > fit[i - 1] - opts.separation_deg) {
      fit[i] = fit[i - 1] - opts.separation_deg;
    }
  }
  // Pin the end exactly one revolution after the start.
  fit.back() = fit.front() - 360.0;
  if (!(fit[fit.size() - 2] > fit.back())) {
    throw Error(ErrorCode::kCalibrationFailed,
                "phase map collapses at the heel-strike seam");
  }
  return PhaseMap(std::move(fit), std::move(grid));
}

struct GaitEstimate {
  double pct = 0.0;
  bool wrapped = false;  // crossed the heel-strike seam since the last sample
};

/// Stateless estimate of gait percentage from a raw phase sample; the
/// previous estimate only serves to flag a seam crossing.
inline GaitEstimate estimate_gait_pct(const PhaseMap& map, double phi,
                                      double prev_estimate) {
  const double pct = std::clamp(map.percent_at(map.unwrap(phi)), 0.0, 100.0);
  return {pct, prev_estimate - pct > 50.0};
}

/// Runtime estimator owned by one control loop.
class PhaseEstimator {
 public:
  PhaseEstimator() = default;
  PhaseEstimator(PhaseCalibration cal, PhaseMap map)
      : cal_(cal), map_(std::move(map)) {}

  struct Sample {
    double phi = 0.0;
    double pct = 0.0;
    bool wrapped = false;
  };

  Sample update(double theta_tib, double theta_dot_tib) {
    const auto portrait = scale_shift(theta_tib, theta_dot_tib, cal_);
    Sample out;
    if (portrait.angle == 0.0 && portrait.velocity == 0.0) {
      // No direction at the origin; hold the previous estimate.
      out.phi = last_phi_;
      out.pct = last_pct_;
      return out;
    }
    out.phi = phase_variable(portrait);
    const GaitEstimate est = estimate_gait_pct(map_, out.phi, last_pct_);
    out.pct = est.pct;
    out.wrapped = est.wrapped && initialized_;
    if (out.wrapped) ++wraps_;
    last_phi_ = out.phi;
    last_pct_ = out.pct;
    initialized_ = true;
    return out;
  }

  const PhaseCalibration& calibration() const { return cal_; }
  const PhaseMap& map() const { return map_; }
  std::size_t wrap_count() const { return wraps_; }

 private:
  PhaseCalibration cal_;
  PhaseMap map_;
  double last_phi_ = 0.0;
  double last_pct_ = 0.0;
  bool initialized_ = false;
  std::size_t wraps_ = 0;
};

/// Distance between two gait percentages on the 0/100 circle.
inline double circular_pct_error(double estimate, double truth) {
  double d = std::fmod(std::fabs(estimate - truth), 100.0);
  return std::min(d, 100.0 - d);
}

}  // namespace phase
}  // namespace gaitphase
