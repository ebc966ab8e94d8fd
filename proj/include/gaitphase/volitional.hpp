#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "gaitphase/error.hpp"

namespace gaitphase {
namespace volitional {

inline constexpr double kDefaultNoiseFloor = 0.05;
inline constexpr double kMaxLoggedActivation = 1.5;
inline constexpr double kCalibrationSplit = 0.5;

/// Normalization levels and co-contraction slopes for one user.
struct VolitionalCalibration {
  double mva_gas = 0.0;  // V
  double mva_ta = 0.0;   // V
  double m_gas = 0.0;
  double m_ta = 0.0;
  double m0 = 0.0;
  double noise_floor = kDefaultNoiseFloor;

  bool operator==(const VolitionalCalibration&) const = default;
};

inline void validate(const VolitionalCalibration& c) {
  if (!(c.mva_gas > 0.0) || !(c.mva_ta > 0.0)) {
    throw Error(ErrorCode::kCalibrationMissing, "MVA levels must be positive");
  }
  if (!(c.m_gas > c.m0 && c.m0 > c.m_ta && c.m_ta > 0.0)) {
    throw Error(ErrorCode::kInvalidCalibration,
                "co-contraction slopes must satisfy m_gas > m0 > m_ta > 0");
  }
  if (!(c.noise_floor >= 0.0)) {
    throw Error(ErrorCode::kInvalidCalibration, "noise floor must be >= 0");
  }
}

struct IntentSample {
  double u_p = 0.0;
  double u_d = 0.0;
  double u = 0.0;
};

/// emg / mva, clamped to [0, 1.5]. The intent magnitude is capped at 1
/// separately in decode_intent.
inline double normalize_emg(double emg, double mva) {
  if (!(mva > 0.0)) {
    throw Error(ErrorCode::kCalibrationMissing, "MVA must be positive");
  }
  return std::clamp(emg / mva, 0.0, kMaxLoggedActivation);
}

enum class BisectorRule {
  /// Slope of the ray halfway in angle between the two calibration rays.
  kAngular,
  /// atan((tan(m_gas) + tan(m_ta)) / 2), evaluated as printed with the
  /// slopes treated as radians. Kept only for comparison.
  kLiteral,
};

inline double bisector(double m_gas, double m_ta,
                       BisectorRule rule = BisectorRule::kAngular) {
  if (!(m_ta > 0.0) || m_gas < m_ta) {
    throw Error(ErrorCode::kInvalidCalibration,
                "bisector needs m_gas >= m_ta > 0");
  }
  if (m_gas == m_ta) return m_gas;
  if (rule == BisectorRule::kLiteral) {
    return std::atan((std::tan(m_gas) + std::tan(m_ta)) / 2.0);
  }
  return std::tan((std::atan(m_gas) + std::atan(m_ta)) / 2.0);
}

/// Single signed intent in [-1, 1] from normalized plantarflexor (u_p) and
/// dorsiflexor (u_d) activation.
inline double decode_intent(double u_p, double u_d,
                            const VolitionalCalibration& cal) {
  u_p = std::max(u_p, 0.0);
  u_d = std::max(u_d, 0.0);
  if (u_p < cal.noise_floor && u_d < cal.noise_floor) return 0.0;
  double m;
  if (u_d > 0.0) {
    m = u_p / u_d;
  } else {
    m = std::numeric_limits<double>::infinity();
  }
  m = std::clamp(m, cal.m_ta, cal.m_gas);
  const double magnitude = std::min(1.0, std::hypot(u_p, u_d));
  if (m >= cal.m0) {
    return magnitude * ((m - cal.m0) / (cal.m_gas - cal.m0));
  }
  return -magnitude * ((m - cal.m0) / (cal.m_ta - cal.m0));
}

/// Largest trial peak.
inline double calibrate_mva(std::span<const double> trial_peaks) {
  if (trial_peaks.empty()) {
    throw Error(ErrorCode::kCalibrationMissing, "no MVIC trials");
  }
  const double mva = *std::max_element(trial_peaks.begin(), trial_peaks.end());
  if (!(mva > 0.0)) {
    throw Error(ErrorCode::kCalibrationMissing, "MVIC peaks are all zero");
  }
  return mva;
}

/// Peak of an already rectified and filtered trial.
inline double trial_peak(std::span<const double> filtered) {
  if (filtered.empty()) {
    throw Error(ErrorCode::kCalibrationMissing, "empty MVIC trial");
  }
  return *std::max_element(filtered.begin(), filtered.end());
}

struct CoContraction {
  double m_gas = 0.0;
  double m_ta = 0.0;
  double m0 = 0.0;
};

/// Mean co-contraction slope in the plantarflexion-dominant
/// (u_p > 0.5, u_d < 0.5) and dorsiflexion-dominant (u_p < 0.5, u_d > 0.5)
/// regions of a walking stream. Samples with u_d = 0 have no finite slope and
/// are skipped.
inline CoContraction calibrate_cocontraction(
    std::span<const IntentSample> walk,
    BisectorRule rule = BisectorRule::kAngular) {
  double sum_gas = 0.0, sum_ta = 0.0;
  std::size_t n_gas = 0, n_ta = 0;
  for (const auto& s : walk) {
    if (!(s.u_d > 0.0)) continue;
    const double m = s.u_p / s.u_d;
    if (s.u_p > kCalibrationSplit && s.u_d < kCalibrationSplit) {
      sum_gas += m;
      ++n_gas;
    } else if (s.u_p < kCalibrationSplit && s.u_d > kCalibrationSplit) {
      sum_ta += m;
      ++n_ta;
    }
  }
  if (n_gas == 0 || n_ta == 0) {
    throw Error(ErrorCode::kInsufficientCalibrationData,
                "walk lacks plantarflexion- or dorsiflexion-dominant samples");
  }
  CoContraction out;
  out.m_gas = sum_gas / static_cast<double>(n_gas);
  out.m_ta = sum_ta / static_cast<double>(n_ta);
  out.m0 = bisector(out.m_gas, out.m_ta, rule);
  return out;
}

/// gamma = theta_max - |theta_eq|.
inline double volitional_range(double theta_eq, double theta_max) {
  const double gamma = theta_max - std::fabs(theta_eq);
  if (gamma < 0.0) {
    throw Error(ErrorCode::kRomViolation,
                "|theta_eq| exceeds theta_max");
  }
  return gamma;
}

/// tau_vc = -K gamma u, in Nm/kg. Exactly +0 when u == 0.
inline double volitional_torque(double u, double stiffness, double theta_eq,
                                double theta_max) {
  const double gamma = volitional_range(theta_eq, theta_max);
  if (u == 0.0) return 0.0;
  return -stiffness * gamma * u;
}

}  // namespace volitional
}  // namespace gaitphase
