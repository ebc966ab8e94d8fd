#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "gaitphase/error.hpp"

namespace gaitphase {
namespace impedance {

/// Piecewise-linear curve over gait percentage, periodic on [0, 100].
struct KnotTable {
  std::vector<double> s;  // percent, strictly increasing
  std::vector<double> v;

  static KnotTable constant(double value) { return {{0.0, 100.0}, {value, value}}; }

  std::size_t size() const { return s.size(); }

  double operator()(double pct) const {
    if (s.empty()) return 0.0;
    if (pct < 0.0 || pct > 100.0) pct -= 100.0 * std::floor(pct / 100.0);
    if (pct <= s.front()) return v.front();
    if (pct >= s.back()) return v.back();
    const auto it = std::upper_bound(s.begin(), s.end(), pct);
    const std::size_t hi = static_cast<std::size_t>(it - s.begin());
    const std::size_t lo = hi - 1;
    if (pct == s[lo]) return v[lo];
    const double frac = (pct - s[lo]) / (s[hi] - s[lo]);
    return v[lo] + frac * (v[hi] - v[lo]);
  }

  bool operator==(const KnotTable&) const = default;
};

/// Equilibrium angle (deg), stiffness (Nm/deg/kg) and damping (Nms/deg/kg)
/// scheduled on gait percentage. Angles and torques are dorsiflexion-positive,
/// so plantarflexion angles and moments are negative.
struct ImpedanceProfile {
  KnotTable theta_eq;
  KnotTable stiffness;
  KnotTable damping;
  double theta_max = 15.0;

  bool operator==(const ImpedanceProfile&) const = default;
};

struct ImpedanceParams {
  double theta_eq = 0.0;
  double stiffness = 0.0;
  double damping = 0.0;

  bool operator==(const ImpedanceParams&) const = default;
};

inline ImpedanceParams eval_profile(const ImpedanceProfile& p, double pct) {
  return {p.theta_eq(pct), p.stiffness(pct), p.damping(pct)};
}

/// tau = -K (theta - theta_eq) - B theta_dot, in Nm/kg.
inline double pvic_torque(double theta_ankle, double theta_dot_ankle,
                          double theta_eq, double stiffness, double damping) {
  return -stiffness * (theta_ankle - theta_eq) - damping * theta_dot_ankle;
}

inline double pvic_torque(double theta_ankle, double theta_dot_ankle,
                          const ImpedanceParams& p) {
  return pvic_torque(theta_ankle, theta_dot_ankle, p.theta_eq, p.stiffness,
                     p.damping);
}

inline constexpr double kPassiveStiffness = 0.09;  // Nm/deg/kg
inline constexpr double kPassiveDamping = 0.075;   // Nms/deg/kg
inline constexpr double kDefaultThetaMax = 15.0;   // deg

inline ImpedanceProfile passive_profile() {
  return {KnotTable::constant(0.0), KnotTable::constant(kPassiveStiffness),
          KnotTable::constant(kPassiveDamping), kDefaultThetaMax};
}

struct Violation {
  std::string curve;  // "theta_eq", "stiffness", "damping" or "profile"
  std::string rule;   // "ordering", "non-negative", "rom", "continuity"
  double s = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_profile(const ImpedanceProfile& p) {
  ValidationReport report;
  auto add = [&](const std::string& curve, const std::string& rule, double s,
                 std::string msg) {
    report.violations.push_back({curve, rule, s, std::move(msg)});
  };
  if (!(p.theta_max > 0.0)) {
    add("profile", "rom", 0.0, "theta_max must be positive");
  }
  const std::pair<const char*, const KnotTable*> curves[] = {
      {"theta_eq", &p.theta_eq},
      {"stiffness", &p.stiffness},
      {"damping", &p.damping}};
  for (const auto& [name, table] : curves) {
    const KnotTable& t = *table;
    if (t.s.size() != t.v.size() || t.s.size() < 2) {
      add(name, "ordering", 0.0, "needs >= 2 knots with matching arrays");
      continue;
    }
    if (t.s.front() != 0.0 || t.s.back() != 100.0) {
      add(name, "ordering", t.s.front(), "knots must start at 0 and end at 100");
    }
    for (std::size_t i = 0; i < t.s.size(); ++i) {
      if (!std::isfinite(t.s[i]) || !std::isfinite(t.v[i])) {
        add(name, "ordering", t.s[i], "non-finite knot");
        continue;
      }
      if (i > 0 && !(t.s[i] > t.s[i - 1])) {
        add(name, "ordering", t.s[i],
            "knot percentages not strictly increasing at index " +
                std::to_string(i));
      }
      if (table != &p.theta_eq && t.v[i] < 0.0) {
        add(name, "non-negative", t.s[i], "negative gain");
      }
      if (table == &p.theta_eq && std::fabs(t.v[i]) > p.theta_max) {
        add(name, "rom", t.s[i],
            "|theta_eq| = " + std::to_string(std::fabs(t.v[i])) +
                " exceeds theta_max = " + std::to_string(p.theta_max));
      }
    }
    if (t.v.front() != t.v.back()) {
      add(name, "continuity", 0.0,
          "value at 0% (" + std::to_string(t.v.front()) +
              ") differs from value at 100% (" + std::to_string(t.v.back()) +
              ")");
    }
  }
  return report;
}

/// Able-bodied reference kinematics and kinetics on a uniform gait grid.
struct ReferenceTrajectories {
  std::vector<double> s;
  std::vector<double> theta;  // deg
  std::vector<double> tau;    // Nm/kg
  std::vector<double> power;  // W/kg
  double stride_period_s = 1.8;

  std::size_t size() const { return s.size(); }
};

/// Central-difference d(theta)/dt of a periodic table whose first and last
/// rows are the same instant (0 % and 100 %). Returns deg/s.
inline std::vector<double> reference_velocity(const ReferenceTrajectories& r) {
  const std::size_t n = r.s.size();
  std::vector<double> out(n, 0.0);
  if (n < 3) return out;
  const double pct_per_s = 100.0 / r.stride_period_s;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (r.theta[i + 1] - r.theta[i - 1]) / (r.s[i + 1] - r.s[i - 1]) *
             pct_per_s;
  }
  const double ds = (r.s[1] - r.s[0]) + (r.s[n - 1] - r.s[n - 2]);
  out[0] = out[n - 1] = (r.theta[1] - r.theta[n - 2]) / ds * pct_per_s;
  return out;
}

/// Largest |power - tau * dtheta/dt| over the table, in W/kg.
inline double reference_power_residual(const ReferenceTrajectories& r) {
  const auto vel = reference_velocity(r);
  double worst = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double expected = r.tau[i] * vel[i] * std::numbers::pi / 180.0;
    worst = std::max(worst, std::fabs(expected - r.power[i]));
  }
  return worst;
}

struct TorqueTable {
  std::vector<double> s;
  std::vector<double> tau;
};

/// Torque the profile would command if the ankle followed the references.
inline TorqueTable expected_torque(const ImpedanceProfile& profile,
                                   const ReferenceTrajectories& refs) {
  const auto vel = reference_velocity(refs);
  TorqueTable out;
  out.s = refs.s;
  out.tau.reserve(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    out.tau.push_back(
        pvic_torque(refs.theta[i], vel[i], eval_profile(profile, refs.s[i])));
  }
  return out;
}

/// Inputs for authoring a PVIC profile from reference trajectories.
struct ProfileDesign {
  KnotTable stiffness;
  KnotTable damping;
  double theta_max = kDefaultThetaMax;
};

/// Builds the equilibrium curve on the reference grid. Stance (up to the
/// reference's peak plantarflexion) uses theta_ref + tau_ref / K clamped to
/// the range of motion; from peak plantarflexion on, theta_eq is the
/// reference scaled so the peak sits exactly at -theta_max.
inline ImpedanceProfile design_pvic_profile(const ReferenceTrajectories& refs,
                                            const ProfileDesign& design) {
  if (refs.size() < 3) {
    throw Error(ErrorCode::kInvalidParameter, "reference table too short");
  }
  const auto min_it = std::min_element(refs.theta.begin(), refs.theta.end());
  const std::size_t peak = static_cast<std::size_t>(min_it - refs.theta.begin());
  const double peak_pf = -*min_it;
  if (!(peak_pf > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                "reference has no plantarflexion");
  }
  const double scale = design.theta_max / peak_pf;
  ImpedanceProfile p;
  p.stiffness = design.stiffness;
  p.damping = design.damping;
  p.theta_max = design.theta_max;
  p.theta_eq.s = refs.s;
  p.theta_eq.v.resize(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    double eq;
    if (i < peak) {
      const double k = design.stiffness(refs.s[i]);
      if (!(k > 0.0)) {
        throw Error(ErrorCode::kInvalidParameter,
                    "stance stiffness must be positive");
      }
      eq = std::clamp(refs.theta[i] + refs.tau[i] / k, -design.theta_max,
                      design.theta_max);
    } else if (i == peak) {
      eq = -design.theta_max;
    } else {
      eq = scale * refs.theta[i];
    }
    p.theta_eq.v[i] = eq;
  }
  return p;
}

}  // namespace impedance
}  // namespace gaitphase
