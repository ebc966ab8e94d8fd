#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gaitphase/control.hpp"
#include "gaitphase/harness/csv.hpp"
#include "gaitphase/signals.hpp"

namespace gaitphase {
namespace harness {

inline constexpr double kRadPerDeg = std::numbers::pi / 180.0;

/// One controller step as logged: ground truth, plant channels and command.
struct TelemetryRow {
  double t = 0.0;
  int stride = -1;  // -1 outside complete strides
  double s_true = std::numeric_limits<double>::quiet_NaN();
  double theta_ankle = 0.0;
  double theta_dot_ankle = 0.0;
  double tau_total = 0.0;
  double tau_total_nm = 0.0;
  double tau_pvic = 0.0;
  double tau_vc = 0.0;
  double power = 0.0;  // W/kg, tau_total * theta_dot in rad/s
  double s_est = std::numeric_limits<double>::quiet_NaN();
  double phi = std::numeric_limits<double>::quiet_NaN();
  double theta_eq = 0.0;
  double stiffness = 0.0;
  double damping = 0.0;
  double u = 0.0;
  double u_p = 0.0;
  double u_d = 0.0;
  bool clamped = false;
  int fault = 0;
};

struct Telemetry {
  std::string controller;
  double body_mass = 70.0;
  std::vector<TelemetryRow> rows;
};

/// Per-frame stride index and ground-truth percentage from heel strikes on
/// the conditioned stream.
struct GroundTruth {
  std::vector<int> stride;
  std::vector<double> pct;
};

inline GroundTruth ground_truth(std::span<const signals::SensorFrame> raw,
                                double rate_hz, double heel_threshold) {
  const auto conditioned = signals::condition_stream(raw, rate_hz);
  const auto strikes = signals::heel_strike_indices(conditioned, heel_threshold);
  GroundTruth gt;
  gt.stride.assign(raw.size(), -1);
  gt.pct.assign(raw.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k + 1 < strikes.size(); ++k) {
    const double t0 = conditioned[strikes[k]].t;
    const double t1 = conditioned[strikes[k + 1]].t;
    for (std::size_t i = strikes[k]; i < strikes[k + 1]; ++i) {
      gt.stride[i] = static_cast<int>(k);
      gt.pct[i] = signals::ground_truth_pct(conditioned[i].t, t0, t1);
    }
  }
  return gt;
}

inline TelemetryRow make_row(const signals::SensorFrame& frame,
                             const control::TorqueCommand& cmd, int stride,
                             double s_true, double body_mass) {
  TelemetryRow r;
  r.t = frame.t;
  r.stride = stride;
  r.s_true = s_true;
  r.theta_ankle = frame.theta_ankle;
  r.theta_dot_ankle = frame.theta_dot_ankle;
  r.tau_total = cmd.tau_total;
  r.tau_total_nm = cmd.tau_total * body_mass;
  r.tau_pvic = cmd.tau_pvic;
  r.tau_vc = cmd.tau_vc;
  r.power = cmd.tau_total * frame.theta_dot_ankle * kRadPerDeg;
  r.s_est = cmd.s_est;
  r.phi = cmd.phi;
  r.theta_eq = cmd.theta_eq;
  r.stiffness = cmd.stiffness;
  r.damping = cmd.damping;
  r.u = cmd.u;
  r.u_p = cmd.u_p;
  r.u_d = cmd.u_d;
  r.clamped = cmd.clamped;
  r.fault = static_cast<int>(cmd.fault);
  return r;
}

inline constexpr const char* kTelemetryColumns[] = {
    "t",        "stride",     "s_true", "theta_ankle", "theta_dot_ankle",
    "tau_total", "tau_total_nm", "tau_pvic", "tau_vc",  "power",
    "s_est",    "phi",        "theta_eq", "K",         "B",
    "u",        "u_p",        "u_d",    "clamped",     "fault"};

inline std::string telemetry_to_csv(const Telemetry& tel) {
  std::string out = "# controller=" + tel.controller + "\n" +
                    "# body_mass_kg=" + format_number(tel.body_mass) + "\n";
  for (std::size_t i = 0; i < std::size(kTelemetryColumns); ++i) {
    if (i) out += ',';
    out += kTelemetryColumns[i];
  }
  out += '\n';
  for (const auto& r : tel.rows) {
    const double v[] = {r.t,
                        static_cast<double>(r.stride),
                        r.s_true,
                        r.theta_ankle,
                        r.theta_dot_ankle,
                        r.tau_total,
                        r.tau_total_nm,
                        r.tau_pvic,
                        r.tau_vc,
                        r.power,
                        r.s_est,
                        r.phi,
                        r.theta_eq,
                        r.stiffness,
                        r.damping,
                        r.u,
                        r.u_p,
                        r.u_d,
                        r.clamped ? 1.0 : 0.0,
                        static_cast<double>(r.fault)};
    for (std::size_t i = 0; i < std::size(v); ++i) {
      if (i) out += ',';
      out += format_number(v[i]);
    }
    out += '\n';
  }
  return out;
}

inline Telemetry telemetry_from_table(const CsvTable& table,
                                      const std::string& source) {
  Telemetry tel;
  if (auto it = table.meta.find("controller"); it != table.meta.end()) {
    tel.controller = it->second;
  }
  if (auto it = table.meta.find("body_mass_kg"); it != table.meta.end()) {
    tel.body_mass = parse_number(it->second, source + " body_mass_kg");
  }
  std::size_t idx[std::size(kTelemetryColumns)];
  for (std::size_t i = 0; i < std::size(kTelemetryColumns); ++i) {
    idx[i] = table.column(kTelemetryColumns[i]);
  }
  for (const auto& v : table.rows) {
    TelemetryRow r;
    r.t = v[idx[0]];
    r.stride = static_cast<int>(v[idx[1]]);
    r.s_true = v[idx[2]];
    r.theta_ankle = v[idx[3]];
    r.theta_dot_ankle = v[idx[4]];
    r.tau_total = v[idx[5]];
    r.tau_total_nm = v[idx[6]];
    r.tau_pvic = v[idx[7]];
    r.tau_vc = v[idx[8]];
    r.power = v[idx[9]];
    r.s_est = v[idx[10]];
    r.phi = v[idx[11]];
    r.theta_eq = v[idx[12]];
    r.stiffness = v[idx[13]];
    r.damping = v[idx[14]];
    r.u = v[idx[15]];
    r.u_p = v[idx[16]];
    r.u_d = v[idx[17]];
    r.clamped = v[idx[18]] != 0.0;
    r.fault = static_cast<int>(v[idx[19]]);
    tel.rows.push_back(r);
  }
  return tel;
}

inline Telemetry read_telemetry(const std::filesystem::path& path) {
  return telemetry_from_table(read_csv(path), path.string());
}

}  // namespace harness
}  // namespace gaitphase
