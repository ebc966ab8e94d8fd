#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gaitphase/harness/csv.hpp"
#include "gaitphase/harness/profile_io.hpp"
#include "gaitphase/harness/telemetry.hpp"
#include "gaitphase/impedance.hpp"
#include "gaitphase/phase.hpp"

namespace gaitphase {
namespace harness {

inline constexpr std::size_t kReportGrid = 101;  // 0, 1, ..., 100 percent

inline const std::vector<std::string>& band_channels() {
  static const std::vector<std::string> names = {"angle", "torque", "power",
                                                 "u"};
  return names;
}

/// Mean and +/- 2 SD envelope of per-stride curves on the report grid.
struct Band {
  std::vector<double> mean, sd, lo, hi;
};

struct StrideMetrics {
  int stride = -1;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t samples = 0;
  double rmse_angle = 0.0;      // deg
  double rmse_torque = 0.0;     // Nm/kg
  double rmse_power = 0.0;      // W/kg
  double peak_pf_angle = 0.0;   // deg, plantarflexion magnitude
  double peak_pf_torque = 0.0;  // Nm/kg, plantarflexion magnitude
  double peak_power = 0.0;      // W/kg
  double peak_u = 0.0;
  double est_mean_error = std::numeric_limits<double>::quiet_NaN();  // % gait
  double est_max_error = std::numeric_limits<double>::quiet_NaN();
  double est_max_at_pct = std::numeric_limits<double>::quiet_NaN();  // s_true
};

struct EstimationSummary {
  std::size_t samples = 0;
  double mean_error = std::numeric_limits<double>::quiet_NaN();
  double max_error = std::numeric_limits<double>::quiet_NaN();
  double max_at_pct = std::numeric_limits<double>::quiet_NaN();
  int max_stride = -1;
};

struct StrideReport {
  std::string controller;
  std::vector<StrideMetrics> strides;
  std::map<std::string, double> aggregate;  // mean of per-stride values
  std::map<std::string, double> aggregate_sd;
  EstimationSummary pooled;
  std::map<std::string, Band> bands;
  std::map<std::string, double> band_coverage;  // share of samples in band
  std::size_t clamp_events = 0;
  std::size_t fault_hold = 0;
  std::size_t fault_safe = 0;
};

/// Names of the per-stride scalar metrics, in report order, and the metric
/// selection each belongs to.
inline const std::vector<std::pair<std::string, std::string>>& stride_fields() {
  static const std::vector<std::pair<std::string, std::string>> f = {
      {"rmse_angle_deg", "angle"},
      {"peak_pf_angle_deg", "angle"},
      {"rmse_torque_nm_per_kg", "torque"},
      {"peak_pf_torque_nm_per_kg", "torque"},
      {"rmse_power_w_per_kg", "power"},
      {"peak_power_w_per_kg", "power"},
      {"peak_u", "intent"},
      {"est_mean_error_pct", "estimation"},
      {"est_max_error_pct", "estimation"}};
  return f;
}

inline double stride_field(const StrideMetrics& m, const std::string& name) {
  if (name == "rmse_angle_deg") return m.rmse_angle;
  if (name == "peak_pf_angle_deg") return m.peak_pf_angle;
  if (name == "rmse_torque_nm_per_kg") return m.rmse_torque;
  if (name == "peak_pf_torque_nm_per_kg") return m.peak_pf_torque;
  if (name == "rmse_power_w_per_kg") return m.rmse_power;
  if (name == "peak_power_w_per_kg") return m.peak_power;
  if (name == "peak_u") return m.peak_u;
  if (name == "est_mean_error_pct") return m.est_mean_error;
  if (name == "est_max_error_pct") return m.est_max_error;
  return std::numeric_limits<double>::quiet_NaN();
}

namespace detail {

/// Linear resampling of (x, y) onto 0..100, holding the end values.
inline std::vector<double> resample(const std::vector<double>& x,
                                    const std::vector<double>& y) {
  std::vector<double> out(kReportGrid);
  std::size_t j = 0;
  for (std::size_t g = 0; g < kReportGrid; ++g) {
    const double s = static_cast<double>(g);
    if (s <= x.front()) {
      out[g] = y.front();
      continue;
    }
    if (s >= x.back()) {
      out[g] = y.back();
      continue;
    }
    while (j + 1 < x.size() && x[j + 1] < s) ++j;
    const double frac = (s - x[j]) / (x[j + 1] - x[j]);
    out[g] = y[j] + frac * (y[j + 1] - y[j]);
  }
  return out;
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace detail

/// Builds the stride report. Every complete stride is included.
inline StrideReport make_report(const Telemetry& tel,
                                const impedance::ReferenceTrajectories& refs) {
  StrideReport rep;
  rep.controller = tel.controller;
  const auto& rows = tel.rows;

  // References on the report grid.
  impedance::KnotTable ref_theta{refs.s, refs.theta};
  impedance::KnotTable ref_tau{refs.s, refs.tau};
  impedance::KnotTable ref_power{refs.s, refs.power};
  std::vector<double> grid_theta(kReportGrid), grid_tau(kReportGrid),
      grid_power(kReportGrid);
  for (std::size_t g = 0; g < kReportGrid; ++g) {
    const double s = static_cast<double>(g);
    grid_theta[g] = ref_theta(s);
    grid_tau[g] = ref_tau(s);
    grid_power[g] = ref_power(s);
  }

  std::map<std::string, std::vector<std::vector<double>>> curves;
  double pooled_sum = 0.0;

  for (const auto& r : rows) {
    rep.clamp_events += r.clamped ? 1 : 0;
    rep.fault_hold += r.fault == 1 ? 1 : 0;
    rep.fault_safe += r.fault == 2 ? 1 : 0;
  }

  std::size_t i = 0;
  while (i < rows.size()) {
    if (rows[i].stride < 0) {
      ++i;
      continue;
    }
    const int id = rows[i].stride;
    std::size_t end = i;
    while (end < rows.size() && rows[end].stride == id) ++end;

    StrideMetrics m;
    m.stride = id;
    m.t_start = rows[i].t;
    m.t_end = end < rows.size() ? rows[end].t : rows[end - 1].t;
    m.samples = end - i;

    std::vector<double> x, angle, torque, power, u;
    double err_sum = 0.0;
    std::size_t err_n = 0;
    m.peak_pf_angle = -std::numeric_limits<double>::infinity();
    m.peak_pf_torque = -std::numeric_limits<double>::infinity();
    m.peak_power = -std::numeric_limits<double>::infinity();
    m.peak_u = -std::numeric_limits<double>::infinity();
    for (std::size_t k = i; k < end; ++k) {
      const auto& r = rows[k];
      x.push_back(r.s_true);
      angle.push_back(r.theta_ankle);
      torque.push_back(r.tau_total);
      power.push_back(r.power);
      u.push_back(r.u);
      m.peak_pf_angle = std::max(m.peak_pf_angle, -r.theta_ankle);
      m.peak_pf_torque = std::max(m.peak_pf_torque, -r.tau_total);
      m.peak_power = std::max(m.peak_power, r.power);
      m.peak_u = std::max(m.peak_u, r.u);
      if (std::isfinite(r.s_est)) {
        const double e = phase::circular_pct_error(r.s_est, r.s_true);
        err_sum += e;
        ++err_n;
        if (!(e <= m.est_max_error)) {
          m.est_max_error = e;
          m.est_max_at_pct = r.s_true;
        }
        ++rep.pooled.samples;
        pooled_sum += e;
        if (!(e <= rep.pooled.max_error)) {
          rep.pooled.max_error = e;
          rep.pooled.max_at_pct = r.s_true;
          rep.pooled.max_stride = id;
        }
      }
    }
    if (err_n > 0) m.est_mean_error = err_sum / static_cast<double>(err_n);
    // Close the curve with the sample that opens the next stride.
    if (end < rows.size()) {
      const auto& r = rows[end];
      x.push_back(100.0);
      angle.push_back(r.theta_ankle);
      torque.push_back(r.tau_total);
      power.push_back(r.power);
      u.push_back(r.u);
    }
    const auto ra = detail::resample(x, angle);
    const auto rt = detail::resample(x, torque);
    const auto rp = detail::resample(x, power);
    m.rmse_angle = detail::rmse(ra, grid_theta);
    m.rmse_torque = detail::rmse(rt, grid_tau);
    m.rmse_power = detail::rmse(rp, grid_power);
    curves["angle"].push_back(ra);
    curves["torque"].push_back(rt);
    curves["power"].push_back(rp);
    curves["u"].push_back(detail::resample(x, u));
    rep.strides.push_back(m);
    i = end;
  }
  if (rep.pooled.samples > 0) {
    rep.pooled.mean_error = pooled_sum / static_cast<double>(rep.pooled.samples);
  }

  for (const auto& [name, group] : stride_fields()) {
    std::vector<double> vals;
    for (const auto& m : rep.strides) {
      const double v = stride_field(m, name);
      if (std::isfinite(v)) vals.push_back(v);
    }
    rep.aggregate[name] = detail::mean_of(vals);
    rep.aggregate_sd[name] = detail::sd_of(vals);
  }

  for (const auto& channel : band_channels()) {
    Band b;
    const auto& cs = curves[channel];
    std::size_t inside = 0, total = 0;
    for (std::size_t g = 0; g < kReportGrid; ++g) {
      std::vector<double> col;
      for (const auto& c : cs) col.push_back(c[g]);
      const double mean = detail::mean_of(col);
      const double sd = detail::sd_of(col);
      b.mean.push_back(mean);
      b.sd.push_back(sd);
      b.lo.push_back(mean - 2.0 * sd);
      b.hi.push_back(mean + 2.0 * sd);
      for (double v : col) {
        ++total;
        inside += (v >= b.lo.back() && v <= b.hi.back()) ? 1 : 0;
      }
    }
    rep.band_coverage[channel] =
        total ? static_cast<double>(inside) / static_cast<double>(total)
              : std::numeric_limits<double>::quiet_NaN();
    rep.bands[channel] = std::move(b);
  }
  return rep;
}

namespace detail {

inline Json number_or_null(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

inline bool selected(const std::set<std::string>& metrics,
                     const std::string& group) {
  return metrics.empty() || metrics.count(group) > 0;
}

inline std::string band_metric(const std::string& channel) {
  return channel == "u" ? "intent" : channel;
}

}  // namespace detail

inline Json report_to_json(const StrideReport& rep,
                           const std::set<std::string>& metrics = {}) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "gaitphase.report";
  j["controller"] = rep.controller;
  j["stride_count"] = rep.strides.size();
  j["events"] = {{"clamped", rep.clamp_events},
                 {"fault_hold", rep.fault_hold},
                 {"fault_safe", rep.fault_safe}};
  Json agg = Json::object(), agg_sd = Json::object();
  for (const auto& [name, group] : stride_fields()) {
    if (!detail::selected(metrics, group)) continue;
    agg[name] = detail::number_or_null(rep.aggregate.at(name));
    agg_sd[name] = detail::number_or_null(rep.aggregate_sd.at(name));
  }
  j["aggregate_mean"] = agg;
  j["aggregate_sd"] = agg_sd;
  if (detail::selected(metrics, "estimation")) {
    j["pooled_estimation"] = {
        {"samples", rep.pooled.samples},
        {"mean_error_pct", detail::number_or_null(rep.pooled.mean_error)},
        {"max_error_pct", detail::number_or_null(rep.pooled.max_error)},
        {"max_at_gait_pct", detail::number_or_null(rep.pooled.max_at_pct)},
        {"max_stride", rep.pooled.max_stride}};
  }
  Json cover = Json::object();
  for (const auto& channel : band_channels()) {
    if (!detail::selected(metrics, detail::band_metric(channel))) continue;
    cover[channel] = detail::number_or_null(rep.band_coverage.at(channel));
  }
  j["band_coverage"] = cover;
  Json strides = Json::array();
  for (const auto& m : rep.strides) {
    Json s;
    s["stride"] = m.stride;
    s["t_start"] = m.t_start;
    s["t_end"] = m.t_end;
    s["samples"] = m.samples;
    for (const auto& [name, group] : stride_fields()) {
      if (!detail::selected(metrics, group)) continue;
      s[name] = detail::number_or_null(stride_field(m, name));
    }
    if (detail::selected(metrics, "estimation")) {
      s["est_max_at_gait_pct"] = detail::number_or_null(m.est_max_at_pct);
    }
    strides.push_back(s);
  }
  j["strides"] = strides;
  return j;
}

inline std::string bands_to_csv(const StrideReport& rep,
                                const std::set<std::string>& metrics = {},
                                const std::string& label = "") {
  std::string out = label.empty() ? "channel,s,mean,sd,lo,hi\n"
                                  : "label,controller,channel,s,mean,sd,lo,hi\n";
  for (const auto& channel : band_channels()) {
    if (!detail::selected(metrics, detail::band_metric(channel))) continue;
    const Band& b = rep.bands.at(channel);
    for (std::size_t g = 0; g < b.mean.size(); ++g) {
      if (!label.empty()) out += label + ',' + rep.controller + ',';
      out += channel + ',' + std::to_string(g) + ',' + format_number(b.mean[g]) +
             ',' + format_number(b.sd[g]) + ',' + format_number(b.lo[g]) + ',' +
             format_number(b.hi[g]) + '\n';
    }
  }
  return out;
}

}  // namespace harness
}  // namespace gaitphase
