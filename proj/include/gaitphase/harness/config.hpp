#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitphase/control.hpp"
#include "gaitphase/error.hpp"
#include "gaitphase/harness/profile_io.hpp"
#include "gaitphase/plant.hpp"

namespace gaitphase {
namespace harness {

namespace fs = std::filesystem;

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {"estimation", "angle",
                                                 "torque", "power", "intent"};
  return names;
}

/// Synthetic volitional calibration: MVIC trials at known levels plus a
/// walking stream for the co-contraction slopes.
struct SynthVolitional {
  double mva_gas = 0.4;  // V
  double mva_ta = 0.3;   // V
  std::size_t trials = 3;
  double mvic_noise_fraction = 0.0;
  plant::GaitSynthParams walk;
};

struct VolitionalSource {
  std::vector<fs::path> mvic_gas;
  std::vector<fs::path> mvic_ta;
  std::optional<fs::path> walk;  // standard frame CSV; the main input if unset
  std::optional<SynthVolitional> synth;
  volitional::BisectorRule bisector = volitional::BisectorRule::kAngular;
  double noise_floor = volitional::kDefaultNoiseFloor;
};

struct RunConfig {
  fs::path source;  // the config file itself, for diagnostics
  std::optional<fs::path> input_csv;
  std::optional<plant::GaitSynthParams> input_synth;
  control::ControllerKind controller = control::ControllerKind::kPvic;
  std::optional<fs::path> calibration;
  std::optional<fs::path> impedance_profile;
  std::optional<fs::path> references;
  fs::path output_dir = "out";
  std::set<std::string> metrics;
  double rate_hz = signals::kDefaultRateHz;  // CSV input only
  double body_mass = 70.0;
  double torque_limit = control::kDefaultTorqueLimit;
  double heel_threshold = signals::kDefaultHeelThreshold;
  phase::CriticalPointRule critical_point_rule =
      phase::CriticalPointRule::kPeakSpeed;
  std::optional<VolitionalSource> volitional;
  plant::PlantParams plant;
  bool pipeline = false;
  std::size_t queue_capacity = 256;
  std::vector<fs::path> telemetry;
  std::uint64_t seed = 1;
};

namespace detail {

inline void reject_unknown(const Json& j, std::initializer_list<const char*> keys,
                           const std::string& where) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kConfigError, where + ": expected an object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) {
      throw Error(ErrorCode::kConfigError,
                  where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <class T>
void read_opt(const Json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = get_field<T>(j, key, where);
}

inline plant::EmgBurst burst_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, {"amplitude_v", "start_pct", "end_pct", "edge_pct"}, where);
  plant::EmgBurst b;
  read_opt(j, "amplitude_v", b.amplitude, where);
  read_opt(j, "start_pct", b.start_pct, where);
  read_opt(j, "end_pct", b.end_pct, where);
  read_opt(j, "edge_pct", b.edge_pct, where);
  return b;
}

inline plant::GaitSynthParams synth_from_json(const Json& j,
                                              const std::string& where) {
  reject_unknown(
      j,
      {"rate_hz", "stride_count", "stride_period_s", "stride_period_jitter",
       "lead_in_fraction", "tibia_amplitude_deg", "tibia_offset_deg",
       "tibia_phase_deg", "tibia_harmonic_ratio", "tibia_harmonic_phase_deg",
       "amplitude_jitter", "stance_fraction", "heel_off_fraction",
       "toe_on_fraction", "pressure_ramp_s", "emg_gas_baseline_v",
       "emg_ta_baseline_v", "gas_burst", "ta_burst", "emg_carrier",
       "noise_fraction"},
      where);
  plant::GaitSynthParams p;
  read_opt(j, "rate_hz", p.rate_hz, where);
  read_opt(j, "stride_count", p.stride_count, where);
  read_opt(j, "stride_period_s", p.stride_period_s, where);
  read_opt(j, "stride_period_jitter", p.stride_period_jitter, where);
  read_opt(j, "lead_in_fraction", p.lead_in_fraction, where);
  read_opt(j, "tibia_amplitude_deg", p.tibia_amplitude_deg, where);
  read_opt(j, "tibia_offset_deg", p.tibia_offset_deg, where);
  read_opt(j, "tibia_phase_deg", p.tibia_phase_deg, where);
  read_opt(j, "tibia_harmonic_ratio", p.tibia_harmonic_ratio, where);
  read_opt(j, "tibia_harmonic_phase_deg", p.tibia_harmonic_phase_deg, where);
  read_opt(j, "amplitude_jitter", p.amplitude_jitter, where);
  read_opt(j, "stance_fraction", p.stance_fraction, where);
  read_opt(j, "heel_off_fraction", p.heel_off_fraction, where);
  read_opt(j, "toe_on_fraction", p.toe_on_fraction, where);
  read_opt(j, "pressure_ramp_s", p.pressure_ramp_s, where);
  read_opt(j, "emg_gas_baseline_v", p.emg_gas_baseline, where);
  read_opt(j, "emg_ta_baseline_v", p.emg_ta_baseline, where);
  if (j.contains("gas_burst")) {
    p.gas_burst = burst_from_json(j.at("gas_burst"), where + " gas_burst");
  }
  if (j.contains("ta_burst")) {
    p.ta_burst = burst_from_json(j.at("ta_burst"), where + " ta_burst");
  }
  read_opt(j, "emg_carrier", p.emg_carrier, where);
  read_opt(j, "noise_fraction", p.noise_fraction, where);
  try {
    plant::validate(p);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, where + ": " + e.what());
  }
  return p;
}

inline plant::PlantParams plant_from_json(const Json& j,
                                          const std::string& where) {
  reject_unknown(j,
                 {"inertia", "joint_damping", "ground_stiffness",
                  "ground_damping", "stop_angle_deg", "stop_stiffness",
                  "stop_damping"},
                 where);
  plant::PlantParams p;
  read_opt(j, "inertia", p.inertia, where);
  read_opt(j, "joint_damping", p.joint_damping, where);
  read_opt(j, "ground_stiffness", p.ground_stiffness, where);
  read_opt(j, "ground_damping", p.ground_damping, where);
  read_opt(j, "stop_angle_deg", p.stop_angle_deg, where);
  read_opt(j, "stop_stiffness", p.stop_stiffness, where);
  read_opt(j, "stop_damping", p.stop_damping, where);
  if (!(p.inertia > 0.0) || p.joint_damping < 0.0 || p.ground_stiffness < 0.0 ||
      p.ground_damping < 0.0 || !(p.stop_angle_deg > 0.0) ||
      p.stop_stiffness < 0.0 || p.stop_damping < 0.0) {
    throw Error(ErrorCode::kConfigError, where + ": invalid plant parameters");
  }
  return p;
}

/// Default walk for synthetic co-contraction calibration: a late-stance
/// gastrocnemius burst and a swing tibialis burst on low baselines.
inline plant::GaitSynthParams default_calibration_walk(double mva_gas,
                                                       double mva_ta) {
  plant::GaitSynthParams p;
  p.stride_count = 6;
  p.emg_gas_baseline = 0.04 * mva_gas;
  p.emg_ta_baseline = 0.04 * mva_ta;
  p.gas_burst = {0.85 * mva_gas, 30.0, 60.0, 5.0};
  p.ta_burst = {0.85 * mva_ta, 65.0, 98.0, 5.0};
  return p;
}

inline VolitionalSource volitional_from_json(const Json& j,
                                             const fs::path& base,
                                             const std::string& where) {
  reject_unknown(j,
                 {"mvic_gas", "mvic_ta", "walk", "synth", "bisector",
                  "noise_floor"},
                 where);
  VolitionalSource v;
  auto paths = [&](const char* key) {
    std::vector<fs::path> out;
    for (const auto& s : get_field<std::vector<std::string>>(j, key, where)) {
      out.push_back(base / s);
    }
    return out;
  };
  if (j.contains("bisector")) {
    v.bisector = parse_bisector(get_field<std::string>(j, "bisector", where));
  }
  read_opt(j, "noise_floor", v.noise_floor, where);
  if (j.contains("synth")) {
    if (j.contains("mvic_gas") || j.contains("mvic_ta")) {
      throw Error(ErrorCode::kConfigError,
                  where + ": give either synth or MVIC files, not both");
    }
    const Json& s = j.at("synth");
    reject_unknown(s,
                   {"mva_gas_v", "mva_ta_v", "trials", "mvic_noise_fraction",
                    "walk"},
                   where + " synth");
    SynthVolitional sv;
    read_opt(s, "mva_gas_v", sv.mva_gas, where);
    read_opt(s, "mva_ta_v", sv.mva_ta, where);
    read_opt(s, "trials", sv.trials, where);
    read_opt(s, "mvic_noise_fraction", sv.mvic_noise_fraction, where);
    if (!(sv.mva_gas > 0.0) || !(sv.mva_ta > 0.0) || sv.trials == 0) {
      throw Error(ErrorCode::kConfigError,
                  where + ": synthetic MVA levels and trials must be positive");
    }
    sv.walk = s.contains("walk")
                  ? synth_from_json(s.at("walk"), where + " synth walk")
                  : default_calibration_walk(sv.mva_gas, sv.mva_ta);
    v.synth = sv;
  } else {
    v.mvic_gas = paths("mvic_gas");
    v.mvic_ta = paths("mvic_ta");
    if (v.mvic_gas.empty() || v.mvic_ta.empty()) {
      throw Error(ErrorCode::kConfigError,
                  where + ": need at least one MVIC trial per muscle");
    }
  }
  if (j.contains("walk")) v.walk = base / get_field<std::string>(j, "walk", where);
  return v;
}

inline void require_exists(const fs::path& p, const std::string& where) {
  if (!fs::exists(p)) {
    throw Error(ErrorCode::kConfigError,
                where + ": referenced file does not exist: " + p.string());
  }
}

}  // namespace detail

/// Parses a run config. Relative paths resolve against `base`.
inline RunConfig config_from_json(const Json& j, const fs::path& base,
                                  const std::string& where) {
  detail::check_schema(j, "gaitphase.run", where);
  detail::reject_unknown(
      j,
      {"schema_version", "kind", "controller", "input", "calibration",
       "impedance_profile", "references", "output_dir", "metrics",
       "rate_hz", "body_mass_kg", "torque_limit_nm_per_kg", "heel_threshold",
       "critical_point_rule", "volitional", "plant", "pipeline",
       "queue_capacity", "telemetry", "seed"},
      where);
  RunConfig c;
  c.source = where;
  auto path_field = [&](const char* key) -> std::optional<fs::path> {
    if (!j.contains(key)) return std::nullopt;
    return base / detail::get_field<std::string>(j, key, where);
  };
  if (j.contains("controller")) {
    c.controller =
        control::parse_kind(detail::get_field<std::string>(j, "controller", where));
  }
  if (j.contains("input")) {
    const Json& in = j.at("input");
    detail::reject_unknown(in, {"csv", "synth"}, where + " input");
    if (in.contains("csv") == in.contains("synth")) {
      throw Error(ErrorCode::kConfigError,
                  where + ": input needs exactly one of csv or synth");
    }
    if (in.contains("csv")) {
      c.input_csv = base / detail::get_field<std::string>(in, "csv", where);
    } else {
      c.input_synth = detail::synth_from_json(in.at("synth"), where + " synth");
    }
  }
  c.calibration = path_field("calibration");
  c.impedance_profile = path_field("impedance_profile");
  c.references = path_field("references");
  if (j.contains("output_dir")) {
    c.output_dir = base / detail::get_field<std::string>(j, "output_dir", where);
  }
  if (j.contains("metrics")) {
    for (const auto& m :
         detail::get_field<std::vector<std::string>>(j, "metrics", where)) {
      if (std::find(metric_names().begin(), metric_names().end(), m) ==
          metric_names().end()) {
        throw Error(ErrorCode::kConfigError, where + ": unknown metric '" + m + "'");
      }
      c.metrics.insert(m);
    }
  } else {
    c.metrics.insert(metric_names().begin(), metric_names().end());
  }
  detail::read_opt(j, "rate_hz", c.rate_hz, where);
  if (c.input_synth) c.rate_hz = c.input_synth->rate_hz;
  detail::read_opt(j, "body_mass_kg", c.body_mass, where);
  detail::read_opt(j, "torque_limit_nm_per_kg", c.torque_limit, where);
  detail::read_opt(j, "heel_threshold", c.heel_threshold, where);
  if (j.contains("critical_point_rule")) {
    c.critical_point_rule = parse_rule(
        detail::get_field<std::string>(j, "critical_point_rule", where));
  }
  if (j.contains("volitional")) {
    c.volitional =
        detail::volitional_from_json(j.at("volitional"), base, where + " volitional");
  }
  if (j.contains("plant")) {
    c.plant = detail::plant_from_json(j.at("plant"), where + " plant");
  }
  detail::read_opt(j, "pipeline", c.pipeline, where);
  detail::read_opt(j, "queue_capacity", c.queue_capacity, where);
  if (j.contains("telemetry")) {
    for (const auto& s :
         detail::get_field<std::vector<std::string>>(j, "telemetry", where)) {
      c.telemetry.push_back(base / s);
    }
  }
  detail::read_opt(j, "seed", c.seed, where);
  if (!(c.rate_hz > 0.0) || !(c.body_mass > 0.0) || !(c.torque_limit > 0.0) ||
      !(c.heel_threshold > 0.0 && c.heel_threshold < 1.0) ||
      c.queue_capacity == 0) {
    throw Error(ErrorCode::kConfigError,
                where + ": body mass, torque limit, queue capacity must be "
                        "positive and heel threshold in (0, 1)");
  }

  // Referenced files must exist before anything runs.
  for (const auto* p : {&c.input_csv, &c.calibration, &c.impedance_profile,
                        &c.references}) {
    if (*p) detail::require_exists(**p, where);
  }
  if (c.volitional) {
    for (const auto& p : c.volitional->mvic_gas) detail::require_exists(p, where);
    for (const auto& p : c.volitional->mvic_ta) detail::require_exists(p, where);
    if (c.volitional->walk) detail::require_exists(*c.volitional->walk, where);
  }
  for (const auto& p : c.telemetry) detail::require_exists(p, where);
  return c;
}

inline RunConfig read_config(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kConfigError, "config not found: " + path.string());
  }
  const Json j = detail::parse_json(read_text(path), path.string());
  return config_from_json(j, path.parent_path(), path.string());
}

}  // namespace harness
}  // namespace gaitphase
