#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitphase/error.hpp"
#include "gaitphase/harness/csv.hpp"
#include "gaitphase/impedance.hpp"
#include "gaitphase/phase.hpp"
#include "gaitphase/volitional.hpp"

namespace gaitphase {
namespace harness {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Everything cmd_calibrate learns about one user.
struct CalibrationProfile {
  phase::PhaseCalibration phase;
  phase::PhaseMap map;
  std::optional<volitional::VolitionalCalibration> volitional;
  std::size_t strides = 0;
  double rate_hz = signals::kDefaultRateHz;
  double heel_threshold = signals::kDefaultHeelThreshold;
  phase::CriticalPointRule rule = phase::CriticalPointRule::kPeakSpeed;

  bool operator==(const CalibrationProfile&) const = default;
};

namespace detail {

template <class T>
T get_field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kConfigError,
                where + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError,
                where + ": bad field '" + key + "': " + e.what());
  }
}

inline void check_schema(const Json& j, const char* kind,
                         const std::string& where) {
  const int version = get_field<int>(j, "schema_version", where);
  if (version != kSchemaVersion) {
    throw Error(ErrorCode::kConfigError,
                where + ": unsupported schema_version " +
                    std::to_string(version));
  }
  if (get_field<std::string>(j, "kind", where) != kind) {
    throw Error(ErrorCode::kConfigError,
                where + ": expected kind '" + std::string(kind) + "'");
  }
}

inline Json parse_json(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfigError, where + ": " + e.what());
  }
}

inline const char* rule_name(phase::CriticalPointRule r) {
  return r == phase::CriticalPointRule::kSignedMax ? "signed_max" : "peak_speed";
}

}  // namespace detail

inline phase::CriticalPointRule parse_rule(const std::string& name) {
  if (name == "peak_speed") return phase::CriticalPointRule::kPeakSpeed;
  if (name == "signed_max") return phase::CriticalPointRule::kSignedMax;
  throw Error(ErrorCode::kConfigError,
              "unknown critical_point_rule '" + name + "'");
}

inline volitional::BisectorRule parse_bisector(const std::string& name) {
  if (name == "angular") return volitional::BisectorRule::kAngular;
  if (name == "literal") return volitional::BisectorRule::kLiteral;
  throw Error(ErrorCode::kConfigError, "unknown bisector '" + name + "'");
}

// ---------------------------------------------------------------------------
// Calibration profile

inline Json to_json(const CalibrationProfile& p) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "gaitphase.calibration";
  j["conditioning"] = {{"rate_hz", p.rate_hz},
                       {"heel_threshold", p.heel_threshold},
                       {"critical_point_rule", detail::rule_name(p.rule)}};
  j["strides"] = p.strides;
  j["phase"] = {{"x0_deg", p.phase.x0},
                {"y0_deg_per_s", p.phase.y0},
                {"k_s", p.phase.k}};
  j["phase_map"] = {{"phi_deg", p.map.phi()}, {"pct", p.map.pct()}};
  if (p.volitional) {
    const auto& v = *p.volitional;
    j["volitional"] = {{"mva_gas_v", v.mva_gas}, {"mva_ta_v", v.mva_ta},
                       {"m_gas", v.m_gas},       {"m_ta", v.m_ta},
                       {"m0", v.m0},             {"noise_floor", v.noise_floor}};
  }
  return j;
}

inline CalibrationProfile calibration_from_json(const Json& j,
                                                const std::string& where) {
  detail::check_schema(j, "gaitphase.calibration", where);
  CalibrationProfile p;
  const Json& cond = j.at("conditioning");
  p.rate_hz = detail::get_field<double>(cond, "rate_hz", where);
  p.heel_threshold = detail::get_field<double>(cond, "heel_threshold", where);
  p.rule = parse_rule(
      detail::get_field<std::string>(cond, "critical_point_rule", where));
  p.strides = detail::get_field<std::size_t>(j, "strides", where);
  const Json& ph = j.at("phase");
  p.phase.x0 = detail::get_field<double>(ph, "x0_deg", where);
  p.phase.y0 = detail::get_field<double>(ph, "y0_deg_per_s", where);
  p.phase.k = detail::get_field<double>(ph, "k_s", where);
  if (!(p.phase.k > 0.0)) {
    throw Error(ErrorCode::kInvalidCalibration, where + ": k must be positive");
  }
  const Json& map = j.at("phase_map");
  p.map = phase::PhaseMap(
      detail::get_field<std::vector<double>>(map, "phi_deg", where),
      detail::get_field<std::vector<double>>(map, "pct", where));
  if (j.contains("volitional")) {
    const Json& v = j.at("volitional");
    volitional::VolitionalCalibration c;
    c.mva_gas = detail::get_field<double>(v, "mva_gas_v", where);
    c.mva_ta = detail::get_field<double>(v, "mva_ta_v", where);
    c.m_gas = detail::get_field<double>(v, "m_gas", where);
    c.m_ta = detail::get_field<double>(v, "m_ta", where);
    c.m0 = detail::get_field<double>(v, "m0", where);
    c.noise_floor = detail::get_field<double>(v, "noise_floor", where);
    volitional::validate(c);
    p.volitional = c;
  }
  return p;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_calibration(const std::filesystem::path& path,
                              const CalibrationProfile& p) {
  write_text(path, dump(to_json(p)));
}

inline CalibrationProfile read_calibration(const std::filesystem::path& path) {
  return calibration_from_json(
      detail::parse_json(read_text(path), path.string()), path.string());
}

// ---------------------------------------------------------------------------
// Impedance profile

inline Json to_json(const impedance::ImpedanceProfile& p) {
  auto table = [](const impedance::KnotTable& t) {
    return Json{{"s", t.s}, {"v", t.v}};
  };
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "gaitphase.impedance_profile";
  j["units"] = {{"s", "percent gait"},
                {"theta_eq", "deg"},
                {"stiffness", "Nm/deg/kg"},
                {"damping", "Nms/deg/kg"}};
  j["sign_convention"] =
      "dorsiflexion positive; plantarflexion angles and torques negative";
  j["theta_max_deg"] = p.theta_max;
  j["theta_eq"] = table(p.theta_eq);
  j["stiffness"] = table(p.stiffness);
  j["damping"] = table(p.damping);
  return j;
}

inline impedance::ImpedanceProfile impedance_from_json(
    const Json& j, const std::string& where) {
  detail::check_schema(j, "gaitphase.impedance_profile", where);
  auto table = [&](const char* key) {
    if (!j.contains(key)) {
      throw Error(ErrorCode::kConfigError,
                  where + ": missing curve '" + key + "'");
    }
    impedance::KnotTable t;
    t.s = detail::get_field<std::vector<double>>(j.at(key), "s", where);
    t.v = detail::get_field<std::vector<double>>(j.at(key), "v", where);
    return t;
  };
  impedance::ImpedanceProfile p;
  p.theta_max = detail::get_field<double>(j, "theta_max_deg", where);
  p.theta_eq = table("theta_eq");
  p.stiffness = table("stiffness");
  p.damping = table("damping");
  const auto report = impedance::validate_profile(p);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw Error(ErrorCode::kConfigError,
                where + ": " + v.curve + " " + v.rule + ": " + v.message);
  }
  return p;
}

inline void write_impedance(const std::filesystem::path& path,
                            const impedance::ImpedanceProfile& p) {
  write_text(path, dump(to_json(p)));
}

inline impedance::ImpedanceProfile read_impedance(
    const std::filesystem::path& path) {
  return impedance_from_json(
      detail::parse_json(read_text(path), path.string()), path.string());
}

}  // namespace harness
}  // namespace gaitphase
