#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gaitphase/error.hpp"
#include "gaitphase/impedance.hpp"
#include "gaitphase/signals.hpp"

namespace gaitphase {
namespace harness {

/// Shortest round-trip decimal form; "nan" for NaN.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kDataError,
                "cannot parse number '" + std::string(text) + "' at " + where);
  }
  return v;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

/// A numeric CSV table. Lines starting with '#' are comments; comments of the
/// form "# key=value" are kept as metadata.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> meta;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw Error(ErrorCode::kDataError, "missing column '" + name + "'");
  }
};

inline CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = line.substr(1);
      const auto eq = body.find('=');
      if (eq != std::string::npos) {
        auto trim = [](std::string s) {
          const auto b = s.find_first_not_of(" \t");
          const auto e = s.find_last_not_of(" \t");
          return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        table.meta[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
      }
      continue;
    }
    const auto cells = split_commas(line);
    if (!have_header) {
      for (auto c : cells) {
        std::string name(c);
        const auto b = name.find_first_not_of(" \t");
        const auto e = name.find_last_not_of(" \t");
        table.columns.push_back(b == std::string::npos ? "" : name.substr(b, e - b + 1));
      }
      have_header = true;
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw Error(ErrorCode::kDataError,
                  source + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(table.columns.size()) + " fields, got " +
                      std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) {
      row.push_back(parse_number(c, source + ":" + std::to_string(line_no)));
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) {
    throw Error(ErrorCode::kDataError, source + ": missing header row");
  }
  return table;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kDataError, "cannot open " + path.string());
  }
  return parse_csv(in, path.string());
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kDataError, "cannot write " + path.string());
  }
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kDataError, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Sensor frames

inline constexpr const char* kFrameColumns[] = {
    "t",      "theta_tib", "theta_dot_tib", "p_heel",         "p_toe",
    "emg_gas", "emg_ta",   "theta_ankle",   "theta_dot_ankle"};

inline std::vector<signals::SensorFrame> frames_from_table(
    const CsvTable& table, const std::string& source) {
  if (table.columns.size() != std::size(kFrameColumns)) {
    throw Error(ErrorCode::kDataError,
                source + ": frame schema must have exactly " +
                    std::to_string(std::size(kFrameColumns)) + " columns");
  }
  std::size_t idx[std::size(kFrameColumns)];
  for (std::size_t i = 0; i < std::size(kFrameColumns); ++i) {
    idx[i] = table.column(kFrameColumns[i]);
  }
  std::vector<signals::SensorFrame> frames;
  frames.reserve(table.rows.size());
  double prev_t = -std::numeric_limits<double>::infinity();
  for (const auto& r : table.rows) {
    signals::SensorFrame f;
    f.t = r[idx[0]];
    f.theta_tib = r[idx[1]];
    f.theta_dot_tib = r[idx[2]];
    f.p_heel = r[idx[3]];
    f.p_toe = r[idx[4]];
    f.emg_gas = r[idx[5]];
    f.emg_ta = r[idx[6]];
    f.theta_ankle = r[idx[7]];
    f.theta_dot_ankle = r[idx[8]];
    if (!(f.t > prev_t)) {
      throw Error(ErrorCode::kDataError,
                  source + ": timestamps must strictly increase");
    }
    prev_t = f.t;
    frames.push_back(f);
  }
  return frames;
}

inline std::vector<signals::SensorFrame> read_frames(
    const std::filesystem::path& path) {
  return frames_from_table(read_csv(path), path.string());
}

inline std::string frames_to_csv(std::span<const signals::SensorFrame> frames) {
  std::string out;
  for (std::size_t i = 0; i < std::size(kFrameColumns); ++i) {
    if (i) out += ',';
    out += kFrameColumns[i];
  }
  out += '\n';
  for (const auto& f : frames) {
    const double v[] = {f.t,      f.theta_tib,   f.theta_dot_tib,
                        f.p_heel, f.p_toe,       f.emg_gas,
                        f.emg_ta, f.theta_ankle, f.theta_dot_ankle};
    for (std::size_t i = 0; i < std::size(v); ++i) {
      if (i) out += ',';
      out += format_number(v[i]);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// MVIC trials: t,emg

inline std::vector<double> read_emg_trial(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.columns.size() != 2) {
    throw Error(ErrorCode::kDataError, path.string() + ": expected t,emg");
  }
  const std::size_t ci = table.column("emg");
  table.column("t");
  std::vector<double> emg;
  emg.reserve(table.rows.size());
  for (const auto& r : table.rows) emg.push_back(r[ci]);
  return emg;
}

// ---------------------------------------------------------------------------
// Reference trajectories: s,theta_ref,tau_ref,power_ref

inline impedance::ReferenceTrajectories references_from_table(
    const CsvTable& table, const std::string& source) {
  impedance::ReferenceTrajectories r;
  const std::size_t cs = table.column("s");
  const std::size_t ct = table.column("theta_ref");
  const std::size_t cq = table.column("tau_ref");
  const std::size_t cp = table.column("power_ref");
  for (const auto& row : table.rows) {
    r.s.push_back(row[cs]);
    r.theta.push_back(row[ct]);
    r.tau.push_back(row[cq]);
    r.power.push_back(row[cp]);
  }
  if (auto it = table.meta.find("stride_period_s"); it != table.meta.end()) {
    r.stride_period_s = parse_number(it->second, source + " stride_period_s");
  }
  if (r.size() < 3) {
    throw Error(ErrorCode::kDataError, source + ": reference table too short");
  }
  return r;
}

inline impedance::ReferenceTrajectories read_references(
    const std::filesystem::path& path) {
  return references_from_table(read_csv(path), path.string());
}

inline std::string references_to_csv(const impedance::ReferenceTrajectories& r) {
  std::string out =
      "# Approximate able-bodied slow-walking ankle references (digitized, "
      "smoothed).\n"
      "# Dorsiflexion positive; plantarflexion angle and moment negative.\n"
      "# units: s=percent theta_ref=deg tau_ref=Nm/kg power_ref=W/kg\n"
      "# stride_period_s=" +
      format_number(r.stride_period_s) + "\n" + "s,theta_ref,tau_ref,power_ref\n";
  for (std::size_t i = 0; i < r.size(); ++i) {
    out += format_number(r.s[i]) + ',' + format_number(r.theta[i]) + ',' +
           format_number(r.tau[i]) + ',' + format_number(r.power[i]) + '\n';
  }
  return out;
}

}  // namespace harness
}  // namespace gaitphase
