/*
 * Copyright 2026 The Hotspot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "hotspot/pipeline.h"

namespace hotspot::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

namespace {

constexpr const char* kTelemetryHeader = "sector_id,hour_index,kpi_id,value";
constexpr const char* kSectorsHeader = "sector_id,x_km,y_km";

std::string schema_line() { return "# schema_version=" + std::to_string(kSchemaVersion) + "\n"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << content;
  if (!out) throw DataError("write failed for " + p.string());
}

// Splits a CSV text into data lines, checking the schema comment and the
// header. Returns (line number, text) pairs.
std::vector<std::pair<std::size_t, std::string_view>> csv_lines(std::string_view text, const std::string& header,
                                                                 const std::string& what) {
  std::vector<std::pair<std::size_t, std::string_view>> rows;
  bool seen_header = false;
  std::size_t lineno = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view key = "# schema_version=";
      if (line.substr(0, key.size()) == key && line.substr(key.size()) != std::to_string(kSchemaVersion)) {
        throw DataError(what + ": unsupported schema_version on line " + std::to_string(lineno));
      }
      continue;
    }
    if (!seen_header) {
      if (line != header) throw DataError(what + ": expected header '" + header + "' on line " + std::to_string(lineno));
      seen_header = true;
      continue;
    }
    rows.emplace_back(lineno, line);
  }
  if (!seen_header) throw DataError(what + ": missing header");
  return rows;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= line.size(); ++k) {
    if (k == line.size() || line[k] == ',') {
      f.push_back(line.substr(start, k - start));
      start = k + 1;
    }
  }
  return f;
}

template <typename T>
T parse_number(std::string_view s, const std::string& what, std::size_t lineno) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw DataError(what + " line " + std::to_string(lineno) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

void write_telemetry_csv(std::ostream& out, const core::KpiDataset& data) {
  out << schema_line() << kTelemetryHeader << '\n';
  std::string buf;
  buf.reserve(1 << 16);
  char num[32];
  for (std::size_t i = 0; i < data.n_sectors(); ++i) {
    const std::string id = std::to_string(data.sector_ids[i]) + ",";
    for (std::size_t j = 0; j < data.m_hours(); ++j) {
      for (std::size_t k = 0; k < data.l_kpis(); ++k) {
        buf += id;
        buf += std::to_string(j);
        buf += ',';
        buf += std::to_string(k);
        buf += ',';
        if (!data.missing(i, j, k)) {
          const auto r = std::to_chars(num, num + sizeof(num), data.kpi(i, j, k));
          buf.append(num, r.ptr);
        }
        buf += '\n';
      }
      if (buf.size() > (1 << 16) - 256) {
        out << buf;
        buf.clear();
      }
    }
  }
  out << buf;
}

void read_telemetry_csv(std::istream& in, core::KpiDataset& data) {
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::string what = "telemetry";
  std::unordered_map<int, std::size_t> row_of;
  for (std::size_t i = 0; i < data.sector_ids.size(); ++i) row_of[data.sector_ids[i]] = i;
  std::fill(data.kpi.data().begin(), data.kpi.data().end(), std::numeric_limits<double>::quiet_NaN());
  std::fill(data.missing.data().begin(), data.missing.data().end(), std::uint8_t{1});
  Tensor3<std::uint8_t> seen(data.n_sectors(), data.m_hours(), data.l_kpis());
  for (const auto& [lineno, line] : csv_lines(text, kTelemetryHeader, what)) {
    const auto f = split(line);
    if (f.size() != 4) throw DataError(what + " line " + std::to_string(lineno) + ": expected 4 fields");
    const auto id = parse_number<int>(f[0], what, lineno);
    const auto j = parse_number<std::size_t>(f[1], what, lineno);
    const auto k = parse_number<std::size_t>(f[2], what, lineno);
    const auto it = row_of.find(id);
    if (it == row_of.end()) throw DataError(what + " line " + std::to_string(lineno) + ": unknown sector " + std::to_string(id));
    if (j >= data.m_hours() || k >= data.l_kpis()) {
      throw DataError(what + " line " + std::to_string(lineno) + ": hour or KPI index out of range");
    }
    const std::size_t i = it->second;
    if (seen(i, j, k)) throw DataError(what + " line " + std::to_string(lineno) + ": duplicate entry");
    seen(i, j, k) = 1;
    if (f[3].empty()) continue;
    const double v = parse_number<double>(f[3], what, lineno);
    if (!std::isfinite(v)) throw DataError(what + " line " + std::to_string(lineno) + ": non-finite value");
    data.kpi(i, j, k) = v;
    data.missing(i, j, k) = 0;
  }
}

void write_dataset(const fs::path& dir, const core::KpiDataset& data, const core::ScoringConfig& scoring) {
  fs::create_directories(dir);
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["n_sectors"] = data.n_sectors();
  j["m_hours"] = data.m_hours();
  j["l_kpis"] = data.l_kpis();
  j["start_date"] = core::format_date(data.start_date);
  std::vector<std::string> hol;
  for (const auto& d : data.holidays) hol.push_back(core::format_date(d));
  j["holidays"] = hol;
  j["scoring"] = {{"weights", scoring.weights},
                  {"kpi_thresholds", scoring.kpi_thresholds},
                  {"hot_threshold", scoring.hot_threshold}};
  j["sectors"] = "sectors.csv";
  j["telemetry"] = "telemetry.csv";
  write_file(dir / "dataset.json", j.dump(2) + "\n");

  std::string s = schema_line() + kSectorsHeader + "\n";
  for (std::size_t i = 0; i < data.n_sectors(); ++i) {
    s += std::to_string(data.sector_ids[i]) + "," + format_double(data.sector_coords[i].x_km) + "," +
         format_double(data.sector_coords[i].y_km) + "\n";
  }
  write_file(dir / "sectors.csv", s);

  std::ofstream out(dir / "telemetry.csv", std::ios::binary);
  if (!out) throw DataError("cannot write " + (dir / "telemetry.csv").string());
  write_telemetry_csv(out, data);
}

StoredDataset read_dataset(const fs::path& dir) {
  const fs::path meta_path = dir / "dataset.json";
  if (!fs::exists(meta_path)) throw DataError("no dataset at " + dir.string() + " (missing dataset.json)");
  StoredDataset out;
  auto& d = out.data;
  std::string sectors_file, telemetry_file;
  std::size_t n = 0, m = 0, l = 0;
  try {
    const auto j = json::parse(slurp(meta_path));
    if (j.value("schema_version", -1) != kSchemaVersion) throw DataError(meta_path.string() + ": unsupported schema_version");
    n = j.at("n_sectors").get<std::size_t>();
    m = j.at("m_hours").get<std::size_t>();
    l = j.at("l_kpis").get<std::size_t>();
    d.start_date = core::parse_date(j.at("start_date").get<std::string>());
    for (const auto& h : j.at("holidays")) d.holidays.push_back(core::parse_date(h.get<std::string>()));
    const auto& sc = j.at("scoring");
    out.scoring.weights = sc.at("weights").get<std::vector<double>>();
    out.scoring.kpi_thresholds = sc.at("kpi_thresholds").get<std::vector<double>>();
    out.scoring.hot_threshold = sc.at("hot_threshold").get<double>();
    sectors_file = j.value("sectors", "sectors.csv");
    telemetry_file = j.value("telemetry", "telemetry.csv");
  } catch (const json::exception& e) {
    throw DataError(meta_path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw DataError(meta_path.string() + ": " + e.what());
  }
  if (m == 0 || m % kHoursPerWeek != 0) throw DataError(meta_path.string() + ": m_hours must be a positive multiple of 168");
  if (out.scoring.weights.size() != l || out.scoring.kpi_thresholds.size() != l) {
    throw DataError(meta_path.string() + ": scoring vectors must have l_kpis entries");
  }

  const std::string what = (dir / sectors_file).string();
  for (const auto& [lineno, line] : csv_lines(slurp(dir / sectors_file), kSectorsHeader, what)) {
    const auto f = split(line);
    if (f.size() != 3) throw DataError(what + " line " + std::to_string(lineno) + ": expected 3 fields");
    d.sector_ids.push_back(parse_number<int>(f[0], what, lineno));
    d.sector_coords.push_back({parse_number<double>(f[1], what, lineno), parse_number<double>(f[2], what, lineno)});
  }
  if (d.sector_ids.size() != n) throw DataError(what + ": expected " + std::to_string(n) + " sectors");
  auto ids = d.sector_ids;
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw DataError(what + ": duplicate sector_id");

  d.kpi = Tensor3<double>(n, m, l);
  d.missing = Tensor3<std::uint8_t>(n, m, l);
  d.calendar = core::build_calendar(d.start_date, m, d.holidays);
  std::ifstream tin(dir / telemetry_file, std::ios::binary);
  if (!tin) throw DataError("cannot read " + (dir / telemetry_file).string());
  read_telemetry_csv(tin, d);
  d.validate();
  return out;
}

}  // namespace hotspot::pipeline
