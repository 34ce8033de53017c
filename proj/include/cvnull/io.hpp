// Copyright 2026 The cvnull Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// On-disk quadrature datasets: one CSV per phase group (header
// `phase_rad,value`, phase repeated on every row) plus a JSON manifest.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "cvnull/error.hpp"
#include "cvnull/homodyne.hpp"

namespace cvnull {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kDatasetFormat = "cvnull-quadrature-dataset";
inline constexpr int kDatasetFormatVersion = 1;
inline constexpr std::string_view kDatasetCsvHeader = "phase_rad,value";

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw Error(ErrorCode::kParseError, where + ": cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParseError, path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kParseError, path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw Error(ErrorCode::kParseError, path.string() + ": write failed");
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

inline Json read_json_file(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

inline std::string group_to_csv(const QuadratureGroup& g) {
  std::string out(kDatasetCsvHeader);
  out += '\n';
  const std::string phase = format_double(g.theta);
  for (double v : g.samples) {
    out += phase;
    out += ',';
    out += format_double(v);
    out += '\n';
  }
  return out;
}

/// Parses one phase group. Errors name the file and 1-based line.
inline QuadratureGroup group_from_csv(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto strip_cr = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, name + ":1: empty file");
  ++line_no;
  strip_cr(line);
  if (line != kDatasetCsvHeader) {
    throw Error(ErrorCode::kParseError, name + ":1: expected header '" + std::string(kDatasetCsvHeader) + "'");
  }
  QuadratureGroup g{0.0, {}};
  bool have_phase = false;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    const std::string where = name + ":" + std::to_string(line_no);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw Error(ErrorCode::kParseError, where + ": expected two comma-separated fields");
    }
    const double phase = parse_double(std::string_view(line).substr(0, comma), where);
    const double value = parse_double(std::string_view(line).substr(comma + 1), where);
    if (!have_phase) {
      g.theta = phase;
      have_phase = true;
    } else if (phase != g.theta) {
      throw Error(ErrorCode::kParseError, where + ": phase differs from earlier rows of this file");
    }
    g.samples.push_back(value);
  }
  if (g.samples.empty()) throw Error(ErrorCode::kParseError, name + ":" + std::to_string(line_no) + ": no samples");
  return g;
}

inline std::string group_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "phase_%02zu.csv", index);
  return buf;
}

struct DatasetMetadata {
  std::uint64_t seed = 0;
  int cutoff = 0;
  Json source = Json::object();
};

/// Writes the CSV files and manifest.json into `dir`; returns the manifest.
inline Json write_dataset(const std::filesystem::path& dir, const QuadratureDataset& data,
                          const DatasetMetadata& meta) {
  Json files = Json::array();
  for (std::size_t k = 0; k < data.groups.size(); ++k) {
    const std::string name = group_file_name(k);
    write_text_file(dir / name, group_to_csv(data.groups[k]));
    files.push_back({{"path", name},
                     {"phase_rad", data.groups[k].theta},
                     {"n_samples", data.groups[k].samples.size()}});
  }
  Json manifest = {{"format", kDatasetFormat},
                   {"version", kDatasetFormatVersion},
                   {"convention", {{"vacuum_variance", data.vacuum_variance}}},
                   {"source_id", data.source_id},
                   {"source", meta.source},
                   {"seed", meta.seed},
                   {"cutoff", meta.cutoff},
                   {"files", files}};
  write_json_file(dir / "manifest.json", manifest);
  return manifest;
}

inline QuadratureGroup read_group_file(const std::filesystem::path& path) {
  return group_from_csv(read_text_file(path), path.string());
}

/// Loads a dataset from a manifest; file paths resolve relative to it.
inline QuadratureDataset read_dataset_manifest(const std::filesystem::path& manifest_path) {
  const Json m = read_json_file(manifest_path);
  const std::string where = manifest_path.string();
  try {
    if (m.at("format").get<std::string>() != kDatasetFormat) {
      throw Error(ErrorCode::kParseError, where + ": not a quadrature dataset manifest");
    }
    const double vv = m.at("convention").at("vacuum_variance").get<double>();
    if (vv != kVacuumVariance) {
      throw Error(ErrorCode::kParseError, where + ": unsupported vacuum variance convention " + format_number(vv));
    }
    QuadratureDataset data;
    data.source_id = m.value("source_id", std::string{});
    const auto base = manifest_path.parent_path();
    for (const auto& f : m.at("files")) {
      QuadratureGroup g = read_group_file(base / f.at("path").get<std::string>());
      if (phase_distance(g.theta, f.at("phase_rad").get<double>()) > kPhaseMatchTolerance) {
        throw Error(ErrorCode::kParseError, where + ": phase of " + f.at("path").get<std::string>() +
                                                " disagrees with its manifest entry");
      }
      data.groups.push_back(std::move(g));
    }
    data.validate();
    return data;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, where + ": " + e.what());
  }
}

}  // namespace cvnull
