// Copyright 2026 The selfnorm Authors.
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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfnorm/bounds.hpp"
#include "selfnorm/innovations.hpp"
#include "selfnorm/models.hpp"
#include "selfnorm/statistics.hpp"

namespace selfnorm::cli {

/// Malformed config. line/column are 1-based; column points at the
/// offending token.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string file, std::size_t line, std::size_t column,
              const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct IniEntry {
  std::string value;
  std::size_t line = 0;
  std::size_t column = 0;      // of the value
  std::size_t key_column = 0;  // of the key
};

/// section -> key -> entry. Keys outside any section land in "".
struct IniDocument {
  std::map<std::string, std::map<std::string, IniEntry>> sections;
  // section name -> line of its first header
  std::map<std::string, std::size_t> header_lines;
};

/// "[section]" headers, "key = value" lines, '#' or ';' comments.
IniDocument parse_ini(std::istream& in, const std::string& file = "<config>");

struct ModelConfig {
  FieldKind kind = FieldKind::kIid;
  InnovationSpec innovations;
  std::size_t n = 0;                 // iid size or generated graph order
  std::vector<std::size_t> dims;     // moving_average box
  std::size_t lattice_d = 1;         // box dimension when sweeping sides
  std::size_t radius = 0;
  std::vector<double> coefficients;  // empty: all ones
  std::string graph = "cycle";       // cycle | path | matching | file
  std::filesystem::path edges;
};

struct SuiteFlags {
  bool simulate = false;
  bool rate = false;
  bool verify = false;
  bool bound = false;
  bool calibrate = false;
};

struct VerifyConfig {
  std::uint64_t replications = 100000;
  TestFunction test_function = TestFunction::kClip;
  double z = 0.0;
  std::vector<double> half_widths;  // in units of sigma
};

struct RateConfig {
  double noise_multiple = 2.0;
  std::optional<double> slope_min;
  std::optional<double> slope_max;
  std::optional<double> min_r2;
};

struct ExperimentConfig {
  std::filesystem::path source;
  ModelConfig model;
  StatisticKind statistic = StatisticKind::kW;
  std::vector<std::size_t> sweep;  // empty: the model as configured
  std::uint64_t replications = 10000;
  std::uint64_t seed = 1;
  double delta = 0.01;
  double C = 1.0;
  unsigned workers = 0;
  SuiteFlags suites;
  VerifyConfig verify;
  RateConfig rate;
};

ExperimentConfig parse_config(std::istream& in,
                              const std::string& file = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// The model at sweep point n (lattice side, vertex count or iid size);
/// nullopt builds the configured model.
FieldModel build_model(const ModelConfig& m, std::optional<std::size_t> n);

}  // namespace selfnorm::cli
