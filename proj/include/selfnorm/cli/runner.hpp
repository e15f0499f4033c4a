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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "selfnorm/cli/config.hpp"
#include "selfnorm/montecarlo.hpp"

namespace selfnorm::cli {

enum class Suite { kSimulate, kRate, kVerify, kBound, kCalibrate };

struct RunOptions {
  std::vector<std::filesystem::path> configs;
  std::optional<std::uint64_t> seed;  // overrides config and SELFNORM_SEED
  std::optional<unsigned> workers;    // overrides config and SELFNORM_WORKERS
  std::filesystem::path out_dir = ".";
  /// Runs only this suite; otherwise the suites enabled in each config.
  std::optional<Suite> only;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

/// Runs every config, writes results.csv, results.json, report.txt and
/// gnuplot .dat files into out_dir, and returns the exit code.
int run(const RunOptions& options, std::ostream& log);

/// Smallest C with ks + dkw <= theorem1_rhs(C) for every record:
/// max over records of (ks + dkw) / rhs(C = 1).
double calibrate_constant(std::span<const ExperimentRecord> records,
                          std::span<const double> rhs_at_one);

/// CSV text for the records, schema line and header included.
std::string records_csv(std::span<const ExperimentRecord> records);

}  // namespace selfnorm::cli
