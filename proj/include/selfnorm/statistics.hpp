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
#include <span>
#include <string_view>
#include <vector>

#include "selfnorm/dependence.hpp"
#include "selfnorm/models.hpp"

namespace selfnorm {

/// psi(x) = sqrt of x clamped to [0.25 sigma^2, 2 sigma^2].
double psi(double x, double sigma);

/// s / v with the degenerate convention at v == 0: +inf, -inf or 0 by the
/// sign of s.
double self_normalized_ratio(double s, double v);

struct SampleStatistics {
  double s = 0.0;
  std::vector<double> y;  // Y_i = sum_{j in A_i} X_j
  double xbar = 0.0;      // S / |J|
  double ybar = 0.0;      // sum_j Y_j / |J|
  double v = 0.0;
  double w = 0.0;
  bool degenerate = false;  // v == 0
};

struct TruncatedSystem {
  std::vector<double> xbar_i;
  std::vector<double> ybar_i;
  double sbar = 0.0;
  double vbar = 0.0;
  double wbar = 0.0;
  double vtilde = 0.0;
  double wtilde = 0.0;
  std::vector<double> xi;
  std::vector<double> eta;
};

SampleStatistics compute_statistics(std::span<const double> x,
                                    const DependenceStructure& structure);

/// Truncation at sigma / kappa. Vtilde centres with the untruncated means.
TruncatedSystem compute_truncated(std::span<const double> x,
                                  const DependenceStructure& structure,
                                  double sigma, double kappa);

/// sigma_bar^2 = sum_j sum_{k in A_j} E{Xbar_j Xbar_k} at level sigma/kappa,
/// from exact truncated pair moments. `engine` may be shared to reuse its
/// cache.
double sigma_bar2(const FieldModel& model, double kappa,
                  const MomentEngine* engine = nullptr);

enum class StatisticKind { kW, kWbar, kWtilde };

std::string_view statistic_kind_name(StatisticKind k);
/// Accepts W, Wbar, Wtilde (case-insensitive).
StatisticKind parse_statistic_kind(std::string_view name);

// Allocation-free path for the Monte Carlo loop.

struct StatisticsWorkspace {
  std::vector<double> y;
  std::vector<double> xbar;
  std::vector<double> ybar;
};

struct RealizationSummary {
  double s = 0.0;
  double sum_y = 0.0;
  double dot = 0.0;     // sum X_i Y_i
  double v = 0.0;
  double w = 0.0;
  bool degenerate = false;
  // Filled only when the truncated system was requested.
  double sbar = 0.0;
  double sum_ybar = 0.0;
  double dotbar = 0.0;  // sum Xbar_i Ybar_i
  double vbar = 0.0;
  double wbar = 0.0;
  double vtilde = 0.0;
  double wtilde = 0.0;
};

/// truncation_level <= 0 skips the truncated system.
RealizationSummary summarize(std::span<const double> x,
                             const DependenceStructure& structure,
                             double sigma, double truncation_level,
                             StatisticsWorkspace& ws);

double statistic_value(const RealizationSummary& r, StatisticKind k);

}  // namespace selfnorm
