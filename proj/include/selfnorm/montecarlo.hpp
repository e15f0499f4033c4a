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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfnorm/bounds.hpp"
#include "selfnorm/models.hpp"
#include "selfnorm/numerics/regression.hpp"
#include "selfnorm/statistics.hpp"

namespace selfnorm {

struct EmpiricalDistribution {
  std::vector<double> sorted_values;  // ascending, +-inf at the ends
  std::uint64_t degenerate_count = 0;  // V == 0 events
  std::uint64_t replications = 0;
};

/// R realizations of the requested statistic. Replication r always uses
/// counter r of the seed's stream, so the result does not depend on the
/// worker count.
EmpiricalDistribution run_experiment(const FieldModel& model,
                                     StatisticKind kind, std::uint64_t R,
                                     std::uint64_t seed, unsigned workers = 0);

/// sup_z |F_hat(z) - Phi(z)| over the order statistics.
double ks_distance_vs_normal(const EmpiricalDistribution& e);
double ks_distance_vs_normal(std::span<const double> sorted_values);

/// sup_z |F(z) - G(z)| for two sorted samples.
double two_sample_sup_distance(std::span<const double> a,
                               std::span<const double> b);

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

class StateSpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxEnumeratedOutcomes = std::size_t{1} << 20;

/// Law of the statistic by enumerating every innovation outcome of a model
/// with two-point innovations; atoms sorted by value with ties merged.
std::vector<Atom> exact_distribution_atoms(const FieldModel& model,
                                           StatisticKind kind);
/// Exact sup_z |P(stat <= z) - Phi(z)|.
double exact_distribution_small(const FieldModel& model, StatisticKind kind);

struct ExperimentRecord {
  std::size_t n = 0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  StatisticKind kind = StatisticKind::kW;
  double ks_estimate = 0.0;
  double dkw_band = 0.0;
  double bound_value = 0.0;  // theorem1_rhs at the supplied C
  int slope_group = 0;
  std::uint64_t degenerate_count = 0;
};

struct ExperimentOptions {
  StatisticKind kind = StatisticKind::kW;
  std::uint64_t replications = 20000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  double delta = 0.01;
  double C = 1.0;
  int slope_group = 0;
  /// Replications for Monte Carlo bound components when exact ones are
  /// not available.
  std::uint64_t component_replications = 20000;
};

ExperimentRecord run_record(const FieldModel& model,
                            const ExperimentOptions& opt);

class RateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<std::size_t> used;      // indices into the input
  std::vector<std::string> warnings;  // one per excluded record
};

/// OLS of ln ks on ln n over records with ks >= noise_multiple * dkw.
/// Fewer than three usable records, or repeated n, throws RateFitError.
RateFit rate_fit(std::span<const ExperimentRecord> records,
                 double noise_multiple = 2.0);

struct TruncationGapReport {
  InequalityReport report;
  double estimate = 0.0;  // sup |F_Wtilde - F_W|
  double dkw = 0.0;
  bool vacuous = false;   // bound >= 1
};

/// Compares the empirical laws of Wtilde and W from the same draws against
/// 4 kappa^2 beta3 + beta0; passes when estimate - 2 dkw <= bound.
TruncationGapReport truncation_gap_check(const FieldModel& model,
                                         std::uint64_t R, std::uint64_t seed,
                                         unsigned workers = 0,
                                         double delta = 0.01);

}  // namespace selfnorm
