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
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "selfnorm/models.hpp"

namespace selfnorm {

/// Monte Carlo settings shared by the estimators and oracles.
struct McOptions {
  std::uint64_t replications = 100000;
  std::uint64_t seed = 20260101;
  unsigned workers = 0;      // 0: SELFNORM_WORKERS or hardware count
  double confidence = 0.99;  // two-sided level of every reported CI
  /// Estimate bound components by simulation even when exact moments are
  /// available (cross-checks).
  bool force_monte_carlo = false;
};

/// Sample mean with its standard error.
struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t count = 0;
};

/// mean and standard error from a sum and a sum of squares over `count`
/// draws.
MeanEstimate mean_estimate(double sum, double sum_sq, std::uint64_t count);

struct BoundComponents {
  double sigma2 = 0.0;
  double sigma = 0.0;
  std::size_t kappa = 1;
  std::size_t kappa1 = 1;
  std::size_t size_j = 0;
  double beta0 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double theta = 0.0;
  double gamma = 0.0;
  /// False when beta/theta/gamma were estimated by Monte Carlo.
  bool exact = true;
  /// E|X_i|^3 = inf: beta3, theta and gamma are NaN and flagged.
  bool third_moment_finite = true;
  std::uint64_t mc_replications = 0;
  // Standard errors; zero for exact components.
  double beta0_se = 0.0;
  double beta2_se = 0.0;
  double beta3_se = 0.0;
  double theta_se = 0.0;
  double gamma_se = 0.0;

  double truncation_level() const {
    return sigma / static_cast<double>(kappa);
  }
};

/// Exact components when MomentEngine covers the model; otherwise sigma is
/// still exact and the rest is estimated with `mc`.
BoundComponents compute_components(const FieldModel& model,
                                   const McOptions& mc = {});

/// C{(1 + theta) kappa^2 beta3 + kappa beta2 + beta0}
///   + C kappa^{1/2} (theta + 1) |J|^{-1/2}
double theorem1_rhs(const BoundComponents& c, std::size_t size_j, double C);
/// C (m+1)^{3d} (1 + (m+1)^d |J|^{1/3} gamma^{2/3}) (gamma + |J|^{-1/2})
double theorem2_rhs(double gamma, std::size_t m, std::size_t d,
                    std::size_t size_j, double C);
/// C d^9 (1 + d^6 n^{1/3} gamma^{2/3}) (n^{-1/2} + gamma)
double theorem3_rhs(double gamma, std::size_t d_max, std::size_t n, double C);

/// One checked inequality lhs <= rhs. When lhs is a Monte Carlo estimate
/// the check is made at the upper CI edge (and at the lower edge of an
/// estimated rhs).
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - (upper CI edge of lhs)
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool applicable = true;
  bool pass = true;
  std::string note;
};

nlohmann::json to_json(const InequalityReport& r);
nlohmann::json to_json(const BoundComponents& c);

/// |sigma_bar^2 - sigma^2| <= 3 kappa sigma^2 beta2, the second-moment and
/// tail bounds on sum(Xbar_i Ybar_i - E Xbar_i Ybar_i), and
/// 0.98 sigma^2 <= sigma_bar^2 <= 1.02 sigma^2 under beta2 <= 1/(150 kappa).
std::vector<InequalityReport> lemma_oracle_41(const FieldModel& model,
                                              const McOptions& mc = {});

/// Fourth moments of Sbar, sum Ybar and the cross term against
/// 1161 (theta + 1) sigma^4 times 1, kappa^2, kappa.
std::vector<InequalityReport> lemma_oracle_43(const FieldModel& model,
                                              const McOptions& mc = {});

/// Bounded test functions with |f| <= 1 and |f'| <= 1.
enum class TestFunction { kClip, kSin, kLogistic };
std::string_view test_function_name(TestFunction f);
TestFunction parse_test_function(std::string_view name);
double apply_test_function(TestFunction f, double w);

struct Lemma42Estimate {
  bool applicable = true;
  double lhs = 0.0;      // sum_i |mean_i|
  double ci_low = 0.0;   // simultaneous (Bonferroni) edges
  double ci_high = 0.0;
  double rhs = 0.0;      // 62 kappa^2 beta3 + 2 kappa beta2
  double max_abs_z = 0.0;  // max_i |mean_i| / se_i
  double z_critical = 0.0;
};

/// Monte Carlo estimate of sum_i |E{xi_i f(Wbar - eta_i)}|.
Lemma42Estimate lemma42_estimate(const FieldModel& model, TestFunction f,
                                 const McOptions& mc = {});
InequalityReport lemma_oracle_42(const FieldModel& model, TestFunction f,
                                 const McOptions& mc = {});
/// For a model whose coordinates are independent and symmetric every term
/// E{xi_i f(Wbar - eta_i)} vanishes; passes when no term is distinguishable
/// from 0 at the simultaneous level.
InequalityReport symmetric_null_check(const FieldModel& model, TestFunction f,
                                      const McOptions& mc = {});

/// theta <= kappa |J|^{1/3} beta3^{2/3} and beta0 <= kappa^2 beta2.
std::vector<InequalityReport> remark_inequalities(const BoundComponents& c);

struct ConcentrationReport {
  bool applicable = true;
  double z = 0.0;
  std::vector<double> half_widths;
  std::vector<double> probability;
  std::vector<double> ci_high;
  std::vector<double> envelope;  // 4h / sigma + slack
  double slack = 0.0;            // fitted intercept, clipped at 0
  double slope = 0.0;
  bool pass = true;
  std::string note;
};

/// P(z - h/Vbar <= Wbar <= z + h/Vbar) over the given half-widths.
ConcentrationReport concentration_diagnostic(const FieldModel& model, double z,
                                             const std::vector<double>& half_widths,
                                             const McOptions& mc = {});
nlohmann::json to_json(const ConcentrationReport& r);

/// E(sum Xbar_i)^4 for an iid model from the raw moments of Xbar (discrete
/// or symmetric uniform innovations).
double exact_iid_sbar_fourth_moment(const FieldModel& model);

}  // namespace selfnorm
