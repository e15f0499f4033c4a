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

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace selfnorm {

/// Thrown when a requested moment of an innovation or field is infinite.
class UnsupportedMoment : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Family {
  kRademacher,
  kUniformCentered,      // U(-1, 1)
  kExponentialCentered,  // Exp(1) - 1
  kTwoPoint,             // Bernoulli(p) - p
  kParetoCentered,       // Pareto(x_m = 1, alpha) - alpha / (alpha - 1)
};

std::string_view family_name(Family f);
/// Accepts the names produced by family_name; throws std::invalid_argument.
Family parse_family(std::string_view name);

/// Two-atom law of a discrete innovation: value[k] with probability prob[k].
struct DiscreteLaw {
  std::array<double, 2> value{};
  std::array<double, 2> prob{};
};

/// Distribution of one mean-zero innovation eps = scale * Z with Z from the
/// family. `param` is p for two-point and alpha for Pareto.
struct InnovationSpec {
  Family family = Family::kRademacher;
  double scale = 1.0;
  double param = 0.0;

  static InnovationSpec rademacher(double scale = 1.0);
  static InnovationSpec uniform(double scale = 1.0);
  static InnovationSpec exponential(double scale = 1.0);
  static InnovationSpec two_point(double p, double scale = 1.0);
  static InnovationSpec pareto(double alpha, double scale = 1.0);

  /// Throws std::invalid_argument on a bad scale or parameter.
  void validate() const;

  bool is_discrete() const;
  DiscreteLaw discrete_law() const;
  /// Finite E|eps|^p.
  bool has_moment(int p) const;
  double variance() const;

  /// Inverse-CDF draw from a uniform in [0, 1).
  double from_uniform(double u) const;

  /// E{|eps|^p 1(|eps| <= t)} for p in [0, 4]; t may be +inf.
  double truncated_abs_moment(int p, double t) const;
  /// E{|eps|^p 1(|eps| > t)}, evaluated directly rather than as a
  /// complement.
  double tail_abs_moment(int p, double t) const;
  /// E{eps 1(|eps| <= t)}
  double truncated_mean(double t) const;

  std::string describe() const;
};

}  // namespace selfnorm
