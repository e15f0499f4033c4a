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

namespace selfnorm::numerics {

/// Pairwise (tree) summation with Neumaier-compensated leaves and
/// compensated merges. Result is within a few ulps of the exact sum for
/// well-conditioned inputs and within 4 eps sum|x_i| in general. Routed
/// through the active SIMD kernels; bit-identical across ISAs.
double pairwise_sum(std::span<const double> values);

/// Same tree over the products x[i] * y[i]. Spans must have equal length.
double pairwise_dot(std::span<const double> x, std::span<const double> y);

/// Incremental compensated accumulator for streams whose length is not
/// known up front (per-replication reductions).
class SummationAccumulator {
 public:
  void add(double x);
  void merge(const SummationAccumulator& other);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace selfnorm::numerics
