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

#include "selfnorm/numerics/summation.hpp"

#include <stdexcept>

#include "selfnorm/simd/kernels.hpp"

namespace selfnorm::numerics {

namespace {

// Leaf width of the summation tree; a multiple of the four kernel lanes.
constexpr std::size_t kLeaf = 256;

simd::CompensatedSum sum_tree(const simd::KernelTable& k, const double* x,
                              std::size_t n) {
  if (n <= kLeaf) return k.sum_leaf(x, n);
  const std::size_t half = ((n / kLeaf + 1) / 2) * kLeaf;
  return simd::combine(sum_tree(k, x, half), sum_tree(k, x + half, n - half));
}

simd::CompensatedSum dot_tree(const simd::KernelTable& k, const double* x,
                              const double* y, std::size_t n) {
  if (n <= kLeaf) return k.dot_leaf(x, y, n);
  const std::size_t half = ((n / kLeaf + 1) / 2) * kLeaf;
  return simd::combine(dot_tree(k, x, y, half),
                       dot_tree(k, x + half, y + half, n - half));
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return sum_tree(simd::active_kernels(), values.data(), values.size())
      .value();
}

double pairwise_dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("pairwise_dot: length mismatch");
  }
  return dot_tree(simd::active_kernels(), x.data(), y.data(), x.size())
      .value();
}

void SummationAccumulator::add(double x) {
  const simd::CompensatedSum r = simd::combine({sum_, comp_}, {x, 0.0});
  sum_ = r.sum;
  comp_ = r.comp;
}

void SummationAccumulator::merge(const SummationAccumulator& other) {
  const simd::CompensatedSum r =
      simd::combine({sum_, comp_}, {other.sum_, other.comp_});
  sum_ = r.sum;
  comp_ = r.comp;
}

}  // namespace selfnorm::numerics
