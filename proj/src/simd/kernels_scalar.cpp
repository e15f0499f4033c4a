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

#include <cstddef>
#include <cstdint>

#include "selfnorm/simd/kernels.hpp"
#include "selfnorm/simd/lane_ops.hpp"

namespace selfnorm::simd {

namespace {

CompensatedSum sum_leaf(const double* x, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  double c[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) detail::neumaier_add(s[l], c[l], x[i + l]);
  }
  for (int l = 0; i < n; ++i, ++l) detail::neumaier_add(s[l], c[l], x[i]);
  return detail::merge_lanes(s, c);
}

CompensatedSum dot_leaf(const double* x, const double* y, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  double c[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) {
      const double p = x[i + l] * y[i + l];
      detail::neumaier_add(s[l], c[l], p);
    }
  }
  for (int l = 0; i < n; ++i, ++l) {
    const double p = x[i] * y[i];
    detail::neumaier_add(s[l], c[l], p);
  }
  return detail::merge_lanes(s, c);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double p = a * x[i];
    y[i] = y[i] + p;
  }
}

void truncate(const double* x, double limit, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = detail::abs_bits(x[i]) <= limit ? x[i] : 0.0;
  }
}

void gather_sum(const std::uint32_t* offsets, const std::uint32_t* members,
                const double* x, double* y, std::size_t rows) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::uint32_t k = offsets[r]; k < offsets[r + 1]; ++k) {
      acc = acc + x[members[k]];
    }
    y[r] = acc;
  }
}

void philox_blocks(PhiloxKey key, std::uint64_t rep, std::uint64_t first_block,
                   std::size_t blocks, std::uint32_t* out) {
  for (std::size_t b = 0; b < blocks; ++b) {
    detail::philox_block(key, rep, first_block + b, out + 4 * b);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::kScalar, &sum_leaf,   &dot_leaf,
                                 &axpy,        &truncate,   &gather_sum,
                                 &philox_blocks};
  return table;
}

}  // namespace selfnorm::simd
