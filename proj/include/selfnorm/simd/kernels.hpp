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
#include <string_view>

// Data-parallel inner loops of the simulator. Every kernel has a scalar
// reference and an AVX2 variant; the two perform the same floating-point
// operations in the same order and therefore agree bit for bit, which the
// equivalence tests assert. The active variant is chosen once at startup
// from CPUID and may be pinned with SELFNORM_ISA=scalar|avx2.

namespace selfnorm::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

/// Partial sum carried with a Neumaier compensation term.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  double value() const { return sum + comp; }
};

/// Merges two partial sums, keeping the rounding error of the merge.
CompensatedSum combine(const CompensatedSum& a, const CompensatedSum& b);

struct PhiloxKey {
  std::uint32_t k0 = 0;
  std::uint32_t k1 = 0;
};

struct KernelTable {
  Isa isa;
  // Leaf of the pairwise summation tree: four interleaved Neumaier lanes
  // merged as (l0 + l1) + (l2 + l3).
  CompensatedSum (*sum_leaf)(const double* x, std::size_t n);
  // Same as sum_leaf over the products x[i] * y[i].
  CompensatedSum (*dot_leaf)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out[i] = |x[i]| <= limit ? x[i] : 0
  void (*truncate)(const double* x, double limit, double* out, std::size_t n);
  // y[r] = sum of x[members[k]] for k in [offsets[r], offsets[r+1]), added
  // left to right starting from 0.
  void (*gather_sum)(const std::uint32_t* offsets, const std::uint32_t* members,
                     const double* x, double* y, std::size_t rows);
  // Philox4x32-10 output words for counters (first_block + b, rep); word w
  // of block b lands in out[4 * b + w].
  void (*philox_blocks)(PhiloxKey key, std::uint64_t rep,
                        std::uint64_t first_block, std::size_t blocks,
                        std::uint32_t* out);
};

const KernelTable& scalar_kernels();
/// Only valid to call through when avx2_supported() is true.
const KernelTable& avx2_kernels();

bool avx2_supported();

/// Kernel table in use by the library.
const KernelTable& active_kernels();
Isa active_isa();
/// Pins the variant used by active_kernels(). Requesting AVX2 on a machine
/// without it throws std::runtime_error.
void set_active_isa(Isa isa);

}  // namespace selfnorm::simd
