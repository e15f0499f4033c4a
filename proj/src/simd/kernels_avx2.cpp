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

// Compiled with -mavx2. Nothing in here may be reached unless the CPU
// reports AVX2; dispatch.cpp owns that check.

#include "selfnorm/simd/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

#include "selfnorm/simd/lane_ops.hpp"

namespace selfnorm::simd {

namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline void neumaier_add(__m256d& s, __m256d& c, __m256d x) {
  const __m256d t = _mm256_add_pd(s, x);
  const __m256d keep = _mm256_cmp_pd(abs_pd(s), abs_pd(x), _CMP_GE_OQ);
  const __m256d big = _mm256_blendv_pd(x, s, keep);
  const __m256d small = _mm256_blendv_pd(s, x, keep);
  c = _mm256_add_pd(c, _mm256_add_pd(_mm256_sub_pd(big, t), small));
  s = t;
}

CompensatedSum sum_leaf(const double* x, std::size_t n) {
  __m256d vs = _mm256_setzero_pd();
  __m256d vc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) neumaier_add(vs, vc, _mm256_loadu_pd(x + i));
  alignas(32) double s[4];
  alignas(32) double c[4];
  _mm256_store_pd(s, vs);
  _mm256_store_pd(c, vc);
  for (int l = 0; i < n; ++i, ++l) detail::neumaier_add(s[l], c[l], x[i]);
  return detail::merge_lanes(s, c);
}

CompensatedSum dot_leaf(const double* x, const double* y, std::size_t n) {
  __m256d vs = _mm256_setzero_pd();
  __m256d vc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p =
        _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    neumaier_add(vs, vc, p);
  }
  alignas(32) double s[4];
  alignas(32) double c[4];
  _mm256_store_pd(s, vs);
  _mm256_store_pd(c, vc);
  for (int l = 0; i < n; ++i, ++l) {
    const double p = x[i] * y[i];
    detail::neumaier_add(s[l], c[l], p);
  }
  return detail::merge_lanes(s, c);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), p));
  }
  for (; i < n; ++i) {
    const double p = a * x[i];
    y[i] = y[i] + p;
  }
}

void truncate(const double* x, double limit, double* out, std::size_t n) {
  const __m256d vlim = _mm256_set1_pd(limit);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d keep = _mm256_cmp_pd(abs_pd(v), vlim, _CMP_LE_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(keep, v));
  }
  for (; i < n; ++i) out[i] = detail::abs_bits(x[i]) <= limit ? x[i] : 0.0;
}

void gather_rows_scalar(const std::uint32_t* offsets,
                        const std::uint32_t* members, const double* x,
                        double* y, std::size_t r) {
  double acc = 0.0;
  for (std::uint32_t k = offsets[r]; k < offsets[r + 1]; ++k) {
    acc = acc + x[members[k]];
  }
  y[r] = acc;
}

// Four rows at a time whenever they have equal length (the common case on
// lattices away from the boundary and on regular graphs).
void gather_sum(const std::uint32_t* offsets, const std::uint32_t* members,
                const double* x, double* y, std::size_t rows) {
  std::size_t r = 0;
  while (r + 4 <= rows) {
    const std::uint32_t len = offsets[r + 1] - offsets[r];
    if (offsets[r + 2] - offsets[r + 1] != len ||
        offsets[r + 3] - offsets[r + 2] != len ||
        offsets[r + 4] - offsets[r + 3] != len) {
      gather_rows_scalar(offsets, members, x, y, r);
      ++r;
      continue;
    }
    const std::uint32_t* m0 = members + offsets[r];
    const std::uint32_t* m1 = members + offsets[r + 1];
    const std::uint32_t* m2 = members + offsets[r + 2];
    const std::uint32_t* m3 = members + offsets[r + 3];
    __m256d acc = _mm256_setzero_pd();
    for (std::uint32_t k = 0; k < len; ++k) {
      const __m128i idx = _mm_setr_epi32(static_cast<int>(m0[k]),
                                         static_cast<int>(m1[k]),
                                         static_cast<int>(m2[k]),
                                         static_cast<int>(m3[k]));
      acc = _mm256_add_pd(acc, _mm256_i32gather_pd(x, idx, 8));
    }
    _mm256_storeu_pd(y + r, acc);
    r += 4;
  }
  for (; r < rows; ++r) gather_rows_scalar(offsets, members, x, y, r);
}

inline void mulhilo(__m256i a, __m256i m, __m256i& lo, __m256i& hi) {
  const __m256i even = _mm256_mul_epu32(a, m);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), m);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

// Eight Philox blocks per iteration in structure-of-arrays form.
void philox_blocks(PhiloxKey key, std::uint64_t rep, std::uint64_t first_block,
                   std::size_t blocks, std::uint32_t* out) {
  const __m256i m0 = _mm256_set1_epi32(static_cast<int>(detail::kPhiloxM0));
  const __m256i m1 = _mm256_set1_epi32(static_cast<int>(detail::kPhiloxM1));
  const __m256i rep_lo = _mm256_set1_epi32(static_cast<int>(rep));
  const __m256i rep_hi = _mm256_set1_epi32(static_cast<int>(rep >> 32));
  std::size_t b = 0;
  for (; b + 8 <= blocks; b += 8) {
    alignas(32) std::uint32_t lo_words[8];
    alignas(32) std::uint32_t hi_words[8];
    for (int l = 0; l < 8; ++l) {
      const std::uint64_t block = first_block + b + static_cast<unsigned>(l);
      lo_words[l] = static_cast<std::uint32_t>(block);
      hi_words[l] = static_cast<std::uint32_t>(block >> 32);
    }
    __m256i c0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo_words));
    __m256i c1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi_words));
    __m256i c2 = rep_lo;
    __m256i c3 = rep_hi;
    std::uint32_t k0 = key.k0;
    std::uint32_t k1 = key.k1;
    for (int round = 0; round < detail::kPhiloxRounds; ++round) {
      __m256i lo0, hi0, lo1, hi1;
      mulhilo(c0, m0, lo0, hi0);
      mulhilo(c2, m1, lo1, hi1);
      const __m256i vk0 = _mm256_set1_epi32(static_cast<int>(k0));
      const __m256i vk1 = _mm256_set1_epi32(static_cast<int>(k1));
      c0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), vk0);
      c1 = lo1;
      c2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), vk1);
      c3 = lo0;
      k0 += detail::kPhiloxW0;
      k1 += detail::kPhiloxW1;
    }
    alignas(32) std::uint32_t w[4][8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[0]), c0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[1]), c1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[2]), c2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(w[3]), c3);
    std::uint32_t* dst = out + 4 * b;
    for (int l = 0; l < 8; ++l) {
      dst[4 * l + 0] = w[0][l];
      dst[4 * l + 1] = w[1][l];
      dst[4 * l + 2] = w[2][l];
      dst[4 * l + 3] = w[3][l];
    }
  }
  for (; b < blocks; ++b) {
    detail::philox_block(key, rep, first_block + b, out + 4 * b);
  }
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::kAvx2, &sum_leaf,   &dot_leaf,
                                 &axpy,      &truncate,   &gather_sum,
                                 &philox_blocks};
  return table;
}

}  // namespace selfnorm::simd

#else  // !__AVX2__

namespace selfnorm::simd {

// Non-x86 builds: avx2_supported() is false, so this is never selected.
const KernelTable& avx2_kernels() { return scalar_kernels(); }

}  // namespace selfnorm::simd

#endif
