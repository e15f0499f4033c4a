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

// Single-lane building blocks shared by the scalar kernels and the scalar
// tails of the vector kernels, so both paths round identically.

#include <cstdint>

#include "selfnorm/simd/kernels.hpp"

namespace selfnorm::simd::detail {

static inline double abs_bits(double x) { return x < 0.0 ? -x : (x == 0.0 ? 0.0 : x); }

static inline void neumaier_add(double& s, double& c, double x) {
  const double t = s + x;
  const bool keep = abs_bits(s) >= abs_bits(x);
  const double big = keep ? s : x;
  const double small = keep ? x : s;
  c = c + ((big - t) + small);
  s = t;
}

static inline CompensatedSum merge_lanes(const double* s, const double* c) {
  const CompensatedSum a = combine({s[0], c[0]}, {s[1], c[1]});
  const CompensatedSum b = combine({s[2], c[2]}, {s[3], c[3]});
  return combine(a, b);
}

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;
constexpr int kPhiloxRounds = 10;

static inline void philox_block(PhiloxKey key, std::uint64_t rep, std::uint64_t block,
                         std::uint32_t* out) {
  std::uint32_t c0 = static_cast<std::uint32_t>(block);
  std::uint32_t c1 = static_cast<std::uint32_t>(block >> 32);
  std::uint32_t c2 = static_cast<std::uint32_t>(rep);
  std::uint32_t c3 = static_cast<std::uint32_t>(rep >> 32);
  std::uint32_t k0 = key.k0;
  std::uint32_t k1 = key.k1;
  for (int round = 0; round < kPhiloxRounds; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  out[0] = c0;
  out[1] = c1;
  out[2] = c2;
  out[3] = c3;
}

}  // namespace selfnorm::simd::detail
