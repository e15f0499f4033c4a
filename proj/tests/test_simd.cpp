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

#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "selfnorm/simd/kernels.hpp"
#include "selfnorm/simd/lane_ops.hpp"

namespace sd = selfnorm::simd;

namespace {

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> wild_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (double& x : v) x = nd(gen) * std::exp(6.0 * nd(gen));
  return v;
}

const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 31, 64, 255, 1000, 4099};

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("Philox4x32-10 known answers") {
  std::uint32_t out[4];
  sd::detail::philox_block({0, 0}, 0, 0, out);
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  sd::detail::philox_block({0xffffffffu, 0xffffffffu}, ~0ull, ~0ull, out);
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  sd::detail::philox_block({0xa4093822u, 0x299f31d0u}, 0x0370734413198a2eull,
                           0x85a308d3243f6a88ull, out);
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("scalar philox_blocks matches the single-block routine") {
  const sd::PhiloxKey key{123, 456};
  std::vector<std::uint32_t> out(4 * 37);
  sd::scalar_kernels().philox_blocks(key, 9, 1000, 37, out.data());
  for (std::size_t b = 0; b < 37; ++b) {
    std::uint32_t ref[4];
    sd::detail::philox_block(key, 9, 1000 + b, ref);
    for (int w = 0; w < 4; ++w) CHECK(out[4 * b + w] == ref[w]);
  }
}

TEST_CASE("AVX2 kernels are bit-identical to scalar kernels") {
  if (!sd::avx2_supported()) {
    MESSAGE("AVX2 unavailable on this host; equivalence not exercised");
    return;
  }
  const sd::KernelTable& s = sd::scalar_kernels();
  const sd::KernelTable& v = sd::avx2_kernels();
  REQUIRE(v.isa == sd::Isa::kAvx2);

  for (std::size_t n : kLengths) {
    CAPTURE(n);
    const auto x = wild_values(n, 100 + n);
    const auto y = wild_values(n, 200 + n);

    const auto cs = s.sum_leaf(x.data(), n);
    const auto cv = v.sum_leaf(x.data(), n);
    CHECK(same_bits(cs.sum, cv.sum));
    CHECK(same_bits(cs.comp, cv.comp));

    const auto ds = s.dot_leaf(x.data(), y.data(), n);
    const auto dv = v.dot_leaf(x.data(), y.data(), n);
    CHECK(same_bits(ds.sum, dv.sum));
    CHECK(same_bits(ds.comp, dv.comp));

    std::vector<double> ys = y, yv = y;
    s.axpy(-0.37, x.data(), ys.data(), n);
    v.axpy(-0.37, x.data(), yv.data(), n);
    CHECK(same_bits(ys, yv));

    std::vector<double> ts(n), tv(n);
    s.truncate(x.data(), 1.5, ts.data(), n);
    v.truncate(x.data(), 1.5, tv.data(), n);
    CHECK(same_bits(ts, tv));

    std::vector<std::uint32_t> ps(4 * n), pv(4 * n);
    s.philox_blocks({7, 8}, 3, 5, n, ps.data());
    v.philox_blocks({7, 8}, 3, 5, n, pv.data());
    CHECK(ps == pv);

    // Random CSR with variable row lengths.
    std::mt19937 gen(static_cast<unsigned>(n) + 1);
    std::vector<std::uint32_t> off{0}, mem;
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t len = gen() % 12;
      for (std::size_t k = 0; k < len; ++k) mem.push_back(gen() % n);
      off.push_back(static_cast<std::uint32_t>(mem.size()));
    }
    std::vector<double> gs(n, 1.0), gv(n, 2.0);
    s.gather_sum(off.data(), mem.data(), x.data(), gs.data(), n);
    v.gather_sum(off.data(), mem.data(), x.data(), gv.data(), n);
    CHECK(same_bits(gs, gv));
  }
}

TEST_CASE("truncate keeps the boundary and zeroes beyond it") {
  const std::vector<double> x{-2.0, -1.0, 0.5, 1.0, 1.0000001, 3.0};
  std::vector<double> out(x.size());
  sd::scalar_kernels().truncate(x.data(), 1.0, out.data(), x.size());
  CHECK(out == std::vector<double>{0.0, -1.0, 0.5, 1.0, 0.0, 0.0});
}

TEST_CASE("gather_sum adds members left to right") {
  const std::vector<std::uint32_t> off{0, 2, 2, 5};
  const std::vector<std::uint32_t> mem{1, 2, 0, 1, 2};
  const std::vector<double> x{1.0, 10.0, 100.0};
  std::vector<double> y(3, -1.0);
  sd::scalar_kernels().gather_sum(off.data(), mem.data(), x.data(), y.data(), 3);
  CHECK(y == std::vector<double>{110.0, 0.0, 111.0});
}

TEST_CASE("active kernel selection can be forced to scalar") {
  const sd::Isa before = sd::active_isa();
  sd::set_active_isa(sd::Isa::kScalar);
  CHECK(sd::active_kernels().isa == sd::Isa::kScalar);
  CHECK(sd::isa_name(sd::Isa::kScalar).size() > 0);
  sd::set_active_isa(before);
  CHECK(sd::active_isa() == before);
}

}
