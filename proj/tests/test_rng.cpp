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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "selfnorm/rng/philox.hpp"

using selfnorm::rng::PhiloxStream;

TEST_SUITE("rng") {

TEST_CASE("fill_uniform agrees with per-site draws from any starting site") {
  const PhiloxStream st(20260101);
  std::vector<double> block(103);
  for (std::uint64_t first : {0ull, 1ull, 2ull, 3ull, 5ull, 1000001ull}) {
    st.fill_uniform(17, first, block);
    for (std::size_t k = 0; k < block.size(); ++k)
      CHECK(block[k] == st.uniform(17, first + k));
  }
}

TEST_CASE("uniforms lie in [0, 1) and look uniform") {
  const PhiloxStream st(5);
  std::vector<double> u(200000);
  st.fill_uniform(0, 0, u);
  double mean = 0.0;
  for (double x : u) {
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    mean += x;
  }
  mean /= u.size();
  // 6 standard errors of the mean of U(0,1).
  CHECK(std::fabs(mean - 0.5) < 6.0 * std::sqrt(1.0 / 12.0 / u.size()));
}

TEST_CASE("replications and seeds give different streams") {
  const PhiloxStream a(1), b(2);
  CHECK(a.uniform(0, 0) != a.uniform(1, 0));
  CHECK(a.uniform(0, 0) != b.uniform(0, 0));
  CHECK(PhiloxStream(1).uniform(4, 9) == a.uniform(4, 9));
  CHECK(a.seed() == 1);
}

TEST_CASE("bits_to_unit edge values") {
  CHECK(selfnorm::rng::bits_to_unit(0) == 0.0);
  CHECK(selfnorm::rng::bits_to_unit(~0ull) == 1.0 - 0x1.0p-53);
}

}
