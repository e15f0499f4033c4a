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

#include <cstdint>
#include <span>

#include "selfnorm/simd/kernels.hpp"

namespace selfnorm::rng {

/// Counter-based stream: the uniform at (seed, replication, site) is a pure
/// function of the triple, so replications can be generated in any order
/// on any number of threads. Site 2b and 2b+1 come from the two 64-bit
/// halves of Philox4x32-10 block b with counter (b, replication).
class PhiloxStream {
 public:
  explicit PhiloxStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Uniforms in [0, 1) with 53 random bits for sites
  /// [first_site, first_site + out.size()).
  void fill_uniform(std::uint64_t replication, std::uint64_t first_site,
                    std::span<double> out) const;

  double uniform(std::uint64_t replication, std::uint64_t site) const;

 private:
  std::uint64_t seed_;
  simd::PhiloxKey key_;
};

/// Maps 64 random bits to [0, 1).
inline double bits_to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace selfnorm::rng
