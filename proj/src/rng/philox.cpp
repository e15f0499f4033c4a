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

#include "selfnorm/rng/philox.hpp"

#include <array>
#include <vector>

namespace selfnorm::rng {

namespace {

constexpr std::size_t kChunkBlocks = 256;

std::uint64_t word_pair(const std::uint32_t* w) {
  return static_cast<std::uint64_t>(w[0]) |
         (static_cast<std::uint64_t>(w[1]) << 32);
}

}  // namespace

PhiloxStream::PhiloxStream(std::uint64_t seed)
    : seed_(seed),
      key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)} {}

void PhiloxStream::fill_uniform(std::uint64_t replication,
                                std::uint64_t first_site,
                                std::span<double> out) const {
  const simd::KernelTable& k = simd::active_kernels();
  std::array<std::uint32_t, 4 * kChunkBlocks> words;
  std::size_t done = 0;
  std::uint64_t site = first_site;
  while (done < out.size()) {
    const std::uint64_t block = site / 2;
    const std::size_t lead = static_cast<std::size_t>(site % 2);
    const std::size_t want = out.size() - done + lead;
    const std::size_t blocks = std::min(kChunkBlocks, (want + 1) / 2);
    k.philox_blocks(key_, replication, block, blocks, words.data());
    for (std::size_t s = lead; s < 2 * blocks && done < out.size(); ++s) {
      out[done++] = bits_to_unit(word_pair(words.data() + 2 * s));
    }
    site = 2 * (block + blocks);
  }
}

double PhiloxStream::uniform(std::uint64_t replication,
                             std::uint64_t site) const {
  double u = 0.0;
  fill_uniform(replication, site, std::span<double>(&u, 1));
  return u;
}

}  // namespace selfnorm::rng
