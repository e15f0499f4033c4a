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

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <atomic>
#include <vector>

namespace selfnorm {

/// Replications are processed in fixed blocks of this size. Block results
/// are kept in block order, so any reduction over them is independent of
/// how blocks were scheduled onto workers.
inline constexpr std::uint64_t kReplicationBlock = 4096;

/// 0 means "decide": SELFNORM_WORKERS if set, else the hardware count.
unsigned resolve_workers(unsigned requested);

/// Calls fn(worker, begin, end) for every block of [0, replications) on
/// `workers` threads and returns the per-block results in block order.
template <typename BlockResult, typename Fn>
std::vector<BlockResult> for_each_block(std::uint64_t replications,
                                        unsigned workers, Fn&& fn) {
  const std::uint64_t blocks =
      (replications + kReplicationBlock - 1) / kReplicationBlock;
  std::vector<BlockResult> out(blocks);
  workers = static_cast<unsigned>(
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, blocks)));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&](unsigned worker) {
    try {
      for (std::uint64_t b = next++; b < blocks; b = next++) {
        const std::uint64_t begin = b * kReplicationBlock;
        const std::uint64_t end =
            std::min(replications, begin + kReplicationBlock);
        out[b] = fn(worker, begin, end);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next = blocks;
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace selfnorm
