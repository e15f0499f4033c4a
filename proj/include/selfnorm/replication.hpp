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
#include <vector>

#include "selfnorm/models.hpp"
#include "selfnorm/parallel.hpp"
#include "selfnorm/rng/philox.hpp"
#include "selfnorm/statistics.hpp"

namespace selfnorm {

/// Per-worker scratch for the replication loop.
struct ReplicationContext {
  FieldWorkspace field;
  StatisticsWorkspace stats;
  std::vector<double> scratch;
  std::vector<double> scratch2;
};

/// What a replication loop samples and how it summarizes each draw.
struct ReplicationPlan {
  const FieldModel* model = nullptr;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  double sigma = 1.0;
  /// <= 0 skips the truncated system.
  double truncation_level = 0.0;
};

/// Visits every replication r in [0, R): visit(acc, summary, ctx, r) with
/// one accumulator per block. Block accumulators come back in block order.
template <typename BlockAcc, typename Visit>
std::vector<BlockAcc> replicate_blocks(const ReplicationPlan& plan,
                                       Visit&& visit) {
  const FieldModel& model = *plan.model;
  const rng::PhiloxStream stream(plan.seed);
  const unsigned workers = resolve_workers(plan.workers);
  std::vector<ReplicationContext> ctx(workers);
  return for_each_block<BlockAcc>(
      plan.replications, workers,
      [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
        BlockAcc acc{};
        ReplicationContext& c = ctx[w];
        for (std::uint64_t r = begin; r < end; ++r) {
          model.sample(stream, r, c.field);
          const RealizationSummary s =
              summarize(c.field.x, model.structure(), plan.sigma,
                        plan.truncation_level, c.stats);
          visit(acc, s, c, r);
        }
        return acc;
      });
}

/// One record per replication, stored at its replication index.
template <typename Record, typename Extract>
std::vector<Record> replicate(const ReplicationPlan& plan, Extract&& extract) {
  std::vector<Record> out(plan.replications);
  replicate_blocks<char>(
      plan, [&](char&, const RealizationSummary& s, ReplicationContext& c,
                std::uint64_t r) {
        out[r] = extract(s, c);
      });
  return out;
}

}  // namespace selfnorm
