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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <stdexcept>
#include <utility>
#include <vector>

#include "selfnorm/dependence.hpp"
#include "selfnorm/innovations.hpp"
#include "selfnorm/rng/philox.hpp"

namespace selfnorm {

/// sigma^2 <= 0.
class DegenerateModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The exact route does not cover this model (continuous innovations
/// shared between sites, or more than kMaxEnumeratedInnovations of them).
class ExactMomentUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxEnumeratedInnovations = 30;

enum class FieldKind { kIid, kMovingAverage, kGraphEdgeSum };

std::string_view field_kind_name(FieldKind k);

/// One term w * eps_k of a site's linear representation.
struct WeightTerm {
  std::size_t innovation = 0;
  double weight = 0.0;
};

/// Per-thread scratch for sample().
struct FieldWorkspace {
  std::vector<double> innovations;
  std::vector<double> x;
};

/// Mean-zero random field on J built linearly from iid innovations:
///   iid             x_i = eps_i
///   moving_average  x_i = sum_{|k| <= r} c_k eps_{i+k}, innovations on the
///                   box grown by r on every side (m = 2r dependence)
///   graph_edge_sum  x_v = sum of eps_e over edges e at v
/// Immutable; sampling is a pure function of (seed, replication).
class FieldModel {
 public:
  static FieldModel iid(std::size_t n, InnovationSpec innovations);
  /// `coefficients` has (2r+1)^d entries in row-major order over the
  /// offset box [-r, r]^d; empty means all ones.
  static FieldModel moving_average(std::vector<std::size_t> dims,
                                   std::size_t radius,
                                   std::vector<double> coefficients,
                                   InnovationSpec innovations);
  static FieldModel graph_edge_sum(EdgeList graph, InnovationSpec innovations);

  FieldKind kind() const { return kind_; }
  const InnovationSpec& innovations() const { return innovations_; }
  const DependenceStructure& structure() const { return *structure_; }
  const NeighborhoodStats& stats() const { return stats_; }
  std::size_t size() const { return structure_->size(); }
  std::size_t innovation_count() const { return innovation_count_; }

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t radius() const { return radius_; }
  /// Lattice dependence range m (2r for moving averages, 0 for iid).
  std::size_t dependence_range() const;
  const std::vector<double>& coefficients() const { return coefficients_; }
  const EdgeList& graph() const { return graph_; }

  /// Nonzero terms of x_i in increasing innovation order.
  std::vector<WeightTerm> weights(Index i) const;

  /// x = L eps for an explicit innovation vector.
  void apply(std::span<const double> eps, std::span<double> x) const;

  /// Fills ws.innovations from the counter-based stream and ws.x with the
  /// field for `replication`.
  void sample(const rng::PhiloxStream& stream, std::uint64_t replication,
              FieldWorkspace& ws) const;

  std::string describe() const;

 private:
  FieldModel() = default;

  FieldKind kind_ = FieldKind::kIid;
  InnovationSpec innovations_;
  std::shared_ptr<const DependenceStructure> structure_;
  NeighborhoodStats stats_;
  std::size_t innovation_count_ = 0;
  std::vector<std::size_t> dims_;
  std::size_t radius_ = 0;
  std::vector<double> coefficients_;
  std::vector<std::size_t> dilated_dims_;
  EdgeList graph_;
  // vertex -> incident edge ids, CSR for the gather kernel
  std::vector<std::uint32_t> incidence_offsets_;
  std::vector<std::uint32_t> incidence_members_;
};

/// sigma^2 = sum_i sum_{j in A_i} E{X_i X_j} in closed form (coefficient
/// autocorrelation, shared-edge counts). Throws DegenerateModel when <= 0.
double exact_sigma2(const FieldModel& model);

/// Joint moments of a truncated pair.
struct PairMoments {
  double product = 0.0;      // E{Xbar_i Xbar_j}
  double abs_product = 0.0;  // E|Xbar_i Xbar_j|
};

/// Exact moment evaluator with caching. The law of x_i (and of a pair)
/// depends only on the multiset of its innovation weights, so results are
/// memoized by that signature; translation-invariant models therefore cost
/// one evaluation per distinct offset. Thread-safe.
class MomentEngine {
 public:
  explicit MomentEngine(const FieldModel& model);

  /// True when every site and every pair (i, j in A_i) is covered exactly.
  bool exact_available() const { return exact_available_; }

  /// E{|X_i|^p 1(|X_i| <= t)}; nullopt t means the full moment.
  double abs_moment(Index i, int p, std::optional<double> t) const;
  /// E{|X_i|^p 1(|X_i| > t)}
  double abs_tail_moment(Index i, int p, double t) const;
  /// E{Xbar_i Xbar_j}, E|Xbar_i Xbar_j| with Xbar = X 1(|X| <= t).
  PairMoments truncated_pair(Index i, Index j, double t) const;

 private:
  struct Atom {
    double x = 0.0;
    double prob = 0.0;
  };
  struct PairAtom {
    double xi = 0.0;
    double xj = 0.0;
    double prob = 0.0;
  };
  using MarginalKey = std::vector<double>;
  using PairKey = std::vector<std::pair<double, double>>;

  const std::vector<Atom>& marginal_atoms(const std::vector<WeightTerm>& w) const;
  const std::vector<PairAtom>& pair_atoms(const PairKey& key) const;

  const FieldModel& model_;
  bool exact_available_ = false;
  mutable std::mutex mutex_;
  mutable std::map<MarginalKey, std::vector<Atom>> marginal_cache_;
  mutable std::map<PairKey, std::vector<PairAtom>> pair_cache_;
};

/// Convenience wrappers around a throwaway MomentEngine.
double exact_abs_moment(const FieldModel& model, Index i, int p,
                        std::optional<double> truncation_level);
double exact_abs_tail_moment(const FieldModel& model, Index i, int p,
                             double truncation_level);

}  // namespace selfnorm
