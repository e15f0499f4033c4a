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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace selfnorm {

using Index = std::uint32_t;

struct Edge {
  Index u = 0;
  Index v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Finite index set J with the two neighborhood systems A_i (each X_i is
/// independent of everything outside A_i) and B_i (the block X_{A_i} is
/// independent of everything outside B_i). Immutable after construction.
///
/// A_i is stored as sorted CSR arrays together with the inverted index
/// j -> {i : j in A_i}; B_i is materialized on demand.
class DependenceStructure {
 public:
  /// Full box prod_k [0, dims[k]) in row-major order under the sup-metric,
  /// A_i = {j : |i - j| <= m}, B_i = {j : |i - j| <= 2m}, clipped to the box.
  static DependenceStructure lattice(std::vector<std::size_t> dims,
                                     std::size_t m);

  /// A_i = {i} plus the neighbours of i, B_i = union of A_j over j in A_i.
  static DependenceStructure graph(std::size_t n_vertices,
                                   std::span<const Edge> edges);

  /// Arbitrary neighborhoods; validates i in A_i, A_i subset B_i, range.
  static DependenceStructure from_neighborhoods(
      std::vector<std::vector<Index>> a, std::vector<std::vector<Index>> b);

  std::size_t size() const { return a_offsets_.size() - 1; }

  std::span<const Index> a_nbhd(Index i) const;
  std::vector<Index> b_nbhd(Index i) const;
  /// {i : j in A_i}
  std::span<const Index> a_users(Index j) const;

  /// N(A_i) = {j : A_i and A_j intersect}
  std::vector<Index> n_of_a(Index i) const;
  /// N(B_i) = {j : B_i and A_j intersect}
  std::vector<Index> n_of_b(Index i) const;

  bool is_lattice() const { return kind_ == Kind::kLattice; }
  bool is_graph() const { return kind_ == Kind::kGraph; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t lattice_m() const { return m_; }
  std::vector<std::size_t> coordinates(Index i) const;
  Index linear_index(std::span<const std::size_t> coords) const;
  /// Largest vertex degree (graphs only; 0 otherwise).
  std::size_t max_degree() const { return max_degree_; }

  // CSR view of A for the gather kernel.
  std::span<const std::uint32_t> a_offsets() const { return a_offsets_; }
  std::span<const std::uint32_t> a_members() const { return a_members_; }

 private:
  enum class Kind { kLattice, kGraph, kExplicit };

  DependenceStructure() = default;
  void build_inverse();
  void check_index(Index i) const;
  std::vector<Index> union_of_users(std::span<const Index> sites) const;

  Kind kind_ = Kind::kExplicit;
  std::vector<std::size_t> dims_;
  std::size_t m_ = 0;
  std::size_t max_degree_ = 0;
  std::vector<std::uint32_t> a_offsets_{0};
  std::vector<std::uint32_t> a_members_;
  std::vector<std::uint32_t> inv_offsets_{0};
  std::vector<std::uint32_t> inv_members_;
  // Explicit B for Kind::kExplicit only.
  std::vector<std::uint32_t> b_offsets_;
  std::vector<std::uint32_t> b_members_;
};

struct NeighborhoodStats {
  /// max_i max(|{j : B_i meets A_j}|, |{j : i in B_j}|)
  std::size_t kappa = 0;
  /// max_i |A_i|
  std::size_t kappa1 = 0;
  std::size_t size_j = 0;
};

/// Exact (least admissible) kappa. Lattices use the separable closed form,
/// everything else goes through neighborhood_stats_by_scan.
NeighborhoodStats neighborhood_stats(const DependenceStructure& s);

/// Generic route: scans every N(B_i) through the inverted index.
NeighborhoodStats neighborhood_stats_by_scan(const DependenceStructure& s);

struct EdgeList {
  std::size_t n_vertices = 0;
  std::vector<Edge> edges;
};

/// Whitespace-separated "u v" pairs, one per line; '#' starts a comment.
/// Without an explicit vertex count it is max id + 1. Throws
/// std::invalid_argument with the offending line number on bad input.
EdgeList parse_edge_list(std::istream& in,
                         std::optional<std::size_t> n_vertices = std::nullopt);
EdgeList read_edge_list(const std::filesystem::path& path,
                        std::optional<std::size_t> n_vertices = std::nullopt);

EdgeList cycle_graph(std::size_t n);
EdgeList path_graph(std::size_t n);
/// Edges {2k, 2k+1}; n must be even.
EdgeList perfect_matching(std::size_t n);

}  // namespace selfnorm
