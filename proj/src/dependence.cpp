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

#include "selfnorm/dependence.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace selfnorm {

namespace {

// Row-major enumeration of the clipped sup-metric ball around `center`.
template <typename Fn>
void for_each_in_ball(const std::vector<std::size_t>& dims,
                      const std::vector<std::size_t>& center,
                      std::size_t radius, Fn&& fn) {
  const std::size_t d = dims.size();
  std::vector<std::size_t> lo(d), hi(d), cur(d);
  for (std::size_t k = 0; k < d; ++k) {
    lo[k] = center[k] >= radius ? center[k] - radius : 0;
    hi[k] = std::min(dims[k] - 1, center[k] + radius);
    cur[k] = lo[k];
  }
  while (true) {
    std::size_t linear = 0;
    for (std::size_t k = 0; k < d; ++k) linear = linear * dims[k] + cur[k];
    fn(static_cast<Index>(linear));
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (cur[k] < hi[k]) {
        ++cur[k];
        break;
      }
      cur[k] = lo[k];
      if (k == 0) return;
    }
  }
}

void push_row(std::vector<std::uint32_t>& offsets,
              std::vector<std::uint32_t>& members,
              const std::vector<Index>& row) {
  members.insert(members.end(), row.begin(), row.end());
  if (members.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::length_error("neighborhood arrays exceed 2^32 entries");
  }
  offsets.push_back(static_cast<std::uint32_t>(members.size()));
}

}  // namespace

DependenceStructure DependenceStructure::lattice(std::vector<std::size_t> dims,
                                                 std::size_t m) {
  if (dims.empty()) throw std::invalid_argument("lattice: empty dims");
  std::size_t total = 1;
  for (std::size_t L : dims) {
    if (L == 0) throw std::invalid_argument("lattice: zero-length side");
    if (total > std::numeric_limits<Index>::max() / L) {
      throw std::invalid_argument("lattice: too many sites");
    }
    total *= L;
  }

  DependenceStructure s;
  s.kind_ = Kind::kLattice;
  s.dims_ = std::move(dims);
  s.m_ = m;
  s.a_offsets_.reserve(total + 1);
  std::vector<Index> row;
  for (std::size_t i = 0; i < total; ++i) {
    row.clear();
    for_each_in_ball(s.dims_, s.coordinates(static_cast<Index>(i)), m,
                     [&](Index j) { row.push_back(j); });
    push_row(s.a_offsets_, s.a_members_, row);
  }
  s.build_inverse();
  return s;
}

DependenceStructure DependenceStructure::graph(std::size_t n_vertices,
                                               std::span<const Edge> edges) {
  if (n_vertices == 0) throw std::invalid_argument("graph: no vertices");
  if (n_vertices > std::numeric_limits<Index>::max()) {
    throw std::invalid_argument("graph: too many vertices");
  }
  std::vector<std::vector<Index>> nbrs(n_vertices);
  for (const Edge& e : edges) {
    if (e.u >= n_vertices || e.v >= n_vertices) {
      throw std::invalid_argument("graph: vertex id out of range");
    }
    if (e.u == e.v) throw std::invalid_argument("graph: self-loop");
    nbrs[e.u].push_back(e.v);
    nbrs[e.v].push_back(e.u);
  }

  DependenceStructure s;
  s.kind_ = Kind::kGraph;
  s.a_offsets_.reserve(n_vertices + 1);
  for (std::size_t i = 0; i < n_vertices; ++i) {
    auto& row = nbrs[i];
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
      throw std::invalid_argument("graph: duplicate edge");
    }
    s.max_degree_ = std::max(s.max_degree_, row.size());
    row.insert(std::lower_bound(row.begin(), row.end(), static_cast<Index>(i)),
               static_cast<Index>(i));
    push_row(s.a_offsets_, s.a_members_, row);
  }
  s.build_inverse();
  return s;
}

DependenceStructure DependenceStructure::from_neighborhoods(
    std::vector<std::vector<Index>> a, std::vector<std::vector<Index>> b) {
  const std::size_t n = a.size();
  if (n == 0 || b.size() != n) {
    throw std::invalid_argument("from_neighborhoods: size mismatch or empty");
  }
  DependenceStructure s;
  s.kind_ = Kind::kExplicit;
  s.b_offsets_.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto* set : {&a[i], &b[i]}) {
      std::sort(set->begin(), set->end());
      set->erase(std::unique(set->begin(), set->end()), set->end());
      if (!set->empty() && set->back() >= n) {
        throw std::invalid_argument("from_neighborhoods: index out of range");
      }
    }
    if (!std::binary_search(a[i].begin(), a[i].end(), static_cast<Index>(i))) {
      throw std::invalid_argument("from_neighborhoods: i not in A_i");
    }
    if (!std::includes(b[i].begin(), b[i].end(), a[i].begin(), a[i].end())) {
      throw std::invalid_argument("from_neighborhoods: A_i not inside B_i");
    }
    push_row(s.a_offsets_, s.a_members_, a[i]);
    push_row(s.b_offsets_, s.b_members_, b[i]);
  }
  s.build_inverse();
  return s;
}

void DependenceStructure::build_inverse() {
  const std::size_t n = size();
  std::vector<std::uint32_t> counts(n + 1, 0);
  for (std::uint32_t j : a_members_) ++counts[j + 1];
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  inv_offsets_ = counts;
  inv_members_.assign(a_members_.size(), 0);
  std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
  // Rows are visited in increasing i, so each inverted list comes out sorted.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t k = a_offsets_[i]; k < a_offsets_[i + 1]; ++k) {
      inv_members_[cursor[a_members_[k]]++] = static_cast<std::uint32_t>(i);
    }
  }
}

void DependenceStructure::check_index(Index i) const {
  if (i >= size()) throw std::invalid_argument("index not in J");
}

std::span<const Index> DependenceStructure::a_nbhd(Index i) const {
  check_index(i);
  return {a_members_.data() + a_offsets_[i], a_offsets_[i + 1] - a_offsets_[i]};
}

std::span<const Index> DependenceStructure::a_users(Index j) const {
  check_index(j);
  return {inv_members_.data() + inv_offsets_[j],
          inv_offsets_[j + 1] - inv_offsets_[j]};
}

std::vector<Index> DependenceStructure::b_nbhd(Index i) const {
  check_index(i);
  std::vector<Index> out;
  switch (kind_) {
    case Kind::kLattice:
      for_each_in_ball(dims_, coordinates(i), 2 * m_,
                       [&](Index j) { out.push_back(j); });
      break;
    case Kind::kGraph:
      for (Index j : a_nbhd(i)) {
        const auto aj = a_nbhd(j);
        out.insert(out.end(), aj.begin(), aj.end());
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      break;
    case Kind::kExplicit:
      out.assign(b_members_.begin() + b_offsets_[i],
                 b_members_.begin() + b_offsets_[i + 1]);
      break;
  }
  return out;
}

std::vector<Index> DependenceStructure::union_of_users(
    std::span<const Index> sites) const {
  std::vector<Index> out;
  for (Index k : sites) {
    const auto users = a_users(k);
    out.insert(out.end(), users.begin(), users.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Index> DependenceStructure::n_of_a(Index i) const {
  return union_of_users(a_nbhd(i));
}

std::vector<Index> DependenceStructure::n_of_b(Index i) const {
  const std::vector<Index> b = b_nbhd(i);
  return union_of_users(b);
}

std::vector<std::size_t> DependenceStructure::coordinates(Index i) const {
  if (dims_.empty()) return {i};
  std::vector<std::size_t> c(dims_.size());
  std::size_t rest = i;
  for (std::size_t k = dims_.size(); k-- > 0;) {
    c[k] = rest % dims_[k];
    rest /= dims_[k];
  }
  return c;
}

Index DependenceStructure::linear_index(
    std::span<const std::size_t> coords) const {
  if (coords.size() != dims_.size()) {
    throw std::invalid_argument("linear_index: dimension mismatch");
  }
  std::size_t linear = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (coords[k] >= dims_[k]) {
      throw std::invalid_argument("linear_index: coordinate out of range");
    }
    linear = linear * dims_[k] + coords[k];
  }
  return static_cast<Index>(linear);
}

NeighborhoodStats neighborhood_stats(const DependenceStructure& s) {
  if (!s.is_lattice()) return neighborhood_stats_by_scan(s);
  // Sup-metric balls are products of intervals, so both cardinality
  // families factor over coordinates: |N(B_i)| per axis counts y with
  // |x - y| <= 3m and |{j : i in B_j}| counts y with |x - y| <= 2m.
  const std::size_t m = s.lattice_m();
  NeighborhoodStats st;
  std::size_t nb = 1, inb = 1, a = 1;
  st.size_j = 1;
  for (std::size_t L : s.dims()) {
    nb *= std::min(L, 6 * m + 1);
    inb *= std::min(L, 4 * m + 1);
    a *= std::min(L, 2 * m + 1);
    st.size_j *= L;
  }
  st.kappa = std::max(nb, inb);
  st.kappa1 = a;
  return st;
}

NeighborhoodStats neighborhood_stats_by_scan(const DependenceStructure& s) {
  const std::size_t n = s.size();
  NeighborhoodStats st;
  st.size_j = n;
  std::vector<std::size_t> in_b(n, 0);
  // Stamp array: mark[j] == i + 1 means j already counted for row i.
  std::vector<std::size_t> mark(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<Index>(i);
    st.kappa1 = std::max(st.kappa1, s.a_nbhd(idx).size());
    const std::vector<Index> b = s.b_nbhd(idx);
    std::size_t nb = 0;
    for (Index k : b) {
      ++in_b[k];
      for (Index j : s.a_users(k)) {
        if (mark[j] != i + 1) {
          mark[j] = i + 1;
          ++nb;
        }
      }
    }
    st.kappa = std::max(st.kappa, nb);
  }
  for (std::size_t c : in_b) st.kappa = std::max(st.kappa, c);
  return st;
}

EdgeList parse_edge_list(std::istream& in,
                         std::optional<std::size_t> n_vertices) {
  EdgeList out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_id = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    long long u = 0, v = 0;
    if (!(fields >> u)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": expected 'u v'");
    }
    std::string extra;
    if (!(fields >> v) || (fields >> extra) || u < 0 || v < 0 ||
        u > std::numeric_limits<Index>::max() ||
        v > std::numeric_limits<Index>::max()) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": expected two non-negative vertex ids");
    }
    out.edges.push_back({static_cast<Index>(u), static_cast<Index>(v)});
    max_id = std::max<std::size_t>(max_id, std::max(u, v));
    any = true;
  }
  out.n_vertices = n_vertices ? *n_vertices : (any ? max_id + 1 : 0);
  if (n_vertices && any && max_id >= *n_vertices) {
    throw std::invalid_argument("edge list: vertex id >= vertex count");
  }
  return out;
}

EdgeList read_edge_list(const std::filesystem::path& path,
                        std::optional<std::size_t> n_vertices) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open edge list " + path.string());
  }
  return parse_edge_list(in, n_vertices);
}

EdgeList cycle_graph(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cycle_graph: need n >= 3");
  EdgeList g{n, {}};
  for (std::size_t v = 0; v < n; ++v) {
    const auto a = static_cast<Index>(v);
    const auto b = static_cast<Index>((v + 1) % n);
    g.edges.push_back({std::min(a, b), std::max(a, b)});
  }
  return g;
}

EdgeList path_graph(std::size_t n) {
  if (n < 1) throw std::invalid_argument("path_graph: need n >= 1");
  EdgeList g{n, {}};
  for (std::size_t v = 0; v + 1 < n; ++v) {
    g.edges.push_back({static_cast<Index>(v), static_cast<Index>(v + 1)});
  }
  return g;
}

EdgeList perfect_matching(std::size_t n) {
  if (n == 0 || n % 2 != 0) {
    throw std::invalid_argument("perfect_matching: need even n > 0");
  }
  EdgeList g{n, {}};
  for (std::size_t v = 0; v < n; v += 2) {
    g.edges.push_back({static_cast<Index>(v), static_cast<Index>(v + 1)});
  }
  return g;
}

}  // namespace selfnorm
