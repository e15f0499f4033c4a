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

#include "selfnorm/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "selfnorm/simd/kernels.hpp"

namespace selfnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxAtoms = std::size_t{1} << 24;

std::size_t product_of(const std::vector<std::size_t>& v) {
  return std::accumulate(v.begin(), v.end(), std::size_t{1},
                         std::multiplies<>());
}

// Row-major odometer over prod [0, ext[k]).
bool advance(std::vector<std::size_t>& cur,
             const std::vector<std::size_t>& ext) {
  for (std::size_t k = cur.size(); k-- > 0;) {
    if (++cur[k] < ext[k]) return true;
    cur[k] = 0;
  }
  return false;
}

std::size_t linear(const std::vector<std::size_t>& c,
                   const std::vector<std::size_t>& dims) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + c[k];
  return idx;
}

}  // namespace

std::string_view field_kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::kIid: return "iid";
    case FieldKind::kMovingAverage: return "moving_average";
    case FieldKind::kGraphEdgeSum: return "graph_edge_sum";
  }
  return "unknown";
}

FieldModel FieldModel::iid(std::size_t n, InnovationSpec innovations) {
  innovations.validate();
  if (n == 0) throw std::invalid_argument("iid: n must be positive");
  FieldModel m;
  m.kind_ = FieldKind::kIid;
  m.innovations_ = innovations;
  m.dims_ = {n};
  m.structure_ = std::make_shared<const DependenceStructure>(
      DependenceStructure::lattice({n}, 0));
  m.stats_ = neighborhood_stats(*m.structure_);
  m.innovation_count_ = n;
  return m;
}

FieldModel FieldModel::moving_average(std::vector<std::size_t> dims,
                                      std::size_t radius,
                                      std::vector<double> coefficients,
                                      InnovationSpec innovations) {
  innovations.validate();
  if (dims.empty()) throw std::invalid_argument("moving_average: empty dims");
  std::size_t window = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) window *= 2 * radius + 1;
  if (coefficients.empty()) coefficients.assign(window, 1.0);
  if (coefficients.size() != window) {
    throw std::invalid_argument("moving_average: expected (2r+1)^d coefficients");
  }
  for (double c : coefficients) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("moving_average: non-finite coefficient");
    }
  }
  FieldModel m;
  m.kind_ = FieldKind::kMovingAverage;
  m.innovations_ = innovations;
  m.dims_ = dims;
  m.radius_ = radius;
  m.coefficients_ = std::move(coefficients);
  m.structure_ = std::make_shared<const DependenceStructure>(
      DependenceStructure::lattice(dims, 2 * radius));
  m.stats_ = neighborhood_stats(*m.structure_);
  m.dilated_dims_ = dims;
  for (auto& L : m.dilated_dims_) L += 2 * radius;
  m.innovation_count_ = product_of(m.dilated_dims_);
  return m;
}

FieldModel FieldModel::graph_edge_sum(EdgeList graph,
                                      InnovationSpec innovations) {
  innovations.validate();
  FieldModel m;
  m.kind_ = FieldKind::kGraphEdgeSum;
  m.innovations_ = innovations;
  m.structure_ = std::make_shared<const DependenceStructure>(
      DependenceStructure::graph(graph.n_vertices, graph.edges));
  m.stats_ = neighborhood_stats(*m.structure_);
  m.innovation_count_ = graph.edges.size();

  const std::size_t n = graph.n_vertices;
  std::vector<std::uint32_t> counts(n + 1, 0);
  for (const Edge& e : graph.edges) {
    ++counts[e.u + 1];
    ++counts[e.v + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  m.incidence_offsets_ = counts;
  m.incidence_members_.assign(counts.back(), 0);
  std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t id = 0; id < graph.edges.size(); ++id) {
    const Edge& e = graph.edges[id];
    m.incidence_members_[cursor[e.u]++] = static_cast<std::uint32_t>(id);
    m.incidence_members_[cursor[e.v]++] = static_cast<std::uint32_t>(id);
  }
  m.graph_ = std::move(graph);
  return m;
}

std::size_t FieldModel::dependence_range() const {
  return kind_ == FieldKind::kMovingAverage ? 2 * radius_ : 0;
}

std::vector<WeightTerm> FieldModel::weights(Index i) const {
  if (i >= size()) throw std::invalid_argument("weights: index not in J");
  std::vector<WeightTerm> out;
  switch (kind_) {
    case FieldKind::kIid:
      out.push_back({i, 1.0});
      break;
    case FieldKind::kMovingAverage: {
      const std::vector<std::size_t> c = structure_->coordinates(i);
      const std::size_t d = dims_.size();
      std::vector<std::size_t> off(d, 0), ext(d, 2 * radius_ + 1), pos(d);
      std::size_t q = 0;
      do {
        if (coefficients_[q] != 0.0) {
          for (std::size_t k = 0; k < d; ++k) pos[k] = c[k] + off[k];
          out.push_back({linear(pos, dilated_dims_), coefficients_[q]});
        }
        ++q;
      } while (advance(off, ext));
      break;
    }
    case FieldKind::kGraphEdgeSum:
      for (std::uint32_t k = incidence_offsets_[i];
           k < incidence_offsets_[i + 1]; ++k) {
        out.push_back({incidence_members_[k], 1.0});
      }
      break;
  }
  return out;
}

void FieldModel::apply(std::span<const double> eps, std::span<double> x) const {
  if (eps.size() != innovation_count_ || x.size() != size()) {
    throw std::invalid_argument("apply: buffer size mismatch");
  }
  const simd::KernelTable& k = simd::active_kernels();
  switch (kind_) {
    case FieldKind::kIid:
      std::copy(eps.begin(), eps.end(), x.begin());
      break;
    case FieldKind::kMovingAverage: {
      std::fill(x.begin(), x.end(), 0.0);
      const std::size_t d = dims_.size();
      const std::size_t row_len = dims_[d - 1];
      const std::size_t rows = size() / row_len;
      std::vector<std::size_t> outer(dims_.begin(), dims_.end() - 1);
      std::vector<std::size_t> row(d - 1, 0), off(d, 0), pos(d);
      const std::vector<std::size_t> ext(d, 2 * radius_ + 1);
      for (std::size_t r = 0; r < rows; ++r) {
        std::fill(off.begin(), off.end(), 0);
        std::size_t q = 0;
        do {
          if (coefficients_[q] != 0.0) {
            for (std::size_t j = 0; j + 1 < d; ++j) pos[j] = row[j] + off[j];
            pos[d - 1] = off[d - 1];
            k.axpy(coefficients_[q], eps.data() + linear(pos, dilated_dims_),
                   x.data() + r * row_len, row_len);
          }
          ++q;
        } while (advance(off, ext));
        if (d > 1) advance(row, outer);
      }
      break;
    }
    case FieldKind::kGraphEdgeSum:
      k.gather_sum(incidence_offsets_.data(), incidence_members_.data(),
                   eps.data(), x.data(), size());
      break;
  }
}

void FieldModel::sample(const rng::PhiloxStream& stream,
                        std::uint64_t replication, FieldWorkspace& ws) const {
  ws.innovations.resize(innovation_count_);
  ws.x.resize(size());
  stream.fill_uniform(replication, 0, ws.innovations);
  auto& eps = ws.innovations;
  const double s = innovations_.scale;
  switch (innovations_.family) {
    case Family::kRademacher:
      for (double& e : eps) e = e < 0.5 ? -s : s;
      break;
    case Family::kUniformCentered:
      for (double& e : eps) e = s * (2.0 * e - 1.0);
      break;
    default:
      for (double& e : eps) e = innovations_.from_uniform(e);
      break;
  }
  apply(eps, ws.x);
}

std::string FieldModel::describe() const {
  std::ostringstream os;
  os << field_kind_name(kind_) << " n=" << size();
  if (kind_ == FieldKind::kMovingAverage) {
    os << " dims=[";
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      os << (k ? "," : "") << dims_[k];
    }
    os << "] r=" << radius_;
  }
  if (kind_ == FieldKind::kGraphEdgeSum) {
    os << " edges=" << graph_.edges.size() << " dmax="
       << structure_->max_degree();
  }
  os << " " << innovations_.describe();
  return os.str();
}

double exact_sigma2(const FieldModel& model) {
  const double var = model.innovations().variance();
  const DependenceStructure& s = model.structure();
  double sigma2 = 0.0;
  switch (model.kind()) {
    case FieldKind::kIid:
      sigma2 = var * static_cast<double>(model.size());
      break;
    case FieldKind::kGraphEdgeSum:
      // E X_v^2 = deg(v) var, E X_u X_v = var per shared edge.
      sigma2 = var * 4.0 * static_cast<double>(model.graph().edges.size());
      break;
    case FieldKind::kMovingAverage: {
      const auto& c = model.coefficients();
      const std::size_t d = model.dims().size();
      const std::size_t r = model.radius();
      const std::size_t w = 2 * r + 1;
      const std::size_t span_w = 4 * r + 1;
      // rho(delta) = sum_q c_q c_{q + delta}, delta in [-2r, 2r]^d.
      std::vector<std::size_t> wext(d, w), sext(d, span_w);
      std::vector<double> rho(product_of(sext), 0.0);
      std::vector<std::size_t> q(d, 0), q2(d, 0), del(d);
      do {
        std::fill(q2.begin(), q2.end(), 0);
        do {
          for (std::size_t k = 0; k < d; ++k) del[k] = q2[k] + 2 * r - q[k];
          rho[linear(del, sext)] += c[linear(q, wext)] * c[linear(q2, wext)];
        } while (advance(q2, wext));
      } while (advance(q, wext));

      std::vector<double> terms;
      terms.reserve(s.size());
      for (Index i = 0; i < s.size(); ++i) {
        const auto ci = s.coordinates(i);
        double row = 0.0;
        for (Index j : s.a_nbhd(i)) {
          const auto cj = s.coordinates(j);
          for (std::size_t k = 0; k < d; ++k) del[k] = cj[k] + 2 * r - ci[k];
          row += rho[linear(del, sext)];
        }
        terms.push_back(row);
      }
      double total = 0.0;
      for (double t : terms) total += t;
      sigma2 = var * total;
      break;
    }
  }
  if (!(sigma2 > 0.0)) {
    throw DegenerateModel("sigma^2 = " + std::to_string(sigma2) + " <= 0");
  }
  return sigma2;
}

// --- MomentEngine ----------------------------------------------------------

namespace {

// Groups identical weight tuples; each group of c iid two-point innovations
// contributes weight * (h v_hi + (c - h) v_lo) with h ~ Binomial(c, p_hi).
template <std::size_t D>
struct WeightGroup {
  std::array<double, D> w{};
  std::size_t count = 0;
};

template <std::size_t D, typename Emit>
void enumerate_groups(const std::vector<WeightGroup<D>>& groups,
                      const DiscreteLaw& law, Emit&& emit) {
  std::size_t total = 1;
  for (const auto& g : groups) {
    total *= g.count + 1;
    if (total > kMaxAtoms) {
      throw ExactMomentUnavailable("discrete enumeration too large");
    }
  }
  // Per-group tables of (probability, contribution per coordinate).
  struct Outcome {
    double prob;
    std::array<double, D> value;
  };
  std::vector<std::vector<Outcome>> tables;
  const double p_lo = law.prob[0];
  const double p_hi = law.prob[1];
  for (const auto& g : groups) {
    std::vector<Outcome> t;
    const std::size_t c = g.count;
    double binom = 1.0;
    for (std::size_t h = 0; h <= c; ++h) {
      if (h > 0) binom = binom * static_cast<double>(c - h + 1) / h;
      Outcome o;
      o.prob = binom * std::pow(p_hi, static_cast<double>(h)) *
               std::pow(p_lo, static_cast<double>(c - h));
      const double base = static_cast<double>(h) * law.value[1] +
                          static_cast<double>(c - h) * law.value[0];
      for (std::size_t k = 0; k < D; ++k) o.value[k] = g.w[k] * base;
      t.push_back(o);
    }
    tables.push_back(std::move(t));
  }
  std::vector<std::size_t> cur(groups.size(), 0), ext(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) ext[g] = tables[g].size();
  do {
    double prob = 1.0;
    std::array<double, D> value{};
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const Outcome& o = tables[g][cur[g]];
      prob *= o.prob;
      for (std::size_t k = 0; k < D; ++k) value[k] += o.value[k];
    }
    emit(value, prob);
  } while (!groups.empty() && advance(cur, ext));
}

}  // namespace

MomentEngine::MomentEngine(const FieldModel& model) : model_(model) {
  const std::size_t n = model.size();
  std::size_t max_terms = 0;
  for (Index i = 0; i < n; ++i) {
    max_terms = std::max(max_terms, model.weights(i).size());
  }
  if (!model.innovations().is_discrete()) {
    exact_available_ = max_terms <= 1;
  } else if (2 * max_terms <= kMaxEnumeratedInnovations) {
    exact_available_ = true;
  } else {
    exact_available_ = true;
    for (Index i = 0; i < n && exact_available_; ++i) {
      const auto wi = model.weights(i);
      for (Index j : model.structure().a_nbhd(i)) {
        const auto wj = model.weights(j);
        std::vector<std::size_t> ids;
        for (const auto& t : wi) ids.push_back(t.innovation);
        for (const auto& t : wj) ids.push_back(t.innovation);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        if (ids.size() > kMaxEnumeratedInnovations) {
          exact_available_ = false;
          break;
        }
      }
    }
  }
}

const std::vector<MomentEngine::Atom>& MomentEngine::marginal_atoms(
    const std::vector<WeightTerm>& w) const {
  if (w.size() > kMaxEnumeratedInnovations) {
    throw ExactMomentUnavailable("more than 30 contributing innovations");
  }
  MarginalKey key;
  for (const auto& t : w) key.push_back(t.weight);
  std::sort(key.begin(), key.end());
  std::lock_guard<std::mutex> lock(mutex_);
  if (auto it = marginal_cache_.find(key); it != marginal_cache_.end()) {
    return it->second;
  }
  std::vector<WeightGroup<1>> groups;
  for (double v : key) {
    if (!groups.empty() && groups.back().w[0] == v) {
      ++groups.back().count;
    } else {
      groups.push_back({{v}, 1});
    }
  }
  std::vector<Atom> atoms;
  enumerate_groups<1>(groups, model_.innovations().discrete_law(),
                      [&](const std::array<double, 1>& v, double p) {
                        atoms.push_back({v[0], p});
                      });
  return marginal_cache_.emplace(std::move(key), std::move(atoms))
      .first->second;
}

const std::vector<MomentEngine::PairAtom>& MomentEngine::pair_atoms(
    const PairKey& key) const {
  if (key.size() > kMaxEnumeratedInnovations) {
    throw ExactMomentUnavailable("more than 30 shared innovations");
  }
  std::lock_guard<std::mutex> lock(mutex_);
  if (auto it = pair_cache_.find(key); it != pair_cache_.end()) {
    return it->second;
  }
  std::vector<WeightGroup<2>> groups;
  for (const auto& [a, b] : key) {
    if (!groups.empty() && groups.back().w[0] == a && groups.back().w[1] == b) {
      ++groups.back().count;
    } else {
      groups.push_back({{a, b}, 1});
    }
  }
  std::vector<PairAtom> atoms;
  enumerate_groups<2>(groups, model_.innovations().discrete_law(),
                      [&](const std::array<double, 2>& v, double p) {
                        atoms.push_back({v[0], v[1], p});
                      });
  return pair_cache_.emplace(key, std::move(atoms)).first->second;
}

double MomentEngine::abs_moment(Index i, int p, std::optional<double> t) const {
  const InnovationSpec& spec = model_.innovations();
  const double level = t.value_or(kInf);
  if (!t && !spec.has_moment(p)) {
    throw UnsupportedMoment("moment of order " + std::to_string(p) +
                            " is infinite");
  }
  const auto w = model_.weights(i);
  if (w.empty()) return (p == 0 && level >= 0.0) ? 1.0 : 0.0;
  if (!spec.is_discrete()) {
    if (w.size() > 1) {
      throw ExactMomentUnavailable(
          "continuous innovations shared by several terms");
    }
    const double a = std::fabs(w[0].weight);
    return std::pow(a, p) * spec.truncated_abs_moment(p, level / a);
  }
  double total = 0.0;
  for (const Atom& atom : marginal_atoms(w)) {
    const double ax = std::fabs(atom.x);
    if (ax <= level) total += atom.prob * std::pow(ax, p);
  }
  return total;
}

double MomentEngine::abs_tail_moment(Index i, int p, double t) const {
  const InnovationSpec& spec = model_.innovations();
  if (!spec.has_moment(p)) {
    throw UnsupportedMoment("moment of order " + std::to_string(p) +
                            " is infinite");
  }
  const auto w = model_.weights(i);
  if (w.empty()) return 0.0;
  if (!spec.is_discrete()) {
    if (w.size() > 1) {
      throw ExactMomentUnavailable(
          "continuous innovations shared by several terms");
    }
    const double a = std::fabs(w[0].weight);
    return std::pow(a, p) * spec.tail_abs_moment(p, t / a);
  }
  double total = 0.0;
  for (const Atom& atom : marginal_atoms(w)) {
    const double ax = std::fabs(atom.x);
    if (ax > t) total += atom.prob * std::pow(ax, p);
  }
  return total;
}

PairMoments MomentEngine::truncated_pair(Index i, Index j, double t) const {
  if (i == j) {
    const double m2 = abs_moment(i, 2, t);
    return {m2, m2};
  }
  const auto wi = model_.weights(i);
  const auto wj = model_.weights(j);
  if (wi.empty() || wj.empty()) return {};

  PairKey key;
  bool shared = false;
  std::size_t a = 0, b = 0;
  while (a < wi.size() || b < wj.size()) {
    if (b == wj.size() ||
        (a < wi.size() && wi[a].innovation < wj[b].innovation)) {
      key.emplace_back(wi[a++].weight, 0.0);
    } else if (a == wi.size() || wj[b].innovation < wi[a].innovation) {
      key.emplace_back(0.0, wj[b++].weight);
    } else {
      key.emplace_back(wi[a++].weight, wj[b++].weight);
      shared = true;
    }
  }

  const InnovationSpec& spec = model_.innovations();
  if (!shared) {
    // Independent: factorizes.
    const auto mean_of = [&](const std::vector<WeightTerm>& w, Index site) {
      if (!spec.is_discrete()) {
        if (w.size() > 1) {
          throw ExactMomentUnavailable(
              "continuous innovations shared by several terms");
        }
        const double c = w[0].weight;
        return (c < 0 ? -1.0 : 1.0) * std::fabs(c) *
               spec.truncated_mean(t / std::fabs(c));
      }
      double m = 0.0;
      for (const Atom& atom : marginal_atoms(w)) {
        if (std::fabs(atom.x) <= t) m += atom.prob * atom.x;
      }
      (void)site;
      return m;
    };
    return {mean_of(wi, i) * mean_of(wj, j),
            abs_moment(i, 1, t) * abs_moment(j, 1, t)};
  }

  if (!spec.is_discrete()) {
    if (wi.size() != 1 || wj.size() != 1) {
      throw ExactMomentUnavailable(
          "continuous innovations shared by several terms");
    }
    const double ca = wi[0].weight;
    const double cb = wj[0].weight;
    const double level = std::min(t / std::fabs(ca), t / std::fabs(cb));
    const double m2 = spec.truncated_abs_moment(2, level);
    return {ca * cb * m2, std::fabs(ca * cb) * m2};
  }

  std::sort(key.begin(), key.end());
  PairMoments out;
  for (const PairAtom& atom : pair_atoms(key)) {
    if (std::fabs(atom.xi) <= t && std::fabs(atom.xj) <= t) {
      const double prod = atom.xi * atom.xj;
      out.product += atom.prob * prod;
      out.abs_product += atom.prob * std::fabs(prod);
    }
  }
  return out;
}

double exact_abs_moment(const FieldModel& model, Index i, int p,
                        std::optional<double> truncation_level) {
  return MomentEngine(model).abs_moment(i, p, truncation_level);
}

double exact_abs_tail_moment(const FieldModel& model, Index i, int p,
                             double truncation_level) {
  return MomentEngine(model).abs_tail_moment(i, p, truncation_level);
}

}  // namespace selfnorm
