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
#include <functional>
#include <vector>

#include "doctest.h"
#include "selfnorm/models.hpp"

using namespace selfnorm;

namespace {

// All innovation outcomes of a discrete model with their probabilities,
// pushed through the field map x = L eps.
struct Outcomes {
  std::vector<double> prob;
  std::vector<std::vector<double>> x;
};

Outcomes enumerate_outcomes(const FieldModel& m) {
  const DiscreteLaw law = m.innovations().discrete_law();
  const std::size_t k = m.innovation_count();
  REQUIRE(k <= 20);
  Outcomes out;
  std::vector<double> eps(k), x(m.size());
  for (std::uint64_t mask = 0; mask < (1ull << k); ++mask) {
    double p = 1.0;
    for (std::size_t b = 0; b < k; ++b) {
      const int bit = (mask >> b) & 1;
      eps[b] = law.value[bit];
      p *= law.prob[bit];
    }
    m.apply(eps, x);
    out.prob.push_back(p);
    out.x.push_back(x);
  }
  return out;
}

double expectation(const Outcomes& o,
                   const std::function<double(const std::vector<double>&)>& f) {
  double total = 0.0;
  for (std::size_t k = 0; k < o.prob.size(); ++k) total += o.prob[k] * f(o.x[k]);
  return total;
}

double enumerate_expectation(const FieldModel& m,
                             const std::function<double(const std::vector<double>&)>& f) {
  return expectation(enumerate_outcomes(m), f);
}

// Simpson's rule on [a, b] with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

std::vector<FieldModel> small_discrete_models() {
  std::vector<FieldModel> out;
  out.push_back(FieldModel::iid(5, InnovationSpec::rademacher()));
  out.push_back(FieldModel::moving_average({4}, 1, {}, InnovationSpec::rademacher()));
  out.push_back(FieldModel::moving_average({5}, 1, {0.5, -1.0, 2.0},
                                           InnovationSpec::two_point(0.2, 1.5)));
  out.push_back(FieldModel::moving_average({2, 2}, 1, {}, InnovationSpec::two_point(0.3)));
  out.push_back(FieldModel::graph_edge_sum(cycle_graph(6), InnovationSpec::rademacher(2.0)));
  out.push_back(FieldModel::graph_edge_sum(path_graph(5), InnovationSpec::two_point(0.1)));
  return out;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("exact_sigma2 examples") {
  CHECK(exact_sigma2(FieldModel::iid(10, InnovationSpec::rademacher())) == doctest::Approx(10.0));
  CHECK(exact_sigma2(FieldModel::graph_edge_sum(path_graph(3), InnovationSpec::rademacher())) ==
        doctest::Approx(8.0));
  const auto ma = FieldModel::moving_average({4}, 1, {1, 1, 1}, InnovationSpec::rademacher());
  const double brute = enumerate_expectation(ma, [](const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v;
    return s * s;
  });
  CHECK(exact_sigma2(ma) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("exact_sigma2 equals Var(S) by enumeration on small models") {
  for (const auto& m : small_discrete_models()) {
    CAPTURE(m.describe());
    const double brute = enumerate_expectation(m, [](const std::vector<double>& x) {
      double s = 0;
      for (double v : x) s += v;
      return s * s;
    });
    CHECK(exact_sigma2(m) == doctest::Approx(brute).epsilon(1e-11));
  }
}

TEST_CASE("exact_sigma2 equals var * sum_k (sum_i w_ik)^2 on larger models") {
  const std::vector<FieldModel> models = {
      FieldModel::moving_average({9, 7}, 2, {}, InnovationSpec::uniform(0.5)),
      FieldModel::moving_average({30}, 2, {1, -2, 0.5, 3, 1}, InnovationSpec::exponential()),
      FieldModel::graph_edge_sum(perfect_matching(20), InnovationSpec::pareto(3.5))};
  for (const auto& m : models) {
    std::vector<double> col(m.innovation_count(), 0.0);
    for (Index i = 0; i < m.size(); ++i)
      for (const auto& t : m.weights(i)) col[t.innovation] += t.weight;
    double ss = 0.0;
    for (double c : col) ss += c * c;
    CHECK(exact_sigma2(m) ==
          doctest::Approx(m.innovations().variance() * ss).epsilon(1e-12));
  }
}

TEST_CASE("apply agrees with the weight representation") {
  const auto m = FieldModel::moving_average({4, 3}, 1, {1, 2, 3, 4, 5, 6, 7, 8, 9},
                                            InnovationSpec::uniform());
  std::vector<double> eps(m.innovation_count()), x(m.size());
  for (std::size_t k = 0; k < eps.size(); ++k) eps[k] = std::sin(1.0 + k);
  m.apply(eps, x);
  for (Index i = 0; i < m.size(); ++i) {
    double v = 0.0;
    for (const auto& t : m.weights(i)) v += t.weight * eps[t.innovation];
    CHECK(x[i] == doctest::Approx(v).epsilon(1e-14));
  }
  CHECK(m.dependence_range() == 2);
  CHECK(m.structure().lattice_m() == 2);
}

TEST_CASE("sampling replays the innovation stream") {
  const auto m = FieldModel::moving_average({5}, 1, {1, 1, 1}, InnovationSpec::rademacher());
  const rng::PhiloxStream st(99);
  FieldWorkspace ws;
  m.sample(st, 3, ws);
  REQUIRE(ws.innovations.size() == 7);
  for (std::size_t k = 0; k < 7; ++k)
    CHECK(ws.innovations[k] == (st.uniform(3, k) < 0.5 ? -1.0 : 1.0));
  // x_2 sees the window centred on dilated site 3.
  CHECK(ws.x[2] == ws.innovations[2] + ws.innovations[3] + ws.innovations[4]);

  FieldWorkspace again;
  m.sample(st, 3, again);
  CHECK(again.x == ws.x);

  const auto g = FieldModel::graph_edge_sum(path_graph(3), InnovationSpec::uniform());
  const auto w1 = g.weights(1);
  REQUIRE(w1.size() == 2);
  CHECK(w1[0].weight == 1.0);
  CHECK(w1[1].weight == 1.0);
}

TEST_CASE("fast sampling paths match the inverse CDF") {
  for (const auto& spec : {InnovationSpec::rademacher(2.0), InnovationSpec::uniform(3.0),
                           InnovationSpec::exponential(), InnovationSpec::pareto(4.0)}) {
    const auto m = FieldModel::iid(50, spec);
    const rng::PhiloxStream st(1);
    FieldWorkspace ws;
    m.sample(st, 0, ws);
    for (std::size_t k = 0; k < 50; ++k)
      CHECK(ws.x[k] == doctest::Approx(spec.from_uniform(st.uniform(0, k))).epsilon(1e-15));
  }
}

TEST_CASE("sample means are near zero") {
  const auto m = FieldModel::moving_average({20}, 1, {}, InnovationSpec::exponential());
  const rng::PhiloxStream st(8);
  FieldWorkspace ws;
  const int reps = 20000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    m.sample(st, r, ws);
    sum += ws.x[7];
    sumsq += ws.x[7] * ws.x[7];
  }
  const double mean = sum / reps;
  const double sd = std::sqrt(sumsq / reps - mean * mean);
  CHECK(std::fabs(mean) < 4.0 * sd / std::sqrt(double(reps)));
}

TEST_CASE("m-dependence: far sites are uncorrelated") {
  const auto m = FieldModel::moving_average({12}, 1, {}, InnovationSpec::uniform());
  const rng::PhiloxStream st(2);
  FieldWorkspace ws;
  const int reps = 100000;
  double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
  for (int r = 0; r < reps; ++r) {
    m.sample(st, r, ws);
    const double a = ws.x[3], b = ws.x[6];
    sx += a; sy += b; sxy += a * b; sxx += a * a; syy += b * b;
  }
  const double cov = sxy / reps - (sx / reps) * (sy / reps);
  const double corr = cov / std::sqrt((sxx / reps - sx * sx / reps / reps) *
                                      (syy / reps - sy * sy / reps / reps));
  CHECK(std::fabs(corr) < 4.0 / std::sqrt(double(reps)));
}

TEST_CASE("abs moment examples") {
  const auto iid = FieldModel::iid(3, InnovationSpec::rademacher());
  CHECK(exact_abs_moment(iid, 0, 3, 2.0) == 1.0);
  CHECK(exact_abs_moment(iid, 0, 3, 0.5) == 0.0);
  // X = eps_1 + eps_2: one site of an edge-sum on a path of three vertices.
  const auto two = FieldModel::graph_edge_sum(path_graph(3), InnovationSpec::rademacher());
  CHECK(exact_abs_moment(two, 1, 2, 1.5) == 0.0);
  CHECK(exact_abs_moment(two, 1, 2, std::nullopt) == doctest::Approx(2.0));
}

TEST_CASE("moments and pair moments match brute-force enumeration") {
  for (const auto& m : small_discrete_models()) {
    CAPTURE(m.describe());
    const MomentEngine eng(m);
    REQUIRE(eng.exact_available());
    const Outcomes all = enumerate_outcomes(m);
    for (double t : {0.45, 1.15, 1.85, 2.55, 100.0}) {
      for (Index i = 0; i < m.size(); ++i) {
        for (int p = 0; p <= 4; ++p) {
          const double brute = expectation(all, [&](const std::vector<double>& x) {
            const double a = std::fabs(x[i]);
            return a <= t ? std::pow(a, p) : 0.0;
          });
          const double tail = expectation(all, [&](const std::vector<double>& x) {
            const double a = std::fabs(x[i]);
            return a > t ? std::pow(a, p) : 0.0;
          });
          CHECK(eng.abs_moment(i, p, t) == doctest::Approx(brute).epsilon(1e-10));
          CHECK(eng.abs_tail_moment(i, p, t) == doctest::Approx(tail).epsilon(1e-10));
          CHECK(eng.abs_moment(i, p, t) + eng.abs_tail_moment(i, p, t) ==
                doctest::Approx(eng.abs_moment(i, p, std::nullopt)).epsilon(1e-9));
        }
        for (Index j = 0; j < m.size(); ++j) {
          const PairMoments pm = eng.truncated_pair(i, j, t);
          const double prod = expectation(all, [&](const std::vector<double>& x) {
            const double a = std::fabs(x[i]) <= t ? x[i] : 0.0;
            const double b = std::fabs(x[j]) <= t ? x[j] : 0.0;
            return a * b;
          });
          const double absprod = expectation(all, [&](const std::vector<double>& x) {
            const double a = std::fabs(x[i]) <= t ? x[i] : 0.0;
            const double b = std::fabs(x[j]) <= t ? x[j] : 0.0;
            return std::fabs(a * b);
          });
          CHECK(pm.product == doctest::Approx(prod).epsilon(1e-10).scale(1.0));
          CHECK(pm.abs_product == doctest::Approx(absprod).epsilon(1e-10).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("continuous single-innovation moments match quadrature") {
  struct Case {
    InnovationSpec spec;
    double lo, hi;
    std::function<double(double)> density;  // density of the innovation
  };
  const double a = 3.5;
  const double pm = a / (a - 1);
  const std::vector<Case> cases = {
      {InnovationSpec::uniform(2.0), -2.0, 2.0, [](double) { return 0.25; }},
      {InnovationSpec::exponential(), -1.0, 60.0,
       [](double x) { return std::exp(-(x + 1.0)); }},
      {InnovationSpec::pareto(a), 1.0 - pm, 4000.0,
       [=](double x) { return a * std::pow(x + pm, -a - 1.0); }},
  };
  for (const auto& c : cases) {
    const auto m = FieldModel::iid(4, c.spec);
    const MomentEngine eng(m);
    for (double t : {0.2, 0.9, 2.5}) {
      for (int p : {1, 2, 3}) {
        auto g = [&](double x) {
          return std::fabs(x) <= t ? std::pow(std::fabs(x), p) * c.density(x) : 0.0;
        };
        // Split at the truncation points so Simpson sees smooth pieces.
        const double l = std::max(c.lo, -t), h = std::min(c.hi, t);
        const double ref = l < h ? simpson(g, l, h, 20000) : 0.0;
        CHECK(eng.abs_moment(1, p, t) == doctest::Approx(ref).epsilon(1e-8).scale(1.0));
      }
      const PairMoments same = eng.truncated_pair(2, 2, t);
      CHECK(same.product == doctest::Approx(eng.abs_moment(2, 2, t)));
      const PairMoments diff = eng.truncated_pair(0, 1, t);
      const double mu = c.spec.truncated_mean(t);
      CHECK(diff.product == doctest::Approx(mu * mu).scale(1.0));
    }
  }
}

TEST_CASE("error handling") {
  CHECK_THROWS_AS(FieldModel::moving_average({4}, 1, {1, 2}, InnovationSpec::rademacher()),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      FieldModel::moving_average({4}, 1, {1, NAN, 1}, InnovationSpec::rademacher()),
      std::invalid_argument);
  CHECK_THROWS_AS(exact_sigma2(FieldModel::moving_average({4}, 1, {0, 0, 0},
                                                          InnovationSpec::rademacher())),
                  DegenerateModel);
  const auto heavy = FieldModel::iid(3, InnovationSpec::pareto(2.5));
  CHECK_THROWS_AS(exact_abs_moment(heavy, 0, 3, std::nullopt), UnsupportedMoment);
  CHECK_NOTHROW(exact_abs_moment(heavy, 0, 2, std::nullopt));
  CHECK_THROWS_AS(InnovationSpec::two_point(1.5).validate(), std::invalid_argument);
}

TEST_CASE("exact moments are unavailable for large or mixed continuous sites") {
  const auto big = FieldModel::moving_average({10, 10}, 2, {}, InnovationSpec::rademacher());
  CHECK_FALSE(MomentEngine(big).exact_available());
  const auto cont = FieldModel::moving_average({10}, 1, {}, InnovationSpec::uniform());
  CHECK_FALSE(MomentEngine(cont).exact_available());
  CHECK(MomentEngine(FieldModel::iid(10, InnovationSpec::exponential())).exact_available());
}

}
