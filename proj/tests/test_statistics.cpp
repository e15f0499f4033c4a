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
#include <random>
#include <vector>

#include "doctest.h"
#include "selfnorm/bounds.hpp"
#include "selfnorm/statistics.hpp"

using namespace selfnorm;

namespace {

DependenceStructure independence(std::size_t n) {
  return DependenceStructure::lattice({n}, 0);
}

}  // namespace

TEST_SUITE("statistics") {

TEST_CASE("psi examples") {
  const double s = 1.7;
  CHECK(psi(s * s, s) == doctest::Approx(s));
  CHECK(psi(-5.0, s) == doctest::Approx(0.5 * s));
  CHECK(psi(100 * s * s, s) == doctest::Approx(std::sqrt(2.0) * s));
}

TEST_CASE("psi stays in [sigma/2, sqrt(2) sigma] and is nondecreasing") {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::lognormal_distribution<double> ls(0.0, 3.0);
  for (int k = 0; k < 10000; ++k) {
    const double sigma = ls(gen);
    const double x = u(gen) * 4.0 * sigma * sigma * ls(gen);
    const double y = x + std::fabs(u(gen)) * sigma * sigma;
    const double p = psi(x, sigma);
    CHECK(p >= 0.5 * sigma);
    CHECK(p <= std::sqrt(2.0) * sigma);
    CHECK(psi(y, sigma) >= p);
  }
}

TEST_CASE("compute_statistics examples") {
  std::vector<double> x{1.0, -1.0};
  auto st = compute_statistics(x, independence(2));
  CHECK(st.s == 0.0);
  CHECK(st.xbar == 0.0);
  CHECK(st.ybar == 0.0);
  CHECK(st.v * st.v == doctest::Approx(2.0));
  CHECK(st.w == 0.0);

  x = {2.5};
  st = compute_statistics(x, independence(1));
  CHECK(st.v == 0.0);
  CHECK(st.degenerate);
  CHECK(st.w == INFINITY);
  x = {-2.5};
  CHECK(compute_statistics(x, independence(1)).w == -INFINITY);
  x = {0.0, 0.0};
  st = compute_statistics(x, independence(2));
  CHECK(st.s == 0.0);
  CHECK(st.v == 0.0);
  CHECK(st.w == 0.0);

  const std::vector<Edge> path{{0, 1}, {1, 2}};
  x = {1.0, 2.0, -1.0};
  st = compute_statistics(x, DependenceStructure::graph(3, path));
  CHECK(st.y == std::vector<double>{3.0, 2.0, 1.0});
  CHECK(st.xbar == doctest::Approx(2.0 / 3.0));
  CHECK(st.ybar == doctest::Approx(2.0));
  CHECK(st.v * st.v == doctest::Approx(2.0));
  CHECK(st.w == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("self_normalized_ratio convention") {
  CHECK(self_normalized_ratio(3.0, 0.0) == INFINITY);
  CHECK(self_normalized_ratio(-3.0, 0.0) == -INFINITY);
  CHECK(self_normalized_ratio(0.0, 0.0) == 0.0);
  CHECK(self_normalized_ratio(3.0, 2.0) == 1.5);
}

TEST_CASE("compute_truncated examples") {
  const auto str = DependenceStructure::lattice({5}, 1);
  std::vector<double> x{0.3, -0.2, 0.1, 0.4, -0.5};
  auto tr = compute_truncated(x, str, 10.0, 1.0);
  CHECK(tr.xbar_i == x);
  CHECK(tr.sbar == doctest::Approx(0.1));

  x[2] = 50.0;
  tr = compute_truncated(x, str, 10.0, 1.0);
  CHECK(tr.xbar_i[2] == 0.0);
  CHECK(tr.sbar == doctest::Approx(0.0));
  // Ybar_1 = xbar_0 + xbar_1 + xbar_2 loses X_2.
  CHECK(tr.ybar_i[1] == doctest::Approx(0.1));
  CHECK(tr.ybar_i[3] == doctest::Approx(-0.1));

  // sum Xbar_i Ybar_i = 3 sigma^2 over four independent sites.
  const double sigma = 1.0;
  std::vector<double> four(4, std::sqrt(0.75));
  tr = compute_truncated(four, independence(4), sigma, 1.0);
  CHECK(tr.vbar == doctest::Approx(std::sqrt(2.0) * sigma));

  CHECK_THROWS(compute_truncated(x, str, 0.0, 1.0));
  CHECK_THROWS(compute_truncated(x, str, 1.0, 0.5));
}

TEST_CASE("truncated system invariants on random realizations") {
  std::mt19937_64 gen(4);
  std::student_t_distribution<double> td(2.5);
  const auto str = DependenceStructure::lattice({8, 8}, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(str.size());
    for (double& v : x) v = td(gen);
    const double sigma = 2.0 + trial % 7;
    const double kappa = 1.0 + trial % 3;
    const auto tr = compute_truncated(x, str, sigma, kappa);
    CHECK(tr.vbar >= 0.5 * sigma);
    CHECK(tr.vbar <= std::sqrt(2.0) * sigma * (1 + 1e-15));
    CHECK(tr.vtilde >= 0.5 * sigma);
    CHECK(tr.vtilde <= std::sqrt(2.0) * sigma * (1 + 1e-15));
    double xi_sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::fabs(tr.xbar_i[i]) <= sigma / kappa);
      CHECK(tr.xi[i] == doctest::Approx(tr.xbar_i[i] / tr.vbar));
      CHECK(tr.eta[i] == doctest::Approx(tr.ybar_i[i] / tr.vbar));
      xi_sum += tr.xi[i];
    }
    CHECK(std::fabs(tr.wbar - xi_sum) <= 1e-12 * std::max(1.0, std::fabs(tr.wbar)) +
                                           1e-12 * std::fabs(tr.sbar / tr.vbar));
  }
}

TEST_CASE("Wtilde equals W when truncation and clamp are inactive") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto str = DependenceStructure::lattice({50}, 1);
  int coupled = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(str.size());
    for (double& v : x) v = u(gen);
    const auto st = compute_statistics(x, str);
    const double vsq = st.v * st.v;
    // Choose sigma so that V^2 lies inside [0.25, 2] sigma^2 and sigma/kappa
    // exceeds max|X_i|.
    const double sigma = std::sqrt(vsq);
    const double kappa = 1.0;
    if (sigma / kappa < 1.0) continue;
    ++coupled;
    const auto tr = compute_truncated(x, str, sigma, kappa);
    CHECK(tr.wtilde == st.w);
  }
  CHECK(coupled > 100);
}

TEST_CASE("summarize agrees with compute_statistics and compute_truncated") {
  std::mt19937_64 gen(6);
  std::exponential_distribution<double> ed(1.0);
  const auto str = DependenceStructure::lattice({30, 3}, 1);
  StatisticsWorkspace ws;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(str.size());
    for (double& v : x) v = ed(gen) - 1.0;
    const double sigma = 5.0, level = 1.5;
    const auto r = summarize(x, str, sigma, level, ws);
    const auto st = compute_statistics(x, str);
    const auto tr = compute_truncated(x, str, sigma, sigma / level);
    CHECK(r.s == doctest::Approx(st.s));
    CHECK(r.w == doctest::Approx(st.w));
    CHECK(r.wbar == doctest::Approx(tr.wbar));
    CHECK(r.wtilde == doctest::Approx(tr.wtilde));
    CHECK(statistic_value(r, StatisticKind::kW) == r.w);
    CHECK(statistic_value(r, StatisticKind::kWbar) == r.wbar);
    CHECK(statistic_value(r, StatisticKind::kWtilde) == r.wtilde);
  }
}

TEST_CASE("W is invariant under scaling") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  const auto str = DependenceStructure::lattice({40}, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(str.size());
    for (double& v : x) v = nd(gen);
    const double w = compute_statistics(x, str).w;
    for (double c : {1e-6, 1.0, 1e6}) {
      std::vector<double> y = x;
      for (double& v : y) v *= c;
      CHECK(compute_statistics(y, str).w == doctest::Approx(w).epsilon(1e-12));
    }
  }
}

TEST_CASE("statistic kind names") {
  CHECK(parse_statistic_kind("W") == StatisticKind::kW);
  CHECK(parse_statistic_kind("wbar") == StatisticKind::kWbar);
  CHECK(parse_statistic_kind("Wtilde") == StatisticKind::kWtilde);
  CHECK(statistic_kind_name(StatisticKind::kWtilde) == "Wtilde");
  CHECK_THROWS(parse_statistic_kind("V"));
}

TEST_CASE("sigma_bar2 examples") {
  const auto iid = FieldModel::iid(10, InnovationSpec::rademacher());
  CHECK(sigma_bar2(iid, 1.0) == doctest::Approx(10.0));
  const auto ma = FieldModel::moving_average({20}, 1, {}, InnovationSpec::uniform(0.1));
  // Uniform sums are unsupported for exact moments; an inactive truncation
  // on single-innovation sites still gives sigma^2.
  const auto iid_u = FieldModel::iid(20, InnovationSpec::uniform(0.5));
  CHECK(sigma_bar2(iid_u, 1.0) == doctest::Approx(exact_sigma2(iid_u)));
  CHECK_THROWS(sigma_bar2(ma, 1.0));
}

TEST_CASE("sigma_bar2 matches enumeration where truncation bites") {
  const auto m = FieldModel::moving_average({4}, 1, {}, InnovationSpec::two_point(0.1));
  const double sigma2 = exact_sigma2(m);
  const double kappa = static_cast<double>(m.stats().kappa);
  const double level = std::sqrt(sigma2) / kappa;
  // Enumerate all 2^6 innovation outcomes.
  const DiscreteLaw law = m.innovations().discrete_law();
  const std::size_t k = m.innovation_count();
  std::vector<double> eps(k), x(m.size());
  double ref = 0.0;
  bool bites = false;
  for (std::uint64_t mask = 0; mask < (1ull << k); ++mask) {
    double p = 1.0;
    for (std::size_t b = 0; b < k; ++b) {
      const int bit = (mask >> b) & 1;
      eps[b] = law.value[bit];
      p *= law.prob[bit];
    }
    m.apply(eps, x);
    for (Index i = 0; i < m.size(); ++i) {
      const double xi = std::fabs(x[i]) <= level ? x[i] : 0.0;
      bites |= xi != x[i];
      for (Index j : m.structure().a_nbhd(i)) {
        const double xj = std::fabs(x[j]) <= level ? x[j] : 0.0;
        ref += p * xi * xj;
      }
    }
  }
  REQUIRE(bites);
  const double sb2 = sigma_bar2(m, kappa);
  CHECK(sb2 == doctest::Approx(ref).epsilon(1e-12));
  const auto comp = compute_components(m);
  CHECK(std::fabs(sb2 - sigma2) <= 3.0 * kappa * sigma2 * comp.beta2);
}

}
