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

#include "selfnorm/statistics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "selfnorm/numerics/summation.hpp"
#include "selfnorm/simd/kernels.hpp"

namespace selfnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void neighborhood_sums(const DependenceStructure& s, const double* x,
                       double* y) {
  const auto off = s.a_offsets();
  const auto mem = s.a_members();
  simd::active_kernels().gather_sum(off.data(), mem.data(), x, y, s.size());
}

void check_sizes(std::span<const double> x, const DependenceStructure& s) {
  if (x.size() != s.size()) {
    throw std::invalid_argument("realization does not cover J");
  }
}

}  // namespace

double psi(double x, double sigma) {
  const double s2 = sigma * sigma;
  return std::sqrt(std::clamp(x, 0.25 * s2, 2.0 * s2));
}

double self_normalized_ratio(double s, double v) {
  if (v > 0.0) return s / v;
  if (s > 0.0) return kInf;
  if (s < 0.0) return -kInf;
  return 0.0;
}

SampleStatistics compute_statistics(std::span<const double> x,
                                    const DependenceStructure& structure) {
  check_sizes(x, structure);
  StatisticsWorkspace ws;
  const RealizationSummary r = summarize(x, structure, 1.0, 0.0, ws);
  const double n = static_cast<double>(x.size());
  SampleStatistics out;
  out.s = r.s;
  out.y = std::move(ws.y);
  out.xbar = r.s / n;
  out.ybar = r.sum_y / n;
  out.v = r.v;
  out.w = r.w;
  out.degenerate = r.degenerate;
  return out;
}

TruncatedSystem compute_truncated(std::span<const double> x,
                                  const DependenceStructure& structure,
                                  double sigma, double kappa) {
  check_sizes(x, structure);
  if (!(sigma > 0.0) || !(kappa >= 1.0)) {
    throw std::invalid_argument("compute_truncated: need sigma > 0, kappa >= 1");
  }
  StatisticsWorkspace ws;
  const RealizationSummary r =
      summarize(x, structure, sigma, sigma / kappa, ws);
  TruncatedSystem t;
  t.xbar_i = std::move(ws.xbar);
  t.ybar_i = std::move(ws.ybar);
  t.sbar = r.sbar;
  t.vbar = r.vbar;
  t.wbar = r.wbar;
  t.vtilde = r.vtilde;
  t.wtilde = r.wtilde;
  t.xi.resize(t.xbar_i.size());
  t.eta.resize(t.ybar_i.size());
  for (std::size_t i = 0; i < t.xi.size(); ++i) {
    t.xi[i] = t.xbar_i[i] / t.vbar;
    t.eta[i] = t.ybar_i[i] / t.vbar;
  }
  return t;
}

RealizationSummary summarize(std::span<const double> x,
                             const DependenceStructure& structure,
                             double sigma, double truncation_level,
                             StatisticsWorkspace& ws) {
  const std::size_t n = x.size();
  const double dn = static_cast<double>(n);
  RealizationSummary r;
  ws.y.resize(n);
  neighborhood_sums(structure, x.data(), ws.y.data());
  r.s = numerics::pairwise_sum(x);
  r.sum_y = numerics::pairwise_sum(ws.y);
  r.dot = numerics::pairwise_dot(x, ws.y);
  // n * Xbar * Ybar = S * sum(Y) / n
  const double centre = r.s * r.sum_y / dn;
  r.v = std::sqrt(std::max(r.dot - centre, 0.0));
  r.degenerate = !(r.v > 0.0);
  r.w = self_normalized_ratio(r.s, r.v);

  if (truncation_level > 0.0) {
    ws.xbar.resize(n);
    ws.ybar.resize(n);
    simd::active_kernels().truncate(x.data(), truncation_level,
                                    ws.xbar.data(), n);
    neighborhood_sums(structure, ws.xbar.data(), ws.ybar.data());
    r.sbar = numerics::pairwise_sum(ws.xbar);
    r.sum_ybar = numerics::pairwise_sum(ws.ybar);
    r.dotbar = numerics::pairwise_dot(ws.xbar, ws.ybar);
    r.vbar = psi(r.dotbar, sigma);
    r.wbar = r.sbar / r.vbar;
    r.vtilde = psi(r.dotbar - centre, sigma);
    r.wtilde = r.sbar / r.vtilde;
  }
  return r;
}

double statistic_value(const RealizationSummary& r, StatisticKind k) {
  switch (k) {
    case StatisticKind::kW: return r.w;
    case StatisticKind::kWbar: return r.wbar;
    case StatisticKind::kWtilde: return r.wtilde;
  }
  return r.w;
}

double sigma_bar2(const FieldModel& model, double kappa,
                  const MomentEngine* engine) {
  std::optional<MomentEngine> own;
  if (engine == nullptr) engine = &own.emplace(model);
  const double sigma = std::sqrt(exact_sigma2(model));
  const double t = sigma / kappa;
  const DependenceStructure& s = model.structure();
  std::vector<double> rows(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    double row = 0.0;
    for (Index j : s.a_nbhd(i)) row += engine->truncated_pair(i, j, t).product;
    rows[i] = row;
  }
  return numerics::pairwise_sum(rows);
}

std::string_view statistic_kind_name(StatisticKind k) {
  switch (k) {
    case StatisticKind::kW: return "W";
    case StatisticKind::kWbar: return "Wbar";
    case StatisticKind::kWtilde: return "Wtilde";
  }
  return "W";
}

StatisticKind parse_statistic_kind(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(c));
  if (lower == "w") return StatisticKind::kW;
  if (lower == "wbar") return StatisticKind::kWbar;
  if (lower == "wtilde") return StatisticKind::kWtilde;
  throw std::invalid_argument("unknown statistic kind: " + std::string(name));
}

}  // namespace selfnorm
