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

#include "selfnorm/bounds.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "selfnorm/numerics/normal.hpp"
#include "selfnorm/numerics/regression.hpp"
#include "selfnorm/numerics/summation.hpp"
#include "selfnorm/replication.hpp"
#include "selfnorm/simd/kernels.hpp"
#include "selfnorm/statistics.hpp"

namespace selfnorm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Relative slack for inequalities evaluated with exact moments.
constexpr double kArithmeticSlack = 1e-12;

using numerics::SummationAccumulator;

struct Moments {
  SummationAccumulator sum;
  SummationAccumulator sum_sq;
  void add(double v) {
    sum.add(v);
    sum_sq.add(v * v);
  }
  void merge(const Moments& o) {
    sum.merge(o.sum);
    sum_sq.merge(o.sum_sq);
  }
};

MeanEstimate finish(const Moments& m, std::uint64_t count) {
  return mean_estimate(m.sum.value(), m.sum_sq.value(), count);
}

MeanEstimate estimate_of(const std::vector<double>& draws) {
  Moments m;
  for (double v : draws) m.add(v);
  return finish(m, draws.size());
}

double lower_edge(double value, double se, double z) {
  return std::max(0.0, value - z * se);
}

InequalityReport make_report(std::string name, double lhs, double ci_low,
                             double ci_high, double rhs) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.ci_low = ci_low;
  r.ci_high = ci_high;
  r.rhs = rhs;
  r.margin = rhs - ci_high;
  r.pass = ci_high <= rhs + kArithmeticSlack * std::max(1.0, std::fabs(rhs));
  return r;
}

InequalityReport not_applicable(std::string name, std::string note) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = r.rhs = r.margin = r.ci_low = r.ci_high = kNaN;
  r.applicable = false;
  r.pass = true;
  r.note = std::move(note);
  return r;
}

bool beta2_hypothesis(const BoundComponents& c) {
  return c.beta2 <= 1.0 / (150.0 * static_cast<double>(c.kappa));
}

ReplicationPlan plan_for(const FieldModel& model, const BoundComponents& c,
                         const McOptions& mc) {
  ReplicationPlan plan;
  plan.model = &model;
  plan.replications = mc.replications;
  plan.seed = mc.seed;
  plan.workers = mc.workers;
  plan.sigma = c.sigma;
  plan.truncation_level = c.truncation_level();
  return plan;
}

void estimate_components(const FieldModel& model, const McOptions& mc,
                         BoundComponents& c) {
  enum { kB0, kB2, kB3, kTheta, kGamma, kCount };
  using Acc = std::array<Moments, kCount>;
  const double t = c.truncation_level();
  const DependenceStructure& s = model.structure();
  const auto off = s.a_offsets();
  const auto mem = s.a_members();
  ReplicationPlan plan = plan_for(model, c, mc);
  plan.truncation_level = 0.0;
  const auto blocks = replicate_blocks<Acc>(
      plan, [&](Acc& acc, const RealizationSummary&, ReplicationContext& ctx,
                std::uint64_t) {
        const auto& x = ctx.field.x;
        const std::size_t n = x.size();
        ctx.scratch.resize(n);
        ctx.scratch2.resize(n);
        double b0 = 0.0, b2 = 0.0, b3 = 0.0, g = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double a = std::fabs(x[i]);
          const double a3 = a * a * a;
          g += a3;
          if (a > t) {
            b0 += 1.0;
            b2 += a * a;
            ctx.scratch[i] = 0.0;
          } else {
            b3 += a3;
            ctx.scratch[i] = a;
          }
        }
        simd::active_kernels().gather_sum(off.data(), mem.data(),
                                          ctx.scratch.data(),
                                          ctx.scratch2.data(), n);
        acc[kB0].add(b0);
        acc[kB2].add(b2);
        acc[kB3].add(b3);
        acc[kTheta].add(numerics::pairwise_dot(ctx.scratch, ctx.scratch2));
        acc[kGamma].add(g);
      });
  Acc total;
  for (const Acc& b : blocks) {
    for (int k = 0; k < kCount; ++k) total[k].merge(b[k]);
  }
  const std::uint64_t R = mc.replications;
  const double s2 = c.sigma2;
  const double s3 = c.sigma2 * c.sigma;
  const MeanEstimate b0 = finish(total[kB0], R);
  const MeanEstimate b2 = finish(total[kB2], R);
  const MeanEstimate b3 = finish(total[kB3], R);
  const MeanEstimate th = finish(total[kTheta], R);
  const MeanEstimate g = finish(total[kGamma], R);
  c.beta0 = b0.mean;
  c.beta0_se = b0.se;
  c.beta2 = b2.mean / s2;
  c.beta2_se = b2.se / s2;
  c.beta3 = b3.mean / s3;
  c.beta3_se = b3.se / s3;
  c.theta = th.mean / s2;
  c.theta_se = th.se / s2;
  c.gamma = g.mean / s3;
  c.gamma_se = g.se / s3;
  c.exact = false;
  c.mc_replications = R;
}

}  // namespace

MeanEstimate mean_estimate(double sum, double sum_sq, std::uint64_t count) {
  MeanEstimate e;
  e.count = count;
  if (count == 0) return e;
  const double n = static_cast<double>(count);
  e.mean = sum / n;
  if (count > 1) {
    const double var = std::max(sum_sq / n - e.mean * e.mean, 0.0) * n / (n - 1);
    e.se = std::sqrt(var / n);
  }
  return e;
}

BoundComponents compute_components(const FieldModel& model,
                                   const McOptions& mc) {
  BoundComponents c;
  c.sigma2 = exact_sigma2(model);
  c.sigma = std::sqrt(c.sigma2);
  c.kappa = model.stats().kappa;
  c.kappa1 = model.stats().kappa1;
  c.size_j = model.size();
  c.third_moment_finite = model.innovations().has_moment(3);

  const MomentEngine engine(model);
  if (engine.exact_available() && !mc.force_monte_carlo) {
    const double t = c.truncation_level();
    const DependenceStructure& s = model.structure();
    const std::size_t n = s.size();
    std::vector<double> b0(n), b2(n), b3(n), th(n), g(n);
    for (Index i = 0; i < n; ++i) {
      b0[i] = engine.abs_tail_moment(i, 0, t);
      b2[i] = engine.abs_tail_moment(i, 2, t);
      b3[i] = engine.abs_moment(i, 3, t);
      double row = 0.0;
      for (Index j : s.a_nbhd(i)) {
        row += engine.truncated_pair(i, j, t).abs_product;
      }
      th[i] = row;
      if (c.third_moment_finite) g[i] = engine.abs_moment(i, 3, std::nullopt);
    }
    const double s3 = c.sigma2 * c.sigma;
    c.beta0 = numerics::pairwise_sum(b0);
    c.beta2 = numerics::pairwise_sum(b2) / c.sigma2;
    c.beta3 = numerics::pairwise_sum(b3) / s3;
    c.theta = numerics::pairwise_sum(th) / c.sigma2;
    c.gamma = numerics::pairwise_sum(g) / s3;
  } else {
    estimate_components(model, mc, c);
  }
  if (!c.third_moment_finite) {
    c.beta3 = c.theta = c.gamma = kNaN;
    c.beta3_se = c.theta_se = c.gamma_se = kNaN;
  }
  return c;
}

double theorem1_rhs(const BoundComponents& c, std::size_t size_j, double C) {
  const double k = static_cast<double>(c.kappa);
  return C * ((1.0 + c.theta) * k * k * c.beta3 + k * c.beta2 + c.beta0) +
         C * std::sqrt(k) * (c.theta + 1.0) /
             std::sqrt(static_cast<double>(size_j));
}

double theorem2_rhs(double gamma, std::size_t m, std::size_t d,
                    std::size_t size_j, double C) {
  const double mp = static_cast<double>(m + 1);
  const double dd = static_cast<double>(d);
  const double nj = static_cast<double>(size_j);
  return C * std::pow(mp, 3.0 * dd) *
         (1.0 + std::pow(mp, dd) * std::cbrt(nj) * std::pow(gamma, 2.0 / 3.0)) *
         (gamma + 1.0 / std::sqrt(nj));
}

double theorem3_rhs(double gamma, std::size_t d_max, std::size_t n, double C) {
  const double d = static_cast<double>(d_max);
  const double nn = static_cast<double>(n);
  return C * std::pow(d, 9.0) *
         (1.0 + std::pow(d, 6.0) * std::cbrt(nn) * std::pow(gamma, 2.0 / 3.0)) *
         (1.0 / std::sqrt(nn) + gamma);
}

nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["margin"] = r.margin;
  j["ci"] = {r.ci_low, r.ci_high};
  j["applicable"] = r.applicable;
  j["pass"] = r.pass;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

nlohmann::json to_json(const BoundComponents& c) {
  nlohmann::json j;
  j["sigma"] = c.sigma;
  j["sigma2"] = c.sigma2;
  j["kappa"] = c.kappa;
  j["kappa1"] = c.kappa1;
  j["size_j"] = c.size_j;
  j["beta0"] = c.beta0;
  j["beta2"] = c.beta2;
  j["beta3"] = c.beta3;
  j["theta"] = c.theta;
  j["gamma"] = c.gamma;
  j["exact"] = c.exact;
  j["third_moment_finite"] = c.third_moment_finite;
  if (!c.exact) {
    j["mc_replications"] = c.mc_replications;
    j["se"] = {{"beta0", c.beta0_se}, {"beta2", c.beta2_se},
               {"beta3", c.beta3_se}, {"theta", c.theta_se},
               {"gamma", c.gamma_se}};
  }
  return j;
}

std::vector<InequalityReport> lemma_oracle_41(const FieldModel& model,
                                              const McOptions& mc) {
  const BoundComponents c = compute_components(model, mc);
  const double z = numerics::normal_critical(mc.confidence);
  const double k = static_cast<double>(c.kappa);
  const double s2 = c.sigma2;
  const MomentEngine engine(model);
  const bool exact = c.exact;
  const double sb2_exact = exact ? sigma_bar2(model, k, &engine) : kNaN;

  // Per replication: T = sum Xbar_i Ybar_i and D = T - sum X_i Y_i, whose
  // mean is sigma_bar^2 - sigma^2.
  const auto draws = replicate<std::array<double, 2>>(
      plan_for(model, c, mc),
      [](const RealizationSummary& s, const ReplicationContext&) {
        return std::array<double, 2>{s.dotbar, s.dotbar - s.dot};
      });
  const std::uint64_t R = draws.size();
  std::vector<double> t(R), d(R);
  for (std::size_t r = 0; r < R; ++r) {
    t[r] = draws[r][0];
    d[r] = draws[r][1];
  }
  const MeanEstimate dd = estimate_of(d);
  const double sb2 = exact ? sb2_exact : s2 + dd.mean;

  std::vector<InequalityReport> out;

  // |sigma_bar^2 - sigma^2| <= 3 kappa sigma^2 beta2
  if (exact) {
    const double lhs = std::fabs(sb2 - s2);
    InequalityReport r =
        make_report("lemma41_sigma_bar", lhs, lhs, lhs, 3.0 * k * s2 * c.beta2);
    r.pass = lhs <= r.rhs + kArithmeticSlack * s2;
    r.note = "exact moments";
    out.push_back(r);
  } else {
    const double lhs = std::fabs(dd.mean);
    InequalityReport r = make_report(
        "lemma41_sigma_bar", lhs, lower_edge(lhs, dd.se, z), lhs + z * dd.se,
        3.0 * k * s2 * lower_edge(c.beta2, c.beta2_se, z));
    r.note = "Monte Carlo moments";
    out.push_back(r);
  }

  if (!c.third_moment_finite) {
    out.push_back(not_applicable("lemma41_second_moment",
                                 "third moment infinite"));
    out.push_back(not_applicable("lemma41_tail", "third moment infinite"));
  } else {
    const double b3 = exact ? c.beta3 : lower_edge(c.beta3, c.beta3_se, z);
    // E(T - sigma_bar^2)^2 <= kappa^2 sigma^4 beta3
    if (exact) {
      std::vector<double> q(R);
      for (std::size_t r = 0; r < R; ++r) q[r] = (t[r] - sb2) * (t[r] - sb2);
      const MeanEstimate e = estimate_of(q);
      out.push_back(make_report("lemma41_second_moment", e.mean,
                                lower_edge(e.mean, e.se, z), e.mean + z * e.se,
                                k * k * s2 * s2 * b3));
    } else {
      const MeanEstimate et = estimate_of(t);
      double m2 = 0.0, m4 = 0.0;
      for (double v : t) {
        const double u = (v - et.mean) * (v - et.mean);
        m2 += u;
        m4 += u * u;
      }
      m2 /= static_cast<double>(R);
      m4 /= static_cast<double>(R);
      const double var = m2 * R / (R - 1.0);
      const double se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / R);
      out.push_back(make_report("lemma41_second_moment", var,
                                lower_edge(var, se, z), var + z * se,
                                k * k * s2 * s2 * b3));
    }
    // P(|T - sigma_bar^2| >= sigma^2 / 2) <= 4 kappa^2 beta3
    std::uint64_t hits = 0;
    for (double v : t) hits += std::fabs(v - sb2) >= 0.5 * s2 ? 1 : 0;
    const double p = static_cast<double>(hits) / static_cast<double>(R);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(R));
    out.push_back(make_report("lemma41_tail", p, lower_edge(p, se, z),
                              p + z * se, 4.0 * k * k * b3));
  }

  // 0.98 sigma^2 <= sigma_bar^2 <= 1.02 sigma^2 under beta2 <= 1/(150 kappa)
  if (!beta2_hypothesis(c)) {
    out.push_back(not_applicable("lemma41_sigma_bar_ratio",
                                 "beta2 > 1/(150 kappa)"));
  } else {
    const double lhs = std::fabs(sb2 / s2 - 1.0);
    const double se = exact ? 0.0 : dd.se / s2;
    InequalityReport r =
        make_report("lemma41_sigma_bar_ratio", lhs, lower_edge(lhs, se, z),
                    lhs + z * se, 0.02);
    r.note = "|sigma_bar^2 / sigma^2 - 1|";
    out.push_back(r);
  }
  return out;
}

std::vector<InequalityReport> lemma_oracle_43(const FieldModel& model,
                                              const McOptions& mc) {
  const BoundComponents c = compute_components(model, mc);
  const char* names[] = {"lemma43_sbar4", "lemma43_ybar4", "lemma43_cross"};
  std::vector<InequalityReport> out;
  if (!beta2_hypothesis(c) || !c.third_moment_finite) {
    for (const char* n : names) {
      out.push_back(not_applicable(n, !c.third_moment_finite
                                          ? "third moment infinite"
                                          : "beta2 > 1/(150 kappa)"));
    }
    return out;
  }
  const double z = numerics::normal_critical(mc.confidence);
  const auto draws = replicate<std::array<double, 2>>(
      plan_for(model, c, mc),
      [](const RealizationSummary& s, const ReplicationContext&) {
        return std::array<double, 2>{s.sbar, s.sum_ybar};
      });
  std::array<Moments, 3> acc;
  for (const auto& [sb, yb] : draws) {
    const double sb2 = sb * sb;
    const double yb2 = yb * yb;
    acc[0].add(sb2 * sb2);
    acc[1].add(yb2 * yb2);
    acc[2].add(sb2 * yb2);
  }
  const double k = static_cast<double>(c.kappa);
  const double theta = c.exact ? c.theta : lower_edge(c.theta, c.theta_se, z);
  const double base = 1161.0 * (theta + 1.0) * c.sigma2 * c.sigma2;
  const double factor[] = {1.0, k * k, k};
  for (int q = 0; q < 3; ++q) {
    const MeanEstimate e = finish(acc[q], draws.size());
    out.push_back(make_report(names[q], e.mean, lower_edge(e.mean, e.se, z),
                              e.mean + z * e.se, base * factor[q]));
  }
  return out;
}

std::string_view test_function_name(TestFunction f) {
  switch (f) {
    case TestFunction::kClip: return "clip";
    case TestFunction::kSin: return "sin";
    case TestFunction::kLogistic: return "logistic";
  }
  return "clip";
}

TestFunction parse_test_function(std::string_view name) {
  if (name == "clip") return TestFunction::kClip;
  if (name == "sin") return TestFunction::kSin;
  if (name == "logistic") return TestFunction::kLogistic;
  throw std::invalid_argument("unknown test function: " + std::string(name));
}

double apply_test_function(TestFunction f, double w) {
  switch (f) {
    case TestFunction::kClip: return std::clamp(w, -1.0, 1.0);
    case TestFunction::kSin: return std::sin(w);
    // 2 / (1 + e^{-w}) - 1, slope at most 1/2
    case TestFunction::kLogistic: return std::tanh(0.5 * w);
  }
  return 0.0;
}

Lemma42Estimate lemma42_estimate(const FieldModel& model, TestFunction f,
                                 const McOptions& mc) {
  const BoundComponents c = compute_components(model, mc);
  Lemma42Estimate out;
  if (!beta2_hypothesis(c) || !c.third_moment_finite) {
    out.applicable = false;
    out.lhs = out.ci_low = out.ci_high = out.rhs = kNaN;
    return out;
  }
  const std::size_t n = model.size();
  struct Acc {
    std::vector<double> sum;
    std::vector<double> sum_sq;
  };
  const auto blocks = replicate_blocks<Acc>(
      plan_for(model, c, mc),
      [&](Acc& acc, const RealizationSummary& s, ReplicationContext& ctx,
          std::uint64_t) {
        if (acc.sum.empty()) {
          acc.sum.assign(n, 0.0);
          acc.sum_sq.assign(n, 0.0);
        }
        const auto& xb = ctx.stats.xbar;
        const auto& yb = ctx.stats.ybar;
        for (std::size_t i = 0; i < n; ++i) {
          const double g = (xb[i] / s.vbar) *
                           apply_test_function(f, s.wbar - yb[i] / s.vbar);
          acc.sum[i] += g;
          acc.sum_sq[i] += g * g;
        }
      });
  std::vector<SummationAccumulator> sum(n), sum_sq(n);
  for (const Acc& b : blocks) {
    for (std::size_t i = 0; i < n; ++i) {
      sum[i].add(b.sum[i]);
      sum_sq[i].add(b.sum_sq[i]);
    }
  }
  const double alpha = 1.0 - mc.confidence;
  out.z_critical =
      numerics::normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(n)));
  const double zb = out.z_critical;
  std::vector<double> abs_mean(n), low(n), high(n);
  for (std::size_t i = 0; i < n; ++i) {
    const MeanEstimate e =
        mean_estimate(sum[i].value(), sum_sq[i].value(), mc.replications);
    abs_mean[i] = std::fabs(e.mean);
    low[i] = lower_edge(abs_mean[i], e.se, zb);
    high[i] = abs_mean[i] + zb * e.se;
    const double zi = e.se > 0.0 ? abs_mean[i] / e.se
                      : abs_mean[i] > 0.0
                          ? std::numeric_limits<double>::infinity()
                          : 0.0;
    out.max_abs_z = std::max(out.max_abs_z, zi);
  }
  out.lhs = numerics::pairwise_sum(abs_mean);
  out.ci_low = numerics::pairwise_sum(low);
  out.ci_high = numerics::pairwise_sum(high);
  const double z = numerics::normal_critical(mc.confidence);
  const double k = static_cast<double>(c.kappa);
  const double b3 = c.exact ? c.beta3 : lower_edge(c.beta3, c.beta3_se, z);
  const double b2 = c.exact ? c.beta2 : lower_edge(c.beta2, c.beta2_se, z);
  out.rhs = 62.0 * k * k * b3 + 2.0 * k * b2;
  return out;
}

InequalityReport lemma_oracle_42(const FieldModel& model, TestFunction f,
                                 const McOptions& mc) {
  const std::string name =
      "lemma42_" + std::string(test_function_name(f));
  const Lemma42Estimate e = lemma42_estimate(model, f, mc);
  if (!e.applicable) {
    return not_applicable(name, "beta2 > 1/(150 kappa) or third moment infinite");
  }
  return make_report(name, e.lhs, e.ci_low, e.ci_high, e.rhs);
}

InequalityReport symmetric_null_check(const FieldModel& model, TestFunction f,
                                      const McOptions& mc) {
  const std::string name =
      "lemma42_symmetric_null_" + std::string(test_function_name(f));
  const Family fam = model.innovations().family;
  const bool symmetric =
      fam == Family::kRademacher || fam == Family::kUniformCentered;
  if (model.kind() != FieldKind::kIid || !symmetric) {
    return not_applicable(name, "needs independent symmetric coordinates");
  }
  const Lemma42Estimate e = lemma42_estimate(model, f, mc);
  if (!e.applicable) {
    return not_applicable(name, "beta2 > 1/(150 kappa)");
  }
  InequalityReport r;
  r.name = name;
  r.lhs = e.max_abs_z;
  r.rhs = e.z_critical;
  r.ci_low = e.ci_low;
  r.ci_high = e.ci_high;
  r.margin = e.z_critical - e.max_abs_z;
  r.pass = e.max_abs_z <= e.z_critical;
  r.note = "max_i |mean_i| / se_i against the simultaneous critical value";
  return r;
}

std::vector<InequalityReport> remark_inequalities(const BoundComponents& c) {
  std::vector<InequalityReport> out;
  const double k = static_cast<double>(c.kappa);
  if (!c.exact) {
    out.push_back(not_applicable("remark_theta", "components estimated"));
    out.push_back(not_applicable("remark_beta0", "components estimated"));
    return out;
  }
  if (c.third_moment_finite) {
    const double rhs = k * std::cbrt(static_cast<double>(c.size_j)) *
                       std::pow(c.beta3, 2.0 / 3.0);
    out.push_back(make_report("remark_theta", c.theta, c.theta, c.theta, rhs));
  } else {
    out.push_back(not_applicable("remark_theta", "third moment infinite"));
  }
  out.push_back(make_report("remark_beta0", c.beta0, c.beta0, c.beta0,
                            k * k * c.beta2));
  return out;
}

ConcentrationReport concentration_diagnostic(
    const FieldModel& model, double z, const std::vector<double>& half_widths,
    const McOptions& mc) {
  const BoundComponents c = compute_components(model, mc);
  ConcentrationReport out;
  out.z = z;
  out.half_widths = half_widths;
  const double k = static_cast<double>(c.kappa);
  if (!beta2_hypothesis(c) || !c.third_moment_finite ||
      !(c.beta3 <= 1.0 / (150.0 * k * k))) {
    out.applicable = false;
    out.note = "needs beta2 <= 1/(150 kappa) and beta3 <= 1/(150 kappa^2)";
    return out;
  }
  const auto draws = replicate<std::array<double, 2>>(
      plan_for(model, c, mc),
      [](const RealizationSummary& s, const ReplicationContext&) {
        return std::array<double, 2>{s.sbar, s.vbar};
      });
  const double R = static_cast<double>(draws.size());
  const double zc = numerics::normal_critical(mc.confidence);
  std::vector<double> se(half_widths.size());
  for (std::size_t h = 0; h < half_widths.size(); ++h) {
    const double hw = half_widths[h];
    std::uint64_t hits = 0;
    // z + (-h)/Vbar <= Sbar/Vbar <= z + h/Vbar
    for (const auto& [sb, vb] : draws) {
      hits += std::fabs(sb - z * vb) <= hw ? 1 : 0;
    }
    const double p = static_cast<double>(hits) / R;
    se[h] = std::sqrt(p * (1.0 - p) / R);
    out.probability.push_back(p);
    out.ci_high.push_back(p + zc * se[h]);
  }
  std::vector<double> xs = half_widths;
  std::sort(xs.begin(), xs.end());
  if (std::unique(xs.begin(), xs.end()) - xs.begin() >= 2) {
    const numerics::LineFit fit =
        numerics::ols_fit(half_widths, out.probability);
    out.slack = std::max(fit.intercept, 0.0);
    out.slope = fit.slope;
  }
  for (std::size_t h = 0; h < half_widths.size(); ++h) {
    const double env = 4.0 * half_widths[h] / c.sigma + out.slack;
    out.envelope.push_back(env);
    if (out.probability[h] - zc * se[h] > env) out.pass = false;
  }
  return out;
}

nlohmann::json to_json(const ConcentrationReport& r) {
  nlohmann::json j;
  j["name"] = "concentration";
  j["applicable"] = r.applicable;
  j["pass"] = r.pass;
  j["z"] = r.z;
  j["half_widths"] = r.half_widths;
  j["probability"] = r.probability;
  j["ci_high"] = r.ci_high;
  j["envelope"] = r.envelope;
  j["slack"] = r.slack;
  j["slope"] = r.slope;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

double exact_iid_sbar_fourth_moment(const FieldModel& model) {
  if (model.kind() != FieldKind::kIid) {
    throw ExactMomentUnavailable("fourth moment oracle needs an iid model");
  }
  const InnovationSpec& spec = model.innovations();
  const double sigma = std::sqrt(exact_sigma2(model));
  const double t = sigma / static_cast<double>(model.stats().kappa);
  std::array<double, 5> m{};  // raw moments of Xbar
  if (spec.is_discrete()) {
    const DiscreteLaw law = spec.discrete_law();
    for (int a = 0; a < 2; ++a) {
      const double v = law.value[a];
      if (std::fabs(v) > t) continue;
      for (int p = 1; p <= 4; ++p) m[p] += law.prob[a] * std::pow(v, p);
    }
  } else if (spec.family == Family::kUniformCentered) {
    m[2] = spec.truncated_abs_moment(2, t);
    m[4] = spec.truncated_abs_moment(4, t);
  } else {
    throw ExactMomentUnavailable(
        "fourth moment oracle needs discrete or uniform innovations");
  }
  const double c1 = m[1];
  const double c2 = m[2] - m[1] * m[1];
  const double c3 = m[3] - 3.0 * m[2] * m[1] + 2.0 * std::pow(m[1], 3);
  const double c4 = m[4] - 4.0 * m[3] * m[1] - 3.0 * m[2] * m[2] +
                    12.0 * m[2] * m[1] * m[1] - 6.0 * std::pow(m[1], 4);
  const double n = static_cast<double>(model.size());
  const double k1 = n * c1, k2 = n * c2, k3 = n * c3, k4 = n * c4;
  return k4 + 4.0 * k3 * k1 + 3.0 * k2 * k2 + 6.0 * k2 * k1 * k1 +
         std::pow(k1, 4);
}

}  // namespace selfnorm
