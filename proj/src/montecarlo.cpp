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

#include "selfnorm/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "selfnorm/numerics/normal.hpp"
#include "selfnorm/replication.hpp"

namespace selfnorm {

namespace {

struct Scale {
  double sigma = 1.0;
  double level = 0.0;
};

Scale truncation_for(const FieldModel& model, StatisticKind kind) {
  Scale s;
  if (kind == StatisticKind::kW) return s;
  s.sigma = std::sqrt(exact_sigma2(model));
  s.level = s.sigma / static_cast<double>(model.stats().kappa);
  return s;
}

}  // namespace

EmpiricalDistribution run_experiment(const FieldModel& model,
                                     StatisticKind kind, std::uint64_t R,
                                     std::uint64_t seed, unsigned workers) {
  if (R == 0) throw std::invalid_argument("run_experiment: R must be >= 1");
  const Scale sc = truncation_for(model, kind);
  ReplicationPlan plan;
  plan.model = &model;
  plan.replications = R;
  plan.seed = seed;
  plan.workers = workers;
  plan.sigma = sc.sigma;
  plan.truncation_level = sc.level;
  struct Draw {
    double value;
    bool degenerate;
  };
  const auto draws = replicate<Draw>(
      plan, [kind](const RealizationSummary& s, const ReplicationContext&) {
        return Draw{statistic_value(s, kind),
                    kind == StatisticKind::kW && s.degenerate};
      });
  EmpiricalDistribution e;
  e.replications = R;
  e.sorted_values.reserve(R);
  for (const Draw& d : draws) {
    e.sorted_values.push_back(d.value);
    e.degenerate_count += d.degenerate ? 1 : 0;
  }
  std::sort(e.sorted_values.begin(), e.sorted_values.end());
  return e;
}

double ks_distance_vs_normal(std::span<const double> v) {
  const double R = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double phi = numerics::normal_cdf(v[i]);
    d = std::max({d, (i + 1) / R - phi, phi - i / R});
  }
  return d;
}

double ks_distance_vs_normal(const EmpiricalDistribution& e) {
  return ks_distance_vs_normal(e.sorted_values);
}

double two_sample_sup_distance(std::span<const double> a,
                               std::span<const double> b) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

std::vector<Atom> exact_distribution_atoms(const FieldModel& model,
                                           StatisticKind kind) {
  const InnovationSpec& spec = model.innovations();
  if (!spec.is_discrete()) {
    throw std::invalid_argument("exact enumeration needs discrete innovations");
  }
  const std::size_t K = model.innovation_count();
  if (K >= 63 || (std::size_t{1} << K) > kMaxEnumeratedOutcomes) {
    throw StateSpaceTooLarge("2^" + std::to_string(K) +
                             " outcomes exceed the enumeration limit");
  }
  const DiscreteLaw law = spec.discrete_law();
  const Scale sc = truncation_for(model, kind);
  std::vector<double> eps(K), x(model.size());
  StatisticsWorkspace ws;
  std::map<double, double> mass;
  const std::uint64_t outcomes = std::uint64_t{1} << K;
  for (std::uint64_t mask = 0; mask < outcomes; ++mask) {
    double prob = 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      const int a = (mask >> k) & 1;
      eps[k] = law.value[a];
      prob *= law.prob[a];
    }
    model.apply(eps, x);
    const RealizationSummary s =
        summarize(x, model.structure(), sc.sigma, sc.level, ws);
    mass[statistic_value(s, kind)] += prob;
  }
  std::vector<Atom> atoms;
  atoms.reserve(mass.size());
  for (const auto& [v, p] : mass) atoms.push_back({v, p});
  return atoms;
}

double exact_distribution_small(const FieldModel& model, StatisticKind kind) {
  const std::vector<Atom> atoms = exact_distribution_atoms(model, kind);
  double below = 0.0;  // P(stat < x)
  double d = 0.0;
  for (const Atom& a : atoms) {
    const double phi = numerics::normal_cdf(a.value);
    const double at = below + a.prob;
    d = std::max({d, at - phi, phi - below});
    below = at;
  }
  return std::min(d, 1.0);
}

ExperimentRecord run_record(const FieldModel& model,
                            const ExperimentOptions& opt) {
  const EmpiricalDistribution e = run_experiment(
      model, opt.kind, opt.replications, opt.seed, opt.workers);
  ExperimentRecord r;
  r.n = model.size();
  r.replications = opt.replications;
  r.seed = opt.seed;
  r.kind = opt.kind;
  r.ks_estimate = ks_distance_vs_normal(e);
  r.dkw_band = numerics::dkw_band(static_cast<double>(opt.replications),
                                  opt.delta);
  McOptions mc;
  mc.replications = opt.component_replications;
  mc.seed = opt.seed;
  mc.workers = opt.workers;
  const BoundComponents c = compute_components(model, mc);
  r.bound_value = theorem1_rhs(c, model.size(), opt.C);
  r.slope_group = opt.slope_group;
  r.degenerate_count = e.degenerate_count;
  return r;
}

RateFit rate_fit(std::span<const ExperimentRecord> records,
                 double noise_multiple) {
  RateFit out;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const ExperimentRecord& r = records[k];
    if (!(r.ks_estimate >= noise_multiple * r.dkw_band) ||
        !(r.ks_estimate > 0.0)) {
      std::ostringstream os;
      os << "n=" << r.n << " excluded: ks " << r.ks_estimate << " below "
         << noise_multiple << " x dkw " << r.dkw_band;
      out.warnings.push_back(os.str());
      continue;
    }
    for (std::size_t u : out.used) {
      if (records[u].n == r.n) {
        throw RateFitError("rate_fit: repeated n=" + std::to_string(r.n));
      }
    }
    out.used.push_back(k);
    xs.push_back(std::log(static_cast<double>(r.n)));
    ys.push_back(std::log(r.ks_estimate));
  }
  if (out.used.size() < 3) {
    throw RateFitError("rate_fit: " + std::to_string(out.used.size()) +
                       " usable records, need 3");
  }
  const numerics::LineFit fit = numerics::ols_fit(xs, ys);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r2 = fit.r2;
  return out;
}

TruncationGapReport truncation_gap_check(const FieldModel& model,
                                         std::uint64_t R, std::uint64_t seed,
                                         unsigned workers, double delta) {
  McOptions mc;
  mc.replications = R;
  mc.seed = seed;
  mc.workers = workers;
  const BoundComponents c = compute_components(model, mc);
  TruncationGapReport out;
  InequalityReport& rep = out.report;
  rep.name = "truncation_gap";
  if (!c.third_moment_finite) {
    rep.applicable = false;
    rep.note = "third moment infinite";
    return out;
  }
  ReplicationPlan plan;
  plan.model = &model;
  plan.replications = R;
  plan.seed = seed;
  plan.workers = workers;
  plan.sigma = c.sigma;
  plan.truncation_level = c.truncation_level();
  const auto draws = replicate<std::array<double, 2>>(
      plan, [](const RealizationSummary& s, const ReplicationContext&) {
        return std::array<double, 2>{s.w, s.wtilde};
      });
  std::vector<double> w(R), wt(R);
  for (std::size_t r = 0; r < R; ++r) {
    w[r] = draws[r][0];
    wt[r] = draws[r][1];
  }
  std::sort(w.begin(), w.end());
  std::sort(wt.begin(), wt.end());
  out.estimate = two_sample_sup_distance(wt, w);
  out.dkw = numerics::dkw_band(static_cast<double>(R), delta);
  const double k = static_cast<double>(c.kappa);
  const double zc = numerics::normal_critical(mc.confidence);
  const double b3 = c.exact ? c.beta3 : c.beta3 + zc * c.beta3_se;
  const double b0 = c.exact ? c.beta0 : c.beta0 + zc * c.beta0_se;
  rep.lhs = out.estimate;
  rep.ci_low = std::max(0.0, out.estimate - 2.0 * out.dkw);
  rep.ci_high = std::min(1.0, out.estimate + 2.0 * out.dkw);
  rep.rhs = 4.0 * k * k * b3 + b0;
  rep.margin = rep.rhs - (out.estimate - 2.0 * out.dkw);
  rep.pass = out.estimate - 2.0 * out.dkw <= rep.rhs;
  out.vacuous = rep.rhs >= 1.0;
  if (out.vacuous) rep.note = "bound >= 1, vacuous";
  return out;
}

}  // namespace selfnorm
