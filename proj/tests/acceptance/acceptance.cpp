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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "selfnorm/bounds.hpp"
#include "selfnorm/cli/runner.hpp"
#include "selfnorm/dependence.hpp"
#include "selfnorm/montecarlo.hpp"
#include "selfnorm/numerics/normal.hpp"
#include "selfnorm/statistics.hpp"

using namespace selfnorm;
namespace fs = std::filesystem;

namespace {

// Fixed before any acceptance run.
constexpr std::uint64_t kSeed = 20260101;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Named {
  std::string label;
  FieldModel model;
};

// Corpus satisfying beta2 <= 1/(150 kappa) with exact components.
std::vector<Named> gated_corpus() {
  return {
      {"iid rademacher n=100", FieldModel::iid(100, InnovationSpec::rademacher())},
      {"iid uniform n=200", FieldModel::iid(200, InnovationSpec::uniform())},
      {"iid exponential n=400", FieldModel::iid(400, InnovationSpec::exponential())},
      {"iid two-point p=0.1 n=200", FieldModel::iid(200, InnovationSpec::two_point(0.1))},
      {"MA r=1 rademacher n=200",
       FieldModel::moving_average({200}, 1, {}, InnovationSpec::rademacher())},
      {"MA r=1 two-point p=0.2 n=800",
       FieldModel::moving_average({800}, 1, {}, InnovationSpec::two_point(0.2))},
      {"cycle rademacher n=200",
       FieldModel::graph_edge_sum(cycle_graph(200), InnovationSpec::rademacher())},
      {"matching two-point p=0.3 n=200",
       FieldModel::graph_edge_sum(perfect_matching(200), InnovationSpec::two_point(0.3))},
  };
}

// Adds models where truncation bites.
std::vector<Named> full_corpus() {
  auto c = gated_corpus();
  c.push_back({"iid pareto a=3.5 n=500", FieldModel::iid(500, InnovationSpec::pareto(3.5))});
  c.push_back({"iid exponential n=50", FieldModel::iid(50, InnovationSpec::exponential())});
  return c;
}

McOptions mc(std::uint64_t R) {
  McOptions o;
  o.replications = R;
  o.seed = kSeed;
  return o;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void append(std::string& detail, const std::string& s) {
  if (!detail.empty()) detail += "; ";
  detail += s;
}

Outcome rate_check(const std::function<FieldModel(std::size_t)>& make,
                   const std::vector<std::size_t>& sweep, double lo, double hi,
                   std::optional<double> min_r2) {
  std::vector<ExperimentRecord> recs;
  std::string pts;
  for (std::size_t n : sweep) {
    ExperimentOptions opt;
    opt.replications = 20000;
    opt.seed = kSeed;
    recs.push_back(run_record(make(n), opt));
    pts += " " + std::to_string(n) + ":" + fmt("%.4f", recs.back().ks_estimate);
  }
  Outcome o;
  o.detail = "ks" + pts + fmt("; dkw=%.4f", recs.front().dkw_band);
  try {
    const RateFit f = rate_fit(recs);
    o.pass = f.slope >= lo && f.slope <= hi && (!min_r2 || f.r2 >= *min_r2);
    append(o.detail, fmt("slope=%.3f", f.slope) + fmt(" r2=%.3f", f.r2) +
                         " points=" + std::to_string(f.used.size()));
  } catch (const RateFitError& e) {
    o.pass = false;
    append(o.detail, std::string("rate fit refused: ") + e.what());
  }
  return o;
}

Outcome check_reports(const std::string& label, const std::vector<InequalityReport>& rs,
                      bool require_applicable) {
  Outcome o;
  for (const auto& r : rs) {
    if (!r.applicable) {
      if (require_applicable) {
        o.pass = false;
        append(o.detail, label + " " + r.name + " not applicable");
      }
      continue;
    }
    if (!r.pass) {
      o.pass = false;
      append(o.detail, label + " " + r.name + fmt(" lhs=%.4g", r.lhs) + fmt(" rhs=%.4g", r.rhs));
    }
  }
  return o;
}

void merge(Outcome& into, const Outcome& o) {
  into.pass = into.pass && o.pass;
  if (!o.detail.empty()) append(into.detail, o.detail);
}

Outcome criterion1() {
  return rate_check([](std::size_t n) { return FieldModel::iid(n, InnovationSpec::rademacher()); },
                    {64, 128, 256, 512, 1024, 2048, 4096}, -0.65, -0.35, 0.9);
}

Outcome criterion2() {
  return rate_check(
      [](std::size_t n) {
        return FieldModel::moving_average({n}, 1, {}, InnovationSpec::exponential());
      },
      {64, 128, 256, 512, 1024, 2048, 4096}, -0.7, -0.3, std::nullopt);
}

Outcome criterion3() {
  return rate_check(
      [](std::size_t n) {
        return FieldModel::graph_edge_sum(cycle_graph(n), InnovationSpec::rademacher());
      },
      {128, 256, 512, 1024, 2048, 4096}, -0.7, -0.3, std::nullopt);
}

Outcome criterion4() {
  const std::uint64_t R = 1000000;
  const double band = numerics::dkw_band(R, 0.01);
  std::vector<Named> models;
  for (std::size_t n = 2; n <= 12; ++n)
    models.push_back({"iid n=" + std::to_string(n), FieldModel::iid(n, InnovationSpec::rademacher())});
  for (std::size_t n = 4; n <= 14; ++n)
    models.push_back({"MA n=" + std::to_string(n),
                      FieldModel::moving_average({n}, 1, {}, InnovationSpec::rademacher())});
  Outcome o;
  double worst = 0.0;
  for (const auto& [label, m] : models) {
    const double exact = exact_distribution_small(m, StatisticKind::kW);
    const double est = ks_distance_vs_normal(run_experiment(m, StatisticKind::kW, R, kSeed));
    const double gap = std::fabs(est - exact);
    worst = std::max(worst, gap);
    if (gap > band) {
      o.pass = false;
      append(o.detail, label + fmt(" gap=%.5f", gap));
    }
  }
  append(o.detail, std::to_string(models.size()) + " models" + fmt(", max gap=%.5f", worst) +
                       fmt(" band=%.5f", band));
  return o;
}

bool gate_holds(const BoundComponents& c) {
  return c.beta2 <= 1.0 / (150.0 * static_cast<double>(c.kappa));
}

Outcome corpus_gate() {
  Outcome o;
  for (const auto& [label, m] : gated_corpus()) {
    const auto c = compute_components(m);
    if (!c.exact || !gate_holds(c)) {
      o.pass = false;
      append(o.detail, label + " outside the corpus hypotheses");
    }
  }
  return o;
}

Outcome criterion5() {
  Outcome o = corpus_gate();
  for (const auto& [label, m] : gated_corpus()) {
    const auto rs = lemma_oracle_41(m, mc(100000));
    merge(o, check_reports(label, rs, true));
  }
  if (o.pass) append(o.detail, std::to_string(gated_corpus().size()) + " models, 4 inequalities each");
  return o;
}

Outcome criterion6() {
  Outcome o = corpus_gate();
  for (const auto& [label, m] : gated_corpus())
    merge(o, check_reports(label, lemma_oracle_43(m, mc(100000)), true));
  const std::size_t n = 100;
  const double e4 = exact_iid_sbar_fourth_moment(FieldModel::iid(n, InnovationSpec::rademacher()));
  const double closed = 3.0 * n * n - 2.0 * n;
  const bool exact_ok = e4 == closed && e4 <= 1161.0 * 2.0 * n * n;
  if (!exact_ok) {
    o.pass = false;
    append(o.detail, fmt("exact E Sbar^4=%.1f", e4));
  }
  append(o.detail, fmt("exact iid rademacher E Sbar^4=%.0f", e4) + fmt(" <= %.0f", 1161.0 * 2 * n * n));
  return o;
}

Outcome criterion7() {
  Outcome o = corpus_gate();
  for (const auto& [label, m] : gated_corpus()) {
    const auto r = lemma_oracle_42(m, TestFunction::kClip, mc(100000));
    merge(o, check_reports(label, {r}, true));
  }
  for (TestFunction f : {TestFunction::kClip, TestFunction::kSin, TestFunction::kLogistic}) {
    const auto r = symmetric_null_check(FieldModel::iid(100, InnovationSpec::uniform()), f,
                                        mc(100000));
    merge(o, check_reports("iid uniform n=100 symmetric null", {r}, true));
    append(o.detail, std::string(test_function_name(f)) + fmt(" null max|z|=%.2f", r.lhs) +
                         fmt(" crit=%.2f", r.rhs));
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  double worst = -INFINITY;
  for (const auto& [label, m] : full_corpus()) {
    const auto t = truncation_gap_check(m, 100000, kSeed);
    if (!t.report.pass) {
      o.pass = false;
      append(o.detail, label + fmt(" gap=%.4f", t.estimate) + fmt(" bound=%.4f", t.report.rhs));
    }
    worst = std::max(worst, t.estimate - 2.0 * t.dkw - t.report.rhs);
  }
  append(o.detail, fmt("max (gap - 2 dkw - bound)=%.4f", worst));
  return o;
}

Outcome criterion9() {
  Outcome o;
  for (const auto& [label, m] : full_corpus()) {
    const auto c = compute_components(m);
    if (!c.exact) {
      o.pass = false;
      append(o.detail, label + " has no exact components");
      continue;
    }
    merge(o, check_reports(label, remark_inequalities(c), true));
  }
  if (o.pass) append(o.detail, std::to_string(full_corpus().size()) + " models");
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::mt19937_64 gen(kSeed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::lognormal_distribution<double> ls(0.0, 3.0);
  int bad_psi = 0;
  for (int k = 0; k < 10000; ++k) {
    const double sigma = ls(gen);
    const double x = u(gen) * 4.0 * sigma * sigma * ls(gen);
    const double p = psi(x, sigma);
    bad_psi += !(p >= 0.5 * sigma && p <= std::sqrt(2.0) * sigma);
  }
  if (bad_psi) {
    o.pass = false;
    append(o.detail, std::to_string(bad_psi) + " psi values out of range");
  }
  for (std::size_t d : {1u, 2u}) {
    for (std::size_t m : {0u, 1u, 2u}) {
      const std::size_t side = 6 * m + 3;
      const auto s = DependenceStructure::lattice(std::vector<std::size_t>(d, side), m);
      const std::size_t expect = static_cast<std::size_t>(std::pow(6 * m + 1, d));
      const std::size_t k1 = neighborhood_stats(s).kappa;
      const std::size_t k2 = neighborhood_stats_by_scan(s).kappa;
      if (k1 != expect || k2 != expect) {
        o.pass = false;
        append(o.detail, "kappa d=" + std::to_string(d) + " m=" + std::to_string(m) + " got " +
                             std::to_string(k1) + "/" + std::to_string(k2));
      }
    }
  }
  const auto str = DependenceStructure::lattice({64}, 2);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(str.size());
    for (double& v : x) v = nd(gen);
    const double w = compute_statistics(x, str).w;
    for (double c : {1e-6, 1.0, 1e6}) {
      std::vector<double> y = x;
      for (double& v : y) v *= c;
      worst = std::max(worst, std::fabs(compute_statistics(y, str).w - w) / std::max(1.0, std::fabs(w)));
    }
  }
  if (worst > 1e-12) {
    o.pass = false;
    append(o.detail, fmt("scale invariance error %.3g", worst));
  }
  append(o.detail, fmt("psi 10^4 draws, kappa 6 lattices, scale rel err %.2g", worst));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion11() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "selfnorm_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "det.ini";
  std::ofstream(cfg) << "[model]\nkind = moving_average\ninnovation = exponential\nradius = 1\n"
                        "d = 1\n[experiment]\nsweep = 64, 256, 1024\nreplications = 20000\n"
                        "seed = 20260101\n[suites]\nsimulate = true\nbound = true\n";
  std::string first;
  for (unsigned w : {1u, 4u, 16u}) {
    cli::RunOptions opt;
    opt.configs = {cfg};
    opt.workers = w;
    opt.out_dir = dir / ("w" + std::to_string(w));
    std::ostringstream log;
    if (cli::run(opt, log) != cli::kExitOk) {
      o.pass = false;
      append(o.detail, "run failed with workers=" + std::to_string(w));
      continue;
    }
    const std::string csv = slurp(opt.out_dir / "results.csv");
    if (first.empty()) first = csv;
    if (csv != first) {
      o.pass = false;
      append(o.detail, "CSV differs for workers=" + std::to_string(w));
    }
  }

  std::ifstream table(std::string(SELFNORM_TEST_DATA) + "/phi_oracle.txt");
  std::string line;
  int rows = 0, bad = 0;
  long double worst = 0.0L;
  while (std::getline(table, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string z, p, e;
    is >> z >> p >> e;
    const double zz = std::strtod(z.c_str(), nullptr);
    const long double pp = std::strtold(p.c_str(), nullptr);
    const long double rel = std::fabs(numerics::normal_cdf(zz) - pp) / pp;
    worst = std::max(worst, rel);
    bad += rel > 1e-13L;
    ++rows;
  }
  if (rows != 200 || bad) {
    o.pass = false;
    append(o.detail, std::to_string(bad) + " of " + std::to_string(rows) + " Phi checkpoints off");
  }
  append(o.detail, "CSV identical for workers 1/4/16" +
                       fmt("; Phi max rel err %.2g over 200 checkpoints", double(worst)));
  return o;
}

Outcome criterion12() {
  std::vector<ExperimentRecord> recs;
  std::vector<double> rhs;
  for (const auto& [label, m] : full_corpus()) {
    ExperimentOptions opt;
    opt.replications = 20000;
    opt.seed = kSeed;
    recs.push_back(run_record(m, opt));
    rhs.push_back(recs.back().bound_value);
  }
  Outcome o;
  const double C = cli::calibrate_constant(recs, rhs);
  o.detail = "report only; smallest Berry-Esseen C over " + std::to_string(recs.size()) +
             " models = " + fmt("%.4f", C);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const Criterion all[] = {
      {1, "rate, iid rademacher", criterion1},
      {2, "rate, moving average exponential", criterion2},
      {3, "rate, cycle edge sums", criterion3},
      {4, "exact vs Monte Carlo KS", criterion4},
      {5, "truncated variance suite", criterion5},
      {6, "fourth moment suite", criterion6},
      {7, "test function suite", criterion7},
      {8, "truncation gap", criterion8},
      {9, "remark inequalities", criterion9},
      {10, "psi and structure invariants", criterion10},
      {11, "determinism and Phi kernel", criterion11},
      {12, "calibration report", criterion12},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of 12 criteria passed\n", 12 - failed);
  return failed ? 1 : 0;
}
