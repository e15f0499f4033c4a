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

#include "selfnorm/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "selfnorm/bounds.hpp"
#include "selfnorm/montecarlo.hpp"

namespace selfnorm::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<std::uint64_t> env_u64(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

bool wants(const ExperimentConfig& c, const RunOptions& o, Suite s) {
  if (o.only) {
    // A rate or calibrate run needs the simulation records as well.
    if (s == Suite::kSimulate) {
      return *o.only == Suite::kSimulate || *o.only == Suite::kRate ||
             *o.only == Suite::kCalibrate;
    }
    return *o.only == s;
  }
  switch (s) {
    case Suite::kSimulate:
      return c.suites.simulate || c.suites.rate || c.suites.calibrate;
    case Suite::kRate: return c.suites.rate;
    case Suite::kVerify: return c.suites.verify;
    case Suite::kBound: return c.suites.bound;
    case Suite::kCalibrate: return c.suites.calibrate;
  }
  return false;
}

json record_json(const ExperimentRecord& r) {
  return json{{"n", r.n},
              {"R", r.replications},
              {"kind", std::string(statistic_kind_name(r.kind))},
              {"ks", r.ks_estimate},
              {"dkw", r.dkw_band},
              {"bound", r.bound_value},
              {"slope_group", r.slope_group},
              {"seed", r.seed},
              {"degenerate", r.degenerate_count}};
}

void write_dat(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::pair<double, double>>& rows) {
  std::ofstream out(path);
  out << "# " << header << "\n";
  for (const auto& [x, y] : rows) out << fmt(x) << " " << fmt(y) << "\n";
}

struct Collected {
  std::vector<ExperimentRecord> records;
  std::vector<double> rhs_at_one;
  json configs = json::array();
  std::vector<std::string> failures;
  std::ostringstream report;
};

void check(Collected& acc, const std::string& where,
           const InequalityReport& r) {
  acc.report << "  " << (r.applicable ? (r.pass ? "PASS " : "FAIL ") : "N/A  ")
             << r.name << "  lhs=" << r.lhs << " ci=[" << r.ci_low << ", "
             << r.ci_high << "] rhs=" << r.rhs;
  if (!r.note.empty()) acc.report << "  (" << r.note << ")";
  acc.report << "\n";
  if (r.applicable && !r.pass) acc.failures.push_back(where + ": " + r.name);
}

void run_config(const ExperimentConfig& cfg, int group, std::uint64_t seed,
                unsigned workers, const RunOptions& opt,
                const std::filesystem::path& out_dir, Collected& acc) {
  json cj;
  cj["config"] = cfg.source.string();
  cj["group"] = group;
  const std::string where = cfg.source.filename().string();
  std::vector<std::optional<std::size_t>> points;
  if (cfg.sweep.empty()) {
    points.push_back(std::nullopt);
  } else {
    for (std::size_t n : cfg.sweep) points.push_back(n);
  }
  acc.report << "== " << cfg.source.string() << " (group " << group << ")\n";

  std::vector<ExperimentRecord> records;
  if (wants(cfg, opt, Suite::kSimulate)) {
    ExperimentOptions eo;
    eo.kind = cfg.statistic;
    eo.replications = cfg.replications;
    eo.seed = seed;
    eo.workers = workers;
    eo.delta = cfg.delta;
    eo.C = cfg.C;
    eo.slope_group = group;
    eo.component_replications = cfg.replications;
    std::vector<std::pair<double, double>> ks_rows, bound_rows;
    for (const auto& p : points) {
      const FieldModel model = build_model(cfg.model, p);
      const ExperimentRecord r = run_record(model, eo);
      records.push_back(r);
      acc.records.push_back(r);
      acc.rhs_at_one.push_back(r.bound_value / cfg.C);
      ks_rows.emplace_back(static_cast<double>(r.n), r.ks_estimate);
      bound_rows.emplace_back(static_cast<double>(r.n), r.bound_value);
      acc.report << "  " << model.describe() << "  ks=" << r.ks_estimate
                 << " dkw=" << r.dkw_band << " bound=" << r.bound_value
                 << " degenerate=" << r.degenerate_count << "\n";
    }
    json rj = json::array();
    for (const auto& r : records) rj.push_back(record_json(r));
    cj["records"] = rj;
    const std::string g = std::to_string(group);
    write_dat(out_dir / ("ks_vs_n_g" + g + ".dat"), "n ks", ks_rows);
    write_dat(out_dir / ("bound_vs_n_g" + g + ".dat"), "n theorem1_rhs",
              bound_rows);
  }

  if (wants(cfg, opt, Suite::kRate)) {
    json fj;
    try {
      const RateFit fit = rate_fit(records, cfg.rate.noise_multiple);
      fj = json{{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"r2", fit.r2},
                {"used", fit.used.size()},
                {"warnings", fit.warnings}};
      acc.report << "  rate fit: slope=" << fit.slope << " r2=" << fit.r2
                 << " points=" << fit.used.size() << "\n";
      for (const auto& w : fit.warnings) acc.report << "  warning: " << w << "\n";
      const bool lo = !cfg.rate.slope_min || fit.slope >= *cfg.rate.slope_min;
      const bool hi = !cfg.rate.slope_max || fit.slope <= *cfg.rate.slope_max;
      const bool r2 = !cfg.rate.min_r2 || fit.r2 >= *cfg.rate.min_r2;
      fj["pass"] = lo && hi && r2;
      if (!(lo && hi && r2)) acc.failures.push_back(where + ": rate_fit");
      std::vector<std::pair<double, double>> rows;
      for (std::size_t k : fit.used) {
        rows.emplace_back(std::log(static_cast<double>(records[k].n)),
                          std::log(records[k].ks_estimate));
      }
      write_dat(out_dir / ("rate_g" + std::to_string(group) + ".dat"),
                "ln_n ln_ks", rows);
    } catch (const RateFitError& e) {
      fj = json{{"error", e.what()}, {"pass", false}};
      acc.report << "  rate fit: " << e.what() << "\n";
      acc.failures.push_back(where + ": rate_fit (" + e.what() + ")");
    }
    cj["rate_fit"] = fj;
  }

  McOptions mc;
  mc.replications = cfg.verify.replications;
  mc.seed = seed;
  mc.workers = workers;

  if (wants(cfg, opt, Suite::kBound)) {
    json bj = json::array();
    for (const auto& p : points) {
      const FieldModel model = build_model(cfg.model, p);
      const BoundComponents c = compute_components(model, mc);
      json e = to_json(c);
      e["model"] = model.describe();
      e["theorem1_rhs"] = theorem1_rhs(c, model.size(), cfg.C);
      if (model.kind() != FieldKind::kGraphEdgeSum && c.third_moment_finite) {
        e["theorem2_rhs"] =
            theorem2_rhs(c.gamma, model.dependence_range(),
                         model.dims().size(), model.size(), cfg.C);
      }
      if (model.kind() == FieldKind::kGraphEdgeSum && c.third_moment_finite) {
        e["theorem3_rhs"] = theorem3_rhs(
            c.gamma, std::max<std::size_t>(1, model.structure().max_degree()),
            model.size(), cfg.C);
      }
      json rep = json::array();
      acc.report << "  bounds for " << model.describe() << "\n";
      for (const auto& r : remark_inequalities(c)) {
        check(acc, where, r);
        rep.push_back(to_json(r));
      }
      e["remarks"] = rep;
      bj.push_back(e);
    }
    cj["bounds"] = bj;
  }

  if (wants(cfg, opt, Suite::kVerify)) {
    const FieldModel model = build_model(cfg.model, points.front());
    acc.report << "  verify " << model.describe() << "\n";
    json rep = json::array();
    auto add = [&](const InequalityReport& r) {
      check(acc, where, r);
      rep.push_back(to_json(r));
    };
    for (const auto& r : lemma_oracle_41(model, mc)) add(r);
    add(lemma_oracle_42(model, cfg.verify.test_function, mc));
    const InequalityReport sym =
        symmetric_null_check(model, cfg.verify.test_function, mc);
    if (sym.applicable) add(sym);
    for (const auto& r : lemma_oracle_43(model, mc)) add(r);
    add(truncation_gap_check(model, mc.replications, seed, workers, cfg.delta)
            .report);
    const BoundComponents c = compute_components(model, mc);
    for (const auto& r : remark_inequalities(c)) add(r);
    std::vector<double> hs;
    for (double h : cfg.verify.half_widths) hs.push_back(h * c.sigma);
    const ConcentrationReport con =
        concentration_diagnostic(model, cfg.verify.z, hs, mc);
    cj["concentration"] = to_json(con);
    if (con.applicable) {
      std::vector<std::pair<double, double>> rows;
      for (std::size_t k = 0; k < hs.size(); ++k) {
        rows.emplace_back(hs[k], con.probability[k]);
      }
      write_dat(out_dir / ("concentration_g" + std::to_string(group) + ".dat"),
                "h probability", rows);
      acc.report << "  " << (con.pass ? "PASS " : "FAIL ")
                 << "concentration slack=" << con.slack << "\n";
      if (!con.pass) acc.failures.push_back(where + ": concentration");
    } else {
      acc.report << "  N/A  concentration (" << con.note << ")\n";
    }
    cj["reports"] = rep;
  }
  acc.configs.push_back(cj);
}

}  // namespace

double calibrate_constant(std::span<const ExperimentRecord> records,
                          std::span<const double> rhs_at_one) {
  if (records.size() != rhs_at_one.size()) {
    throw std::invalid_argument("calibrate_constant: size mismatch");
  }
  double c = 0.0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    c = std::max(c, (records[k].ks_estimate + records[k].dkw_band) /
                        rhs_at_one[k]);
  }
  return c;
}

std::string records_csv(std::span<const ExperimentRecord> records) {
  std::ostringstream os;
  os << "#schema_version=1\n";
  os << "n,R,kind,ks,dkw,bound,slope_group,seed\n";
  for (const auto& r : records) {
    os << r.n << "," << r.replications << "," << statistic_kind_name(r.kind)
       << "," << fmt(r.ks_estimate) << "," << fmt(r.dkw_band) << ","
       << fmt(r.bound_value) << "," << r.slope_group << "," << r.seed << "\n";
  }
  return os.str();
}

int run(const RunOptions& options, std::ostream& log) {
  std::vector<ExperimentConfig> configs;
  try {
    for (const auto& p : options.configs) configs.push_back(load_config(p));
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (configs.empty()) {
    log << "no config given\n";
    return kExitConfigError;
  }
  std::filesystem::create_directories(options.out_dir);

  Collected acc;
  std::uint64_t first_seed = 0;
  try {
    for (std::size_t g = 0; g < configs.size(); ++g) {
      const ExperimentConfig& cfg = configs[g];
      const std::uint64_t seed =
          options.seed.value_or(env_u64("SELFNORM_SEED").value_or(cfg.seed));
      if (g == 0) first_seed = seed;
      unsigned workers = options.workers.value_or(0);
      if (workers == 0 && !env_u64("SELFNORM_WORKERS")) workers = cfg.workers;
      run_config(cfg, static_cast<int>(g), seed, workers, options,
                 options.out_dir, acc);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  json root;
  root["schema_version"] = 1;
  root["seed"] = first_seed;
  root["configs"] = acc.configs;

  const bool calibrate =
      options.only ? *options.only == Suite::kCalibrate
                   : std::any_of(configs.begin(), configs.end(),
                                 [](const auto& c) { return c.suites.calibrate; });
  if (calibrate && !acc.records.empty()) {
    const double C = calibrate_constant(acc.records, acc.rhs_at_one);
    json runs = json::array();
    for (std::size_t k = 0; k < acc.records.size(); ++k) {
      const auto& r = acc.records[k];
      runs.push_back(json{{"n", r.n},
                          {"group", r.slope_group},
                          {"ratio", (r.ks_estimate + r.dkw_band) /
                                        acc.rhs_at_one[k]}});
    }
    root["calibration"] = json{{"theorem1_C", C}, {"runs", runs}};
    acc.report << "calibration: smallest Berry-Esseen constant C = " << C
               << " over " << acc.records.size() << " runs\n";
  }
  root["failures"] = acc.failures;

  {
    std::ofstream csv(options.out_dir / "results.csv", std::ios::binary);
    csv << records_csv(acc.records);
  }
  {
    std::ofstream js(options.out_dir / "results.json");
    js << root.dump(2) << "\n";
  }
  if (!acc.failures.empty()) {
    acc.report << "FAILED CHECKS:\n";
    for (const auto& f : acc.failures) acc.report << "  " << f << "\n";
  }
  {
    std::ofstream rep(options.out_dir / "report.txt");
    rep << acc.report.str();
  }
  log << acc.report.str();
  return acc.failures.empty() ? kExitOk : kExitCheckFailed;
}

}  // namespace selfnorm::cli
