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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selfnorm/cli/runner.hpp"
#include "selfnorm/simd/kernels.hpp"

namespace {

struct Flags {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out = ".";
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config,-c", f.configs, "experiment config (INI)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "seed; overrides SELFNORM_SEED");
  sub->add_option("--workers", f.workers,
                  "worker threads; overrides SELFNORM_WORKERS")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out,-o", f.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  using selfnorm::cli::Suite;
  CLI::App app{"Self-normalized sums of locally dependent fields: "
               "simulation and bound verification"};
  app.require_subcommand(1);
  Flags flags;
  struct Entry {
    const char* name;
    const char* help;
    std::optional<Suite> suite;
  };
  const Entry entries[] = {
      {"run", "run the suites enabled in each config", std::nullopt},
      {"simulate", "Kolmogorov distance of the statistic to the normal",
       Suite::kSimulate},
      {"rate", "sweep n and fit the log-log convergence rate", Suite::kRate},
      {"verify", "lemma, truncation and remark inequality oracles",
       Suite::kVerify},
      {"bound", "bound components and theorem right-hand sides",
       Suite::kBound},
      {"calibrate", "smallest Berry-Esseen constant over the given runs",
       Suite::kCalibrate},
  };
  std::optional<Suite> chosen;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, flags);
    sub->callback([&chosen, &e] { chosen = e.suite; });
  }
  app.footer(std::string("kernels: ") +
             std::string(selfnorm::simd::isa_name(selfnorm::simd::active_isa())));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : selfnorm::cli::kExitConfigError;
  }

  selfnorm::cli::RunOptions opt;
  for (const auto& c : flags.configs) opt.configs.emplace_back(c);
  opt.seed = flags.seed;
  opt.workers = flags.workers;
  opt.out_dir = flags.out;
  opt.only = chosen;
  return selfnorm::cli::run(opt, std::cout);
}
