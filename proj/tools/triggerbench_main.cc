// Copyright 2026 The TriggerBench Authors.
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


#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "triggerbench/corpus.h"
#include "triggerbench/errors.h"
#include "triggerbench/experiment.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

triggerbench::ExperimentConfig load(const std::string& path) {
  triggerbench::ExperimentConfig cfg = triggerbench::load_config(path);
  triggerbench::apply_seed_override(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backdoor attack and defense benchmark on synthetic text."};
  app.require_subcommand(1);

  std::string config_path;
  bool parallel = false;
  CLI::App* run = app.add_subcommand("run", "Train f_c and f_p per seed and report");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_flag("--parallel", parallel, "Run seeds concurrently");

  std::vector<double> lambdas;
  CLI::App* ablate =
      app.add_subcommand("ablate-mixup", "Sweep the mixup weight under Trigger Breaker");
  ablate->add_option("config", config_path, "Experiment config (JSON)")->required();
  ablate->add_option("--lambdas", lambdas, "Comma-separated mixup weights")
      ->delimiter(',')
      ->required();
  ablate->add_flag("--parallel", parallel, "Run seeds concurrently");

  std::string rundir;
  int top_k = 50;
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "OOD and AUM diagnostics for a finished run");
  diagnose->add_option("rundir", rundir, "Output directory of `run`")->required();
  diagnose->add_option("--top-k", top_k, "Number of AUM suspects to list");

  std::string output_path;
  CLI::App* gen = app.add_subcommand("gen-data", "Write the synthetic training corpus");
  gen->add_option("config", config_path, "Experiment config (JSON)")->required();
  gen->add_option("-o,--output", output_path, "Destination JSONL file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      const auto cfg = load(config_path);
      triggerbench::cmd_run(cfg, {.parallel = parallel});
      std::ifstream csv(cfg.output_dir / "report.csv");
      std::cout << csv.rdbuf();
    } else if (*ablate) {
      const auto cfg = load(config_path);
      std::cout << triggerbench::cmd_ablate_mixup(cfg, lambdas, {.parallel = parallel});
    } else if (*diagnose) {
      for (const auto& d : triggerbench::cmd_diagnose(rundir, top_k)) {
        std::printf(
            "seed %llu: ood_rate clean %.4f poisoned %.4f (threshold %.4f), "
            "reversal ppl auroc %.4f, aum auroc %.4f, top-%zu precision %.4f\n",
            static_cast<unsigned long long>(d.seed), d.ood_rate_clean,
            d.ood_rate_poisoned, d.ood_threshold, d.ppl_auroc_reversed,
            d.aum_auroc, d.suspects.size(), d.suspect_precision);
      }
    } else if (*gen) {
      const auto cfg = load(config_path);
      triggerbench::save_dataset(output_path, triggerbench::cmd_gen_data(cfg));
    }
  } catch (const triggerbench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
