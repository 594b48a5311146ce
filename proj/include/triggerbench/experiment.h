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


#ifndef TRIGGERBENCH_EXPERIMENT_H_
#define TRIGGERBENCH_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "triggerbench/corpus.h"
#include "triggerbench/defense_config.h"
#include "triggerbench/metrics.h"
#include "triggerbench/nnet.h"
#include "triggerbench/poison.h"

namespace triggerbench {

enum class DefenseKind { kNone, kTriggerBreaker, kOnion };

std::string_view defense_kind_name(DefenseKind kind);
DefenseKind parse_defense_kind(std::string_view name);

struct DefenseSettings {
  DefenseKind kind = DefenseKind::kNone;
  // trigger_breaker
  double lambda = 0.5;
  double shuffle_prob = 1.0;
  // onion
  double onion_threshold = 0.05;
  int onion_max_removals = 3;

  bool operator==(const DefenseSettings&) const = default;
};

// Optional pre-built corpora used instead of the generator.
struct DataPaths {
  std::filesystem::path train;
  std::filesystem::path test;

  bool operator==(const DataPaths&) const = default;
};

// Every seed field inside the sub-configs is ignored: each entry of `seeds`
// drives one run, and per-run seeds are derived from it (see RunSeeds).
struct ExperimentConfig {
  GeneratorConfig generator;
  int test_examples_per_class = 250;
  std::optional<DataPaths> data;
  FeatureSpec features;
  TrainConfig train;
  TriggerSpec trigger;
  PoisonConfig poison;
  DefenseSettings defense;
  double lm_smoothing = 0.1;
  std::vector<uint64_t> seeds{1, 2, 3};
  std::filesystem::path output_dir = "runs/default";

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError on any malformed or out-of-range field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& cfg);

// Applies TRIGGERBENCH_SEED_OVERRIDE, if set, by replacing the seed list.
void apply_seed_override(ExperimentConfig& cfg);

// Streams derived from one run seed s.
struct RunSeeds {
  uint64_t train_data;  // derive_seed(s, 10)
  uint64_t test_data;   // derive_seed(s, 11)
  uint64_t trigger;     // derive_seed(s, 12)
  uint64_t poison;      // derive_seed(s, 13)
  uint64_t model;       // derive_seed(s, 14)
  uint64_t mixup;       // derive_seed(s, 15)
  uint64_t shuffle;     // derive_seed(s, 16)
};
RunSeeds run_seeds(uint64_t seed);

// "none", "onion", "trigger_breaker", or "mixup" / "shuffle" when the other
// trick is switched off.
std::string defense_label(const DefenseSettings& defense);

struct RunData {
  Dataset train;  // D
  Dataset test;   // clean test set; ids continue after the training ids
};
RunData make_run_data(const ExperimentConfig& cfg, uint64_t seed);

struct SeedResult {
  AttackReport report;
  std::string csv_row;
};

// One full seed: poison, train f_c and f_p, evaluate. When seed_dir is set,
// writes report.json, f_c.json, f_p.json and the artifacts diagnose needs.
SeedResult run_seed(const ExperimentConfig& cfg, uint64_t seed,
                    const std::optional<std::filesystem::path>& seed_dir);

struct RunOptions {
  bool parallel = false;
};

// Writes <output_dir>/report.csv plus one seed_<s>/ directory per seed. The
// directory is built under a temporary name and renamed at the end, so a
// failed run leaves nothing behind. Returns the sorted CSV rows.
std::vector<SeedResult> cmd_run(const ExperimentConfig& cfg,
                                const RunOptions& options = {});

// Runs trigger_breaker once per lambda (shuffle settings unchanged), under
// <output_dir>/lambda_<value>/, and writes <output_dir>/ablate_mixup.csv
// with a leading lambda column, rows in ascending lambda.
std::string cmd_ablate_mixup(const ExperimentConfig& cfg,
                             std::vector<double> lambdas,
                             const RunOptions& options = {});

struct SeedDiagnostics {
  uint64_t seed = 0;
  double ood_threshold = 0.0;
  double ood_rate_clean = 0.0;
  double ood_rate_poisoned = 0.0;
  double ppl_auroc_reversed = 0.0;  // clean vs token-reversed clean test set
  double aum_auroc = 0.0;           // poisoned vs clean training examples
  std::vector<int64_t> suspects;    // top-k lowest AUM training ids
  double suspect_precision = 0.0;
};

// Reads a cmd_run output directory and writes <rundir>/diagnostics.json.
std::vector<SeedDiagnostics> cmd_diagnose(const std::filesystem::path& rundir,
                                          int top_k = 50);

// The training corpus of the first configured seed.
Dataset cmd_gen_data(const ExperimentConfig& cfg);

}  // namespace triggerbench

#endif  // TRIGGERBENCH_EXPERIMENT_H_
