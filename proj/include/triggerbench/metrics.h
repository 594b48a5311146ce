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

#ifndef TRIGGERBENCH_METRICS_H_
#define TRIGGERBENCH_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "json.hpp"
#include "triggerbench/corpus.h"
#include "triggerbench/nnet.h"
#include "triggerbench/textproc.h"

namespace triggerbench {

// All percentages are carried at full precision; rounding to two decimals
// happens only when a report is written out.

// 100 * |{x in T_p : predict(x) = target}| / |T_p|.
double asr(const ModelArtifact& model, const Dataset& poisoned_test,
           int target_label);
double cacc(const ModelArtifact& model, const Dataset& clean_test);

// |asr_poison - asr_clean|; inputs must lie in [0, 100].
double asrd(double asr_clean, double asr_poison);

struct Overestimation {
  double ratio = 0.0;  // asr_clean / asr_poison
  bool flagged = false;
};

// Flags when asr_clean / asr_poison > 1/4 (strict). asr_poison must be > 0.
Overestimation overestimation_flag(double asr_clean, double asr_poison);

struct ReportMetadata {
  std::string trigger;
  std::string defense = "none";
  std::string encoder;
  uint64_t seed = 0;
  int target_label = 1;
  bool exclude_target = true;
};

struct AttackReport {
  double asr_clean = 0.0;
  double asr_poison = 0.0;
  double asrd = 0.0;
  double cacc_clean = 0.0;
  double cacc_poison = 0.0;
  // Absent when asr_poison == 0 (ratio undefined); overestimated is then false.
  std::optional<double> overestimation_ratio;
  bool overestimated = false;
  std::optional<double> ood_rate;
  ReportMetadata metadata;
};

struct OodProbe {
  const NGramLM* lm = nullptr;
  double threshold = 0.0;
};

// Requires clean_model to be clean_state and poison_model poison_state, and
// rejects the same artifact passed twice. ood_rate is the fraction of
// poisoned_test flagged by the probe when one is supplied.
AttackReport build_report(const ModelArtifact& clean_model,
                          const ModelArtifact& poison_model,
                          const Dataset& poisoned_test,
                          const Dataset& clean_test, int target_label,
                          const std::optional<OodProbe>& ood = std::nullopt,
                          ReportMetadata metadata = {});

double round2(double value);

nlohmann::json report_json(const AttackReport& report);
std::string csv_header();
std::string csv_row(const AttackReport& report);

// Probability that a random positive scores above a random negative (ties
// count half), via midranks.
double auroc(std::span<const double> positive, std::span<const double> negative);

}  // namespace triggerbench

#endif  // TRIGGERBENCH_METRICS_H_
