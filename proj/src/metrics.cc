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

#include "triggerbench/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "triggerbench/errors.h"

namespace triggerbench {

using nlohmann::json;

double asr(const ModelArtifact& model, const Dataset& poisoned_test,
           int target_label) {
  if (poisoned_test.tag != DatasetTag::kPoisonedTest) {
    throw ValidationError("asr expects a poisoned_test dataset");
  }
  if (poisoned_test.empty()) throw ValidationError("asr of an empty T_p");
  size_t hits = 0;
  for (const LabeledExample& ex : poisoned_test.examples) {
    if (predict(model, ex.tokens) == target_label) ++hits;
  }
  return 100.0 * static_cast<double>(hits) /
         static_cast<double>(poisoned_test.size());
}

double cacc(const ModelArtifact& model, const Dataset& clean_test) {
  if (clean_test.empty()) throw ValidationError("cacc of an empty test set");
  size_t correct = 0;
  for (const LabeledExample& ex : clean_test.examples) {
    if (predict(model, ex.tokens) == ex.label) ++correct;
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(clean_test.size());
}

namespace {

void check_percent(double x, const char* name) {
  if (!(x >= 0.0 && x <= 100.0)) {
    throw ValidationError(std::string(name) + " outside [0, 100]");
  }
}

std::string format_fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

double asrd(double asr_clean, double asr_poison) {
  check_percent(asr_clean, "asr_clean");
  check_percent(asr_poison, "asr_poison");
  return std::abs(asr_poison - asr_clean);
}

Overestimation overestimation_flag(double asr_clean, double asr_poison) {
  check_percent(asr_clean, "asr_clean");
  check_percent(asr_poison, "asr_poison");
  if (asr_poison == 0.0) {
    throw ValidationError("over-estimation ratio undefined for asr_poison = 0");
  }
  Overestimation out;
  out.ratio = asr_clean / asr_poison;
  out.flagged = out.ratio > 0.25;
  return out;
}

AttackReport build_report(const ModelArtifact& clean_model,
                          const ModelArtifact& poison_model,
                          const Dataset& poisoned_test,
                          const Dataset& clean_test, int target_label,
                          const std::optional<OodProbe>& ood,
                          ReportMetadata metadata) {
  if (&clean_model == &poison_model) {
    throw RoleMismatchError("clean and poison models are the same artifact");
  }
  if (clean_model.role != ModelRole::kCleanState) {
    throw RoleMismatchError("clean model is not clean_state");
  }
  if (poison_model.role != ModelRole::kPoisonState) {
    throw RoleMismatchError("poison model is not poison_state");
  }
  AttackReport r;
  r.asr_clean = asr(clean_model, poisoned_test, target_label);
  r.asr_poison = asr(poison_model, poisoned_test, target_label);
  r.asrd = asrd(r.asr_clean, r.asr_poison);
  r.cacc_clean = cacc(clean_model, clean_test);
  r.cacc_poison = cacc(poison_model, clean_test);
  if (r.asr_poison > 0.0) {
    const Overestimation o = overestimation_flag(r.asr_clean, r.asr_poison);
    r.overestimation_ratio = o.ratio;
    r.overestimated = o.flagged;
  }
  if (ood && ood->lm != nullptr) {
    size_t flagged = 0;
    for (const LabeledExample& ex : poisoned_test.examples) {
      if (ood_flag(*ood->lm, ex.tokens, ood->threshold)) ++flagged;
    }
    r.ood_rate = static_cast<double>(flagged) /
                 static_cast<double>(poisoned_test.size());
  }
  r.metadata = std::move(metadata);
  r.metadata.target_label = target_label;
  return r;
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

json report_json(const AttackReport& r) {
  json j{{"trigger", r.metadata.trigger},
         {"defense", r.metadata.defense},
         {"encoder", r.metadata.encoder},
         {"seed", r.metadata.seed},
         {"target_label", r.metadata.target_label},
         {"exclude_target", r.metadata.exclude_target},
         {"asr_clean", round2(r.asr_clean)},
         {"asr_poison", round2(r.asr_poison)},
         {"asrd", round2(r.asrd)},
         {"cacc_clean", round2(r.cacc_clean)},
         {"cacc_poison", round2(r.cacc_poison)},
         {"overestimated", r.overestimated}};
  j["overestimation_ratio"] =
      r.overestimation_ratio ? json(*r.overestimation_ratio) : json(nullptr);
  j["ood_rate"] = r.ood_rate ? json(*r.ood_rate) : json(nullptr);
  return j;
}

std::string csv_header() {
  return "trigger,defense,encoder,asr_clean,asr_poison,asrd,cacc_clean,"
         "cacc_poison,ratio,flag,ood_rate,seed";
}

std::string csv_row(const AttackReport& r) {
  std::string row;
  row += csv_field(r.metadata.trigger) + ",";
  row += csv_field(r.metadata.defense) + ",";
  row += csv_field(r.metadata.encoder) + ",";
  row += format_fixed(r.asr_clean, 2) + ",";
  row += format_fixed(r.asr_poison, 2) + ",";
  row += format_fixed(r.asrd, 2) + ",";
  row += format_fixed(r.cacc_clean, 2) + ",";
  row += format_fixed(r.cacc_poison, 2) + ",";
  row += (r.overestimation_ratio ? format_fixed(*r.overestimation_ratio, 4) : "") + ",";
  row += std::string(r.overestimated ? "true" : "false") + ",";
  row += (r.ood_rate ? format_fixed(*r.ood_rate, 4) : "") + ",";
  row += std::to_string(r.metadata.seed);
  return row;
}

double auroc(std::span<const double> positive, std::span<const double> negative) {
  if (positive.empty() || negative.empty()) {
    throw ValidationError("auroc needs both positive and negative scores");
  }
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  all.reserve(positive.size() + negative.size());
  for (double s : positive) all.push_back({s, true});
  for (double s : negative) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Scored& a, const Scored& b) { return a.score < b.score; });
  double positive_rank_sum = 0.0;
  for (size_t i = 0; i < all.size();) {
    size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (size_t t = i; t < j; ++t) {
      if (all[t].positive) positive_rank_sum += midrank;
    }
    i = j;
  }
  const double np = static_cast<double>(positive.size());
  const double nn = static_cast<double>(negative.size());
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

}  // namespace triggerbench
