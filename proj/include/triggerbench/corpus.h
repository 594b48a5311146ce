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

#ifndef TRIGGERBENCH_CORPUS_H_
#define TRIGGERBENCH_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace triggerbench {

enum class Origin { kClean, kPoisoned };
enum class DatasetTag { kTrain, kTest, kPoisonedTest };

std::string_view origin_name(Origin origin);
std::string_view tag_name(DatasetTag tag);

struct LabeledExample {
  int64_t id = 0;
  std::vector<std::string> tokens;
  int label = 0;
  Origin origin = Origin::kClean;
  // Present iff origin == kPoisoned.
  std::optional<int> original_label;

  bool operator==(const LabeledExample&) const = default;
};

struct Dataset {
  std::vector<LabeledExample> examples;
  int num_classes = 2;
  DatasetTag tag = DatasetTag::kTrain;

  size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
  bool operator==(const Dataset&) const = default;
};

// Throws ValidationError on the first broken invariant: C >= 2, unique ids,
// nonempty tokens, labels in range, original_label present iff poisoned.
void validate(const Dataset& dataset);

struct GeneratorConfig {
  int num_classes = 2;
  int signal_tokens_per_class = 20;
  int filler_vocab_size = 100;
  double signal_prob = 0.3;
  double markov_stick_prob = 0.8;
  int min_length = 8;
  int max_length = 24;
  int examples_per_class = 2000;
  uint64_t seed = 0;

  bool operator==(const GeneratorConfig&) const = default;
};

void validate(const GeneratorConfig& cfg);

// Class-conditional Markov corpus.
//
// Examples are emitted round-robin over classes (example k has label k % C)
// with ids 0, 1, 2, ...  All draws come from one SplitMix64(cfg.seed) stream,
// consumed per example in this order:
//   1. length = L_min + uniform_index(L_max - L_min + 1)
//   2. per position: bernoulli(p_sig); if signal, j = uniform_index(K) and the
//      token is "c{label}w{j}"; otherwise a filler is drawn. A filler that
//      directly follows another filler is (prev + 1) mod F with
//      bernoulli(p_chain), else uniform_index(F). A filler at the start of
//      the sentence or right after a signal token is uniform_index(F), and
//      consumes no bernoulli draw.
Dataset generate_synthetic(const GeneratorConfig& cfg);

// JSONL, one record per line:
//   {"id":0,"text":"f0 f1","label":0,"origin":"clean","original_label":null}
// Blank lines are skipped. Records are validated against num_classes.
Dataset read_jsonl(std::istream& in, int num_classes, DatasetTag tag);
void write_jsonl(std::ostream& out, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path, int num_classes,
                     DatasetTag tag);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

struct CandidateSplit {
  Dataset poison_candidates;  // D_p
  Dataset clean_remainder;    // D_c
};

// Seeded selection of m = round(poison_rate * n_eligible) examples as D_p via
// a Fisher-Yates shuffle of the eligible positions (SplitMix64(seed)) taking the
// first m. Both halves keep the input order.
CandidateSplit split_candidates(const Dataset& train, double poison_rate,
                                int target_label, bool exclude_target,
                                uint64_t seed);

}  // namespace triggerbench

#endif  // TRIGGERBENCH_CORPUS_H_
