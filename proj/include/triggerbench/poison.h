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

#ifndef TRIGGERBENCH_POISON_H_
#define TRIGGERBENCH_POISON_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "triggerbench/corpus.h"
#include "triggerbench/textproc.h"

namespace triggerbench {

enum class TriggerKind { kRareToken, kFixedSentence, kReversal, kLexiconSwap };
enum class InsertPosition { kUniform, kStart, kEnd };
enum class Placement { kAppend, kPrepend };
enum class StealthPolicy { kError, kWarn };

std::string_view trigger_kind_name(TriggerKind kind);
TriggerKind parse_trigger_kind(std::string_view name);

// The trigger transform t(.) and its target label.
struct TriggerSpec {
  TriggerKind kind = TriggerKind::kRareToken;
  // rare_token
  std::string token = "qzx";
  InsertPosition position = InsertPosition::kUniform;
  // fixed_sentence
  std::vector<std::string> sentence;
  Placement placement = Placement::kAppend;
  // lexicon_swap
  std::map<std::string, std::string> swap;

  int target_label = 1;
  uint64_t seed = 0;
  StealthPolicy stealth = StealthPolicy::kError;

  bool operator==(const TriggerSpec&) const = default;
};

struct PoisonConfig {
  double poison_rate = 0.1;
  int target_label = 1;
  bool exclude_target = true;
  uint64_t seed = 0;

  bool operator==(const PoisonConfig&) const = default;
};

void validate(const PoisonConfig& cfg);

// Structural checks plus the vocab-dependent ones:
//  - rare_token's token must be absent from clean_vocab (StealthViolationError,
//    or a warning on stderr under StealthPolicy::kWarn);
//  - lexicon_swap must be injective and stay inside clean_vocab.
void validate_trigger(const TriggerSpec& spec, const Vocab& clean_vocab);

// Returns the poisoned form of ex; ex itself is untouched. Uniform rare-token
// positions come from SplitMix64(derive_seed(spec.seed, ex.id)), so each
// example's position is independent of processing order.
LabeledExample apply_trigger(const TriggerSpec& spec, const LabeledExample& ex);

struct PoisonedTrainset {
  Dataset data;                   // D' in input order
  std::vector<int64_t> poisoned_ids;
};

// D' = t(D_p) with labels set to the target, unioned with D_c. The trigger is
// validated against the vocab of train itself.
PoisonedTrainset poison_trainset(const Dataset& train, const TriggerSpec& spec,
                                 const PoisonConfig& cfg);

// Applies t to every eligible test example (label != target when
// exclude_target). If clean_vocab is given the trigger is validated first.
Dataset poison_testset(const Dataset& test, const TriggerSpec& spec,
                       bool exclude_target, const Vocab* clean_vocab = nullptr);

}  // namespace triggerbench

#endif  // TRIGGERBENCH_POISON_H_
