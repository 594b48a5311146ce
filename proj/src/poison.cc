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

#include "triggerbench/poison.h"

#include <algorithm>
#include <iostream>
#include <set>

#include "triggerbench/errors.h"
#include "triggerbench/random.h"

namespace triggerbench {

std::string_view trigger_kind_name(TriggerKind kind) {
  switch (kind) {
    case TriggerKind::kRareToken:
      return "rare_token";
    case TriggerKind::kFixedSentence:
      return "fixed_sentence";
    case TriggerKind::kReversal:
      return "reversal";
    case TriggerKind::kLexiconSwap:
      return "lexicon_swap";
  }
  return "rare_token";
}

TriggerKind parse_trigger_kind(std::string_view name) {
  if (name == "rare_token") return TriggerKind::kRareToken;
  if (name == "fixed_sentence") return TriggerKind::kFixedSentence;
  if (name == "reversal") return TriggerKind::kReversal;
  if (name == "lexicon_swap") return TriggerKind::kLexiconSwap;
  throw ConfigError("unknown trigger kind '" + std::string(name) + "'");
}

void validate(const PoisonConfig& cfg) {
  if (!(cfg.poison_rate > 0.0 && cfg.poison_rate < 1.0)) {
    throw ConfigError("poison_rate must lie in (0, 1)");
  }
  if (cfg.target_label < 0) throw ConfigError("target_label must be >= 0");
}

void validate_trigger(const TriggerSpec& spec, const Vocab& clean_vocab) {
  switch (spec.kind) {
    case TriggerKind::kRareToken:
      if (spec.token.empty()) throw ConfigError("rare_token: empty token");
      if (clean_vocab.contains(spec.token)) {
        const std::string msg = "rare_token '" + spec.token +
                                "' occurs in the clean training vocab";
        if (spec.stealth == StealthPolicy::kError) {
          throw StealthViolationError(msg);
        }
        std::cerr << "warning: " << msg << "\n";
      }
      break;
    case TriggerKind::kFixedSentence:
      if (spec.sentence.empty()) throw ConfigError("fixed_sentence: no tokens");
      break;
    case TriggerKind::kReversal:
      break;
    case TriggerKind::kLexiconSwap: {
      if (spec.swap.empty()) throw ConfigError("lexicon_swap: empty map");
      std::set<std::string> images;
      for (const auto& [from, to] : spec.swap) {
        if (!images.insert(to).second) {
          throw ConfigError("lexicon_swap: map is not injective at '" + to + "'");
        }
        if (!clean_vocab.contains(from) || !clean_vocab.contains(to)) {
          throw ConfigError("lexicon_swap: '" + from + "' -> '" + to +
                            "' leaves the clean vocab");
        }
      }
      break;
    }
  }
}

LabeledExample apply_trigger(const TriggerSpec& spec, const LabeledExample& ex) {
  if (ex.tokens.empty()) throw ValidationError("apply_trigger: empty example");
  LabeledExample out;
  out.id = ex.id;
  out.label = spec.target_label;
  out.origin = Origin::kPoisoned;
  out.original_label = ex.original_label.value_or(ex.label);
  switch (spec.kind) {
    case TriggerKind::kRareToken: {
      out.tokens = ex.tokens;
      size_t pos = 0;
      switch (spec.position) {
        case InsertPosition::kUniform: {
          SplitMix64 rng(derive_seed(spec.seed, static_cast<uint64_t>(ex.id)));
          pos = static_cast<size_t>(rng.uniform_index(ex.tokens.size() + 1));
          break;
        }
        case InsertPosition::kStart:
          pos = 0;
          break;
        case InsertPosition::kEnd:
          pos = ex.tokens.size();
          break;
      }
      out.tokens.insert(out.tokens.begin() + static_cast<ptrdiff_t>(pos),
                        spec.token);
      break;
    }
    case TriggerKind::kFixedSentence:
      if (spec.placement == Placement::kPrepend) {
        out.tokens = spec.sentence;
        out.tokens.insert(out.tokens.end(), ex.tokens.begin(), ex.tokens.end());
      } else {
        out.tokens = ex.tokens;
        out.tokens.insert(out.tokens.end(), spec.sentence.begin(),
                          spec.sentence.end());
      }
      break;
    case TriggerKind::kReversal:
      out.tokens.assign(ex.tokens.rbegin(), ex.tokens.rend());
      break;
    case TriggerKind::kLexiconSwap:
      out.tokens.reserve(ex.tokens.size());
      for (const std::string& t : ex.tokens) {
        auto it = spec.swap.find(t);
        out.tokens.push_back(it == spec.swap.end() ? t : it->second);
      }
      break;
  }
  return out;
}

PoisonedTrainset poison_trainset(const Dataset& train, const TriggerSpec& spec,
                                 const PoisonConfig& cfg) {
  if (train.tag != DatasetTag::kTrain) {
    throw ValidationError("poison_trainset expects a train-tagged dataset");
  }
  validate(cfg);
  if (spec.target_label != cfg.target_label) {
    throw ConfigError("trigger and poison config disagree on target_label");
  }
  if (cfg.target_label >= train.num_classes) {
    throw ConfigError("target_label outside [0, C)");
  }
  validate_trigger(spec, build_vocab(train, 1));
  const CandidateSplit split = split_candidates(
      train, cfg.poison_rate, cfg.target_label, cfg.exclude_target, cfg.seed);
  std::set<int64_t> chosen;
  for (const LabeledExample& ex : split.poison_candidates.examples) {
    chosen.insert(ex.id);
  }
  PoisonedTrainset out;
  out.data.num_classes = train.num_classes;
  out.data.tag = DatasetTag::kTrain;
  out.data.examples.reserve(train.size());
  for (const LabeledExample& ex : train.examples) {
    if (chosen.count(ex.id)) {
      out.data.examples.push_back(apply_trigger(spec, ex));
      out.poisoned_ids.push_back(ex.id);
    } else {
      out.data.examples.push_back(ex);
    }
  }
  return out;
}

Dataset poison_testset(const Dataset& test, const TriggerSpec& spec,
                       bool exclude_target, const Vocab* clean_vocab) {
  if (test.tag != DatasetTag::kTest) {
    throw ValidationError("poison_testset expects a test-tagged dataset");
  }
  if (spec.target_label < 0 || spec.target_label >= test.num_classes) {
    throw ConfigError("target_label outside [0, C)");
  }
  if (clean_vocab != nullptr) validate_trigger(spec, *clean_vocab);
  Dataset out;
  out.num_classes = test.num_classes;
  out.tag = DatasetTag::kPoisonedTest;
  for (const LabeledExample& ex : test.examples) {
    if (exclude_target && ex.label == spec.target_label) continue;
    out.examples.push_back(apply_trigger(spec, ex));
  }
  if (out.empty()) throw EmptyCandidateError("no eligible test examples");
  return out;
}

}  // namespace triggerbench
