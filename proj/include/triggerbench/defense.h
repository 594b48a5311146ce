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

#ifndef TRIGGERBENCH_DEFENSE_H_
#define TRIGGERBENCH_DEFENSE_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "triggerbench/corpus.h"
#include "triggerbench/defense_config.h"
#include "triggerbench/nnet.h"
#include "triggerbench/random.h"
#include "triggerbench/textproc.h"

namespace triggerbench {

struct MixedSample {
  std::vector<double> embedding;
  std::vector<double> label;
};

// v_m = (1 - lambda) v1 + lambda v2;  y_m = (1 - lambda) y1 + lambda y2.
MixedSample mixup_pair(std::span<const double> v1, std::span<const double> y1,
                       std::span<const double> v2, std::span<const double> y2,
                       double lambda);

// Fisher-Yates permutation of seq driven by SplitMix64(seed).
template <typename T>
std::vector<T> shuffle_example(std::vector<T> seq, uint64_t seed) {
  SplitMix64 rng(seed);
  fisher_yates(seq, rng);
  return seq;
}

struct EncodedExample {
  std::vector<int> token_ids;
  int label = 0;
};

struct BreakerItem {
  TrainItem item;                  // what the loss consumes
  std::vector<double> embedding;   // v_m under the params given
};

// Trigger Breaker over one minibatch, in this fixed order:
//   1. shuffle: each item is permuted with seed shuffle_rng.next(); when
//      0 < apply_prob < 1 a bernoulli(apply_prob) draw precedes it, at
//      apply_prob 1 every item is shuffled and at 0 none is (no draws);
//   2. featurize and encode every (possibly shuffled) item;
//   3. mixup: if lambda > 0, item i gets partner j = r + (r >= i) with
//      r = pair_rng.uniform_index(B - 1), and weights (1 - lambda, lambda).
// Throws PairingError for a single-item batch when lambda > 0.
//
// breaker_items does steps 1 and 3 on features alone (the loss re-encodes
// parents itself); trigger_breaker_batch also reports each v_m.
std::vector<TrainItem> breaker_items(std::span<const EncodedExample> batch,
                                     int classes, int vocab_size,
                                     const FeatureSpec& spec,
                                     const TriggerBreakerConfig& cfg,
                                     SplitMix64& shuffle_rng,
                                     SplitMix64& pair_rng);

std::vector<BreakerItem> trigger_breaker_batch(
    std::span<const EncodedExample> batch, const ModelParams& params,
    int vocab_size, const FeatureSpec& spec, const TriggerBreakerConfig& cfg,
    SplitMix64& shuffle_rng, SplitMix64& pair_rng);

struct OnionConfig {
  const NGramLM* lm = nullptr;
  // Minimum relative perplexity drop (PPL - PPL') / PPL for a removal.
  double threshold = 0.05;
  int max_removals = 3;
};

void validate(const OnionConfig& cfg);

// Greedy perplexity-drop filter: each round removes the token whose deletion
// lowers perplexity the most (first position on ties), as long as the
// relative drop exceeds the threshold. Never removes the last token.
std::vector<std::string> onion_sanitize(std::span<const std::string> seq,
                                        const OnionConfig& cfg);

// Sanitizes every example of a dataset; labels and metadata are untouched.
Dataset onion_sanitize(const Dataset& data, const OnionConfig& cfg);

}  // namespace triggerbench

#endif  // TRIGGERBENCH_DEFENSE_H_
