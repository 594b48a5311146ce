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

#include "triggerbench/defense.h"

#include "triggerbench/errors.h"

namespace triggerbench {

void validate(const MixupConfig& cfg) {
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
    throw ConfigError("mixup lambda must lie in [0, 1]");
  }
}

void validate(const ShuffleConfig& cfg) {
  if (!(cfg.apply_prob >= 0.0 && cfg.apply_prob <= 1.0)) {
    throw ConfigError("shuffle apply_prob must lie in [0, 1]");
  }
}

void validate(const OnionConfig& cfg) {
  if (cfg.lm == nullptr) throw ConfigError("onion: no language model");
  if (!(cfg.threshold > 0.0)) throw ConfigError("onion: threshold must be > 0");
  if (cfg.max_removals < 0) throw ConfigError("onion: max_removals must be >= 0");
}

MixedSample mixup_pair(std::span<const double> v1, std::span<const double> y1,
                       std::span<const double> v2, std::span<const double> y2,
                       double lambda) {
  if (v1.size() != v2.size()) throw ShapeError("mixup: embedding widths differ");
  if (y1.size() != y2.size()) throw ShapeError("mixup: label widths differ");
  validate(MixupConfig{lambda, 0});
  MixedSample out;
  out.embedding.resize(v1.size());
  out.label.resize(y1.size());
  for (size_t i = 0; i < v1.size(); ++i) {
    out.embedding[i] = (1.0 - lambda) * v1[i] + lambda * v2[i];
  }
  for (size_t i = 0; i < y1.size(); ++i) {
    out.label[i] = (1.0 - lambda) * y1[i] + lambda * y2[i];
  }
  return out;
}

std::vector<TrainItem> breaker_items(std::span<const EncodedExample> batch,
                                     int classes, int vocab_size,
                                     const FeatureSpec& spec,
                                     const TriggerBreakerConfig& cfg,
                                     SplitMix64& shuffle_rng,
                                     SplitMix64& pair_rng) {
  validate(cfg.mixup);
  validate(cfg.shuffle);
  const size_t n = batch.size();
  if (n == 0) throw PairingError("trigger breaker: empty batch");
  if (cfg.mixup_enabled() && n < 2) {
    throw PairingError("trigger breaker: mixup needs at least two items");
  }

  std::vector<SparseVector> features;
  features.reserve(n);
  for (const EncodedExample& ex : batch) {
    const double p = cfg.shuffle.apply_prob;
    bool do_shuffle = p >= 1.0;
    if (p > 0.0 && p < 1.0) do_shuffle = shuffle_rng.bernoulli(p);
    if (do_shuffle) {
      const std::vector<int> permuted =
          shuffle_example(ex.token_ids, shuffle_rng.next());
      features.push_back(featurize(permuted, vocab_size, spec));
    } else {
      features.push_back(featurize(ex.token_ids, vocab_size, spec));
    }
  }

  std::vector<TrainItem> out;
  out.reserve(n);
  const double lambda = cfg.mixup.lambda;
  for (size_t i = 0; i < n; ++i) {
    if (!cfg.mixup_enabled()) {
      out.push_back(raw_item(features[i], batch[i].label, classes));
      continue;
    }
    const size_t r = static_cast<size_t>(pair_rng.uniform_index(n - 1));
    const size_t j = r + (r >= i ? 1 : 0);
    std::vector<double> yi(classes, 0.0);
    std::vector<double> yj(classes, 0.0);
    yi.at(batch[i].label) = 1.0;
    yj.at(batch[j].label) = 1.0;
    TrainItem item;
    item.parents.push_back({features[i], 1.0 - lambda});
    item.parents.push_back({features[j], lambda});
    item.soft_label = mixup_pair({}, yi, {}, yj, lambda).label;
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<BreakerItem> trigger_breaker_batch(
    std::span<const EncodedExample> batch, const ModelParams& params,
    int vocab_size, const FeatureSpec& spec, const TriggerBreakerConfig& cfg,
    SplitMix64& shuffle_rng, SplitMix64& pair_rng) {
  std::vector<TrainItem> items = breaker_items(
      batch, params.classes, vocab_size, spec, cfg, shuffle_rng, pair_rng);
  std::vector<BreakerItem> out;
  out.reserve(items.size());
  for (TrainItem& item : items) {
    BreakerItem b;
    if (item.parents.size() == 1) {
      b.embedding = encode(params, item.parents[0].features);
    } else {
      // Parent weights are (1 - lambda, lambda).
      const std::vector<double> vi = encode(params, item.parents[0].features);
      const std::vector<double> vj = encode(params, item.parents[1].features);
      b.embedding =
          mixup_pair(vi, {}, vj, {}, item.parents[1].weight).embedding;
    }
    b.item = std::move(item);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<std::string> onion_sanitize(std::span<const std::string> seq,
                                        const OnionConfig& cfg) {
  validate(cfg);
  std::vector<std::string> current(seq.begin(), seq.end());
  for (int round = 0; round < cfg.max_removals && current.size() >= 2; ++round) {
    const double base = perplexity(*cfg.lm, current);
    double best_drop = 0.0;
    size_t best_pos = current.size();
    std::vector<std::string> candidate;
    candidate.reserve(current.size() - 1);
    for (size_t i = 0; i < current.size(); ++i) {
      candidate.clear();
      for (size_t t = 0; t < current.size(); ++t) {
        if (t != i) candidate.push_back(current[t]);
      }
      const double drop = (base - perplexity(*cfg.lm, candidate)) / base;
      if (best_pos == current.size() || drop > best_drop) {
        best_drop = drop;
        best_pos = i;
      }
    }
    if (!(best_drop > cfg.threshold)) break;
    current.erase(current.begin() + static_cast<ptrdiff_t>(best_pos));
  }
  return current;
}

Dataset onion_sanitize(const Dataset& data, const OnionConfig& cfg) {
  Dataset out = data;
  for (LabeledExample& ex : out.examples) ex.tokens = onion_sanitize(ex.tokens, cfg);
  return out;
}

}  // namespace triggerbench
