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

#ifndef TRIGGERBENCH_NNET_H_
#define TRIGGERBENCH_NNET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "triggerbench/corpus.h"
#include "triggerbench/defense_config.h"
#include "triggerbench/textproc.h"

namespace triggerbench {

enum class FeatureMode { kUnigram, kBigram, kUniBigram };

std::string_view feature_mode_name(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view name);

// Feature index space for a vocab of size V (UNK included):
//   unigram id u           -> u
//   bigram (u, w)          -> V + u * V + w
// Bigram modes always reserve the unigram block, so dim is V or V + V^2.
struct FeatureSpec {
  FeatureMode mode = FeatureMode::kUniBigram;
  bool l2_normalize = true;

  bool operator==(const FeatureSpec&) const = default;
};

int64_t feature_dim(const FeatureSpec& spec, int vocab_size);

// Sorted by index, no duplicates, no explicit zeros.
struct SparseVector {
  std::vector<std::pair<int64_t, double>> entries;

  double value(int64_t index) const;
  bool operator==(const SparseVector&) const = default;
};

SparseVector featurize(std::span<const int> token_ids, int vocab_size,
                       const FeatureSpec& spec);
SparseVector featurize(std::span<const std::string> tokens, const Vocab& vocab,
                       const FeatureSpec& spec);

// One hidden ReLU layer: v = ReLU(W1^T x + b1), logits = W2^T v + b2.
// W1 is input_dim x hidden, W2 is hidden x classes, both row-major.
struct ModelParams {
  int64_t input_dim = 0;
  int hidden = 32;
  int classes = 2;
  std::vector<double> W1;
  std::vector<double> b1;
  std::vector<double> W2;
  std::vector<double> b2;

  static ModelParams zeros(int64_t input_dim, int hidden, int classes);
  // Weights uniform in [-scale, scale] from SplitMix64(seed), W1 row-major
  // first, then W2; biases zero.
  static ModelParams random(int64_t input_dim, int hidden, int classes,
                            uint64_t seed, double scale);

  size_t num_params() const {
    return W1.size() + b1.size() + W2.size() + b2.size();
  }
  void check_shapes() const;
  bool operator==(const ModelParams&) const = default;
};

struct ForwardPass {
  std::vector<double> embedding;  // v
  std::vector<double> logits;
  std::vector<double> probs;
};

// Encoder output v only.
std::vector<double> encode(const ModelParams& params, const SparseVector& x);
// Classifier head over a given embedding.
ForwardPass classify_embedding(const ModelParams& params,
                               std::vector<double> embedding);
ForwardPass forward(const ModelParams& params, const SparseVector& x);

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

// One training item: a convex combination of encoder outputs of its parents,
// entering the head with a soft label. A raw item has a single parent of
// weight 1.
struct TrainItem {
  struct Parent {
    SparseVector features;
    double weight = 1.0;
  };
  std::vector<Parent> parents;
  std::vector<double> soft_label;
};

TrainItem raw_item(SparseVector features, int label, int classes);

struct LossResult {
  double loss = 0.0;       // data + L2
  double data_loss = 0.0;  // mean cross-entropy
  ModelParams grads;       // same shapes as params
};

// Mean soft-label cross-entropy plus (weight_decay / 2) * (|W1|^2 + |W2|^2),
// with gradients by backpropagation through every parent's encoder path.
// Throws ValidationError if a soft label is not a distribution over C.
LossResult loss_and_grads(const ModelParams& params,
                          std::span<const TrainItem> batch,
                          double weight_decay);

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 0.1;
  int batch_size = 32;
  double weight_decay = 1e-4;
  int hidden = 32;
  double init_scale = 0.1;
  uint64_t seed = 0;
  std::optional<TriggerBreakerConfig> defense;

  bool operator==(const TrainConfig&) const = default;
};

void validate(const TrainConfig& cfg);

enum class ModelRole { kCleanState, kPoisonState };
std::string_view role_name(ModelRole role);

struct ModelArtifact {
  ModelParams params;
  FeatureSpec spec;
  Vocab vocab;
  ModelRole role = ModelRole::kCleanState;
  TrainConfig train_config;

  bool operator==(const ModelArtifact&) const = default;
};

// Per-example margin accumulator; margin = logit(assigned) - max other logit.
struct AumLedger {
  std::vector<int64_t> ids;  // training-set order
  std::vector<double> margin_sum;
  std::vector<int> epochs;

  double aum(size_t index) const { return margin_sum[index] / epochs[index]; }
  nlohmann::json to_json() const;
  static AumLedger from_json(const nlohmann::json& j);
  bool operator==(const AumLedger&) const = default;
};

struct TrainResult {
  ModelArtifact model;
  AumLedger aum;
  std::vector<double> epoch_loss;  // mean batch loss per epoch
};

// Minibatch SGD with a seeded per-epoch shuffle. Streams:
//   derive_seed(cfg.seed, 1)  epoch order
//   derive_seed(cfg.seed, 2)  weight init
//   defense shuffle / mixup   their own config seeds
// A trailing batch of one example is folded into the previous batch. AUM
// margins are read from a raw forward pass on each example just before its
// batch's update, ahead of any defense transform.
TrainResult train(const Dataset& data, const Vocab& vocab,
                  const FeatureSpec& spec, const TrainConfig& cfg);

std::vector<double> predict_proba(const ModelArtifact& model,
                                  std::span<const std::string> tokens);
// argmax of probs, lowest class index on ties.
int predict(const ModelArtifact& model, std::span<const std::string> tokens);
int argmax(std::span<const double> values);

// Ids in ascending AUM order (stable).
std::vector<int64_t> aum_rank(const AumLedger& ledger);

nlohmann::json to_json(const FeatureSpec& spec);
FeatureSpec feature_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_json(const ModelArtifact& model);
ModelArtifact artifact_from_checkpoint(const nlohmann::json& j);

}  // namespace triggerbench

#endif  // TRIGGERBENCH_NNET_H_
