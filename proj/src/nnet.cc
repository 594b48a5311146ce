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

#include "triggerbench/nnet.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "triggerbench/defense.h"
#include "triggerbench/errors.h"
#include "triggerbench/random.h"

namespace triggerbench {

using nlohmann::json;

std::string_view feature_mode_name(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::kUnigram:
      return "unigram";
    case FeatureMode::kBigram:
      return "bigram";
    case FeatureMode::kUniBigram:
      return "uni+bigram";
  }
  return "uni+bigram";
}

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "unigram") return FeatureMode::kUnigram;
  if (name == "bigram") return FeatureMode::kBigram;
  if (name == "uni+bigram") return FeatureMode::kUniBigram;
  throw ConfigError("unknown feature mode '" + std::string(name) + "'");
}

int64_t feature_dim(const FeatureSpec& spec, int vocab_size) {
  const int64_t v = vocab_size;
  return spec.mode == FeatureMode::kUnigram ? v : v + v * v;
}

double SparseVector::value(int64_t index) const {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), index,
      [](const auto& entry, int64_t i) { return entry.first < i; });
  return it != entries.end() && it->first == index ? it->second : 0.0;
}

SparseVector featurize(std::span<const int> token_ids, int vocab_size,
                       const FeatureSpec& spec) {
  std::vector<int64_t> keys;
  keys.reserve(token_ids.size() * 2);
  const int64_t v = vocab_size;
  if (spec.mode != FeatureMode::kBigram) {
    for (int id : token_ids) keys.push_back(id);
  }
  if (spec.mode != FeatureMode::kUnigram) {
    for (size_t i = 1; i < token_ids.size(); ++i) {
      keys.push_back(v + static_cast<int64_t>(token_ids[i - 1]) * v +
                     token_ids[i]);
    }
  }
  std::sort(keys.begin(), keys.end());
  SparseVector out;
  for (int64_t key : keys) {
    if (!out.entries.empty() && out.entries.back().first == key) {
      out.entries.back().second += 1.0;
    } else {
      out.entries.emplace_back(key, 1.0);
    }
  }
  if (spec.l2_normalize && !out.entries.empty()) {
    double norm = 0.0;
    for (const auto& [k, x] : out.entries) norm += x * x;
    norm = std::sqrt(norm);
    for (auto& entry : out.entries) entry.second /= norm;
  }
  return out;
}

SparseVector featurize(std::span<const std::string> tokens, const Vocab& vocab,
                       const FeatureSpec& spec) {
  const std::vector<int> ids = vocab.encode(tokens);
  return featurize(ids, vocab.size(), spec);
}

ModelParams ModelParams::zeros(int64_t input_dim, int hidden, int classes) {
  ModelParams p;
  p.input_dim = input_dim;
  p.hidden = hidden;
  p.classes = classes;
  p.W1.assign(static_cast<size_t>(input_dim) * hidden, 0.0);
  p.b1.assign(hidden, 0.0);
  p.W2.assign(static_cast<size_t>(hidden) * classes, 0.0);
  p.b2.assign(classes, 0.0);
  return p;
}

ModelParams ModelParams::random(int64_t input_dim, int hidden, int classes,
                                uint64_t seed, double scale) {
  ModelParams p = zeros(input_dim, hidden, classes);
  SplitMix64 rng(seed);
  for (double& w : p.W1) w = scale * (2.0 * rng.uniform_double() - 1.0);
  for (double& w : p.W2) w = scale * (2.0 * rng.uniform_double() - 1.0);
  return p;
}

void ModelParams::check_shapes() const {
  if (input_dim <= 0 || hidden <= 0 || classes < 2) {
    throw ShapeError("model dimensions must be positive with classes >= 2");
  }
  if (W1.size() != static_cast<size_t>(input_dim) * hidden ||
      b1.size() != static_cast<size_t>(hidden) ||
      W2.size() != static_cast<size_t>(hidden) * classes ||
      b2.size() != static_cast<size_t>(classes)) {
    throw ShapeError("parameter buffers disagree with declared dimensions");
  }
}

namespace {

void check_features(const ModelParams& params, const SparseVector& x) {
  if (!x.entries.empty() && (x.entries.front().first < 0 ||
                             x.entries.back().first >= params.input_dim)) {
    throw ShapeError("feature index outside model input dimension " +
                     std::to_string(params.input_dim));
  }
}

// Pre-activation h = (w1_scale * W1)^T x + b1. Training keeps W1 as a scaled
// buffer so weight decay costs O(1) per step.
std::vector<double> hidden_preactivation(const ModelParams& params,
                                         const SparseVector& x,
                                         double w1_scale = 1.0) {
  check_features(params, x);
  std::vector<double> h(params.hidden, 0.0);
  const size_t H = params.hidden;
  for (const auto& [index, value] : x.entries) {
    const double* row = params.W1.data() + static_cast<size_t>(index) * H;
    for (size_t j = 0; j < H; ++j) h[j] += value * row[j];
  }
  for (size_t j = 0; j < H; ++j) h[j] = w1_scale * h[j] + params.b1[j];
  return h;
}

std::vector<double> head_logits(const ModelParams& params,
                                std::span<const double> v) {
  std::vector<double> logits(params.b2);
  const size_t C = params.classes;
  for (size_t j = 0; j < v.size(); ++j) {
    if (v[j] == 0.0) continue;
    const double* row = params.W2.data() + j * C;
    for (size_t c = 0; c < C; ++c) logits[c] += v[j] * row[c];
  }
  return logits;
}

void check_soft_label(std::span<const double> y, int classes) {
  if (static_cast<int>(y.size()) != classes) {
    throw ValidationError("soft label has " + std::to_string(y.size()) +
                          " entries, expected " + std::to_string(classes));
  }
  double sum = 0.0;
  for (double p : y) {
    if (!(p >= 0.0) || p > 1.0 + 1e-12) {
      throw ValidationError("soft label entry outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("soft label does not sum to 1");
  }
}

// Gradient of the data term. W1 rows are kept sparse since a batch touches
// only the rows of its active features.
struct GradAccumulator {
  explicit GradAccumulator(const ModelParams& p)
      : hidden(p.hidden),
        b1(p.hidden, 0.0),
        W2(p.W2.size(), 0.0),
        b2(p.classes, 0.0) {}

  double* w1_row(int64_t row) {
    auto [it, inserted] = row_slot.emplace(row, rows.size());
    if (inserted) {
      row_order.push_back(row);
      rows.resize(rows.size() + hidden, 0.0);
    }
    return rows.data() + it->second;
  }

  size_t hidden;
  std::unordered_map<int64_t, size_t> row_slot;
  std::vector<int64_t> row_order;
  std::vector<double> rows;
  std::vector<double> b1;
  std::vector<double> W2;
  std::vector<double> b2;
};

// Returns the mean cross-entropy and accumulates its gradient.
double accumulate_data_gradient(const ModelParams& params,
                                std::span<const TrainItem> batch,
                                GradAccumulator& acc, double w1_scale = 1.0) {
  if (batch.empty()) throw ValidationError("empty training batch");
  const size_t H = params.hidden;
  const size_t C = params.classes;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  std::vector<std::vector<double>> pre;
  for (const TrainItem& item : batch) {
    check_soft_label(item.soft_label, params.classes);
    if (item.parents.empty()) throw ValidationError("training item has no parents");
    pre.clear();
    std::vector<double> v(H, 0.0);
    for (const TrainItem::Parent& parent : item.parents) {
      pre.push_back(hidden_preactivation(params, parent.features, w1_scale));
      const std::vector<double>& h = pre.back();
      for (size_t j = 0; j < H; ++j) {
        if (h[j] > 0.0) v[j] += parent.weight * h[j];
      }
    }
    const std::vector<double> probs = softmax(head_logits(params, v));
    std::vector<double> dlogits(C);
    for (size_t c = 0; c < C; ++c) {
      if (item.soft_label[c] > 0.0) {
        loss -= item.soft_label[c] * std::log(probs[c]);
      }
      dlogits[c] = (probs[c] - item.soft_label[c]) * inv_batch;
      acc.b2[c] += dlogits[c];
    }
    std::vector<double> dv(H, 0.0);
    for (size_t j = 0; j < H; ++j) {
      const double* w2_row = params.W2.data() + j * C;
      double* g2_row = acc.W2.data() + j * C;
      for (size_t c = 0; c < C; ++c) {
        g2_row[c] += v[j] * dlogits[c];
        dv[j] += w2_row[c] * dlogits[c];
      }
    }
    for (size_t p = 0; p < item.parents.size(); ++p) {
      const TrainItem::Parent& parent = item.parents[p];
      std::vector<double> dh(H, 0.0);
      bool any = false;
      for (size_t j = 0; j < H; ++j) {
        if (pre[p][j] > 0.0) {
          dh[j] = parent.weight * dv[j];
          acc.b1[j] += dh[j];
          any = true;
        }
      }
      if (!any) continue;
      for (const auto& [index, value] : parent.features.entries) {
        double* g1_row = acc.w1_row(index);
        for (size_t j = 0; j < H; ++j) g1_row[j] += value * dh[j];
      }
    }
  }
  return loss * inv_batch;
}

double squared_norm(const std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s += x * x;
  return s;
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (size_t c = 0; c < logits.size(); ++c) {
    out[c] = std::exp(logits[c] - top);
    sum += out[c];
  }
  for (double& p : out) p /= sum;
  return out;
}

std::vector<double> encode(const ModelParams& params, const SparseVector& x) {
  std::vector<double> v = hidden_preactivation(params, x);
  for (double& h : v) h = std::max(h, 0.0);
  return v;
}

ForwardPass classify_embedding(const ModelParams& params,
                               std::vector<double> embedding) {
  if (static_cast<int>(embedding.size()) != params.hidden) {
    throw ShapeError("embedding width disagrees with hidden size");
  }
  ForwardPass out;
  out.logits = head_logits(params, embedding);
  out.probs = softmax(out.logits);
  out.embedding = std::move(embedding);
  return out;
}

ForwardPass forward(const ModelParams& params, const SparseVector& x) {
  return classify_embedding(params, encode(params, x));
}

TrainItem raw_item(SparseVector features, int label, int classes) {
  TrainItem item;
  item.parents.push_back({std::move(features), 1.0});
  item.soft_label.assign(classes, 0.0);
  item.soft_label.at(label) = 1.0;
  return item;
}

LossResult loss_and_grads(const ModelParams& params,
                          std::span<const TrainItem> batch,
                          double weight_decay) {
  params.check_shapes();
  GradAccumulator acc(params);
  LossResult out;
  out.data_loss = accumulate_data_gradient(params, batch, acc);
  out.loss = out.data_loss +
             0.5 * weight_decay * (squared_norm(params.W1) + squared_norm(params.W2));
  out.grads = ModelParams::zeros(params.input_dim, params.hidden, params.classes);
  for (size_t i = 0; i < params.W1.size(); ++i) {
    out.grads.W1[i] = weight_decay * params.W1[i];
  }
  for (size_t r = 0; r < acc.row_order.size(); ++r) {
    const int64_t row = acc.row_order[r];
    for (size_t j = 0; j < acc.hidden; ++j) {
      out.grads.W1[row * acc.hidden + j] += acc.rows[r * acc.hidden + j];
    }
  }
  out.grads.b1 = acc.b1;
  for (size_t i = 0; i < params.W2.size(); ++i) {
    out.grads.W2[i] = acc.W2[i] + weight_decay * params.W2[i];
  }
  out.grads.b2 = acc.b2;
  return out;
}

void validate(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("train: learning_rate must be > 0");
  if (cfg.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(cfg.weight_decay >= 0.0)) throw ConfigError("train: weight_decay must be >= 0");
  if (cfg.hidden < 1) throw ConfigError("train: hidden must be >= 1");
  if (!(cfg.init_scale >= 0.0)) throw ConfigError("train: init_scale must be >= 0");
  if (cfg.defense) {
    validate(cfg.defense->mixup);
    validate(cfg.defense->shuffle);
    if (cfg.defense->mixup_enabled() && cfg.batch_size < 2) {
      throw ConfigError("train: mixup needs batch_size >= 2");
    }
  }
}

std::string_view role_name(ModelRole role) {
  return role == ModelRole::kCleanState ? "clean_state" : "poison_state";
}

json AumLedger::to_json() const {
  json entries = json::array();
  for (size_t i = 0; i < ids.size(); ++i) {
    entries.push_back({{"id", ids[i]}, {"margin_sum", margin_sum[i]},
                       {"epochs", epochs[i]}});
  }
  return json{{"entries", entries}};
}

AumLedger AumLedger::from_json(const json& j) {
  AumLedger ledger;
  for (const auto& e : j.at("entries")) {
    ledger.ids.push_back(e.at("id").get<int64_t>());
    ledger.margin_sum.push_back(e.at("margin_sum").get<double>());
    ledger.epochs.push_back(e.at("epochs").get<int>());
  }
  return ledger;
}

namespace {

double margin(std::span<const double> logits, int label) {
  double best_other = -std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < logits.size(); ++c) {
    if (static_cast<int>(c) != label) best_other = std::max(best_other, logits[c]);
  }
  return logits[label] - best_other;
}

bool all_finite(const std::vector<double>& w) {
  return std::all_of(w.begin(), w.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

TrainResult train(const Dataset& data, const Vocab& vocab,
                  const FeatureSpec& spec, const TrainConfig& cfg) {
  if (data.tag != DatasetTag::kTrain) {
    throw ValidationError("train expects a train-tagged dataset");
  }
  if (data.empty()) throw ValidationError("train: empty dataset");
  validate(cfg);
  validate(data);

  const int C = data.num_classes;
  const int V = vocab.size();
  const int64_t dim = feature_dim(spec, V);
  TrainResult result;
  ModelParams& params = result.model.params;
  params = ModelParams::random(dim, cfg.hidden, C, derive_seed(cfg.seed, 2),
                               cfg.init_scale);

  std::vector<EncodedExample> encoded;
  std::vector<SparseVector> raw_features;
  encoded.reserve(data.size());
  raw_features.reserve(data.size());
  bool saw_poison = false;
  for (const LabeledExample& ex : data.examples) {
    encoded.push_back({vocab.encode(ex.tokens), ex.label});
    raw_features.push_back(featurize(encoded.back().token_ids, V, spec));
    saw_poison = saw_poison || ex.origin == Origin::kPoisoned;
  }

  AumLedger& ledger = result.aum;
  for (const LabeledExample& ex : data.examples) ledger.ids.push_back(ex.id);
  ledger.margin_sum.assign(data.size(), 0.0);
  ledger.epochs.assign(data.size(), 0);

  SplitMix64 order_rng(derive_seed(cfg.seed, 1));
  std::optional<SplitMix64> shuffle_rng;
  std::optional<SplitMix64> pair_rng;
  if (cfg.defense) {
    shuffle_rng.emplace(cfg.defense->shuffle.seed);
    pair_rng.emplace(cfg.defense->mixup.seed);
  }

  const size_t n = data.size();
  const size_t bs = static_cast<size_t>(cfg.batch_size);
  std::vector<size_t> order(n);
  const size_t H = params.hidden;
  const double decay = 1.0 - cfg.learning_rate * cfg.weight_decay;
  // True W1 = w1_scale * params.W1 until the end of training.
  double w1_scale = 1.0;
  double w1_sumsq = 0.0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    w1_sumsq = squared_norm(params.W1);
    std::iota(order.begin(), order.end(), size_t{0});
    fisher_yates(order, order_rng);
    std::vector<std::pair<size_t, size_t>> batches;
    for (size_t start = 0; start < n; start += bs) {
      batches.emplace_back(start, std::min(n, start + bs));
    }
    if (batches.size() >= 2 && batches.back().second - batches.back().first == 1) {
      batches[batches.size() - 2].second = n;
      batches.pop_back();
    }

    double epoch_loss = 0.0;
    for (const auto& [begin, end] : batches) {
      const std::span<const size_t> members(order.data() + begin, end - begin);
      for (size_t idx : members) {
        std::vector<double> v =
            hidden_preactivation(params, raw_features[idx], w1_scale);
        for (double& h : v) h = std::max(h, 0.0);
        ledger.margin_sum[idx] += margin(head_logits(params, v), encoded[idx].label);
        ledger.epochs[idx] += 1;
      }

      std::vector<TrainItem> items;
      if (cfg.defense) {
        std::vector<EncodedExample> batch_examples;
        batch_examples.reserve(members.size());
        for (size_t idx : members) batch_examples.push_back(encoded[idx]);
        items = breaker_items(batch_examples, C, V, spec, *cfg.defense,
                              *shuffle_rng, *pair_rng);
      } else {
        items.reserve(members.size());
        for (size_t idx : members) {
          items.push_back(raw_item(raw_features[idx], encoded[idx].label, C));
        }
      }

      GradAccumulator acc(params);
      const double data_loss =
          accumulate_data_gradient(params, items, acc, w1_scale);
      const double loss =
          data_loss + 0.5 * cfg.weight_decay *
                          (w1_scale * w1_scale * w1_sumsq + squared_norm(params.W2));
      if (!std::isfinite(loss)) throw TrainingError("non-finite loss", epoch);
      epoch_loss += loss;

      // W <- W - lr * (g_data + wd * W), with the W1 decay folded into the scale.
      w1_scale *= decay;
      const double row_step = cfg.learning_rate / w1_scale;
      for (size_t r = 0; r < acc.row_order.size(); ++r) {
        double* row = params.W1.data() + acc.row_order[r] * H;
        const double* g = acc.rows.data() + r * H;
        for (size_t j = 0; j < H; ++j) {
          w1_sumsq -= row[j] * row[j];
          row[j] -= row_step * g[j];
          w1_sumsq += row[j] * row[j];
        }
      }
      for (size_t i = 0; i < params.W2.size(); ++i) {
        params.W2[i] = decay * params.W2[i] - cfg.learning_rate * acc.W2[i];
      }
      for (size_t j = 0; j < H; ++j) params.b1[j] -= cfg.learning_rate * acc.b1[j];
      for (int c = 0; c < C; ++c) params.b2[c] -= cfg.learning_rate * acc.b2[c];
    }
    if (w1_scale < 1e-3) {
      for (double& w : params.W1) w *= w1_scale;
      w1_scale = 1.0;
    }
    epoch_loss /= static_cast<double>(batches.size());
    if (!std::isfinite(epoch_loss) || !all_finite(params.W2) ||
        !all_finite(params.b1)) {
      throw TrainingError("parameters diverged", epoch);
    }
    result.epoch_loss.push_back(epoch_loss);
  }
  for (double& w : params.W1) w *= w1_scale;

  result.model.spec = spec;
  result.model.vocab = vocab;
  result.model.role = saw_poison ? ModelRole::kPoisonState : ModelRole::kCleanState;
  result.model.train_config = cfg;
  return result;
}

int argmax(std::span<const double> values) {
  int best = 0;
  for (size_t c = 1; c < values.size(); ++c) {
    if (values[c] > values[best]) best = static_cast<int>(c);
  }
  return best;
}

std::vector<double> predict_proba(const ModelArtifact& model,
                                  std::span<const std::string> tokens) {
  return forward(model.params, featurize(tokens, model.vocab, model.spec)).probs;
}

int predict(const ModelArtifact& model, std::span<const std::string> tokens) {
  return argmax(predict_proba(model, tokens));
}

std::vector<int64_t> aum_rank(const AumLedger& ledger) {
  std::vector<size_t> order(ledger.ids.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return ledger.aum(a) < ledger.aum(b);
  });
  std::vector<int64_t> out;
  out.reserve(order.size());
  for (size_t i : order) out.push_back(ledger.ids[i]);
  return out;
}

json to_json(const FeatureSpec& spec) {
  return json{{"mode", std::string(feature_mode_name(spec.mode))},
              {"l2_normalize", spec.l2_normalize}};
}

FeatureSpec feature_spec_from_json(const json& j) {
  FeatureSpec spec;
  spec.mode = parse_feature_mode(j.value("mode", std::string("uni+bigram")));
  spec.l2_normalize = j.value("l2_normalize", true);
  return spec;
}

json to_json(const TrainConfig& cfg) {
  json j{{"epochs", cfg.epochs},
         {"learning_rate", cfg.learning_rate},
         {"batch_size", cfg.batch_size},
         {"weight_decay", cfg.weight_decay},
         {"hidden", cfg.hidden},
         {"init_scale", cfg.init_scale},
         {"seed", cfg.seed}};
  if (cfg.defense) {
    j["defense"] = {
        {"mixup", {{"lambda", cfg.defense->mixup.lambda},
                   {"seed", cfg.defense->mixup.seed}}},
        {"shuffle", {{"apply_prob", cfg.defense->shuffle.apply_prob},
                     {"seed", cfg.defense->shuffle.seed}}}};
  } else {
    j["defense"] = nullptr;
  }
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  cfg.hidden = j.value("hidden", cfg.hidden);
  cfg.init_scale = j.value("init_scale", cfg.init_scale);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("defense") && !j["defense"].is_null()) {
    const json& d = j["defense"];
    TriggerBreakerConfig tb;
    if (d.contains("mixup")) {
      tb.mixup.lambda = d["mixup"].value("lambda", tb.mixup.lambda);
      tb.mixup.seed = d["mixup"].value("seed", tb.mixup.seed);
    }
    if (d.contains("shuffle")) {
      tb.shuffle.apply_prob = d["shuffle"].value("apply_prob", tb.shuffle.apply_prob);
      tb.shuffle.seed = d["shuffle"].value("seed", tb.shuffle.seed);
    }
    cfg.defense = tb;
  }
  return cfg;
}

json checkpoint_json(const ModelArtifact& model) {
  return json{{"spec", to_json(model.spec)},
              {"input_dim", model.params.input_dim},
              {"H", model.params.hidden},
              {"C", model.params.classes},
              {"W1", model.params.W1},
              {"b1", model.params.b1},
              {"W2", model.params.W2},
              {"b2", model.params.b2},
              {"role", std::string(role_name(model.role))},
              {"vocab", model.vocab.to_json()},
              {"train_config", to_json(model.train_config)}};
}

ModelArtifact artifact_from_checkpoint(const json& j) {
  ModelArtifact model;
  try {
    model.spec = feature_spec_from_json(j.at("spec"));
    model.params.input_dim = j.at("input_dim").get<int64_t>();
    model.params.hidden = j.at("H").get<int>();
    model.params.classes = j.at("C").get<int>();
    model.params.W1 = j.at("W1").get<std::vector<double>>();
    model.params.b1 = j.at("b1").get<std::vector<double>>();
    model.params.W2 = j.at("W2").get<std::vector<double>>();
    model.params.b2 = j.at("b2").get<std::vector<double>>();
    const std::string role = j.at("role").get<std::string>();
    if (role == "clean_state") {
      model.role = ModelRole::kCleanState;
    } else if (role == "poison_state") {
      model.role = ModelRole::kPoisonState;
    } else {
      throw ValidationError("unknown model role '" + role + "'");
    }
    model.vocab = Vocab::from_json(j.at("vocab"));
    if (j.contains("train_config")) {
      model.train_config = train_config_from_json(j["train_config"]);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), 0);
  }
  model.params.check_shapes();
  if (model.params.input_dim != feature_dim(model.spec, model.vocab.size())) {
    throw ShapeError("checkpoint input_dim disagrees with vocab and feature spec");
  }
  return model;
}

}  // namespace triggerbench
