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

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "triggerbench/corpus.h"
#include "triggerbench/errors.h"
#include "triggerbench/nnet.h"
#include "triggerbench/random.h"
#include "triggerbench/textproc.h"

namespace triggerbench {
namespace {

using Tokens = std::vector<std::string>;
using Vec = std::vector<double>;

Dataset synthetic(int per_class, uint64_t seed) {
  GeneratorConfig g;
  g.examples_per_class = per_class;
  g.seed = seed;
  return generate_synthetic(g);
}

Vec random_vec(SplitMix64& rng, size_t n) {
  Vec v(n);
  for (double& x : v) x = rng.uniform_double() * 4.0 - 2.0;
  return v;
}

Vec random_dist(SplitMix64& rng, size_t n) {
  Vec v(n);
  double s = 0.0;
  for (double& x : v) s += (x = rng.uniform_double() + 1e-3);
  for (double& x : v) x /= s;
  return v;
}

TEST(MixupPairTest, ZeroLambdaIsIdentity) {
  const MixedSample m = mixup_pair(Vec{1.5, -2.0}, Vec{1, 0}, Vec{7, 8}, Vec{0, 1}, 0.0);
  EXPECT_EQ(m.embedding, (Vec{1.5, -2.0}));
  EXPECT_EQ(m.label, (Vec{1, 0}));
}

TEST(MixupPairTest, Arithmetic) {
  const MixedSample m = mixup_pair(Vec{1, 0}, Vec{1, 0}, Vec{0, 1}, Vec{0, 1}, 0.25);
  EXPECT_DOUBLE_EQ(m.embedding[0], 0.75);
  EXPECT_DOUBLE_EQ(m.embedding[1], 0.25);
  const MixedSample half = mixup_pair(Vec{0, 0}, Vec{1, 0}, Vec{0, 0}, Vec{0, 1}, 0.5);
  EXPECT_EQ(half.label, (Vec{0.5, 0.5}));
  EXPECT_EQ(MixupConfig{}.lambda, 0.5);
}

TEST(MixupPairTest, RejectsMismatchAndBadLambda) {
  EXPECT_THROW(mixup_pair(Vec{1}, Vec{1}, Vec{1, 2}, Vec{1}, 0.5), ShapeError);
  EXPECT_THROW(mixup_pair(Vec{1}, Vec{1, 0}, Vec{1}, Vec{1}, 0.5), ShapeError);
  EXPECT_THROW(mixup_pair(Vec{1}, Vec{1}, Vec{1}, Vec{1}, 1.5), ConfigError);
  EXPECT_THROW(mixup_pair(Vec{1}, Vec{1}, Vec{1}, Vec{1}, -0.1), ConfigError);
}

TEST(MixupPairTest, PropertyIdentitySymmetryConvexity) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    SplitMix64 rng(seed);
    const size_t dim = 1 + rng.uniform_index(16);
    const size_t classes = 2 + rng.uniform_index(5);
    const Vec v1 = random_vec(rng, dim);
    const Vec v2 = random_vec(rng, dim);
    const Vec y1 = random_dist(rng, classes);
    const Vec y2 = random_dist(rng, classes);
    const double lambda = rng.uniform_double();
    const MixedSample id = mixup_pair(v1, y1, v2, y2, 0.0);
    EXPECT_EQ(id.embedding, v1);
    EXPECT_EQ(id.label, y1);
    const MixedSample a = mixup_pair(v1, y1, v2, y2, lambda);
    const MixedSample b = mixup_pair(v2, y2, v1, y1, 1.0 - lambda);
    for (size_t i = 0; i < dim; ++i) EXPECT_NEAR(a.embedding[i], b.embedding[i], 1e-12);
    double sum = 0.0;
    for (size_t c = 0; c < classes; ++c) {
      EXPECT_NEAR(a.label[c], b.label[c], 1e-12);
      EXPECT_GE(a.label[c], 0.0);
      sum += a.label[c];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(ShuffleExampleTest, FrozenPermutationForSeed42) {
  EXPECT_EQ(shuffle_example(Tokens{"t0", "t1", "t2", "t3"}, 42),
            (Tokens{"t2", "t0", "t3", "t1"}));
}

TEST(ShuffleExampleTest, LengthOneUnchanged) {
  EXPECT_EQ(shuffle_example(Tokens{"a"}, 5), Tokens{"a"});
}

TEST(ShuffleExampleTest, PropertyMultisetAndReproducibility) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    SplitMix64 rng(seed + 7);
    Tokens seq(1 + rng.uniform_index(30));
    for (std::string& t : seq) t = "f" + std::to_string(rng.uniform_index(6));
    const Tokens out = shuffle_example(seq, seed);
    EXPECT_EQ(out.size(), seq.size());
    EXPECT_EQ(out, shuffle_example(seq, seed));
    Tokens a = seq;
    Tokens b = out;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(ShuffleExampleTest, ShuffleNeutralizesReversal) {
  const Tokens x{"f1", "f2", "f3", "c0w1", "f7"};
  const Tokens rev(x.rbegin(), x.rend());
  const int n = 10000;
  std::map<std::pair<std::string, std::string>, Vec> counts_x;
  std::map<std::pair<std::string, std::string>, Vec> counts_r;
  for (const std::string& a : x) {
    for (const std::string& b : x) {
      if (a != b) {
        counts_x[{a, b}].assign(n, 0.0);
        counts_r[{a, b}].assign(n, 0.0);
      }
    }
  }
  for (int s = 0; s < n; ++s) {
    const Tokens sx = shuffle_example(x, static_cast<uint64_t>(s));
    const Tokens sr = shuffle_example(rev, static_cast<uint64_t>(n + s));
    for (size_t i = 1; i < x.size(); ++i) {
      counts_x[{sx[i - 1], sx[i]}][s] += 1.0;
      counts_r[{sr[i - 1], sr[i]}][s] += 1.0;
    }
  }
  auto mean_var = [n](const Vec& v) {
    double m = 0.0;
    for (double c : v) m += c;
    m /= n;
    double var = 0.0;
    for (double c : v) var += (c - m) * (c - m);
    return std::make_pair(m, var / (n - 1));
  };
  for (const auto& [key, vx] : counts_x) {
    const auto [mx, varx] = mean_var(vx);
    const auto [mr, varr] = mean_var(counts_r[key]);
    const double sigma = std::sqrt(varx / n + varr / n);
    EXPECT_LE(std::abs(mx - mr), 3.0 * sigma) << key.first << " " << key.second;
    EXPECT_NEAR(mx, 0.2, 3.0 * std::sqrt(varx / n));  // 4 slots / 20 ordered pairs
  }
}

std::vector<EncodedExample> encoded_batch(const Dataset& d, const Vocab& v, size_t n) {
  std::vector<EncodedExample> out;
  for (size_t i = 0; i < n; ++i) {
    out.push_back({v.encode(d.examples[i].tokens), d.examples[i].label});
  }
  return out;
}

TEST(TriggerBreakerTest, BothTricksDisabledPassesThrough) {
  const Dataset d = synthetic(10, 1);
  const Vocab v = build_vocab(d);
  const FeatureSpec spec;
  const ModelParams p = ModelParams::random(feature_dim(spec, v.size()), 4, 2, 3, 0.5);
  TriggerBreakerConfig cfg;
  cfg.mixup.lambda = 0.0;
  cfg.shuffle.apply_prob = 0.0;
  SplitMix64 shuffle_rng(1);
  SplitMix64 pair_rng(2);
  const auto batch = encoded_batch(d, v, 6);
  const auto out = trigger_breaker_batch(batch, p, v.size(), spec, cfg, shuffle_rng, pair_rng);
  ASSERT_EQ(out.size(), 6u);
  for (size_t i = 0; i < out.size(); ++i) {
    const SparseVector x = featurize(batch[i].token_ids, v.size(), spec);
    EXPECT_EQ(out[i].embedding, encode(p, x));
    ASSERT_EQ(out[i].item.parents.size(), 1u);
    Vec one_hot(2, 0.0);
    one_hot[batch[i].label] = 1.0;
    EXPECT_EQ(out[i].item.soft_label, one_hot);
  }
  EXPECT_EQ(shuffle_rng.state(), SplitMix64(1).state());
  EXPECT_EQ(pair_rng.state(), SplitMix64(2).state());
}

TEST(TriggerBreakerTest, MixedItemsFollowPartnerRule) {
  const Dataset d = synthetic(10, 2);
  const Vocab v = build_vocab(d);
  const FeatureSpec spec;
  const ModelParams p = ModelParams::random(feature_dim(spec, v.size()), 4, 2, 3, 0.5);
  TriggerBreakerConfig cfg;
  cfg.mixup.lambda = 0.3;
  cfg.shuffle.apply_prob = 0.0;
  SplitMix64 shuffle_rng(1);
  SplitMix64 pair_rng(9);
  const auto batch = encoded_batch(d, v, 8);
  const auto out = trigger_breaker_batch(batch, p, v.size(), spec, cfg, shuffle_rng, pair_rng);
  SplitMix64 oracle(9);
  for (size_t i = 0; i < batch.size(); ++i) {
    const size_t r = static_cast<size_t>(oracle.uniform_index(batch.size() - 1));
    const size_t j = r + (r >= i ? 1 : 0);
    ASSERT_NE(i, j);
    const Vec vi = encode(p, featurize(batch[i].token_ids, v.size(), spec));
    const Vec vj = encode(p, featurize(batch[j].token_ids, v.size(), spec));
    for (size_t h = 0; h < vi.size(); ++h) {
      EXPECT_NEAR(out[i].embedding[h], 0.7 * vi[h] + 0.3 * vj[h], 1e-12);
    }
    Vec y(2, 0.0);
    y[batch[i].label] += 0.7;
    y[batch[j].label] += 0.3;
    EXPECT_NEAR(out[i].item.soft_label[0], y[0], 1e-12);
    EXPECT_NEAR(out[i].item.soft_label[0] + out[i].item.soft_label[1], 1.0, 1e-12);
    ASSERT_EQ(out[i].item.parents.size(), 2u);
    EXPECT_DOUBLE_EQ(out[i].item.parents[0].weight, 0.7);
    EXPECT_DOUBLE_EQ(out[i].item.parents[1].weight, 0.3);
  }
}

TEST(TriggerBreakerTest, ShuffleUsesOneSeedPerItem) {
  const Dataset d = synthetic(10, 3);
  const Vocab v = build_vocab(d);
  const FeatureSpec spec{FeatureMode::kBigram, false};
  TriggerBreakerConfig cfg;
  cfg.mixup.lambda = 0.0;
  SplitMix64 shuffle_rng(4);
  SplitMix64 pair_rng(5);
  const auto batch = encoded_batch(d, v, 5);
  const auto items = breaker_items(batch, 2, v.size(), spec, cfg, shuffle_rng, pair_rng);
  SplitMix64 oracle(4);
  for (size_t i = 0; i < batch.size(); ++i) {
    const std::vector<int> ids = shuffle_example(batch[i].token_ids, oracle.next());
    EXPECT_EQ(items[i].parents[0].features, featurize(ids, v.size(), spec));
  }
}

TEST(TriggerBreakerTest, UnigramEncodingIgnoresShuffle) {
  const Dataset d = synthetic(10, 4);
  const Vocab v = build_vocab(d);
  const FeatureSpec spec{FeatureMode::kUnigram, false};
  const ModelParams p = ModelParams::random(feature_dim(spec, v.size()), 4, 2, 3, 0.5);
  TriggerBreakerConfig shuffled;
  shuffled.mixup.lambda = 0.0;
  TriggerBreakerConfig plain = shuffled;
  plain.shuffle.apply_prob = 0.0;
  const auto batch = encoded_batch(d, v, 10);
  SplitMix64 s1(1), p1(2), s2(1), p2(2);
  const auto a = trigger_breaker_batch(batch, p, v.size(), spec, shuffled, s1, p1);
  const auto b = trigger_breaker_batch(batch, p, v.size(), spec, plain, s2, p2);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].embedding, b[i].embedding);
}

TEST(TriggerBreakerTest, PropertySoftLabelsSumToOne) {
  const Dataset d = synthetic(40, 5);
  const Vocab v = build_vocab(d);
  const FeatureSpec spec;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    SplitMix64 rng(seed);
    TriggerBreakerConfig cfg;
    cfg.mixup.lambda = rng.uniform_double();
    cfg.shuffle.apply_prob = rng.uniform_double();
    SplitMix64 s(seed), p(seed + 1);
    const auto batch = encoded_batch(d, v, 2 + rng.uniform_index(30));
    for (const TrainItem& item : breaker_items(batch, 2, v.size(), spec, cfg, s, p)) {
      EXPECT_NEAR(item.soft_label[0] + item.soft_label[1], 1.0, 1e-12);
    }
  }
}

TEST(TriggerBreakerTest, SingleItemWithMixupIsPairingError) {
  const Dataset d = synthetic(2, 6);
  const Vocab v = build_vocab(d);
  SplitMix64 s(1), p(2);
  EXPECT_THROW(breaker_items(encoded_batch(d, v, 1), 2, v.size(), FeatureSpec{},
                             TriggerBreakerConfig{}, s, p),
               PairingError);
  TriggerBreakerConfig no_mix;
  no_mix.mixup.lambda = 0.0;
  EXPECT_NO_THROW(breaker_items(encoded_batch(d, v, 1), 2, v.size(), FeatureSpec{},
                                no_mix, s, p));
}

class OnionTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    lm_ = new NGramLM(lm_train(synthetic(2000, 31)));
  }
  static void TearDownTestSuite() {
    delete lm_;
    lm_ = nullptr;
  }
  OnionConfig config(int max_removals = 3) const {
    OnionConfig cfg;
    cfg.lm = lm_;
    cfg.max_removals = max_removals;
    return cfg;
  }
  static NGramLM* lm_;
};

NGramLM* OnionTest::lm_ = nullptr;

TEST(OnionToyTest, InsertedRareTokenRemovedFirst) {
  Dataset toy;
  const std::vector<Tokens> corpus{{"the", "cat", "sat", "on", "the", "mat"},
                                   {"the", "dog", "sat", "on", "the", "rug"},
                                   {"a", "cat", "lay", "on", "a", "mat"}};
  for (int r = 0; r < 5; ++r) {
    for (const Tokens& s : corpus) {
      toy.examples.push_back({static_cast<int64_t>(toy.size()), s, 0, Origin::kClean, {}});
    }
  }
  const NGramLM lm = lm_train(toy);
  OnionConfig cfg;
  cfg.lm = &lm;
  cfg.max_removals = 1;
  for (const Tokens& s : corpus) {
    for (size_t pos = 0; pos <= s.size(); ++pos) {
      Tokens poisoned = s;
      poisoned.insert(poisoned.begin() + static_cast<ptrdiff_t>(pos), "qzx");
      EXPECT_EQ(onion_sanitize(poisoned, cfg), s) << "position " << pos;
    }
  }
}

TEST_F(OnionTest, RareTokenRemovedFirstOnSyntheticCorpus) {
  const Dataset clean = synthetic(50, 32);
  int first = 0;
  for (const LabeledExample& ex : clean.examples) {
    Tokens poisoned = ex.tokens;
    poisoned.insert(poisoned.begin() + static_cast<ptrdiff_t>(poisoned.size() / 2), "qzx");
    if (onion_sanitize(poisoned, config(1)) == ex.tokens) ++first;
  }
  // Measured: a filler that breaks the successor chain can outscore the
  // unseen token, so the rare token is the first removal in 74 of 100.
  EXPECT_EQ(first, 74);
}

TEST_F(OnionTest, CleanSentenceFalseRemovalRate) {
  const Dataset clean = synthetic(50, 33);
  int changed = 0;
  for (const LabeledExample& ex : clean.examples) {
    if (onion_sanitize(ex.tokens, config()) != ex.tokens) ++changed;
  }
  // Measured: every sampled clean sentence loses at least one token, since
  // signal tokens and chain breaks each cost more than 5% of perplexity.
  EXPECT_EQ(changed, 100);
}

TEST_F(OnionTest, PropertyDeletesOnlyAndTerminates) {
  const Dataset clean = synthetic(60, 34);
  for (size_t i = 0; i < clean.size(); ++i) {
    const Tokens& s = clean.examples[i].tokens;
    const Tokens rev(s.rbegin(), s.rend());
    const int cap = static_cast<int>(i % 5);
    for (const Tokens& input : {s, rev}) {
      const Tokens out = onion_sanitize(input, config(cap));
      EXPECT_LE(out.size(), input.size());
      EXPECT_GE(static_cast<int>(out.size()), static_cast<int>(input.size()) - cap);
      EXPECT_GE(out.size(), 1u);
      // out is a subsequence of input.
      size_t j = 0;
      for (size_t k = 0; k < input.size() && j < out.size(); ++k) {
        if (input[k] == out[j]) ++j;
      }
      EXPECT_EQ(j, out.size());
    }
  }
}

TEST_F(OnionTest, NoRemovalBelowThreshold) {
  OnionConfig cfg = config();
  cfg.threshold = 0.99;
  const Tokens s{"f1", "qzx", "f2"};
  EXPECT_EQ(onion_sanitize(s, cfg), s);
  EXPECT_EQ(onion_sanitize(Tokens{"qzx"}, config()), Tokens{"qzx"});
}

TEST_F(OnionTest, DatasetOverloadKeepsLabels) {
  Dataset d = synthetic(5, 35);
  d.tag = DatasetTag::kTest;
  const Dataset out = onion_sanitize(d, config());
  ASSERT_EQ(out.size(), d.size());
  EXPECT_EQ(out.tag, d.tag);
  for (size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(out.examples[i].id, d.examples[i].id);
    EXPECT_EQ(out.examples[i].label, d.examples[i].label);
    EXPECT_EQ(out.examples[i].tokens, onion_sanitize(d.examples[i].tokens, config()));
  }
}

TEST(OnionConfigTest, Validation) {
  OnionConfig cfg;
  EXPECT_THROW(validate(cfg), ConfigError);
  const NGramLM lm = lm_train(synthetic(5, 1));
  cfg.lm = &lm;
  cfg.threshold = 0.0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg.threshold = 0.05;
  EXPECT_NO_THROW(validate(cfg));
}

}  // namespace
}  // namespace triggerbench
