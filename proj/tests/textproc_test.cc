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


#include "triggerbench/textproc.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "triggerbench/corpus.h"
#include "triggerbench/errors.h"
#include "triggerbench/random.h"

namespace triggerbench {
namespace {

using Tokens = std::vector<std::string>;

Dataset corpus_of(const std::vector<Tokens>& sentences) {
  Dataset d;
  for (size_t i = 0; i < sentences.size(); ++i) {
    d.examples.push_back({static_cast<int64_t>(i), sentences[i], 0, Origin::kClean, {}});
  }
  return d;
}

// Brute-force counter used as the oracle for the smoothed model.
struct CountOracle {
  std::map<std::string, double> context;
  std::map<std::pair<std::string, std::string>, double> pair;
  int vocab = 0;

  explicit CountOracle(const std::vector<Tokens>& sentences) {
    std::map<std::string, int> distinct;
    for (const Tokens& s : sentences) {
      std::string prev = "<s>";
      for (const std::string& w : s) {
        distinct[w] = 1;
        context[prev] += 1;
        pair[{prev, w}] += 1;
        prev = w;
      }
      context[prev] += 1;
      pair[{prev, "</s>"}] += 1;
    }
    vocab = static_cast<int>(distinct.size());
  }

  double p(const std::string& u, const std::string& w, double k) const {
    const auto c = context.find(u);
    const auto b = pair.find({u, w});
    const double cu = c == context.end() ? 0.0 : c->second;
    const double cb = b == pair.end() ? 0.0 : b->second;
    return (cb + k) / (cu + k * (vocab + 1));
  }

  double ppl(const Tokens& s, double k) const {
    double total = 0.0;
    std::string prev = "<s>";
    for (const std::string& w : s) {
      total += std::log(p(prev, w, k));
      prev = w;
    }
    total += std::log(p(prev, "</s>", k));
    return std::exp(-total / (static_cast<double>(s.size()) + 1.0));
  }
};

TEST(TokenizeTest, LowercasesAndSplits) {
  EXPECT_EQ(tokenize("The CAT sat"), (Tokens{"the", "cat", "sat"}));
  EXPECT_EQ(tokenize(""), Tokens{});
  EXPECT_EQ(tokenize("a  b"), (Tokens{"a", "b"}));
  EXPECT_EQ(tokenize("  \tx\ny  "), (Tokens{"x", "y"}));
}

TEST(VocabTest, FrequencyThenLexicographicOrder) {
  const Vocab v = build_vocab(corpus_of({{"a", "a", "b"}}), 1);
  EXPECT_EQ(v.id("a"), 1);
  EXPECT_EQ(v.id("b"), 2);
  EXPECT_EQ(v.size(), 3);
  EXPECT_EQ(v.token(kUnkId), std::string(kUnkToken));
  const Vocab ties = build_vocab(corpus_of({{"z", "y", "x", "y"}}), 1);
  EXPECT_EQ(ties.tokens(), (Tokens{"<unk>", "y", "x", "z"}));
}

TEST(VocabTest, MinFrequencyThreshold) {
  const Vocab v = build_vocab(corpus_of({{"a", "a", "b"}}), 3);
  EXPECT_EQ(v.id("b"), kUnkId);
  EXPECT_EQ(v.id("a"), kUnkId);
  EXPECT_EQ(v.size(), 1);
  const Vocab two = build_vocab(corpus_of({{"a", "a", "b"}}), 2);
  EXPECT_EQ(two.id("a"), 1);
  EXPECT_EQ(two.id("b"), kUnkId);
}

TEST(VocabTest, DeterministicAndJsonRoundTrip) {
  GeneratorConfig g;
  g.examples_per_class = 40;
  const Dataset d = generate_synthetic(g);
  const Vocab a = build_vocab(d);
  EXPECT_EQ(a, build_vocab(d));
  EXPECT_EQ(Vocab::from_json(a.to_json()), a);
}

TEST(VocabTest, EncodeMapsUnknownToUnk) {
  const Vocab v = build_vocab(corpus_of({{"a", "b", "b"}}));
  EXPECT_EQ(v.encode(Tokens{"b", "zzz", "a"}), (std::vector<int>{1, 0, 2}));
}

TEST(VocabTest, EmptyDatasetRejected) {
  EXPECT_THROW(build_vocab(Dataset{}), Error);
}

TEST(NGramLMTest, HandCountedBigram) {
  const NGramLM lm = lm_train(corpus_of({{"a", "b", "a", "b"}}), 0.1);
  EXPECT_EQ(lm.vocab_size(), 2);
  EXPECT_NEAR(lm.probability("a", "b"), 2.1 / 2.3, 1e-12);
  EXPECT_NEAR(lm.probability("a", "b"), 0.913, 5e-4);
  EXPECT_NEAR(lm.probability("<s>", "a"), 1.1 / 1.3, 1e-12);
  EXPECT_NEAR(lm.probability("b", "</s>"), 1.1 / 2.3, 1e-12);
  EXPECT_NEAR(lm.log_probability("a", "b"), std::log(2.1 / 2.3), 1e-12);
}

TEST(NGramLMTest, LargeSmoothingTendsToUniform) {
  const NGramLM lm = lm_train(corpus_of({{"a", "b"}}), 1e9);
  for (const double p : lm.next_distribution("a")) EXPECT_NEAR(p, 1.0 / 3.0, 1e-8);
  EXPECT_NEAR(perplexity(lm, Tokens{"b", "a", "a"}), 3.0, 1e-6);
}

TEST(NGramLMTest, OutOfVocabularyHandling) {
  const NGramLM lm = lm_train(corpus_of({{"a", "b", "a", "b"}}), 0.1);
  EXPECT_NEAR(lm.probability("a", "qzx"), 0.1 / 2.3, 1e-12);
  EXPECT_NEAR(lm.probability("qzx", "a"), 1.0 / 3.0, 1e-12);
}

TEST(NGramLMTest, PropertyDistributionsNormalize) {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    GeneratorConfig g;
    g.examples_per_class = 5 + static_cast<int>(seed % 10);
    g.filler_vocab_size = 5 + static_cast<int>(seed % 20);
    g.seed = seed;
    const double k = 0.01 + 0.05 * static_cast<double>(seed % 7);
    const NGramLM lm = lm_train(generate_synthetic(g), k);
    std::vector<std::string> contexts = lm.tokens();
    contexts.push_back(std::string(kBos));
    contexts.push_back("never-seen");
    for (const std::string& u : contexts) {
      const std::vector<double> dist = lm.next_distribution(u);
      ASSERT_EQ(dist.size(), lm.tokens().size() + 1);
      double sum = 0.0;
      for (double p : dist) {
        EXPECT_GT(p, 0.0);
        sum += p;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9) << "seed " << seed << " context " << u;
    }
  }
}

TEST(NGramLMTest, PropertyPerplexityMatchesBruteForceCounts) {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    GeneratorConfig g;
    g.examples_per_class = 10;
    g.filler_vocab_size = 8;
    g.signal_tokens_per_class = 3;
    g.min_length = 2;
    g.max_length = 6;
    g.seed = seed;
    const Dataset d = generate_synthetic(g);
    std::vector<Tokens> sentences;
    for (const LabeledExample& ex : d.examples) sentences.push_back(ex.tokens);
    const CountOracle oracle(sentences);
    const double k = 0.05 + 0.1 * static_cast<double>(seed % 5);
    const NGramLM lm = lm_train(d, k);
    SplitMix64 rng(seed);
    Tokens probe;
    for (int i = 0; i < 5; ++i) {
      probe.push_back(sentences[rng.uniform_index(sentences.size())][0]);
    }
    probe.push_back("unseen");
    EXPECT_NEAR(perplexity(lm, probe), oracle.ppl(probe, k),
                1e-9 * oracle.ppl(probe, k));
    EXPECT_NEAR(perplexity(lm, sentences[0]), oracle.ppl(sentences[0], k),
                1e-9 * oracle.ppl(sentences[0], k));
  }
}

TEST(NGramLMTest, VerbatimSentenceBeatsItsReversal) {
  GeneratorConfig g;
  g.examples_per_class = 500;
  g.seed = 21;
  const Dataset d = generate_synthetic(g);
  const NGramLM lm = lm_train(d);
  int strictly_lower = 0;
  for (size_t i = 0; i < 100; ++i) {
    const Tokens& s = d.examples[i].tokens;
    const Tokens rev(s.rbegin(), s.rend());
    if (perplexity(lm, s) < perplexity(lm, rev)) ++strictly_lower;
  }
  EXPECT_EQ(strictly_lower, 100);
}

TEST(NGramLMTest, JsonRoundTripPreservesProbabilities) {
  GeneratorConfig g;
  g.examples_per_class = 30;
  const NGramLM lm = lm_train(generate_synthetic(g), 0.2);
  const NGramLM back = NGramLM::from_json(lm.to_json());
  EXPECT_EQ(back.k(), lm.k());
  EXPECT_EQ(back.tokens(), lm.tokens());
  for (const std::string& u : lm.tokens()) {
    EXPECT_EQ(back.next_distribution(u), lm.next_distribution(u));
  }
  EXPECT_EQ(back.next_distribution(kBos), lm.next_distribution(kBos));
  EXPECT_EQ(back.to_json(), lm.to_json());
}

TEST(NGramLMTest, RejectsEmptyInputs) {
  EXPECT_THROW(lm_train(Dataset{}), Error);
  const NGramLM lm = lm_train(corpus_of({{"a"}}));
  EXPECT_THROW(perplexity(lm, Tokens{}), Error);
}

TEST(OodTest, ThresholdIsNearestRankPercentile) {
  const std::vector<Tokens> sentences = {{"a", "b"}, {"b", "a"}, {"a", "a"},
                                         {"b", "b"}, {"a", "b", "a"}};
  const Dataset d = corpus_of(sentences);
  const NGramLM lm = lm_train(d);
  std::vector<double> ppl;
  for (const Tokens& s : sentences) ppl.push_back(perplexity(lm, s));
  std::sort(ppl.begin(), ppl.end());
  // Nearest rank ceil(q n): q = 0.95, n = 5 -> 5th; q = 0.6 -> 3rd.
  EXPECT_DOUBLE_EQ(ood_threshold(lm, d, 0.95), ppl[4]);
  EXPECT_DOUBLE_EQ(ood_threshold(lm, d, 0.6), ppl[2]);
  EXPECT_DOUBLE_EQ(ood_threshold(lm, d, 0.2), ppl[0]);
}

TEST(OodTest, CleanSetFlagRateAtMostFivePercent) {
  GeneratorConfig g;
  g.seed = 3;
  const NGramLM lm = lm_train(generate_synthetic(g));
  g.seed = 4;
  g.examples_per_class = 250;
  const Dataset clean = generate_synthetic(g);
  const double threshold = ood_threshold(lm, clean);
  int flagged = 0;
  for (const LabeledExample& ex : clean.examples) {
    flagged += ood_flag(lm, ex.tokens, threshold) ? 1 : 0;
  }
  EXPECT_LE(flagged, 25);
  EXPECT_TRUE(ood_flag(lm, Tokens{"qzx", "qzx", "qzx"}, threshold));
}

}  // namespace
}  // namespace triggerbench
