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

#ifndef TRIGGERBENCH_TEXTPROC_H_
#define TRIGGERBENCH_TEXTPROC_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "triggerbench/corpus.h"

namespace triggerbench {

// Lowercases and splits on runs of whitespace.
std::vector<std::string> tokenize(std::string_view text);

inline constexpr int kUnkId = 0;
inline constexpr std::string_view kUnkToken = "<unk>";

class Vocab {
 public:
  Vocab();

  // Appends a token and returns its id; returns the existing id if present.
  int add(const std::string& token);

  // kUnkId for unknown tokens.
  int id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const { return tokens_.at(id); }
  // Includes the UNK slot.
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> encode(std::span<const std::string> seq) const;

  nlohmann::json to_json() const;
  static Vocab from_json(const nlohmann::json& j);

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// Ids 1.. in descending corpus frequency, ties broken lexicographically.
// Tokens below min_freq are left out and therefore map to UNK.
Vocab build_vocab(const Dataset& train, int min_freq = 1);

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";

// Add-k smoothed bigram model over the corpus token set plus BOS/EOS:
//
//   P(w | u) = (count(u, w) + k) / (count(u) + k * (V + 1))
//
// where V is the number of distinct corpus tokens and the V + 1 outcomes are
// those tokens plus EOS. count(u) counts u as a context (BOS for sentence
// starts). A token never seen in training scores as a zero-count outcome
// k / (count(u) + k (V + 1)), and as a context it yields the uniform 1/(V+1).
class NGramLM {
 public:
  NGramLM() = default;

  double k() const { return k_; }
  // Number of distinct corpus tokens (excludes BOS/EOS).
  int vocab_size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // context may be kBos; next may be kEos.
  double probability(std::string_view context, std::string_view next) const;
  double log_probability(std::string_view context,
                         std::string_view next) const;

  // P(. | context) over tokens() followed by EOS; length V + 1.
  std::vector<double> next_distribution(std::string_view context) const;

  nlohmann::json to_json() const;
  static NGramLM from_json(const nlohmann::json& j);

  friend NGramLM lm_train(const Dataset& corpus, double k);

 private:
  static constexpr int kOov = -1;
  int context_index(std::string_view token) const;
  int outcome_index(std::string_view token) const;
  double probability_by_index(int context, int outcome) const;

  double k_ = 0.1;
  std::vector<std::string> tokens_;  // sorted
  std::unordered_map<std::string, int> index_;
  // Indexed by token id; slot V holds the BOS context count.
  std::vector<int64_t> context_counts_;
  // Key: context * (V + 1) + outcome, with BOS context V and EOS outcome V.
  std::unordered_map<int64_t, int64_t> bigram_counts_;
};

NGramLM lm_train(const Dataset& corpus, double k = 0.1);

// exp(-(1/(N+1)) * sum log P(w_t | w_{t-1})) over the N tokens and the final
// EOS transition, with BOS as the first context.
double perplexity(const NGramLM& lm, std::span<const std::string> seq);

bool ood_flag(const NGramLM& lm, std::span<const std::string> seq,
              double threshold);

// Nearest-rank percentile (q in (0, 1]) of the clean set's perplexities; at
// most a (1 - q) fraction of that set scores strictly above it.
double ood_threshold(const NGramLM& lm, const Dataset& clean_validation,
                     double quantile = 0.95);

}  // namespace triggerbench

#endif  // TRIGGERBENCH_TEXTPROC_H_
