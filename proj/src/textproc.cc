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
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "triggerbench/errors.h"

namespace triggerbench {

using nlohmann::json;

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

Vocab::Vocab() {
  tokens_.emplace_back(kUnkToken);
  ids_.emplace(std::string(kUnkToken), kUnkId);
}

int Vocab::add(const std::string& token) {
  auto [it, inserted] = ids_.emplace(token, size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

int Vocab::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnkId : it->second;
}

bool Vocab::contains(std::string_view token) const {
  return token != kUnkToken && ids_.count(std::string(token)) > 0;
}

std::vector<int> Vocab::encode(std::span<const std::string> seq) const {
  std::vector<int> out;
  out.reserve(seq.size());
  for (const std::string& t : seq) out.push_back(id(t));
  return out;
}

json Vocab::to_json() const {
  // UNK is implicit at index 0.
  return json(std::vector<std::string>(tokens_.begin() + 1, tokens_.end()));
}

Vocab Vocab::from_json(const json& j) {
  Vocab v;
  for (const auto& t : j) {
    const std::string token = t.get<std::string>();
    if (v.contains(token) || token == kUnkToken) {
      throw ParseError("duplicate vocab token '" + token + "'", 0);
    }
    v.add(token);
  }
  return v;
}

Vocab build_vocab(const Dataset& train, int min_freq) {
  if (min_freq < 1) throw ConfigError("min_freq must be >= 1");
  if (train.empty()) throw ValidationError("cannot build vocab from empty dataset");
  std::map<std::string, int64_t> freq;
  for (const LabeledExample& ex : train.examples) {
    for (const std::string& t : ex.tokens) ++freq[t];
  }
  std::vector<std::pair<std::string, int64_t>> ranked(freq.begin(), freq.end());
  // Stable over the lexicographic map order, so ties stay lexicographic.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocab vocab;
  for (const auto& [token, count] : ranked) {
    if (count >= min_freq) vocab.add(token);
  }
  return vocab;
}

int NGramLM::context_index(std::string_view token) const {
  if (token == kBos) return vocab_size();
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kOov : it->second;
}

int NGramLM::outcome_index(std::string_view token) const {
  if (token == kEos) return vocab_size();
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kOov : it->second;
}

double NGramLM::probability_by_index(int context, int outcome) const {
  const double outcomes = static_cast<double>(vocab_size() + 1);
  const double ctx_count = context == kOov ? 0.0 : context_counts_[context];
  double pair_count = 0.0;
  if (context != kOov && outcome != kOov) {
    auto it = bigram_counts_.find(static_cast<int64_t>(context) *
                                      (vocab_size() + 1) +
                                  outcome);
    if (it != bigram_counts_.end()) pair_count = static_cast<double>(it->second);
  }
  return (pair_count + k_) / (ctx_count + k_ * outcomes);
}

double NGramLM::probability(std::string_view context,
                            std::string_view next) const {
  return probability_by_index(context_index(context), outcome_index(next));
}

double NGramLM::log_probability(std::string_view context,
                                std::string_view next) const {
  return std::log(probability(context, next));
}

std::vector<double> NGramLM::next_distribution(std::string_view context) const {
  const int ctx = context_index(context);
  std::vector<double> out(vocab_size() + 1);
  for (int w = 0; w <= vocab_size(); ++w) out[w] = probability_by_index(ctx, w);
  return out;
}

json NGramLM::to_json() const {
  json unigram = json::object();
  for (int i = 0; i < vocab_size(); ++i) unigram[tokens_[i]] = context_counts_[i];
  unigram[std::string(kBos)] = context_counts_[vocab_size()];
  json bigram = json::object();
  const int64_t width = vocab_size() + 1;
  for (const auto& [key, count] : bigram_counts_) {
    const int64_t u = key / width;
    const int64_t w = key % width;
    const std::string ut = u == vocab_size() ? std::string(kBos) : tokens_[u];
    const std::string wt = w == vocab_size() ? std::string(kEos) : tokens_[w];
    bigram[ut + " " + wt] = count;
  }
  return json{{"k", k_}, {"vocab", tokens_}, {"unigram", unigram},
              {"bigram", bigram}};
}

NGramLM NGramLM::from_json(const json& j) {
  NGramLM lm;
  try {
    lm.k_ = j.at("k").get<double>();
    lm.tokens_ = j.at("vocab").get<std::vector<std::string>>();
    if (!(lm.k_ > 0.0)) throw ValidationError("LM k must be > 0");
    if (!std::is_sorted(lm.tokens_.begin(), lm.tokens_.end())) {
      throw ValidationError("LM vocab must be sorted");
    }
    for (int i = 0; i < lm.vocab_size(); ++i) lm.index_.emplace(lm.tokens_[i], i);
    lm.context_counts_.assign(lm.vocab_size() + 1, 0);
    for (const auto& [token, count] : j.at("unigram").items()) {
      const int idx = lm.context_index(token);
      if (idx == kOov) throw ValidationError("unigram for unknown token " + token);
      lm.context_counts_[idx] = count.get<int64_t>();
    }
    const int64_t width = lm.vocab_size() + 1;
    for (const auto& [key, count] : j.at("bigram").items()) {
      const auto space = key.find(' ');
      if (space == std::string::npos) throw ValidationError("bad bigram key " + key);
      const int u = lm.context_index(key.substr(0, space));
      const int w = lm.outcome_index(key.substr(space + 1));
      if (u == kOov || w == kOov) throw ValidationError("bigram key out of vocab " + key);
      lm.bigram_counts_[u * width + w] = count.get<int64_t>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("LM checkpoint: ") + e.what(), 0);
  }
  return lm;
}

NGramLM lm_train(const Dataset& corpus, double k) {
  if (!(k > 0.0)) throw ConfigError("smoothing constant k must be > 0");
  if (corpus.empty()) throw ValidationError("cannot train LM on empty corpus");
  std::set<std::string> distinct;
  for (const LabeledExample& ex : corpus.examples) {
    distinct.insert(ex.tokens.begin(), ex.tokens.end());
  }
  NGramLM lm;
  lm.k_ = k;
  lm.tokens_.assign(distinct.begin(), distinct.end());
  for (int i = 0; i < lm.vocab_size(); ++i) lm.index_.emplace(lm.tokens_[i], i);
  lm.context_counts_.assign(lm.vocab_size() + 1, 0);
  const int bos = lm.vocab_size();
  const int eos = lm.vocab_size();
  const int64_t width = lm.vocab_size() + 1;
  for (const LabeledExample& ex : corpus.examples) {
    int prev = bos;
    for (const std::string& t : ex.tokens) {
      const int cur = lm.index_.at(t);
      ++lm.context_counts_[prev];
      ++lm.bigram_counts_[prev * width + cur];
      prev = cur;
    }
    ++lm.context_counts_[prev];
    ++lm.bigram_counts_[prev * width + eos];
  }
  return lm;
}

double perplexity(const NGramLM& lm, std::span<const std::string> seq) {
  if (seq.empty()) throw ValidationError("perplexity of an empty sequence");
  double log_sum = 0.0;
  std::string_view prev = kBos;
  for (const std::string& t : seq) {
    log_sum += lm.log_probability(prev, t);
    prev = t;
  }
  log_sum += lm.log_probability(prev, kEos);
  return std::exp(-log_sum / static_cast<double>(seq.size() + 1));
}

bool ood_flag(const NGramLM& lm, std::span<const std::string> seq,
              double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("OOD threshold must be > 0");
  return perplexity(lm, seq) > threshold;
}

double ood_threshold(const NGramLM& lm, const Dataset& clean_validation,
                     double quantile) {
  if (!(quantile > 0.0 && quantile <= 1.0)) {
    throw ConfigError("quantile must lie in (0, 1]");
  }
  if (clean_validation.empty()) {
    throw ValidationError("OOD threshold needs a nonempty clean set");
  }
  std::vector<double> ppl;
  ppl.reserve(clean_validation.size());
  for (const LabeledExample& ex : clean_validation.examples) {
    ppl.push_back(perplexity(lm, ex.tokens));
  }
  std::sort(ppl.begin(), ppl.end());
  const auto rank = static_cast<size_t>(
      std::ceil(quantile * static_cast<double>(ppl.size()) - 1e-9));
  return ppl[std::max<size_t>(rank, 1) - 1];
}

}  // namespace triggerbench
