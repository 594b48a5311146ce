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

#include "triggerbench/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "triggerbench/errors.h"
#include "triggerbench/random.h"

namespace triggerbench {
namespace {

using nlohmann::json;

std::vector<std::string> split_whitespace(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string token;
  while (in >> token) out.push_back(std::move(token));
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

void validate_example(const LabeledExample& ex, int num_classes) {
  const std::string where = "example " + std::to_string(ex.id) + ": ";
  if (ex.tokens.empty()) throw ValidationError(where + "empty token sequence");
  if (ex.label < 0 || ex.label >= num_classes) {
    throw ValidationError(where + "label " + std::to_string(ex.label) +
                          " outside [0, " + std::to_string(num_classes) + ")");
  }
  const bool poisoned = ex.origin == Origin::kPoisoned;
  if (poisoned != ex.original_label.has_value()) {
    throw ValidationError(where +
                          "original_label must be present iff origin=poisoned");
  }
  if (ex.original_label &&
      (*ex.original_label < 0 || *ex.original_label >= num_classes)) {
    throw ValidationError(where + "original_label out of range");
  }
}

LabeledExample parse_record(const std::string& line, size_t line_no,
                            int num_classes) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!record.is_object()) throw ParseError("record is not an object", line_no);
  LabeledExample ex;
  try {
    ex.id = record.at("id").get<int64_t>();
    ex.tokens = split_whitespace(record.at("text").get<std::string>());
    ex.label = record.at("label").get<int>();
    const std::string origin = record.at("origin").get<std::string>();
    if (origin == "clean") {
      ex.origin = Origin::kClean;
    } else if (origin == "poisoned") {
      ex.origin = Origin::kPoisoned;
    } else {
      throw ParseError("unknown origin '" + origin + "'", line_no);
    }
    if (record.contains("original_label") &&
        !record["original_label"].is_null()) {
      ex.original_label = record["original_label"].get<int>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad field: ") + e.what(), line_no);
  }
  try {
    validate_example(ex, num_classes);
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
  }
  return ex;
}

}  // namespace

std::string_view origin_name(Origin origin) {
  return origin == Origin::kClean ? "clean" : "poisoned";
}

std::string_view tag_name(DatasetTag tag) {
  switch (tag) {
    case DatasetTag::kTrain:
      return "train";
    case DatasetTag::kTest:
      return "test";
    case DatasetTag::kPoisonedTest:
      return "poisoned_test";
  }
  return "train";
}

void validate(const Dataset& dataset) {
  if (dataset.num_classes < 2) {
    throw ValidationError("num_classes must be >= 2");
  }
  std::unordered_set<int64_t> ids;
  ids.reserve(dataset.size());
  for (const LabeledExample& ex : dataset.examples) {
    validate_example(ex, dataset.num_classes);
    if (!ids.insert(ex.id).second) {
      throw ValidationError("duplicate id " + std::to_string(ex.id));
    }
  }
}

void validate(const GeneratorConfig& cfg) {
  if (cfg.num_classes < 2) throw ConfigError("generator: num_classes < 2");
  if (cfg.signal_tokens_per_class < 1) {
    throw ConfigError("generator: signal_tokens_per_class < 1");
  }
  if (cfg.filler_vocab_size < 1) {
    throw ConfigError("generator: filler_vocab_size < 1");
  }
  if (!(cfg.signal_prob > 0.0 && cfg.signal_prob < 1.0)) {
    throw ConfigError("generator: signal_prob must lie in (0, 1)");
  }
  if (!(cfg.markov_stick_prob > 0.0 && cfg.markov_stick_prob < 1.0)) {
    throw ConfigError("generator: markov_stick_prob must lie in (0, 1)");
  }
  if (cfg.min_length < 2) throw ConfigError("generator: min_length < 2");
  if (cfg.max_length < cfg.min_length) {
    throw ConfigError("generator: max_length < min_length");
  }
  if (cfg.examples_per_class < 1) {
    throw ConfigError("generator: examples_per_class < 1");
  }
}

Dataset generate_synthetic(const GeneratorConfig& cfg) {
  validate(cfg);
  SplitMix64 rng(cfg.seed);
  Dataset out;
  out.num_classes = cfg.num_classes;
  out.tag = DatasetTag::kTrain;
  const int total = cfg.num_classes * cfg.examples_per_class;
  out.examples.reserve(total);
  const uint64_t span = cfg.max_length - cfg.min_length + 1;
  for (int k = 0; k < total; ++k) {
    LabeledExample ex;
    ex.id = k;
    ex.label = k % cfg.num_classes;
    const int length = cfg.min_length + static_cast<int>(rng.uniform_index(span));
    ex.tokens.reserve(length);
    int filler = -1;
    for (int pos = 0; pos < length; ++pos) {
      if (rng.bernoulli(cfg.signal_prob)) {
        const uint64_t j = rng.uniform_index(cfg.signal_tokens_per_class);
        ex.tokens.push_back("c" + std::to_string(ex.label) + "w" +
                            std::to_string(j));
        filler = -1;
        continue;
      }
      if (filler < 0) {
        filler = static_cast<int>(rng.uniform_index(cfg.filler_vocab_size));
      } else if (rng.bernoulli(cfg.markov_stick_prob)) {
        filler = (filler + 1) % cfg.filler_vocab_size;
      } else {
        filler = static_cast<int>(rng.uniform_index(cfg.filler_vocab_size));
      }
      ex.tokens.push_back("f" + std::to_string(filler));
    }
    out.examples.push_back(std::move(ex));
  }
  return out;
}

Dataset read_jsonl(std::istream& in, int num_classes, DatasetTag tag) {
  Dataset out;
  out.num_classes = num_classes;
  out.tag = tag;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.examples.push_back(parse_record(line, line_no, num_classes));
  }
  validate(out);
  return out;
}

void write_jsonl(std::ostream& out, const Dataset& dataset) {
  validate(dataset);
  for (const LabeledExample& ex : dataset.examples) {
    // Keys written in a fixed order so files are byte-stable.
    out << "{\"id\":" << ex.id
        << ",\"text\":" << json(join_tokens(ex.tokens)).dump()
        << ",\"label\":" << ex.label << ",\"origin\":\""
        << origin_name(ex.origin) << "\",\"original_label\":";
    if (ex.original_label) {
      out << *ex.original_label;
    } else {
      out << "null";
    }
    out << "}\n";
  }
}

Dataset load_dataset(const std::filesystem::path& path, int num_classes,
                     DatasetTag tag) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path.string());
  return read_jsonl(in, num_classes, tag);
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset " + path.string());
  write_jsonl(out, dataset);
  if (!out) throw Error("write failed for " + path.string());
}

CandidateSplit split_candidates(const Dataset& train, double poison_rate,
                                int target_label, bool exclude_target,
                                uint64_t seed) {
  if (!(poison_rate > 0.0 && poison_rate < 1.0)) {
    throw ConfigError("poison_rate must lie in (0, 1)");
  }
  std::vector<size_t> eligible;
  for (size_t i = 0; i < train.size(); ++i) {
    if (!exclude_target || train.examples[i].label != target_label) {
      eligible.push_back(i);
    }
  }
  if (eligible.empty()) {
    throw EmptyCandidateError("no examples eligible for poisoning");
  }
  const size_t m = static_cast<size_t>(
      std::llround(poison_rate * static_cast<double>(eligible.size())));
  SplitMix64 rng(seed);
  fisher_yates(eligible, rng);
  std::vector<bool> chosen(train.size(), false);
  for (size_t k = 0; k < m; ++k) chosen[eligible[k]] = true;

  CandidateSplit split;
  split.poison_candidates.num_classes = train.num_classes;
  split.poison_candidates.tag = train.tag;
  split.clean_remainder.num_classes = train.num_classes;
  split.clean_remainder.tag = train.tag;
  for (size_t i = 0; i < train.size(); ++i) {
    (chosen[i] ? split.poison_candidates : split.clean_remainder)
        .examples.push_back(train.examples[i]);
  }
  return split;
}

}  // namespace triggerbench
