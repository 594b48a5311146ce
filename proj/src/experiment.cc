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


#include "triggerbench/experiment.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <utility>

#include "triggerbench/defense.h"
#include "triggerbench/errors.h"
#include "triggerbench/random.h"
#include "triggerbench/textproc.h"

namespace triggerbench {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view position_name(InsertPosition p) {
  switch (p) {
    case InsertPosition::kUniform: return "uniform";
    case InsertPosition::kStart: return "start";
    case InsertPosition::kEnd: return "end";
  }
  return "uniform";
}

InsertPosition parse_position(std::string_view name) {
  if (name == "uniform") return InsertPosition::kUniform;
  if (name == "start") return InsertPosition::kStart;
  if (name == "end") return InsertPosition::kEnd;
  throw ConfigError("unknown insert position '" + std::string(name) + "'");
}

std::string_view placement_name(Placement p) {
  return p == Placement::kAppend ? "append" : "prepend";
}

Placement parse_placement(std::string_view name) {
  if (name == "append") return Placement::kAppend;
  if (name == "prepend") return Placement::kPrepend;
  throw ConfigError("unknown placement '" + std::string(name) + "'");
}

std::string_view stealth_name(StealthPolicy p) {
  return p == StealthPolicy::kError ? "error" : "warn";
}

StealthPolicy parse_stealth(std::string_view name) {
  if (name == "error") return StealthPolicy::kError;
  if (name == "warn") return StealthPolicy::kWarn;
  throw ConfigError("unknown stealth policy '" + std::string(name) + "'");
}

void check_keys(const json& j, std::string_view section,
                std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) {
    throw ConfigError(std::string(section) + ": expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(std::string(section) + ": unknown key '" + key + "'");
    }
  }
}

json generator_json(const GeneratorConfig& g) {
  return json{{"num_classes", g.num_classes},
              {"signal_tokens_per_class", g.signal_tokens_per_class},
              {"filler_vocab_size", g.filler_vocab_size},
              {"signal_prob", g.signal_prob},
              {"markov_stick_prob", g.markov_stick_prob},
              {"min_length", g.min_length},
              {"max_length", g.max_length},
              {"examples_per_class", g.examples_per_class}};
}

GeneratorConfig generator_from_json(const json& j) {
  check_keys(j, "generator",
             {"num_classes", "signal_tokens_per_class", "filler_vocab_size",
              "signal_prob", "markov_stick_prob", "min_length", "max_length",
              "examples_per_class"});
  GeneratorConfig g;
  g.num_classes = j.value("num_classes", g.num_classes);
  g.signal_tokens_per_class =
      j.value("signal_tokens_per_class", g.signal_tokens_per_class);
  g.filler_vocab_size = j.value("filler_vocab_size", g.filler_vocab_size);
  g.signal_prob = j.value("signal_prob", g.signal_prob);
  g.markov_stick_prob = j.value("markov_stick_prob", g.markov_stick_prob);
  g.min_length = j.value("min_length", g.min_length);
  g.max_length = j.value("max_length", g.max_length);
  g.examples_per_class = j.value("examples_per_class", g.examples_per_class);
  return g;
}

json train_json(const TrainConfig& t) {
  return json{{"epochs", t.epochs},
              {"learning_rate", t.learning_rate},
              {"batch_size", t.batch_size},
              {"weight_decay", t.weight_decay},
              {"hidden", t.hidden},
              {"init_scale", t.init_scale}};
}

TrainConfig train_from_json(const json& j) {
  check_keys(j, "train",
             {"epochs", "learning_rate", "batch_size", "weight_decay", "hidden",
              "init_scale"});
  TrainConfig t;
  t.epochs = j.value("epochs", t.epochs);
  t.learning_rate = j.value("learning_rate", t.learning_rate);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.weight_decay = j.value("weight_decay", t.weight_decay);
  t.hidden = j.value("hidden", t.hidden);
  t.init_scale = j.value("init_scale", t.init_scale);
  return t;
}

json trigger_json(const TriggerSpec& t) {
  return json{{"kind", std::string(trigger_kind_name(t.kind))},
              {"token", t.token},
              {"position", std::string(position_name(t.position))},
              {"sentence", t.sentence},
              {"placement", std::string(placement_name(t.placement))},
              {"swap", t.swap},
              {"stealth", std::string(stealth_name(t.stealth))}};
}

TriggerSpec trigger_from_json(const json& j) {
  check_keys(j, "trigger",
             {"kind", "token", "position", "sentence", "placement", "swap",
              "stealth"});
  TriggerSpec t;
  t.kind = parse_trigger_kind(j.value("kind", std::string("rare_token")));
  t.token = j.value("token", t.token);
  t.position = parse_position(j.value("position", std::string("uniform")));
  if (j.contains("sentence")) {
    const json& s = j["sentence"];
    t.sentence = s.is_string() ? tokenize(s.get<std::string>())
                               : s.get<std::vector<std::string>>();
  }
  t.placement = parse_placement(j.value("placement", std::string("append")));
  if (j.contains("swap")) {
    t.swap = j["swap"].get<std::map<std::string, std::string>>();
  }
  t.stealth = parse_stealth(j.value("stealth", std::string("error")));
  return t;
}

json defense_json(const DefenseSettings& d) {
  json j{{"kind", std::string(defense_kind_name(d.kind))}};
  if (d.kind == DefenseKind::kTriggerBreaker) {
    j["lambda"] = d.lambda;
    j["shuffle_prob"] = d.shuffle_prob;
  } else if (d.kind == DefenseKind::kOnion) {
    j["threshold"] = d.onion_threshold;
    j["max_removals"] = d.onion_max_removals;
  }
  return j;
}

DefenseSettings defense_from_json(const json& j) {
  check_keys(j, "defense",
             {"kind", "lambda", "shuffle_prob", "threshold", "max_removals"});
  DefenseSettings d;
  d.kind = parse_defense_kind(j.value("kind", std::string("none")));
  d.lambda = j.value("lambda", d.lambda);
  d.shuffle_prob = j.value("shuffle_prob", d.shuffle_prob);
  d.onion_threshold = j.value("threshold", d.onion_threshold);
  d.onion_max_removals = j.value("max_removals", d.onion_max_removals);
  return d;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing run artifact " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

std::string format_lambda(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", lambda);
  return buf;
}

fs::path staging_path(const fs::path& target) {
  fs::path parent = target.parent_path();
  return parent / ("." + target.filename().string() + ".partial");
}

// Builds a directory under a temporary name and moves it into place on
// success; removes it on failure.
template <typename Fn>
auto build_directory(const fs::path& target, Fn&& fn) {
  if (target.empty() || target.filename().empty()) {
    throw ConfigError("output_dir must name a directory");
  }
  const fs::path staging = staging_path(target);
  fs::remove_all(staging);
  fs::create_directories(staging);
  try {
    auto result = fn(staging);
    fs::remove_all(target);
    fs::rename(staging, target);
    return result;
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw;
  }
}

bool row_less(const SeedResult& a, const SeedResult& b) {
  const ReportMetadata& x = a.report.metadata;
  const ReportMetadata& y = b.report.metadata;
  return std::tie(x.trigger, x.defense, x.seed) <
         std::tie(y.trigger, y.defense, y.seed);
}

double flagged_fraction(const NGramLM& lm, const Dataset& data, double threshold) {
  size_t flagged = 0;
  for (const LabeledExample& ex : data.examples) {
    if (ood_flag(lm, ex.tokens, threshold)) ++flagged;
  }
  return static_cast<double>(flagged) / static_cast<double>(data.size());
}

}  // namespace

std::string_view defense_kind_name(DefenseKind kind) {
  switch (kind) {
    case DefenseKind::kNone: return "none";
    case DefenseKind::kTriggerBreaker: return "trigger_breaker";
    case DefenseKind::kOnion: return "onion";
  }
  return "none";
}

DefenseKind parse_defense_kind(std::string_view name) {
  if (name == "none") return DefenseKind::kNone;
  if (name == "trigger_breaker") return DefenseKind::kTriggerBreaker;
  if (name == "onion") return DefenseKind::kOnion;
  throw ConfigError("unknown defense '" + std::string(name) + "'");
}

ExperimentConfig config_from_json(const json& j) {
  try {
    check_keys(j, "config",
               {"generator", "test_examples_per_class", "data", "features",
                "train", "trigger", "poison", "defense", "lm", "seeds",
                "output_dir"});
    ExperimentConfig cfg;
    if (j.contains("generator")) cfg.generator = generator_from_json(j["generator"]);
    cfg.test_examples_per_class =
        j.value("test_examples_per_class", cfg.test_examples_per_class);
    if (j.contains("data") && !j["data"].is_null()) {
      check_keys(j["data"], "data", {"train", "test"});
      cfg.data = DataPaths{j["data"].at("train").get<std::string>(),
                           j["data"].at("test").get<std::string>()};
    }
    if (j.contains("features")) {
      check_keys(j["features"], "features", {"mode", "l2_normalize"});
      cfg.features = feature_spec_from_json(j["features"]);
    }
    if (j.contains("train")) cfg.train = train_from_json(j["train"]);
    if (j.contains("trigger")) cfg.trigger = trigger_from_json(j["trigger"]);
    if (j.contains("poison")) {
      check_keys(j["poison"], "poison",
                 {"poison_rate", "target_label", "exclude_target"});
      const json& p = j["poison"];
      cfg.poison.poison_rate = p.value("poison_rate", cfg.poison.poison_rate);
      cfg.poison.target_label = p.value("target_label", cfg.poison.target_label);
      cfg.poison.exclude_target =
          p.value("exclude_target", cfg.poison.exclude_target);
    }
    cfg.trigger.target_label = cfg.poison.target_label;
    if (j.contains("defense")) cfg.defense = defense_from_json(j["defense"]);
    if (j.contains("lm")) {
      check_keys(j["lm"], "lm", {"smoothing"});
      cfg.lm_smoothing = j["lm"].value("smoothing", cfg.lm_smoothing);
    }
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<uint64_t>>();
    if (j.contains("output_dir")) {
      cfg.output_dir = j["output_dir"].get<std::string>();
    }
    validate(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

json to_json(const ExperimentConfig& cfg) {
  json j{{"generator", generator_json(cfg.generator)},
         {"test_examples_per_class", cfg.test_examples_per_class},
         {"features", to_json(cfg.features)},
         {"train", train_json(cfg.train)},
         {"trigger", trigger_json(cfg.trigger)},
         {"poison", {{"poison_rate", cfg.poison.poison_rate},
                     {"target_label", cfg.poison.target_label},
                     {"exclude_target", cfg.poison.exclude_target}}},
         {"defense", defense_json(cfg.defense)},
         {"lm", {{"smoothing", cfg.lm_smoothing}}},
         {"seeds", cfg.seeds},
         {"output_dir", cfg.output_dir.string()}};
  if (cfg.data) {
    j["data"] = {{"train", cfg.data->train.string()},
                 {"test", cfg.data->test.string()}};
  }
  return j;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void validate(const ExperimentConfig& cfg) {
  validate(cfg.generator);
  validate(cfg.poison);
  if (cfg.test_examples_per_class < 1) {
    throw ConfigError("test_examples_per_class must be >= 1");
  }
  if (cfg.poison.target_label >= cfg.generator.num_classes) {
    throw ConfigError("target_label out of range for num_classes");
  }
  if (cfg.trigger.target_label != cfg.poison.target_label) {
    throw ConfigError("trigger and poison target labels differ");
  }
  if (!(cfg.lm_smoothing > 0.0)) throw ConfigError("lm smoothing must be > 0");
  if (cfg.seeds.empty()) throw ConfigError("seeds must be nonempty");
  if (std::set<uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() !=
      cfg.seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }
  if (cfg.output_dir.empty()) throw ConfigError("output_dir must be set");
  const DefenseSettings& d = cfg.defense;
  TrainConfig train = cfg.train;
  if (d.kind == DefenseKind::kTriggerBreaker) {
    TriggerBreakerConfig tb;
    tb.mixup.lambda = d.lambda;
    tb.shuffle.apply_prob = d.shuffle_prob;
    validate(tb.mixup);
    validate(tb.shuffle);
    train.defense = tb;
  }
  validate(train);
  if (d.kind == DefenseKind::kOnion) {
    if (!(d.onion_threshold > 0.0)) throw ConfigError("onion: threshold must be > 0");
    if (d.onion_max_removals < 0) {
      throw ConfigError("onion: max_removals must be >= 0");
    }
  }
  if (cfg.trigger.kind == TriggerKind::kFixedSentence && cfg.trigger.sentence.empty()) {
    throw ConfigError("fixed_sentence: empty sentence");
  }
  if (cfg.trigger.kind == TriggerKind::kRareToken && cfg.trigger.token.empty()) {
    throw ConfigError("rare_token: empty token");
  }
}

void apply_seed_override(ExperimentConfig& cfg) {
  const char* value = std::getenv("TRIGGERBENCH_SEED_OVERRIDE");
  if (value == nullptr) return;
  const std::string_view text(value);
  uint64_t seed = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError("TRIGGERBENCH_SEED_OVERRIDE is not an unsigned integer");
  }
  cfg.seeds = {seed};
}

RunSeeds run_seeds(uint64_t seed) {
  return RunSeeds{derive_seed(seed, 10), derive_seed(seed, 11),
                  derive_seed(seed, 12), derive_seed(seed, 13),
                  derive_seed(seed, 14), derive_seed(seed, 15),
                  derive_seed(seed, 16)};
}

std::string defense_label(const DefenseSettings& defense) {
  if (defense.kind != DefenseKind::kTriggerBreaker) {
    return std::string(defense_kind_name(defense.kind));
  }
  const bool mix = defense.lambda > 0.0;
  const bool shuffle = defense.shuffle_prob > 0.0;
  if (mix && !shuffle) return "mixup";
  if (shuffle && !mix) return "shuffle";
  return "trigger_breaker";
}

RunData make_run_data(const ExperimentConfig& cfg, uint64_t seed) {
  const RunSeeds seeds = run_seeds(seed);
  RunData data;
  if (cfg.data) {
    const int c = cfg.generator.num_classes;
    data.train = load_dataset(cfg.data->train, c, DatasetTag::kTrain);
    data.test = load_dataset(cfg.data->test, c, DatasetTag::kTest);
    return data;
  }
  GeneratorConfig g = cfg.generator;
  g.seed = seeds.train_data;
  data.train = generate_synthetic(g);
  g.seed = seeds.test_data;
  g.examples_per_class = cfg.test_examples_per_class;
  data.test = generate_synthetic(g);
  data.test.tag = DatasetTag::kTest;
  const int64_t offset = static_cast<int64_t>(data.train.size());
  for (LabeledExample& ex : data.test.examples) ex.id += offset;
  return data;
}

SeedResult run_seed(const ExperimentConfig& cfg, uint64_t seed,
                    const std::optional<fs::path>& seed_dir) {
  const RunSeeds seeds = run_seeds(seed);
  RunData data = make_run_data(cfg, seed);

  TriggerSpec trigger = cfg.trigger;
  trigger.seed = seeds.trigger;
  PoisonConfig poison = cfg.poison;
  poison.seed = seeds.poison;

  const Vocab clean_vocab = build_vocab(data.train);
  PoisonedTrainset poisoned = poison_trainset(data.train, trigger, poison);
  const Vocab poison_vocab = build_vocab(poisoned.data);
  Dataset poisoned_test =
      poison_testset(data.test, trigger, poison.exclude_target, &clean_vocab);

  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = seeds.model;
  if (cfg.defense.kind == DefenseKind::kTriggerBreaker) {
    TriggerBreakerConfig tb;
    tb.mixup.lambda = cfg.defense.lambda;
    tb.mixup.seed = seeds.mixup;
    tb.shuffle.apply_prob = cfg.defense.shuffle_prob;
    tb.shuffle.seed = seeds.shuffle;
    train_cfg.defense = tb;
  }
  TrainResult clean_run = train(data.train, clean_vocab, cfg.features, train_cfg);
  TrainResult poison_run =
      train(poisoned.data, poison_vocab, cfg.features, train_cfg);

  const NGramLM lm = lm_train(data.train, cfg.lm_smoothing);
  const double threshold = ood_threshold(lm, data.test);
  const OodProbe probe{&lm, threshold};

  ReportMetadata meta;
  meta.trigger = std::string(trigger_kind_name(trigger.kind));
  meta.defense = defense_label(cfg.defense);
  meta.encoder = "mlp-" + std::string(feature_mode_name(cfg.features.mode));
  meta.seed = seed;
  meta.exclude_target = poison.exclude_target;

  SeedResult result;
  if (cfg.defense.kind == DefenseKind::kOnion) {
    OnionConfig onion;
    onion.lm = &lm;
    onion.threshold = cfg.defense.onion_threshold;
    onion.max_removals = cfg.defense.onion_max_removals;
    const Dataset sanitized_poisoned = onion_sanitize(poisoned_test, onion);
    const Dataset sanitized_clean = onion_sanitize(data.test, onion);
    result.report = build_report(clean_run.model, poison_run.model,
                                 sanitized_poisoned, sanitized_clean,
                                 poison.target_label, probe, meta);
    // The OOD rate describes the attack inputs themselves, before filtering.
    result.report.ood_rate = flagged_fraction(lm, poisoned_test, threshold);
  } else {
    result.report = build_report(clean_run.model, poison_run.model, poisoned_test,
                                 data.test, poison.target_label, probe, meta);
  }
  result.csv_row = csv_row(result.report);

  if (seed_dir) {
    fs::create_directories(*seed_dir);
    write_text(*seed_dir / "report.json", report_json(result.report).dump(2) + "\n");
    write_text(*seed_dir / "f_c.json", checkpoint_json(clean_run.model).dump() + "\n");
    write_text(*seed_dir / "f_p.json", checkpoint_json(poison_run.model).dump() + "\n");
    write_text(*seed_dir / "aum.json", poison_run.aum.to_json().dump() + "\n");
    write_text(*seed_dir / "lm.json", lm.to_json().dump() + "\n");
    save_dataset(*seed_dir / "train_poisoned.jsonl", poisoned.data);
    save_dataset(*seed_dir / "test.jsonl", data.test);
    save_dataset(*seed_dir / "poisoned_test.jsonl", poisoned_test);
  }
  return result;
}

std::vector<SeedResult> cmd_run(const ExperimentConfig& cfg,
                                const RunOptions& options) {
  validate(cfg);
  return build_directory(cfg.output_dir, [&](const fs::path& dir) {
    write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
    const size_t n = cfg.seeds.size();
    std::vector<SeedResult> results(n);
    auto one = [&](size_t i) {
      const fs::path seed_dir = dir / ("seed_" + std::to_string(cfg.seeds[i]));
      results[i] = run_seed(cfg, cfg.seeds[i], seed_dir);
    };
    if (options.parallel && n > 1) {
      std::vector<std::exception_ptr> errors(n);
      std::vector<std::thread> workers;
      workers.reserve(n);
      for (size_t i = 0; i < n; ++i) {
        workers.emplace_back([&, i] {
          try {
            one(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
      }
      for (std::thread& w : workers) w.join();
      for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    } else {
      for (size_t i = 0; i < n; ++i) one(i);
    }
    std::sort(results.begin(), results.end(), row_less);
    std::string csv = csv_header() + "\n";
    for (const SeedResult& r : results) csv += r.csv_row + "\n";
    write_text(dir / "report.csv", csv);
    return results;
  });
}

std::string cmd_ablate_mixup(const ExperimentConfig& cfg,
                             std::vector<double> lambdas,
                             const RunOptions& options) {
  if (lambdas.empty()) throw ConfigError("ablate-mixup: no lambdas given");
  for (double lambda : lambdas) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw ConfigError("ablate-mixup: lambda " + format_lambda(lambda) +
                        " outside [0, 1]");
    }
  }
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  ExperimentConfig base = cfg;
  if (base.defense.kind != DefenseKind::kTriggerBreaker) {
    base.defense = DefenseSettings{};
    base.defense.kind = DefenseKind::kTriggerBreaker;
  }
  for (double lambda : lambdas) {
    ExperimentConfig probe = base;
    probe.defense.lambda = lambda;
    validate(probe);
  }
  return build_directory(cfg.output_dir, [&](const fs::path& dir) {
    std::string csv = "lambda," + csv_header() + "\n";
    for (double lambda : lambdas) {
      ExperimentConfig run = base;
      run.defense.lambda = lambda;
      run.output_dir = dir / ("lambda_" + format_lambda(lambda));
      for (const SeedResult& r : cmd_run(run, options)) {
        csv += format_lambda(lambda) + "," + r.csv_row + "\n";
      }
    }
    write_text(dir / "ablate_mixup.csv", csv);
    return csv;
  });
}

std::vector<SeedDiagnostics> cmd_diagnose(const fs::path& rundir, int top_k) {
  if (top_k < 1) throw ConfigError("diagnose: top_k must be >= 1");
  const ExperimentConfig cfg = config_from_json(read_json_file(rundir / "config.json"));
  const int classes = cfg.generator.num_classes;
  std::vector<SeedDiagnostics> out;
  json report = json::array();
  for (uint64_t seed : cfg.seeds) {
    const fs::path dir = rundir / ("seed_" + std::to_string(seed));
    const NGramLM lm = NGramLM::from_json(read_json_file(dir / "lm.json"));
    const AumLedger ledger = AumLedger::from_json(read_json_file(dir / "aum.json"));
    const Dataset train =
        load_dataset(dir / "train_poisoned.jsonl", classes, DatasetTag::kTrain);
    const Dataset test = load_dataset(dir / "test.jsonl", classes, DatasetTag::kTest);
    const Dataset poisoned_test = load_dataset(dir / "poisoned_test.jsonl", classes,
                                               DatasetTag::kPoisonedTest);
    if (ledger.ids.size() != train.size()) {
      throw ValidationError("aum ledger does not match the training set in " +
                            dir.string());
    }

    SeedDiagnostics d;
    d.seed = seed;
    d.ood_threshold = ood_threshold(lm, test);
    d.ood_rate_clean = flagged_fraction(lm, test, d.ood_threshold);
    d.ood_rate_poisoned = flagged_fraction(lm, poisoned_test, d.ood_threshold);

    std::vector<double> reversed_ppl;
    std::vector<double> clean_ppl;
    for (const LabeledExample& ex : test.examples) {
      clean_ppl.push_back(perplexity(lm, ex.tokens));
      std::vector<std::string> rev(ex.tokens.rbegin(), ex.tokens.rend());
      reversed_ppl.push_back(perplexity(lm, rev));
    }
    d.ppl_auroc_reversed = auroc(reversed_ppl, clean_ppl);

    std::vector<double> poisoned_scores;
    std::vector<double> clean_scores;
    for (size_t i = 0; i < train.size(); ++i) {
      if (train.examples[i].id != ledger.ids[i]) {
        throw ValidationError("aum ledger ids out of order in " + dir.string());
      }
      const double score = -ledger.aum(i);
      (train.examples[i].origin == Origin::kPoisoned ? poisoned_scores
                                                      : clean_scores)
          .push_back(score);
    }
    d.aum_auroc = (poisoned_scores.empty() || clean_scores.empty())
                      ? 0.5
                      : auroc(poisoned_scores, clean_scores);
    std::unordered_map<int64_t, size_t> index_of;
    for (size_t i = 0; i < train.size(); ++i) index_of[train.examples[i].id] = i;
    const std::vector<int64_t> ranked = aum_rank(ledger);
    const size_t k = std::min(ranked.size(), static_cast<size_t>(top_k));
    size_t hits = 0;
    for (size_t q = 0; q < k; ++q) {
      d.suspects.push_back(ranked[q]);
      if (train.examples[index_of.at(ranked[q])].origin == Origin::kPoisoned) ++hits;
    }
    d.suspect_precision = k == 0 ? 0.0 : static_cast<double>(hits) / k;

    report.push_back({{"seed", d.seed},
                      {"ood_threshold", d.ood_threshold},
                      {"ood_rate_clean", d.ood_rate_clean},
                      {"ood_rate_poisoned", d.ood_rate_poisoned},
                      {"ppl_auroc_reversed", d.ppl_auroc_reversed},
                      {"aum_auroc", d.aum_auroc},
                      {"top_k", k},
                      {"suspects", d.suspects},
                      {"suspect_precision", d.suspect_precision}});
    out.push_back(std::move(d));
  }
  write_text(rundir / "diagnostics.json", report.dump(2) + "\n");
  return out;
}

Dataset cmd_gen_data(const ExperimentConfig& cfg) {
  validate(cfg);
  return make_run_data(cfg, cfg.seeds.front()).train;
}

}  // namespace triggerbench
