// Copyright 2026 The FieldSwap Authors
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

// fieldswap: command-line driver for corpus generation, pretraining, phrase
// inference, augmentation, training, evaluation and learning curves.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "fieldswap/candidates.hpp"
#include "fieldswap/corpus_gen.hpp"
#include "fieldswap/doc_model.hpp"
#include "fieldswap/eval.hpp"
#include "fieldswap/importance.hpp"
#include "fieldswap/keyphrase.hpp"
#include "fieldswap/scorer.hpp"
#include "fieldswap/swap.hpp"
#include "fieldswap/trainer.hpp"

namespace fs = fieldswap;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

// Thrown for semantically invalid flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

fs::CorpusSpec resolve_spec(const std::string& name_or_path) {
  auto specs = fs::builtin_specs();
  if (auto it = specs.find(name_or_path); it != specs.end()) return it->second;
  if (!std::filesystem::exists(name_or_path)) {
    throw fs::DataError("'" + name_or_path + "' is neither a builtin spec nor a readable spec file");
  }
  return fs::read_spec_file(name_or_path);
}

struct Corpus {
  fs::FieldSchema schema;
  std::vector<fs::Document> docs;
};

// Loads a corpus and its schema (sidecar unless overridden) and validates
// every document against the schema.
Corpus load_corpus(const std::string& path, const std::string& schema_path) {
  Corpus c;
  const std::string sp = schema_path.empty() ? fs::schema_sidecar_path(path) : schema_path;
  c.docs = fs::read_corpus_file(path);
  c.schema = fs::read_schema_file(sp);
  for (const fs::Document& d : c.docs) {
    const auto violations = fs::validate_document(d, c.schema);
    if (!violations.empty()) {
      throw fs::DataError(path + ": document '" + d.doc_id + "' violates schema " + sp + ": " + violations.front());
    }
  }
  return c;
}

void check_heads(const fs::ModelParams& params, const fs::FieldSchema& schema, const std::string& what) {
  for (const fs::FieldSpec& f : schema.fields()) {
    if (params.field_index(f.name) < 0) {
      throw fs::DataError(what + " has no head for field '" + f.name + "' of the corpus schema");
    }
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("invalid integer '" + item + "' in list '" + s + "'");
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<std::string> parse_word_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

// Training knobs shared by pretrain, train and learning-curve.
struct TrainFlags {
  fs::TrainConfig config;
  std::string optimizer = "adam";

  void add(CLI::App* app) {
    app->add_option("--lr", config.learning_rate, "learning rate")->capture_default_str();
    app->add_option("--batch-size", config.batch_size, "candidate examples per minibatch")->capture_default_str();
    app->add_option("--dropout", config.dropout, "dropout on the pooled encoding")->capture_default_str();
    app->add_option("--downweight", config.downweight, "loss weight of synthetic examples")->capture_default_str();
    app->add_option("--stage1-epochs", config.stage1_epochs)->capture_default_str();
    app->add_option("--stage2-epochs", config.stage2_epochs)->capture_default_str();
    app->add_option("--patience", config.patience, "early-stopping patience in epochs")->capture_default_str();
    app->add_option("--train-fraction", config.train_fraction)->capture_default_str();
    app->add_option("--optimizer", optimizer, "adam or sgd")->capture_default_str();
  }

  fs::TrainConfig resolve() const {
    fs::TrainConfig c = config;
    try {
      c.optimizer = fs::parse_optimizer(optimizer);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (const auto errs = c.validate(); !errs.empty()) throw UsageError(errs.front());
    return c;
  }
};

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct GenCorpus {
  std::string spec;
  int count = 0;
  std::optional<std::uint64_t> seed;
  std::string out;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("gen-corpus", "Generate a synthetic corpus");
    app->add_option("--spec", spec, "builtin spec name or spec file")->required();
    app->add_option("--count", count, "number of documents")->required()->check(CLI::NonNegativeNumber);
    app->add_option("--seed", seed, "override the spec seed");
    app->add_option("--out", out, "corpus output path (JSONL)")->required();
    app->callback([this] { run(); });
  }

  void run() {
    fs::CorpusSpec s = resolve_spec(spec);
    if (seed) s.seed = *seed;
    const auto docs = fs::generate_corpus(s, count);
    std::ostringstream buf;
    fs::write_corpus(buf, docs);
    write_text(out, buf.str());
    fs::write_schema_file(fs::schema_sidecar_path(out), s.schema);
    std::cout << "wrote " << docs.size() << " documents to " << out << "\n";
  }
};

struct Pretrain {
  std::string corpus, schema, out, log;
  std::uint64_t seed = 0;
  TrainFlags flags;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("pretrain", "Train the out-of-domain model used for transfer and importance");
    app->add_option("--corpus", corpus)->required();
    app->add_option("--schema", schema, "schema file (default: corpus sidecar)");
    app->add_option("--out", out, "checkpoint path")->required();
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--log", log, "training log (JSONL)");
    flags.add(app);
    app->callback([this] { run(); });
  }

  void run() {
    const Corpus c = load_corpus(corpus, schema);
    if (c.docs.size() < 2) throw fs::DataError(corpus + ": pretraining needs at least 2 documents");
    fs::TrainConfig config = flags.resolve();
    config.seed = seed;
    const fs::TrainResult r = fs::pretrain(c.docs, c.schema, config);
    fs::save_params(out, r.params);
    if (!log.empty()) write_text(log, fs::log_to_jsonl(std::vector<std::vector<fs::LogRecord>>{r.log}));
    std::printf("pretrained on %zu documents, best validation AUC-ROC %.4f\n", c.docs.size(), r.best_val_auc);
  }
};

struct InferPhrases {
  std::string corpus, schema, ckpt, out, debug;
  fs::InferOptions opts;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("infer-phrases", "Infer ranked key phrases per field");
    app->add_option("--corpus", corpus)->required();
    app->add_option("--schema", schema, "schema file (default: corpus sidecar)");
    app->add_option("--ckpt", ckpt, "importance model checkpoint")->required();
    app->add_option("--k", opts.k, "phrases kept per field")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--theta", opts.theta, "importance threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    app->add_option("--out", out, "key-phrase config output")->required();
    app->add_option("--debug-dump", debug, "per-candidate importance records (JSONL)");
    app->callback([this] { run(); });
  }

  void run() {
    const Corpus c = load_corpus(corpus, schema);
    const fs::ModelParams params = fs::load_params(ckpt);
    const fs::KeyPhraseConfig config = fs::infer_config(c.docs, c.schema, params, opts);
    write_text(out, fs::config_to_json(config) + "\n");
    if (!debug.empty()) {
      std::string lines;
      for (const fs::Document& d : c.docs) {
        std::vector<bool> in_value(d.tokens.size(), false);
        for (const fs::FieldSpan& s : d.annotations) {
          for (int t = s.range.start; t < s.range.end; ++t) in_value[t] = true;
        }
        for (const fs::Candidate& cand : fs::build_candidates(d, c.schema)) {
          if (!cand.label_for || cand.real_neighbor_count() == 0) continue;
          const fs::NeighborImportance imp = fs::neighbor_importance(cand, params);
          lines += fs::importance_debug_line(cand, imp, fs::phrases_from_importance(cand, imp, &in_value)) + "\n";
        }
      }
      write_text(debug, lines);
    }
    for (const auto& [field, phrases] : config.phrases) {
      std::cout << field << ":";
      if (phrases.empty()) std::cout << " (none)";
      for (const fs::RankedPhrase& p : phrases) std::printf(" \"%s\" %.4f;", p.text.c_str(), p.importance);
      std::cout << "\n";
    }
  }
};

struct Augment {
  std::string corpus, schema, config_path, strategy = "t2t", report, ckpt, human, out;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("augment", "Generate synthetic examples and report swap statistics");
    app->add_option("--corpus", corpus)->required();
    app->add_option("--schema", schema, "schema file (default: corpus sidecar)");
    app->add_option("--config", config_path, "key-phrase config")->required();
    app->add_option("--strategy", strategy, "f2f, t2t or a2a")->capture_default_str();
    app->add_option("--report", report, "augmentation report output")->required();
    app->add_option("--ckpt", ckpt, "importance model for overflow slots (default: distance order)");
    app->add_option("--human", human, "human expert config merged into --config");
    app->add_option("--out", out, "synthetic examples output (JSONL)");
    app->callback([this] { run(); });
  }

  void run() {
    const Corpus c = load_corpus(corpus, schema);
    fs::AugmentOptions opts;
    opts.enabled = true;
    opts.strategy = parse_strategy_flag(strategy);
    opts.config = fs::read_config_file(config_path, c.schema);
    if (!human.empty()) opts.human = fs::load_human_config(human, c.schema);
    std::optional<fs::ModelParams> model;
    if (!ckpt.empty()) {
      model = fs::load_params(ckpt);
      opts.importance_model = &*model;
    }
    const auto cands = fs::build_all_candidates(c.docs, c.schema);
    fs::AugmentReport rep;
    const auto examples = fs::augment_split(c.docs, cands, c.schema, opts, &rep);
    write_text(report, rep.to_json() + "\n");
    if (!out.empty()) {
      std::string lines;
      for (const auto& ex : examples) lines += fs::synthetic_to_json_line(ex) + "\n";
      write_text(out, lines);
    }
    const fs::PairStats t = rep.totals();
    std::printf("emitted %d synthetic examples (no_match %d, unchanged %d, insufficient_slots %d)\n", t.emitted,
                t.no_match, t.unchanged, t.insufficient_slots);
  }

  static fs::Strategy parse_strategy_flag(const std::string& s) {
    try {
      return fs::parse_strategy(s);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
};

struct Train {
  std::string corpus, schema, config_path, strategy = "t2t", human, out, ckpt, log;
  bool no_downweight = false, no_finetune = false, baseline = false;
  int ensemble_size = 3;
  std::uint64_t split_seed = 0, init_seed = 0;
  fs::InferOptions infer;
  TrainFlags flags;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("train", "Train an ensemble with or without FieldSwap augmentation");
    app->add_option("--corpus", corpus)->required();
    app->add_option("--schema", schema, "schema file (default: corpus sidecar)");
    app->add_option("--config", config_path, "fixed key-phrase config (default: infer per member with --ckpt)");
    app->add_option("--strategy", strategy, "f2f, t2t or a2a")->capture_default_str();
    app->add_option("--human", human, "human expert config");
    app->add_flag("--no-downweight", no_downweight, "weight synthetic examples like originals");
    app->add_flag("--no-finetune", no_finetune, "skip the stage-2 fine-tune");
    app->add_flag("--baseline", baseline, "no augmentation");
    app->add_option("--ckpt", ckpt, "pretrained checkpoint for initialization and importance");
    app->add_option("--ensemble-size", ensemble_size)->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--split-seed", split_seed)->capture_default_str();
    app->add_option("--init-seed", init_seed)->capture_default_str();
    app->add_option("--k", infer.k)->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--theta", infer.theta)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    app->add_option("--out", out, "ensemble output directory")->required();
    app->add_option("--log", log, "training log (JSONL)");
    flags.add(app);
    app->callback([this] { run(); });
  }

  void run() {
    const Corpus c = load_corpus(corpus, schema);
    if (c.docs.size() < 2) throw fs::DataError(corpus + ": training needs at least 2 documents");
    fs::TrainConfig config = flags.resolve();
    config.disable_downweight = no_downweight;
    config.disable_finetune = no_finetune;

    std::optional<fs::ModelParams> pretrained;
    if (!ckpt.empty()) pretrained = fs::load_params(ckpt);

    fs::AugmentOptions aug;
    aug.enabled = !baseline;
    aug.strategy = Augment::parse_strategy_flag(strategy);
    aug.infer = infer;
    if (pretrained) aug.importance_model = &*pretrained;
    if (!config_path.empty()) aug.config = fs::read_config_file(config_path, c.schema);
    if (!human.empty()) aug.human = fs::load_human_config(human, c.schema);
    if (aug.enabled && !aug.config && !aug.importance_model) {
      throw UsageError("augmentation needs --config or --ckpt (use --baseline to train without it)");
    }

    const fs::EnsembleResult r = fs::train_ensemble(c.docs, c.schema, pretrained ? &*pretrained : nullptr, aug, config,
                                                    split_seed, init_seed, ensemble_size);
    fs::save_ensemble(out, r.ensemble);
    if (!log.empty()) write_text(log, fs::log_to_jsonl(r.logs));
    int emitted = 0;
    for (const auto& rep : r.reports) emitted += rep.totals().emitted;
    std::printf("trained %d members on %zu documents (%d synthetic examples)\n", ensemble_size, c.docs.size(), emitted);
  }
};

struct Eval {
  std::string ensemble, test, schema, out, text;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("eval", "Per-field max-F1 and macro-F1 of an ensemble on a test corpus");
    app->add_option("--ensemble", ensemble, "ensemble directory")->required();
    app->add_option("--test", test, "test corpus")->required();
    app->add_option("--schema", schema, "schema file (default: test corpus sidecar)");
    app->add_option("--out", out, "report output (JSON)")->required();
    app->add_option("--text", text, "plain-text report output");
    app->callback([this] { run(); });
  }

  void run() {
    const Corpus c = load_corpus(test, schema);
    const fs::Ensemble e = fs::load_ensemble(ensemble);
    check_heads(e.members.front(), c.schema, "ensemble '" + ensemble + "'");
    const fs::EvalResult r = fs::evaluate(e, c.docs, c.schema);

    nlohmann::json j;
    j["macro_f1"] = r.macro;
    j["per_field_f1"] = nlohmann::json::object();
    std::ostringstream t;
    for (const auto& [field, f1] : r.per_field) {
      j["per_field_f1"][field] = f1 ? nlohmann::json(*f1) : nlohmann::json(nullptr);
      char line[160];
      std::snprintf(line, sizeof(line), "%-28s %s\n", field.c_str(), f1 ? pct(*f1).c_str() : "excluded");
      t << line;
    }
    t << "macro-F1 " << pct(r.macro) << "\n";
    write_text(out, j.dump(2) + "\n");
    if (!text.empty()) write_text(text, t.str());
    std::cout << t.str();
  }

  static std::string pct(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%6.2f", 100.0 * v);
    return buf;
  }
};

struct LearningCurve {
  std::string domain, sizes = "10,25,50,100,250", methods = "baseline,t2t", out, text, pretrained, pretrain_spec = "synth-invoices-ood";
  fs::LearningCurveOptions opts;
  TrainFlags flags;

  void add(CLI::App& root) {
    CLI::App* app = root.add_subcommand("learning-curve", "Run the 27-cell grid per (size, method) and report medians");
    app->add_option("--domain", domain, "builtin spec name or spec file")->required();
    app->add_option("--sizes", sizes, "comma-separated train sizes")->capture_default_str();
    app->add_option("--methods", methods, "baseline,f2f,t2t,a2a,human,no_downweight,no_finetune")->capture_default_str();
    app->add_option("--out", out, "report output (JSON)")->required();
    app->add_option("--text", text, "plain-text table output");
    app->add_option("--jobs", opts.jobs, "grid cells run concurrently")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--pool-size", opts.pool_size)->capture_default_str();
    app->add_option("--test-size", opts.test_size)->capture_default_str();
    app->add_option("--collections", opts.collections)->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--split-seeds", opts.split_seeds)->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--init-seeds", opts.init_seeds)->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--ensemble-size", opts.ensemble_size)->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--k", opts.infer.k)->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--theta", opts.infer.theta)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    app->add_option("--pretrained", pretrained, "pretrained checkpoint (default: pretrain on --pretrain-spec)");
    app->add_option("--pretrain-spec", pretrain_spec)->capture_default_str();
    app->add_option("--pretrain-docs", opts.pretrain_docs)->capture_default_str();
    flags.add(app);
    app->callback([this] { run(); });
  }

  void run() {
    opts.spec = resolve_spec(domain);
    opts.sizes = parse_int_list(sizes);
    opts.methods.clear();
    for (const std::string& m : parse_word_list(methods)) {
      try {
        opts.methods.push_back(fs::parse_method(m));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    for (int s : opts.sizes) {
      if (s > opts.pool_size) {
        throw UsageError("train size " + std::to_string(s) + " exceeds --pool-size " + std::to_string(opts.pool_size));
      }
    }
    opts.train = flags.resolve();
    if (!pretrained.empty()) {
      opts.pretrained = fs::load_params(pretrained);
    } else {
      opts.pretrain_spec = resolve_spec(pretrain_spec);
    }
    const fs::ExperimentReport r = fs::learning_curve(opts);
    write_text(out, r.to_json() + "\n");
    if (!text.empty()) write_text(text, r.to_text());
    std::cout << r.to_text();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FieldSwap: key-phrase swap augmentation for form field extraction"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  GenCorpus gen;
  Pretrain pre;
  InferPhrases infer;
  Augment augment;
  Train train;
  Eval eval;
  LearningCurve curve;
  gen.add(app);
  pre.add(app);
  infer.add(app);
  augment.add(app);
  train.add(app);
  eval.add(app);
  curve.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
