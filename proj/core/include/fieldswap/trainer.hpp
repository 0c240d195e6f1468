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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fieldswap/doc_model.hpp"
#include "fieldswap/keyphrase.hpp"
#include "fieldswap/scorer.hpp"
#include "fieldswap/swap.hpp"

namespace fieldswap {

enum class Optimizer { kSgd, kAdam };

struct TrainConfig {
  double learning_rate = 0.01;
  double dropout = 0.1;
  // Small-corpus defaults; 128 / 0.001 barely moves in 25 epochs on ten
  // documents.
  int batch_size = 16;  ///< candidate examples per minibatch
  double downweight = 0.4;
  int stage1_epochs = 10;
  int stage2_epochs = 25;
  int patience = 3;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool disable_downweight = false;
  bool disable_finetune = false;
  Optimizer optimizer = Optimizer::kAdam;

  /// Empty when valid.
  std::vector<std::string> validate() const;
};

std::string_view to_string(Optimizer o);
Optimizer parse_optimizer(std::string_view s);

/// A candidate with its loss weight. The candidate is a positive for its
/// label_for field and a negative for every other field of its base type.
struct TrainingExample {
  const Candidate* candidate = nullptr;
  double weight = 1.0;
};

struct LogRecord {
  std::string stage;  ///< "stage1", "stage2" or "pretrain"
  int epoch = 0;      ///< 0 is the state the stage started from
  double train_loss = 0.0;
  double val_auc = 0.0;
};

struct TrainResult {
  ModelParams params;
  double best_val_auc = 0.0;
  std::vector<LogRecord> log;
};

/// Area under the ROC curve via the rank statistic, with tied scores
/// counted as half. Requires at least one positive and one negative.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

/// Pooled validation AUC-ROC over every (candidate, same-type field) pair.
/// Returns 0.5 when the pool lacks positives or negatives.
double validation_auc(std::span<const Candidate> val, const FieldSchema& schema, const ModelParams& params);

/// Runs one stage with early stopping and returns the best checkpoint by
/// validation AUC-ROC; the starting state is itself a contender.
TrainResult train_stage(std::string_view stage, std::span<const TrainingExample> examples,
                        std::span<const Candidate> val, const FieldSchema& schema, const ModelParams& init,
                        int max_epochs, const TrainConfig& config, std::uint64_t seed);

/// Stage 1 on originals plus augmented examples (skipped when there are no
/// augmented examples), then stage 2 on originals only unless fine-tuning is
/// disabled. With no augmented examples this is exactly the baseline
/// schedule, whatever the ablation flags say.
TrainResult train_two_stage(std::span<const Candidate> train, std::span<const Candidate> augmented,
                            std::span<const Candidate> val, const FieldSchema& schema, const ModelParams& init,
                            const TrainConfig& config);

/// Single-stage training on a corpus from random initialization; the result
/// initializes the encoder of downstream models and measures importance.
TrainResult pretrain(std::span<const Document> docs, const FieldSchema& schema, const TrainConfig& config,
                     ModelDims dims = {});

/// Splits documents into train/validation by a seeded shuffle. Both sides
/// get at least one document.
void split_documents(std::span<const Document> docs, double train_fraction, std::uint64_t seed,
                     std::vector<Document>& train, std::vector<Document>& val);

std::vector<Candidate> build_all_candidates(std::span<const Document> docs, const FieldSchema& schema);

/// How a member's training set is augmented.
struct AugmentOptions {
  bool enabled = false;
  Strategy strategy = Strategy::kTypeToType;
  InferOptions infer;
  /// Model used for phrase inference and overflow-slot importance.
  const ModelParams* importance_model = nullptr;
  std::optional<HumanConfig> human;
  /// Fixed config that skips phrase inference.
  std::optional<KeyPhraseConfig> config;
};

/// Synthetic examples for one training split (phrase inference runs on the
/// split's documents only).
std::vector<SyntheticExample> augment_split(std::span<const Document> train_docs,
                                            std::span<const Candidate> train_candidates, const FieldSchema& schema,
                                            const AugmentOptions& opts, AugmentReport* report = nullptr,
                                            KeyPhraseConfig* used_config = nullptr);

struct Ensemble {
  std::vector<ModelParams> members;

  /// Mean member probability for each head; 0 for a candidate without any
  /// real neighbor.
  std::vector<double> scores(const Candidate& cand, std::span<const int> heads) const;
  std::vector<std::string> fields() const;
};

struct EnsembleResult {
  Ensemble ensemble;
  std::vector<std::vector<LogRecord>> logs;  ///< per member
  std::vector<AugmentReport> reports;        ///< per member
};

/// Trains n members. Member i uses split seed mix_seed(split_seed, i) and
/// init seed mix_seed(init_seed, i), so runs that differ only in
/// augmentation see identical splits and initializations. `pretrained` may
/// be null for random initialization.
EnsembleResult train_ensemble(std::span<const Document> docs, const FieldSchema& schema, const ModelParams* pretrained,
                              const AugmentOptions& augment, const TrainConfig& config, std::uint64_t split_seed,
                              std::uint64_t init_seed, int n = 3);

/// Directory layout: manifest.json plus member_<i>.json checkpoints.
void save_ensemble(const std::string& dir, const Ensemble& ensemble);
Ensemble load_ensemble(const std::string& dir);

std::string log_to_jsonl(std::span<const std::vector<LogRecord>> logs);

}  // namespace fieldswap
