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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fieldswap/corpus_gen.hpp"
#include "fieldswap/doc_model.hpp"
#include "fieldswap/trainer.hpp"

namespace fieldswap {

/// Maximum F1 over thresholds at every distinct score; a candidate is
/// predicted positive iff its score >= threshold. `missed_positives` are
/// ground-truth values no candidate covers (always false negatives).
/// Requires at least one positive.
double max_f1(std::span<const double> scores, std::span<const int> labels, int missed_positives = 0);

/// Arithmetic mean; throws std::invalid_argument on an empty set.
double macro_f1(std::span<const double> per_field);

struct EvalResult {
  std::map<std::string, std::optional<double>> per_field;  ///< nullopt: no positives, excluded
  double macro = 0.0;
};

/// Scores every test candidate with every same-type head and computes
/// per-field max-F1 plus the macro average.
EvalResult evaluate(const Ensemble& ensemble, std::span<const Document> test, const FieldSchema& schema);

enum class Method { kBaseline, kFieldToField, kTypeToType, kAllToAll, kHuman, kNoDownweight, kNoFinetune };
std::string_view to_string(Method m);
Method parse_method(std::string_view s);

struct LearningCurveOptions {
  CorpusSpec spec;
  std::vector<int> sizes = {10, 25, 50, 100, 250};
  std::vector<Method> methods = {Method::kBaseline, Method::kTypeToType};
  int pool_size = 250;
  int test_size = 200;
  int collections = 3;
  int split_seeds = 3;
  int init_seeds = 3;
  int ensemble_size = 3;
  int jobs = 1;
  TrainConfig train;
  InferOptions infer;
  /// Out-of-domain pretraining; ignored when `pretrained` is set.
  CorpusSpec pretrain_spec;
  int pretrain_docs = 300;
  std::optional<ModelParams> pretrained;
};

struct CellResult {
  int size = 0;
  Method method = Method::kBaseline;
  int collection = 0;
  int split_seed = 0;
  int init_seed = 0;
  EvalResult eval;
  int synthetic_examples = 0;  ///< summed over ensemble members
};

struct ExperimentReport {
  std::string domain;
  std::vector<int> sizes;
  std::vector<Method> methods;
  std::vector<CellResult> cells;
  /// Median macro-F1 per (size, method).
  std::map<std::pair<int, Method>, double> medians;

  std::string to_json() const;
  std::string to_text() const;
};

double median(std::vector<double> v);

/// Document indices of collection `c` of `size` documents drawn from a pool;
/// collections are disjoint while the pool allows it.
std::vector<int> sample_collection(int pool_size, int size, int c, int collections, std::uint64_t seed);

ExperimentReport learning_curve(const LearningCurveOptions& opts);

}  // namespace fieldswap
