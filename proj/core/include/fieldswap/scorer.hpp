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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fieldswap/autodiff.hpp"
#include "fieldswap/doc_model.hpp"

namespace fieldswap {

struct ModelDims {
  int vocab = 2048;
  int d_text = 24;
  int d_pos = 8;
  int d_cand = 8;

  int d() const { return d_text + d_pos; }
  bool operator==(const ModelDims&) const = default;
};

/// Relative and absolute positions are multiplied by this before the affine
/// position encoders so that typical page-normalized offsets (0.01-0.3) land
/// in a useful range.
inline constexpr double kPositionScale = 10.0;

/// Candidate classifier parameters: a field-agnostic neighborhood encoder
/// (hashed token embedding, relative-position encoder, one self-attention
/// layer with residual, max-pooling) plus one affine binary head per field.
struct ModelParams {
  ModelDims dims;
  std::uint64_t seed = 0;
  std::vector<std::string> fields;  ///< head order

  ad::Matrix token_embedding;  ///< vocab x d_text
  ad::Matrix pos_w;            ///< 2 x d_pos
  ad::Matrix pos_b;            ///< 1 x d_pos
  ad::Matrix wq, wk, wv;       ///< d x d
  ad::Matrix cand_w;           ///< 2 x d_cand
  ad::Matrix cand_b;           ///< 1 x d_cand
  ad::Matrix head_w;           ///< fields x (d + d_cand)
  ad::Matrix head_b;           ///< 1 x fields

  int field_index(std::string_view name) const;

  /// Visits every tensor with a stable name, in a fixed order.
  void for_each_tensor(const std::function<void(std::string_view, ad::Matrix&)>& fn);
  void for_each_tensor(const std::function<void(std::string_view, const ad::Matrix&)>& fn) const;

  /// Same shapes, all zeros.
  ModelParams zeros_like() const;
  bool all_finite() const;
  bool operator==(const ModelParams&) const = default;
};

/// Random initialization with heads for every field of `schema`.
ModelParams init_params(const FieldSchema& schema, std::uint64_t seed, ModelDims dims = {});

/// Copies the encoder from `pretrained` and draws fresh heads for `schema`
/// from `seed`.
ModelParams transfer_params(const ModelParams& pretrained, const FieldSchema& schema, std::uint64_t seed);

/// Hashed-vocabulary bucket for a token's text (case-folded, punctuation
/// stripped, digits collapsed).
int token_bucket(std::string_view text, int vocab);

struct NeighborhoodEncoding {
  std::vector<double> pooled;                   ///< d
  std::vector<std::vector<double>> per_neighbor;  ///< one per non-PAD slot, post-attention
  std::vector<int> slots;                       ///< neighbor slot of each per_neighbor row
};

/// Throws std::invalid_argument when every neighbor is PAD.
NeighborhoodEncoding encode_neighborhood(const Candidate& cand, const ModelParams& params);

/// Probability that `cand` is an instance of `field`. Throws
/// std::invalid_argument if the field is unknown or its base type differs
/// from the candidate's.
double score(const Candidate& cand, std::string_view field, const ModelParams& params, const FieldSchema& schema);

/// Scores for several head indices at once, sharing one encoder pass.
std::vector<double> score_heads(const Candidate& cand, std::span<const int> heads, const ModelParams& params);

struct BatchEntry {
  const Candidate* candidate = nullptr;
  int field = 0;  ///< head index into ModelParams::fields
  double label = 0.0;
  double weight = 1.0;
};

struct LossAndGrad {
  double loss = 0.0;
  ModelParams grad;
};

/// Weighted mean binary cross-entropy over the batch and its exact gradient.
/// Consecutive entries that share a candidate share one encoder pass.
LossAndGrad loss_and_grads(std::span<const BatchEntry> batch, const ModelParams& params);

/// Training-time variant: accumulates into `grad` (which must be shaped like
/// `params`), applies dropout to the pooled encoding when `dropout_rng` is
/// set, and records touched embedding rows. Returns the batch loss.
double accumulate_loss_and_grads(std::span<const BatchEntry> batch, const ModelParams& params, ModelParams& grad,
                                 std::vector<int>& touched_rows, double dropout, Rng* dropout_rng);

// Checkpoints: versioned JSON with every tensor, dims, field list and seed.
std::string params_to_json(const ModelParams& params);
ModelParams params_from_json(std::string_view text);
void save_params(const std::string& path, const ModelParams& params);
ModelParams load_params(const std::string& path);

}  // namespace fieldswap
