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

#include <span>
#include <string>
#include <vector>

#include "fieldswap/doc_model.hpp"
#include "fieldswap/scorer.hpp"

namespace fieldswap {

/// Per-slot importance of one candidate's neighbors. Vectors are indexed by
/// neighbor slot; PAD slots hold 0 in every vector.
struct NeighborImportance {
  std::vector<double> raw;      ///< cosine(per_neighbor, pooled), in [-1, 1]
  std::vector<double> weights;  ///< sparsemax over the raw scores of non-PAD slots
};

/// Cosine similarity; 0 when either vector has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Euclidean projection onto the probability simplex (sort-and-threshold).
std::vector<double> sparsemax(std::span<const double> z);

/// Raw scores plus sparsemax weights. Throws std::invalid_argument for an
/// all-PAD neighborhood.
NeighborImportance neighbor_importance(const Candidate& cand, const ModelParams& params);

struct ImportantPhrase {
  std::vector<int> slots;          ///< neighbor slots, in reading order
  std::vector<int> token_indices;  ///< source document tokens
  std::vector<std::string> words;  ///< cleaned token texts
  int line_id = 0;
  double score = 0.0;  ///< mean clamped raw importance of the members

  std::string text() const;
};

/// Upper bound applied to token scores so that log(1 - score) stays finite.
inline constexpr double kMaxPhraseScore = 1.0 - 1e-6;

/// Forms phrases from precomputed importance. Each important neighbor (nonzero
/// weight) grows into the maximal run of line-adjacent tokens that are also
/// neighbors; punctuation is trimmed from the run ends and duplicate spans
/// are dropped. Tokens flagged in `excluded` (indexed by document token)
/// neither seed nor join a run.
std::vector<ImportantPhrase> phrases_from_importance(const Candidate& cand, const NeighborImportance& imp,
                                                     const std::vector<bool>* excluded = nullptr);

std::vector<ImportantPhrase> important_phrases(const Candidate& cand, const ModelParams& params,
                                               const std::vector<bool>* excluded = nullptr);

/// One debug record (JSON object on a single line).
std::string importance_debug_line(const Candidate& cand, const NeighborImportance& imp,
                                  std::span<const ImportantPhrase> phrases);

}  // namespace fieldswap
