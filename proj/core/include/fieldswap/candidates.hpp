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

#include <vector>

#include "fieldswap/doc_model.hpp"

namespace fieldswap {

/// Rule-based base-type annotator. Returns maximal, non-overlapping token
/// ranges that parse as `type`, in reading order. Recall-oriented: the
/// classifier is expected to filter the over-generation.
std::vector<TokenRange> annotate(const Document& doc, BaseType type);

/// Builds the neighbor feature list for a value span: the kMaxNeighbors
/// nearest non-value tokens by center distance, ties broken toward tokens left
/// of or above the candidate, padded with PAD slots.
std::vector<Neighbor> nearest_neighbors(const Document& doc, TokenRange value, Point position);

/// Center of the union box of the value tokens.
Point value_position(const Document& doc, TokenRange value);

/// One candidate per annotated span, for every base type that has at least
/// one field in `schema`. A candidate is labeled with field F when its range
/// equals a FieldSpan of F and F's base type matches.
std::vector<Candidate> build_candidates(const Document& doc, const FieldSchema& schema);

}  // namespace fieldswap
