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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fieldswap/doc_model.hpp"
#include "fieldswap/keyphrase.hpp"
#include "fieldswap/scorer.hpp"

namespace fieldswap {

enum class Strategy { kFieldToField, kTypeToType, kAllToAll };
std::string_view to_string(Strategy s);
/// Accepts "f2f", "t2t", "a2a" and the long names.
Strategy parse_strategy(std::string_view s);

/// Ordered (source, target) pairs in schema order.
std::vector<FieldPair> build_pairs(const FieldSchema& schema, Strategy strategy);

struct SwapRecord {
  std::string source_field;
  std::string source_phrase;
  std::string target_phrase;
  std::vector<int> replaced_slots;  ///< in-place slots first, then overflow slots

  bool operator==(const SwapRecord&) const = default;
};

struct SyntheticExample {
  Candidate candidate;  ///< rewritten copy; label_for holds the target field
  SwapRecord swap;
  int source_index = 0;  ///< position of the source in the positives list

  bool operator==(const SyntheticExample&) const = default;
};

struct PairStats {
  int emitted = 0;
  int no_match = 0;
  int unchanged = 0;
  int insufficient_slots = 0;
  bool operator==(const PairStats&) const = default;
};

struct AugmentReport {
  std::map<FieldPair, PairStats> pairs;

  PairStats totals() const;
  std::string to_json() const;
};

/// Slots of the closest occurrence of `phrase` among the neighbors: tokens
/// with consecutive source indices on one line whose cleaned, case-folded
/// text equals the phrase words. Returned in phrase order.
std::optional<std::vector<int>> match_phrase(std::span<const Neighbor> neighbors, std::string_view phrase);

/// Rewrites matched slots with the target words. Extra source slots become
/// PAD; extra target words replace the lowest-importance unmatched real
/// neighbors and take the position of the last matched slot. Returns nullopt
/// when there are not enough replaceable neighbors. `importance` is indexed
/// by slot.
std::optional<std::vector<Neighbor>> replace_phrase(std::span<const Neighbor> neighbors,
                                                    std::span<const int> matched_slots,
                                                    std::span<const std::string> target_words,
                                                    std::span<const double> importance,
                                                    std::vector<int>* replaced_slots = nullptr);

/// True when the two neighborhoods agree slot by slot on cleaned text and
/// relative position.
bool same_neighborhood(std::span<const Neighbor> a, std::span<const Neighbor> b);

/// One synthetic example per (positive, pair with matching source, target
/// phrase), skipping sources without a matching phrase and rewrites that
/// leave the neighborhood unchanged. `importance[i]` holds per-slot raw
/// importance for positives[i]. Output order follows positives, then pairs,
/// then target phrases.
std::vector<SyntheticExample> generate(std::span<const Candidate> positives,
                                       std::span<const std::vector<double>> importance,
                                       const KeyPhraseConfig& config, std::span<const FieldPair> pairs,
                                       AugmentReport* report = nullptr);

/// Convenience overload measuring importance with `importance_model`.
std::vector<SyntheticExample> generate(std::span<const Candidate> positives, const ModelParams& importance_model,
                                       const KeyPhraseConfig& config, std::span<const FieldPair> pairs,
                                       AugmentReport* report = nullptr);

std::string synthetic_to_json_line(const SyntheticExample& ex);

}  // namespace fieldswap
