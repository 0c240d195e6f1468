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
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fieldswap/corpus_gen.hpp"
#include "fieldswap/doc_model.hpp"
#include "fieldswap/scorer.hpp"

namespace fieldswap {

using FieldPair = std::pair<std::string, std::string>;  ///< (source, target)

struct RankedPhrase {
  std::string text;
  double importance = 0.0;
  bool operator==(const RankedPhrase&) const = default;
};

enum class Provenance { kAutomatic, kHumanExpert, kMerged };
std::string_view to_string(Provenance p);

struct KeyPhraseConfig {
  /// Every schema field has an entry, possibly empty; lists are sorted by
  /// descending importance.
  std::map<std::string, std::vector<RankedPhrase>> phrases;
  std::vector<FieldPair> pairs;  ///< empty means "use the swap strategy"
  Provenance provenance = Provenance::kAutomatic;

  bool operator==(const KeyPhraseConfig&) const = default;
};

/// 1 - prod(1 - s_i) for scores in [0, 1).
double aggregate_importance(std::span<const double> scores);

/// Case-insensitive identity of a cleaned phrase.
std::string phrase_key(std::string_view text);

/// Streaming form of aggregate_importance over many phrases of one field.
class PhraseAccumulator {
 public:
  void add(std::string_view text, double score);
  /// Phrases with importance >= theta, best first, at most k. Equal
  /// importance is ordered by phrase key.
  std::vector<RankedPhrase> ranked(int k, double theta) const;

 private:
  struct Entry {
    std::string display;  ///< first-seen casing
    double log_keep = 0.0;  ///< sum of log(1 - s)
  };
  std::map<std::string, Entry> entries_;
};

struct InferOptions {
  int k = 3;
  double theta = 0.2;
};

/// Runs importance extraction over every positive candidate of every field
/// and aggregates per field. Ground-truth value tokens of the document are
/// kept out of every phrase.
KeyPhraseConfig infer_config(std::span<const Document> docs, const FieldSchema& schema, const ModelParams& params,
                             InferOptions opts = {});

std::string config_to_json(const KeyPhraseConfig& config);
KeyPhraseConfig config_from_json(std::string_view text, const FieldSchema& schema);
void write_config_file(const std::string& path, const KeyPhraseConfig& config);
KeyPhraseConfig read_config_file(const std::string& path, const FieldSchema& schema);

/// Expert overrides: replacement phrase lists, suppressed fields and an
/// optional explicit pair list.
struct HumanConfig {
  std::map<std::string, std::vector<std::string>> phrases;
  std::set<std::string> suppressed;
  std::optional<std::vector<FieldPair>> pairs;

  bool operator==(const HumanConfig&) const = default;
};

/// Format: {"<field>": {"phrases": [...], "suppress": bool}, ..., "pairs": [[src, tgt], ...]}.
HumanConfig human_config_from_json(std::string_view text, const FieldSchema& schema);
std::string human_config_to_json(const HumanConfig& human);
HumanConfig load_human_config(const std::string& path, const FieldSchema& schema);

/// Human phrases replace automatic ones field by field, suppressed fields end
/// up empty, and human pairs replace the pair list when given.
KeyPhraseConfig merge(const KeyPhraseConfig& automatic, const HumanConfig& human);

/// What a domain expert would write for a synthetic spec: the generator's
/// phrase bank, suppression of phrase-less fields, and same-type pairs
/// restricted to fields rendered in the same table column.
HumanConfig human_config_from_spec(const CorpusSpec& spec);

}  // namespace fieldswap
