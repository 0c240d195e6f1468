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
#include <string>
#include <string_view>
#include <vector>

#include "fieldswap/doc_model.hpp"

namespace fieldswap {

enum class LayoutKind { kKeyLeftValueRight, kKeyAboveValue, kTwoColumnTable };

std::string_view to_string(LayoutKind k);

struct TemplateSpec {
  LayoutKind layout = LayoutKind::kKeyLeftValueRight;
  /// Column headers of a two-column table, e.g. {"Current", "YTD"}. Each header
  /// may be several words.
  std::vector<std::string> column_headers;
  /// Positional noise amplitude; must stay below half a line height.
  double jitter = 0.002;

  bool operator==(const TemplateSpec&) const = default;
};

struct NoiseSpec {
  double distractor_token_rate = 0.05;
  double phrase_dropout_rate = 0.1;
  bool operator==(const NoiseSpec&) const = default;
};

struct CorpusSpec {
  std::string name;
  std::string domain_tag;
  FieldSchema schema;
  std::vector<TemplateSpec> templates;
  /// Occurrence probability per field; fields not listed always occur.
  std::map<std::string, double> field_frequency;
  std::map<std::string, std::vector<std::string>> phrase_bank;
  /// Same-type fields rendered in one table row under a shared phrase, one
  /// per column (e.g. {current.bonus, ytd.bonus}).
  std::vector<std::vector<std::string>> contradictory_groups;
  NoiseSpec noise;
  std::uint64_t seed = 0;

  double frequency(std::string_view field) const;
  bool operator==(const CorpusSpec&) const = default;
};

/// Height of a rendered token in page units.
inline constexpr double kTokenHeight = 0.013;

std::vector<std::string> validate_spec(const CorpusSpec& spec);

/// Deterministic in (spec, count). Document i depends only on (spec, i), so
/// shards can be generated independently. Throws DataError on invalid specs.
std::vector<Document> generate_corpus(const CorpusSpec& spec, int count);
/// Same as generate_corpus but for the half-open index range [first, last).
std::vector<Document> generate_corpus_range(const CorpusSpec& spec, int first, int last);

/// Names: synth-earnings, synth-bills, synth-invoices-ood, synth-nophrase.
std::map<std::string, CorpusSpec> builtin_specs();
/// Throws DataError for unknown names.
CorpusSpec builtin_spec(std::string_view name);

std::string spec_to_json(const CorpusSpec& spec);
CorpusSpec spec_from_json(std::string_view text);
CorpusSpec read_spec_file(const std::string& path);

// Value grammars, exposed for annotator tests.
std::string format_amount(double value, bool currency_sign);
std::vector<std::string> format_date(int year, int month, int day, int style);

}  // namespace fieldswap
