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

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fieldswap/common.hpp"

namespace fieldswap {

enum class BaseType { kDate, kAmount, kNumber, kAddress, kName, kText };

std::string_view to_string(BaseType t);
std::optional<BaseType> parse_base_type(std::string_view s);

struct FieldSpec {
  std::string name;
  BaseType base_type = BaseType::kText;
  bool expects_key_phrase = true;

  bool operator==(const FieldSpec&) const = default;
};

/// Ordered field list. Order is significant: it fixes head layout in the model
/// and iteration order everywhere else.
class FieldSchema {
 public:
  FieldSchema() = default;
  /// Throws DataError on duplicate names.
  explicit FieldSchema(std::vector<FieldSpec> fields);

  const std::vector<FieldSpec>& fields() const { return fields_; }
  std::size_t size() const { return fields_.size(); }
  const FieldSpec* find(std::string_view name) const;
  /// Index of `name` or -1.
  int index_of(std::string_view name) const;
  const FieldSpec& at(std::string_view name) const;
  std::vector<std::string> names_of_type(BaseType t) const;
  std::vector<std::string> names() const;

  bool operator==(const FieldSchema&) const = default;

 private:
  std::vector<FieldSpec> fields_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// Page-normalized box; (x, y) is the top-left corner.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  Point center() const { return {x + w / 2.0, y + h / 2.0}; }
  bool operator==(const Box&) const = default;
};

struct Token {
  std::string text;
  Box box;
  int line_id = 0;
  int index = 0;  ///< reading-order position; equals the token's slot in Document::tokens

  bool operator==(const Token&) const = default;
};

/// Half-open token range [start, end).
struct TokenRange {
  int start = 0;
  int end = 0;

  int size() const { return end - start; }
  bool contains(int i) const { return i >= start && i < end; }
  bool overlaps(const TokenRange& o) const { return start < o.end && o.start < end; }
  bool operator==(const TokenRange&) const = default;
  auto operator<=>(const TokenRange&) const = default;
};

struct FieldSpan {
  std::string field;
  TokenRange range;
  bool operator==(const FieldSpan&) const = default;
};

struct Document {
  std::string doc_id;
  std::string domain_tag;
  std::vector<Token> tokens;
  std::vector<FieldSpan> annotations;

  bool operator==(const Document&) const = default;
};

inline constexpr int kMaxNeighbors = 10;
inline constexpr std::string_view kPadText = "<PAD>";

struct Neighbor {
  std::string text;
  Point rel_pos;  ///< displacement from the candidate position
  std::optional<int> source_token_index;
  /// OCR line of the source token; kept for in-place swaps so phrase matching
  /// on synthetic examples still sees line structure.
  std::optional<int> line_id;

  static Neighbor pad() { return Neighbor{std::string(kPadText), {}, std::nullopt, std::nullopt}; }
  bool is_pad() const { return text == kPadText && !source_token_index && !line_id; }
  double distance() const;
  bool operator==(const Neighbor&) const = default;
};

struct Candidate {
  std::string doc_id;
  BaseType base_type = BaseType::kText;
  TokenRange value_range;
  Point position;
  std::vector<Neighbor> neighbors;  ///< exactly kMaxNeighbors slots, PAD-filled
  std::optional<std::string> label_for;

  int real_neighbor_count() const;
  bool operator==(const Candidate&) const = default;
};

/// Checks every invariant of the document against `schema`. Violations are
/// returned as human-readable messages; an empty result means valid.
std::vector<std::string> validate_document(const Document& doc, const FieldSchema& schema);

// Serialization. Corpus files are line-delimited JSON, one document per line.
std::string document_to_json_line(const Document& doc);
/// Throws DataError on malformed records or unknown keys.
Document document_from_json_line(std::string_view line);

void write_corpus(std::ostream& out, const std::vector<Document>& docs);
std::vector<Document> read_corpus(std::istream& in);
void write_corpus_file(const std::string& path, const std::vector<Document>& docs);
std::vector<Document> read_corpus_file(const std::string& path);

std::string schema_to_json(const FieldSchema& schema);
FieldSchema schema_from_json(std::string_view text);
void write_schema_file(const std::string& path, const FieldSchema& schema);
FieldSchema read_schema_file(const std::string& path);

/// Sidecar schema path written next to a corpus file.
std::string schema_sidecar_path(const std::string& corpus_path);

/// Debug record of a candidate (flag-gated dumps in the CLI).
std::string candidate_to_json_line(const Candidate& cand);

}  // namespace fieldswap
