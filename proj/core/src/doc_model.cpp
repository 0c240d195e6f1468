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

#include "fieldswap/doc_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fieldswap {

using nlohmann::json;

namespace {

constexpr std::string_view kBaseTypeNames[] = {"date", "amount", "number", "address", "name", "text"};

void require_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                  std::string_view what) {
  if (!obj.is_object()) throw DataError(std::string(what) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw DataError(std::string(what) + ": unknown key '" + key + "'");
    }
  }
  for (auto key : allowed) {
    if (!obj.contains(std::string(key))) {
      throw DataError(std::string(what) + ": missing key '" + std::string(key) + "'");
    }
  }
}

template <typename T>
T get_as(const json& obj, const char* key, std::string_view what) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

std::string_view to_string(BaseType t) { return kBaseTypeNames[static_cast<int>(t)]; }

std::optional<BaseType> parse_base_type(std::string_view s) {
  for (int i = 0; i < 6; ++i) {
    if (kBaseTypeNames[i] == s) return static_cast<BaseType>(i);
  }
  return std::nullopt;
}

FieldSchema::FieldSchema(std::vector<FieldSpec> fields) : fields_(std::move(fields)) {
  std::set<std::string> seen;
  for (const auto& f : fields_) {
    if (f.name.empty()) throw DataError("schema: empty field name");
    if (!seen.insert(f.name).second) throw DataError("schema: duplicate field '" + f.name + "'");
  }
}

const FieldSpec* FieldSchema::find(std::string_view name) const {
  for (const auto& f : fields_) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

int FieldSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (fields_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const FieldSpec& FieldSchema::at(std::string_view name) const {
  const FieldSpec* f = find(name);
  if (!f) throw DataError("unknown field '" + std::string(name) + "'");
  return *f;
}

std::vector<std::string> FieldSchema::names_of_type(BaseType t) const {
  std::vector<std::string> out;
  for (const auto& f : fields_) {
    if (f.base_type == t) out.push_back(f.name);
  }
  return out;
}

std::vector<std::string> FieldSchema::names() const {
  std::vector<std::string> out;
  for (const auto& f : fields_) out.push_back(f.name);
  return out;
}

double Neighbor::distance() const { return std::hypot(rel_pos.x, rel_pos.y); }

int Candidate::real_neighbor_count() const {
  return static_cast<int>(std::count_if(neighbors.begin(), neighbors.end(),
                                        [](const Neighbor& n) { return !n.is_pad(); }));
}

std::vector<std::string> validate_document(const Document& doc, const FieldSchema& schema) {
  std::vector<std::string> out;
  const int n = static_cast<int>(doc.tokens.size());
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };

  std::map<int, std::vector<int>> lines;
  for (int i = 0; i < n; ++i) {
    const Token& t = doc.tokens[i];
    const std::string where = "token " + std::to_string(i);
    if (t.index != i) out.push_back(where + ": index " + std::to_string(t.index) + " out of reading order");
    const Box& b = t.box;
    if (!in_unit(b.x) || !in_unit(b.y) || !in_unit(b.w) || !in_unit(b.h) || !in_unit(b.x + b.w) ||
        !in_unit(b.y + b.h)) {
      out.push_back(where + ": box outside the unit page");
    }
    if (t.text.empty()) out.push_back(where + ": empty text");
    lines[t.line_id].push_back(i);
  }

  for (const auto& [line, members] : lines) {
    const std::string where = "line " + std::to_string(line);
    if (members.back() - members.front() + 1 != static_cast<int>(members.size())) {
      out.push_back(where + ": tokens not contiguous in reading order");
    }
    // Shared y-band: every token's vertical center lies inside every other
    // token's vertical extent.
    double max_top = -1.0, min_bottom = 2.0, min_center = 2.0, max_center = -1.0;
    for (int i : members) {
      const Box& b = doc.tokens[i].box;
      max_top = std::max(max_top, b.y);
      min_bottom = std::min(min_bottom, b.y + b.h);
      min_center = std::min(min_center, b.center().y);
      max_center = std::max(max_center, b.center().y);
    }
    if (min_center < max_top || max_center > min_bottom) out.push_back(where + ": tokens do not share a y-band");
  }

  for (std::size_t a = 0; a < doc.annotations.size(); ++a) {
    const FieldSpan& s = doc.annotations[a];
    const std::string where = "annotation " + std::to_string(a);
    if (!schema.find(s.field)) out.push_back(where + ": field '" + s.field + "' not in schema");
    if (s.range.start >= s.range.end) out.push_back(where + ": empty or inverted range");
    if (s.range.start < 0 || s.range.end > n) out.push_back(where + ": range outside document");
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

std::string document_to_json_line(const Document& doc) {
  json tokens = json::array();
  for (const Token& t : doc.tokens) {
    tokens.push_back({{"text", t.text},
                      {"x", t.box.x},
                      {"y", t.box.y},
                      {"w", t.box.w},
                      {"h", t.box.h},
                      {"line_id", t.line_id}});
  }
  json ann = json::array();
  for (const FieldSpan& s : doc.annotations) {
    ann.push_back({{"field", s.field}, {"start", s.range.start}, {"end", s.range.end}});
  }
  json j = {{"doc_id", doc.doc_id}, {"domain_tag", doc.domain_tag}, {"tokens", tokens}, {"annotations", ann}};
  return j.dump();
}

Document document_from_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("corpus record: ") + e.what());
  }
  require_keys(j, {"doc_id", "domain_tag", "tokens", "annotations"}, "corpus record");
  Document doc;
  doc.doc_id = get_as<std::string>(j, "doc_id", "corpus record");
  doc.domain_tag = get_as<std::string>(j, "domain_tag", "corpus record");
  const std::string what = "document '" + doc.doc_id + "'";
  if (!j["tokens"].is_array()) throw DataError(what + ": tokens must be an array");
  if (!j["annotations"].is_array()) throw DataError(what + ": annotations must be an array");
  int idx = 0;
  for (const json& jt : j["tokens"]) {
    require_keys(jt, {"text", "x", "y", "w", "h", "line_id"}, what + " token");
    Token t;
    t.text = get_as<std::string>(jt, "text", what);
    t.box = {get_as<double>(jt, "x", what), get_as<double>(jt, "y", what), get_as<double>(jt, "w", what),
             get_as<double>(jt, "h", what)};
    t.line_id = get_as<int>(jt, "line_id", what);
    t.index = idx++;
    doc.tokens.push_back(std::move(t));
  }
  for (const json& ja : j["annotations"]) {
    require_keys(ja, {"field", "start", "end"}, what + " annotation");
    doc.annotations.push_back(
        {get_as<std::string>(ja, "field", what), {get_as<int>(ja, "start", what), get_as<int>(ja, "end", what)}});
  }
  return doc;
}

void write_corpus(std::ostream& out, const std::vector<Document>& docs) {
  for (const Document& d : docs) out << document_to_json_line(d) << '\n';
}

std::vector<Document> read_corpus(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      docs.push_back(document_from_json_line(line));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return docs;
}

void write_corpus_file(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_corpus(out, docs);
}

std::vector<Document> read_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus '" + path + "'");
  try {
    return read_corpus(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string schema_to_json(const FieldSchema& schema) {
  json fields = json::array();
  for (const FieldSpec& f : schema.fields()) {
    fields.push_back(
        {{"name", f.name}, {"base_type", std::string(to_string(f.base_type))}, {"expects_key_phrase", f.expects_key_phrase}});
  }
  return json{{"fields", fields}}.dump(2);
}

FieldSchema schema_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("schema: ") + e.what());
  }
  require_keys(j, {"fields"}, "schema");
  std::vector<FieldSpec> fields;
  for (const json& jf : j["fields"]) {
    require_keys(jf, {"name", "base_type", "expects_key_phrase"}, "schema field");
    FieldSpec f;
    f.name = get_as<std::string>(jf, "name", "schema field");
    const auto bt = parse_base_type(get_as<std::string>(jf, "base_type", "schema field"));
    if (!bt) throw DataError("schema field '" + f.name + "': unknown base_type");
    f.base_type = *bt;
    f.expects_key_phrase = get_as<bool>(jf, "expects_key_phrase", "schema field");
    fields.push_back(std::move(f));
  }
  return FieldSchema(std::move(fields));
}

void write_schema_file(const std::string& path, const FieldSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << schema_to_json(schema) << '\n';
}

FieldSchema read_schema_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open schema '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return schema_from_json(ss.str());
}

std::string schema_sidecar_path(const std::string& corpus_path) { return corpus_path + ".schema.json"; }

std::string candidate_to_json_line(const Candidate& cand) {
  json neighbors = json::array();
  for (const Neighbor& n : cand.neighbors) {
    json jn = {{"text", n.text}, {"dx", n.rel_pos.x}, {"dy", n.rel_pos.y}};
    if (n.source_token_index) jn["source_token_index"] = *n.source_token_index;
    if (n.line_id) jn["line_id"] = *n.line_id;
    neighbors.push_back(std::move(jn));
  }
  json j = {{"doc_id", cand.doc_id},
            {"base_type", std::string(to_string(cand.base_type))},
            {"start", cand.value_range.start},
            {"end", cand.value_range.end},
            {"x", cand.position.x},
            {"y", cand.position.y},
            {"neighbors", neighbors},
            {"label_for", cand.label_for ? json(*cand.label_for) : json(nullptr)}};
  return j.dump();
}

}  // namespace fieldswap
