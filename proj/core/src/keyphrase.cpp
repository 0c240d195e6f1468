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

#include "fieldswap/keyphrase.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fieldswap/candidates.hpp"
#include "fieldswap/importance.hpp"
#include "json.hpp"

namespace fieldswap {

using nlohmann::json;

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kAutomatic:
      return "automatic";
    case Provenance::kHumanExpert:
      return "human_expert";
    case Provenance::kMerged:
      return "merged";
  }
  return "automatic";
}

namespace {

Provenance parse_provenance(std::string_view s) {
  for (Provenance p : {Provenance::kAutomatic, Provenance::kHumanExpert, Provenance::kMerged}) {
    if (to_string(p) == s) return p;
  }
  throw DataError("unknown provenance '" + std::string(s) + "'");
}

double importance_from_log_keep(double log_keep) {
  const double v = -std::expm1(log_keep);
  return std::min(v, std::nextafter(1.0, 0.0));
}

std::string read_text_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(std::string("cannot open ") + what + " '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_field(const FieldSchema& schema, const std::string& name, const char* what) {
  if (!schema.find(name)) throw DataError(std::string(what) + ": unknown field '" + name + "'");
}

std::vector<FieldPair> pairs_from_json(const json& j, const FieldSchema& schema, const char* what) {
  std::vector<FieldPair> out;
  for (const json& p : j) {
    if (!p.is_array() || p.size() != 2) throw DataError(std::string(what) + ": each pair must be [source, target]");
    FieldPair fp{p[0].get<std::string>(), p[1].get<std::string>()};
    check_field(schema, fp.first, what);
    check_field(schema, fp.second, what);
    out.push_back(std::move(fp));
  }
  return out;
}

}  // namespace

double aggregate_importance(std::span<const double> scores) {
  double log_keep = 0.0;
  for (double s : scores) log_keep += std::log1p(-s);
  return importance_from_log_keep(log_keep);
}

std::string phrase_key(std::string_view text) { return to_lower(join(split_words(text), " ")); }

void PhraseAccumulator::add(std::string_view text, double score) {
  const std::string key = phrase_key(text);
  auto [it, inserted] = entries_.try_emplace(key);
  if (inserted) it->second.display = std::string(text);
  it->second.log_keep += std::log1p(-std::clamp(score, 0.0, kMaxPhraseScore));
}

std::vector<RankedPhrase> PhraseAccumulator::ranked(int k, double theta) const {
  // Rank on the log-space sum: many strong occurrences saturate 1 - prod to
  // the same double while their log sums still differ.
  std::vector<std::pair<double, const std::string*>> order;
  for (const auto& [key, e] : entries_) {
    if (importance_from_log_keep(e.log_keep) >= theta) order.emplace_back(e.log_keep, &key);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return *a.second < *b.second;
  });
  std::vector<RankedPhrase> out;
  for (const auto& [log_keep, key] : order) {
    if (static_cast<int>(out.size()) >= k) break;
    out.push_back({entries_.at(*key).display, importance_from_log_keep(log_keep)});
  }
  return out;
}

KeyPhraseConfig infer_config(std::span<const Document> docs, const FieldSchema& schema, const ModelParams& params,
                             InferOptions opts) {
  if (opts.k < 1) throw std::invalid_argument("infer_config: k must be >= 1");
  if (!(opts.theta >= 0.0 && opts.theta <= 1.0)) throw std::invalid_argument("infer_config: theta must be in [0, 1]");
  std::map<std::string, PhraseAccumulator> acc;
  for (const Document& doc : docs) {
    std::vector<bool> in_value(doc.tokens.size(), false);
    for (const FieldSpan& span : doc.annotations) {
      for (int t = span.range.start; t < span.range.end; ++t) in_value[t] = true;
    }
    for (const Candidate& cand : build_candidates(doc, schema)) {
      if (!cand.label_for || cand.real_neighbor_count() == 0) continue;
      // Best occurrence per phrase text within one example.
      std::map<std::string, std::pair<std::string, double>> best;
      for (const ImportantPhrase& p : important_phrases(cand, params, &in_value)) {
        const std::string text = p.text();
        auto [it, inserted] = best.try_emplace(phrase_key(text), text, p.score);
        if (!inserted) it->second.second = std::max(it->second.second, p.score);
      }
      PhraseAccumulator& a = acc[*cand.label_for];
      for (const auto& [key, entry] : best) a.add(entry.first, entry.second);
    }
  }
  KeyPhraseConfig config;
  for (const FieldSpec& f : schema.fields()) {
    auto it = acc.find(f.name);
    config.phrases[f.name] = it == acc.end() ? std::vector<RankedPhrase>{} : it->second.ranked(opts.k, opts.theta);
  }
  return config;
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

std::string config_to_json(const KeyPhraseConfig& config) {
  json fields = json::object();
  for (const auto& [name, list] : config.phrases) {
    json arr = json::array();
    for (const RankedPhrase& p : list) arr.push_back({{"phrase", p.text}, {"importance", p.importance}});
    fields[name] = arr;
  }
  json pairs = json::array();
  for (const auto& [s, t] : config.pairs) pairs.push_back({s, t});
  json j = {{"provenance", to_string(config.provenance)}, {"phrases", fields}, {"pairs", pairs}};
  return j.dump(2);
}

KeyPhraseConfig config_from_json(std::string_view text, const FieldSchema& schema) {
  try {
    const json j = json::parse(text);
    for (const auto& [key, _] : j.items()) {
      if (key != "provenance" && key != "phrases" && key != "pairs") {
        throw DataError("key-phrase config: unknown key '" + key + "'");
      }
    }
    KeyPhraseConfig config;
    config.provenance = parse_provenance(j.at("provenance").get<std::string>());
    for (const FieldSpec& f : schema.fields()) config.phrases[f.name] = {};
    for (const auto& [name, list] : j.at("phrases").items()) {
      check_field(schema, name, "key-phrase config");
      std::vector<RankedPhrase>& out = config.phrases[name];
      for (const json& p : list) {
        out.push_back({p.at("phrase").get<std::string>(), p.at("importance").get<double>()});
        if (split_words(out.back().text).empty()) throw DataError("key-phrase config: empty phrase for '" + name + "'");
      }
      for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].importance > out[i - 1].importance) {
          throw DataError("key-phrase config: phrases for '" + name + "' are not sorted by importance");
        }
      }
    }
    if (j.contains("pairs")) config.pairs = pairs_from_json(j.at("pairs"), schema, "key-phrase config");
    return config;
  } catch (const json::exception& e) {
    throw DataError(std::string("key-phrase config: ") + e.what());
  }
}

void write_config_file(const std::string& path, const KeyPhraseConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << config_to_json(config) << '\n';
}

KeyPhraseConfig read_config_file(const std::string& path, const FieldSchema& schema) {
  try {
    return config_from_json(read_text_file(path, "key-phrase config"), schema);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

HumanConfig human_config_from_json(std::string_view text, const FieldSchema& schema) {
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw DataError("human config: expected an object");
    HumanConfig human;
    for (const auto& [key, value] : j.items()) {
      if (key == "pairs") {
        human.pairs = pairs_from_json(value, schema, "human config");
        continue;
      }
      check_field(schema, key, "human config");
      for (const auto& [k, _] : value.items()) {
        if (k != "phrases" && k != "suppress") {
          throw DataError("human config: field '" + key + "' has unknown key '" + k + "'");
        }
      }
      if (value.contains("phrases")) human.phrases[key] = value.at("phrases").get<std::vector<std::string>>();
      if (value.value("suppress", false)) human.suppressed.insert(key);
    }
    return human;
  } catch (const json::exception& e) {
    throw DataError(std::string("human config: ") + e.what());
  }
}

std::string human_config_to_json(const HumanConfig& human) {
  json j = json::object();
  for (const auto& [field, phrases] : human.phrases) j[field]["phrases"] = phrases;
  for (const std::string& field : human.suppressed) j[field]["suppress"] = true;
  if (human.pairs) {
    json pairs = json::array();
    for (const auto& [s, t] : *human.pairs) pairs.push_back({s, t});
    j["pairs"] = pairs;
  }
  return j.dump(2);
}

HumanConfig load_human_config(const std::string& path, const FieldSchema& schema) {
  try {
    return human_config_from_json(read_text_file(path, "human config"), schema);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

KeyPhraseConfig merge(const KeyPhraseConfig& automatic, const HumanConfig& human) {
  if (human.phrases.empty() && human.suppressed.empty() && !human.pairs) return automatic;
  KeyPhraseConfig out = automatic;
  out.provenance = Provenance::kMerged;
  for (const auto& [field, phrases] : human.phrases) {
    // Expert phrases carry no measured importance; they share the maximum and
    // keep the order they were written in.
    std::vector<RankedPhrase>& list = out.phrases[field];
    list.clear();
    for (const std::string& p : phrases) list.push_back({p, kMaxPhraseScore});
  }
  for (const std::string& field : human.suppressed) out.phrases[field].clear();
  if (human.pairs) out.pairs = *human.pairs;
  return out;
}

HumanConfig human_config_from_spec(const CorpusSpec& spec) {
  HumanConfig human;
  std::map<std::string, int> column;
  for (const auto& group : spec.contradictory_groups) {
    for (std::size_t c = 0; c < group.size(); ++c) column[group[c]] = static_cast<int>(c);
  }
  auto column_of = [&](const std::string& f) {
    auto it = column.find(f);
    return it == column.end() ? -1 : it->second;
  };
  const auto& fields = spec.schema.fields();
  std::vector<FieldPair> pairs;
  for (const FieldSpec& f : fields) {
    if (!f.expects_key_phrase) {
      human.suppressed.insert(f.name);
      continue;
    }
    auto it = spec.phrase_bank.find(f.name);
    if (it != spec.phrase_bank.end() && !it->second.empty()) human.phrases[f.name] = it->second;
  }
  for (const FieldSpec& s : fields) {
    for (const FieldSpec& t : fields) {
      if (s.base_type == t.base_type && column_of(s.name) == column_of(t.name)) pairs.emplace_back(s.name, t.name);
    }
  }
  human.pairs = std::move(pairs);
  return human;
}

}  // namespace fieldswap
