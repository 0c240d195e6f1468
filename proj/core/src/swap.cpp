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

#include "fieldswap/swap.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "fieldswap/importance.hpp"
#include "json.hpp"

namespace fieldswap {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kFieldToField:
      return "field_to_field";
    case Strategy::kTypeToType:
      return "type_to_type";
    case Strategy::kAllToAll:
      return "all_to_all";
  }
  return "type_to_type";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "f2f" || s == "field_to_field") return Strategy::kFieldToField;
  if (s == "t2t" || s == "type_to_type") return Strategy::kTypeToType;
  if (s == "a2a" || s == "all_to_all") return Strategy::kAllToAll;
  throw std::invalid_argument("unknown swap strategy '" + std::string(s) + "' (expected f2f, t2t or a2a)");
}

std::vector<FieldPair> build_pairs(const FieldSchema& schema, Strategy strategy) {
  std::vector<FieldPair> out;
  for (const FieldSpec& s : schema.fields()) {
    for (const FieldSpec& t : schema.fields()) {
      const bool keep = strategy == Strategy::kAllToAll ||
                        (strategy == Strategy::kTypeToType && s.base_type == t.base_type) || s.name == t.name;
      if (keep) out.emplace_back(s.name, t.name);
    }
  }
  return out;
}

PairStats AugmentReport::totals() const {
  PairStats t;
  for (const auto& [_, s] : pairs) {
    t.emitted += s.emitted;
    t.no_match += s.no_match;
    t.unchanged += s.unchanged;
    t.insufficient_slots += s.insufficient_slots;
  }
  return t;
}

std::string AugmentReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [pair, s] : pairs) {
    rows.push_back({{"source", pair.first},
                    {"target", pair.second},
                    {"emitted", s.emitted},
                    {"no_match", s.no_match},
                    {"unchanged", s.unchanged},
                    {"insufficient_slots", s.insufficient_slots}});
  }
  const PairStats t = totals();
  nlohmann::json j = {{"pairs", rows},
                      {"totals",
                       {{"emitted", t.emitted},
                        {"no_match", t.no_match},
                        {"unchanged", t.unchanged},
                        {"insufficient_slots", t.insufficient_slots}}}};
  return j.dump(2);
}

std::optional<std::vector<int>> match_phrase(std::span<const Neighbor> neighbors, std::string_view phrase) {
  std::vector<std::string> words;
  for (const std::string& w : split_words(phrase)) words.push_back(normalize_token(w));
  if (words.empty()) return std::nullopt;

  auto slot_at = [&](int token, int line) -> int {
    for (std::size_t s = 0; s < neighbors.size(); ++s) {
      const Neighbor& n = neighbors[s];
      if (n.source_token_index == token && n.line_id == line) return static_cast<int>(s);
    }
    return -1;
  };

  std::optional<std::vector<int>> best;
  double best_dist = std::numeric_limits<double>::infinity();
  int best_first = 0;
  for (std::size_t s = 0; s < neighbors.size(); ++s) {
    const Neighbor& n = neighbors[s];
    if (!n.source_token_index || !n.line_id || normalize_token(n.text) != words[0]) continue;
    std::vector<int> slots = {static_cast<int>(s)};
    double dist = n.distance();
    for (std::size_t k = 1; k < words.size(); ++k) {
      const int slot = slot_at(*n.source_token_index + static_cast<int>(k), *n.line_id);
      if (slot < 0 || normalize_token(neighbors[slot].text) != words[k]) break;
      slots.push_back(slot);
      dist += neighbors[slot].distance();
    }
    if (slots.size() != words.size()) continue;
    const int first = *n.source_token_index;
    if (dist < best_dist || (dist == best_dist && first < best_first)) {
      best = std::move(slots);
      best_dist = dist;
      best_first = first;
    }
  }
  return best;
}

std::optional<std::vector<Neighbor>> replace_phrase(std::span<const Neighbor> neighbors,
                                                    std::span<const int> matched_slots,
                                                    std::span<const std::string> target_words,
                                                    std::span<const double> importance,
                                                    std::vector<int>* replaced_slots) {
  if (matched_slots.empty() || target_words.empty()) {
    throw std::invalid_argument("replace_phrase: empty source or target phrase");
  }
  std::vector<Neighbor> out(neighbors.begin(), neighbors.end());
  std::vector<int> replaced;
  const std::size_t ns = matched_slots.size();
  const std::size_t nt = target_words.size();
  const Neighbor& last_matched = neighbors[matched_slots[ns - 1]];

  for (std::size_t i = 0; i < ns; ++i) {
    const int slot = matched_slots[i];
    if (i < nt) {
      out[slot].text = target_words[i];
      out[slot].source_token_index.reset();
    } else {
      out[slot] = Neighbor::pad();
    }
    replaced.push_back(slot);
  }

  if (nt > ns) {
    std::vector<int> pool;
    for (std::size_t s = 0; s < neighbors.size(); ++s) {
      const bool matched = std::find(matched_slots.begin(), matched_slots.end(), static_cast<int>(s)) != matched_slots.end();
      if (!matched && !neighbors[s].is_pad()) pool.push_back(static_cast<int>(s));
    }
    if (pool.size() < nt - ns) return std::nullopt;
    std::sort(pool.begin(), pool.end(), [&](int a, int b) {
      if (importance[a] != importance[b]) return importance[a] < importance[b];
      const double da = neighbors[a].distance(), db = neighbors[b].distance();
      if (da != db) return da > db;
      return a < b;
    });
    for (std::size_t i = ns; i < nt; ++i) {
      const int slot = pool[i - ns];
      out[slot] = Neighbor{target_words[i], last_matched.rel_pos, std::nullopt, last_matched.line_id};
      replaced.push_back(slot);
    }
  }
  if (replaced_slots) *replaced_slots = std::move(replaced);
  return out;
}

bool same_neighborhood(std::span<const Neighbor> a, std::span<const Neighbor> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_pad() != b[i].is_pad()) return false;
    if (normalize_token(a[i].text) != normalize_token(b[i].text)) return false;
    if (!(a[i].rel_pos == b[i].rel_pos)) return false;
  }
  return true;
}

std::vector<SyntheticExample> generate(std::span<const Candidate> positives,
                                       std::span<const std::vector<double>> importance,
                                       const KeyPhraseConfig& config, std::span<const FieldPair> pairs,
                                       AugmentReport* report) {
  if (importance.size() != positives.size()) throw std::invalid_argument("generate: one importance vector per positive");
  std::map<std::string, std::vector<const FieldPair*>> pairs_by_source;
  for (const FieldPair& p : pairs) pairs_by_source[p.first].push_back(&p);
  auto phrases_of = [&](const std::string& field) -> const std::vector<RankedPhrase>* {
    auto it = config.phrases.find(field);
    return it == config.phrases.end() ? nullptr : &it->second;
  };

  std::vector<SyntheticExample> out;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const Candidate& src = positives[i];
    if (!src.label_for) continue;
    const std::string& source_field = *src.label_for;
    auto pit = pairs_by_source.find(source_field);
    if (pit == pairs_by_source.end()) continue;

    // Longest matching source phrase; the list is already importance-ordered.
    const RankedPhrase* source_phrase = nullptr;
    std::vector<int> matched;
    std::size_t matched_len = 0;
    if (const auto* list = phrases_of(source_field)) {
      for (const RankedPhrase& p : *list) {
        auto m = match_phrase(src.neighbors, p.text);
        if (m && m->size() > matched_len) {
          matched_len = m->size();
          matched = std::move(*m);
          source_phrase = &p;
        }
      }
    }

    for (const FieldPair* pair : pit->second) {
      const auto* targets = phrases_of(pair->second);
      if (!targets) continue;
      for (const RankedPhrase& target : *targets) {
        PairStats* stats = report ? &report->pairs[*pair] : nullptr;
        if (!source_phrase) {
          if (stats) ++stats->no_match;
          continue;
        }
        const std::vector<std::string> words = split_words(target.text);
        std::vector<int> replaced;
        auto rewritten = replace_phrase(src.neighbors, matched, words, importance[i], &replaced);
        if (!rewritten) {
          if (stats) ++stats->insufficient_slots;
          continue;
        }
        if (same_neighborhood(*rewritten, src.neighbors)) {
          if (stats) ++stats->unchanged;
          continue;
        }
        SyntheticExample ex;
        ex.candidate = src;
        ex.candidate.neighbors = std::move(*rewritten);
        ex.candidate.label_for = pair->second;
        ex.swap = {source_field, source_phrase->text, target.text, std::move(replaced)};
        ex.source_index = static_cast<int>(i);
        out.push_back(std::move(ex));
        if (stats) ++stats->emitted;
      }
    }
  }
  return out;
}

std::vector<SyntheticExample> generate(std::span<const Candidate> positives, const ModelParams& importance_model,
                                       const KeyPhraseConfig& config, std::span<const FieldPair> pairs,
                                       AugmentReport* report) {
  std::vector<std::vector<double>> importance;
  importance.reserve(positives.size());
  for (const Candidate& c : positives) {
    if (c.real_neighbor_count() == 0) {
      importance.emplace_back(c.neighbors.size(), 0.0);
    } else {
      importance.push_back(neighbor_importance(c, importance_model).raw);
    }
  }
  return generate(positives, importance, config, pairs, report);
}

std::string synthetic_to_json_line(const SyntheticExample& ex) {
  nlohmann::json j = nlohmann::json::parse(candidate_to_json_line(ex.candidate));
  j["swap"] = {{"source_field", ex.swap.source_field},
               {"source_phrase", ex.swap.source_phrase},
               {"target_phrase", ex.swap.target_phrase},
               {"replaced_slots", ex.swap.replaced_slots},
               {"source_index", ex.source_index}};
  return j.dump();
}

}  // namespace fieldswap
