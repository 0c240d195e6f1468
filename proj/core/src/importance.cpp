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

#include "fieldswap/importance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace fieldswap {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> sparsemax(std::span<const double> z) {
  if (z.empty()) throw std::invalid_argument("sparsemax: empty input");
  std::vector<double> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // Support size k is the largest k with 1 + k * z_(k) > sum_{j<=k} z_(j).
  double cumsum = 0.0, support_sum = sorted[0];
  std::size_t k = 1;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumsum += sorted[i];
    if (1.0 + double(i + 1) * sorted[i] > cumsum) {
      k = i + 1;
      support_sum = cumsum;
    }
  }
  const double tau = (support_sum - 1.0) / double(k);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::max(z[i] - tau, 0.0);
  return out;
}

NeighborImportance neighbor_importance(const Candidate& cand, const ModelParams& params) {
  const NeighborhoodEncoding enc = encode_neighborhood(cand, params);
  NeighborImportance imp;
  imp.raw.assign(cand.neighbors.size(), 0.0);
  imp.weights.assign(cand.neighbors.size(), 0.0);
  std::vector<double> real;
  for (std::size_t r = 0; r < enc.slots.size(); ++r) {
    const double s = cosine_similarity(enc.per_neighbor[r], enc.pooled);
    imp.raw[enc.slots[r]] = s;
    real.push_back(s);
  }
  const std::vector<double> w = sparsemax(real);
  for (std::size_t r = 0; r < enc.slots.size(); ++r) imp.weights[enc.slots[r]] = w[r];
  return imp;
}

std::string ImportantPhrase::text() const { return join(words, " "); }

std::vector<ImportantPhrase> phrases_from_importance(const Candidate& cand, const NeighborImportance& imp,
                                                     const std::vector<bool>* excluded) {
  // Neighbor slots keyed by source token; swapped-in and PAD slots carry no
  // source index and so never join a run.
  std::map<int, int> slot_of_token;
  for (std::size_t s = 0; s < cand.neighbors.size(); ++s) {
    const Neighbor& n = cand.neighbors[s];
    if (!n.source_token_index || !n.line_id) continue;
    const auto t = static_cast<std::size_t>(*n.source_token_index);
    if (excluded && t < excluded->size() && (*excluded)[t]) continue;
    slot_of_token[*n.source_token_index] = static_cast<int>(s);
  }
  auto same_line_neighbor = [&](int token, int line) -> int {
    auto it = slot_of_token.find(token);
    if (it == slot_of_token.end() || *cand.neighbors[it->second].line_id != line) return -1;
    return it->second;
  };

  std::vector<ImportantPhrase> out;
  std::set<std::pair<int, int>> seen;
  for (const auto& [token, slot] : slot_of_token) {
    if (imp.weights[slot] <= 0.0) continue;
    const int line = *cand.neighbors[slot].line_id;
    int first = token, last = token;
    while (same_line_neighbor(first - 1, line) >= 0) --first;
    while (same_line_neighbor(last + 1, line) >= 0) ++last;

    std::vector<int> slots;
    for (int t = first; t <= last; ++t) slots.push_back(slot_of_token.at(t));
    auto bare = [&](int s) { return strip_punct(cand.neighbors[s].text).empty(); };
    std::size_t lo = 0, hi = slots.size();
    while (lo < hi && bare(slots[lo])) ++lo;
    while (hi > lo && bare(slots[hi - 1])) --hi;
    if (lo == hi) continue;
    const int span_first = first + static_cast<int>(lo);
    const int span_last = first + static_cast<int>(hi) - 1;
    if (!seen.insert({span_first, span_last}).second) continue;

    ImportantPhrase p;
    p.line_id = line;
    bool has_important = false;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const int s = slots[i];
      const std::string& text = cand.neighbors[s].text;
      std::string_view word = text;
      if (i == lo) word = strip_punct(word);
      if (i + 1 == hi) word = strip_punct(word);
      p.slots.push_back(s);
      p.token_indices.push_back(*cand.neighbors[s].source_token_index);
      p.words.emplace_back(word);
      sum += std::clamp(imp.raw[s], 0.0, kMaxPhraseScore);
      has_important = has_important || imp.weights[s] > 0.0;
    }
    // Every phrase must keep at least one important token after trimming.
    if (!has_important) continue;
    p.score = sum / double(p.slots.size());
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ImportantPhrase> important_phrases(const Candidate& cand, const ModelParams& params,
                                               const std::vector<bool>* excluded) {
  return phrases_from_importance(cand, neighbor_importance(cand, params), excluded);
}

std::string importance_debug_line(const Candidate& cand, const NeighborImportance& imp,
                                  std::span<const ImportantPhrase> phrases) {
  nlohmann::json neighbors = nlohmann::json::array();
  for (std::size_t s = 0; s < cand.neighbors.size(); ++s) {
    neighbors.push_back({{"text", cand.neighbors[s].text}, {"raw", imp.raw[s]}, {"weight", imp.weights[s]}});
  }
  nlohmann::json ps = nlohmann::json::array();
  for (const ImportantPhrase& p : phrases) {
    ps.push_back({{"text", p.text()}, {"score", p.score}, {"line_id", p.line_id}, {"tokens", p.token_indices}});
  }
  nlohmann::json j = {{"doc_id", cand.doc_id},
                      {"value", {cand.value_range.start, cand.value_range.end}},
                      {"label", cand.label_for ? nlohmann::json(*cand.label_for) : nlohmann::json(nullptr)},
                      {"neighbors", neighbors},
                      {"phrases", ps}};
  return j.dump();
}

}  // namespace fieldswap
