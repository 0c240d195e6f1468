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

#include "fieldswap/candidates.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string_view>

namespace fieldswap {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool is_month(std::string_view s) {
  static constexpr std::array<std::string_view, 12> months = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                              "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  return std::find(months.begin(), months.end(), s) != months.end();
}

std::string_view trim_trailing(std::string_view s, std::string_view chars) {
  while (!s.empty() && chars.find(s.back()) != std::string_view::npos) s.remove_suffix(1);
  return s;
}

// Splits `s` on `sep` into exactly `n` parts; returns false otherwise.
bool split_exact(std::string_view s, char sep, std::size_t n, std::array<std::string_view, 3>& parts) {
  std::size_t count = 0;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      if (count == n) return false;
      parts[count++] = s.substr(begin, i - begin);
      begin = i + 1;
    }
  }
  return count == n;
}

bool is_single_token_date(std::string_view raw) {
  const std::string_view s = trim_trailing(raw, ".,;:");
  std::array<std::string_view, 3> p;
  if (split_exact(s, '/', 3, p)) {
    return all_digits(p[0]) && p[0].size() <= 2 && all_digits(p[1]) && p[1].size() <= 2 && all_digits(p[2]) &&
           p[2].size() == 4;
  }
  if (split_exact(s, '-', 3, p)) {
    if (all_digits(p[0]) && p[0].size() == 4) {
      return all_digits(p[1]) && p[1].size() == 2 && all_digits(p[2]) && p[2].size() == 2;
    }
    return all_digits(p[0]) && p[0].size() <= 2 && is_month(p[1]) && all_digits(p[2]) && p[2].size() == 4;
  }
  return false;
}

bool is_amount(std::string_view s) {
  bool marked = false;
  if (!s.empty() && (s.front() == '$')) {
    s.remove_prefix(1);
    marked = true;
  }
  std::string_view cents;
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    cents = s.substr(dot + 1);
    s = s.substr(0, dot);
    if (cents.size() != 2 || !all_digits(cents)) return false;
    marked = true;
  }
  if (s.empty()) return false;
  if (s.find(',') != std::string_view::npos) {
    // Digit groups: 1-3 leading digits, then ,ddd groups.
    std::size_t first = s.find(',');
    if (first == 0 || first > 3 || !all_digits(s.substr(0, first))) return false;
    std::size_t i = first;
    while (i < s.size()) {
      if (s[i] != ',' || i + 4 > s.size() || !all_digits(s.substr(i + 1, 3))) return false;
      i += 4;
    }
    marked = true;
  } else if (!all_digits(s)) {
    return false;
  }
  return marked;
}

bool is_capitalized_word(std::string_view raw) {
  const std::string_view s = trim_trailing(raw, ".,");
  if (s.empty() || !(s.front() >= 'A' && s.front() <= 'Z')) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalpha(c); });
}

bool same_line(const Document& doc, int a, int b) { return doc.tokens[a].line_id == doc.tokens[b].line_id; }

std::vector<TokenRange> annotate_dates(const Document& doc) {
  std::vector<TokenRange> out;
  const int n = static_cast<int>(doc.tokens.size());
  for (int i = 0; i < n;) {
    const auto& t = doc.tokens;
    if (i + 2 < n && same_line(doc, i, i + 2) && is_month(t[i].text) && t[i + 1].text.size() >= 2 &&
        t[i + 1].text.back() == ',' && all_digits(std::string_view(t[i + 1].text).substr(0, t[i + 1].text.size() - 1)) &&
        t[i + 1].text.size() <= 3 && all_digits(trim_trailing(t[i + 2].text, ".,;:")) &&
        trim_trailing(t[i + 2].text, ".,;:").size() == 4) {
      out.push_back({i, i + 3});
      i += 3;
      continue;
    }
    if (is_single_token_date(t[i].text)) out.push_back({i, i + 1});
    ++i;
  }
  return out;
}

std::vector<TokenRange> annotate_single(const Document& doc, bool (*pred)(std::string_view)) {
  std::vector<TokenRange> out;
  for (int i = 0; i < static_cast<int>(doc.tokens.size()); ++i) {
    if (pred(doc.tokens[i].text)) out.push_back({i, i + 1});
  }
  return out;
}

std::vector<TokenRange> annotate_addresses(const Document& doc) {
  std::vector<TokenRange> out;
  const int n = static_cast<int>(doc.tokens.size());
  for (int i = 0; i < n;) {
    const std::string& head = doc.tokens[i].text;
    if (!(all_digits(head) && head.size() <= 5)) {
      ++i;
      continue;
    }
    int j = i + 1;
    int words = 0;
    while (j < n && j - i < 6 && same_line(doc, i, j) && is_capitalized_word(doc.tokens[j].text)) {
      ++words;
      ++j;
    }
    if (j < n && j - i < 6 && words >= 2 && same_line(doc, i, j) && all_digits(doc.tokens[j].text) &&
        doc.tokens[j].text.size() == 5) {
      ++j;  // trailing ZIP
    }
    if (words >= 2 && j - i >= 3) {
      out.push_back({i, j});
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<TokenRange> annotate_names(const Document& doc) {
  std::vector<TokenRange> out;
  const int n = static_cast<int>(doc.tokens.size());
  for (int i = 0; i < n;) {
    if (!is_capitalized_word(doc.tokens[i].text)) {
      ++i;
      continue;
    }
    int j = i + 1;
    while (j < n && same_line(doc, i, j) && is_capitalized_word(doc.tokens[j].text)) ++j;
    if (j - i >= 2 && j - i <= 4) out.push_back({i, j});
    i = j;
  }
  return out;
}

}  // namespace

std::vector<TokenRange> annotate(const Document& doc, BaseType type) {
  switch (type) {
    case BaseType::kDate:
      return annotate_dates(doc);
    case BaseType::kAmount:
      return annotate_single(doc, [](std::string_view s) { return is_amount(s); });
    case BaseType::kNumber:
      return annotate_single(doc, [](std::string_view s) { return all_digits(s); });
    case BaseType::kAddress:
      return annotate_addresses(doc);
    case BaseType::kName:
      return annotate_names(doc);
    case BaseType::kText:
      return {};
  }
  return {};
}

Point value_position(const Document& doc, TokenRange value) {
  double x0 = 1.0, y0 = 1.0, x1 = 0.0, y1 = 0.0;
  for (int i = value.start; i < value.end; ++i) {
    const Box& b = doc.tokens[i].box;
    x0 = std::min(x0, b.x);
    y0 = std::min(y0, b.y);
    x1 = std::max(x1, b.x + b.w);
    y1 = std::max(y1, b.y + b.h);
  }
  return {(x0 + x1) / 2.0, (y0 + y1) / 2.0};
}

std::vector<Neighbor> nearest_neighbors(const Document& doc, TokenRange value, Point position) {
  struct Entry {
    double dist;
    bool preferred;  // left of or above the candidate
    int index;
    Point rel;
  };
  std::vector<Entry> entries;
  entries.reserve(doc.tokens.size());
  for (const Token& t : doc.tokens) {
    if (value.contains(t.index)) continue;
    const Point c = t.box.center();
    const Point rel{c.x - position.x, c.y - position.y};
    entries.push_back({std::hypot(rel.x, rel.y), rel.x < 0.0 || rel.y < 0.0, t.index, rel});
  }
  const std::size_t keep = std::min<std::size_t>(entries.size(), kMaxNeighbors);
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep), entries.end(),
                    [](const Entry& a, const Entry& b) {
                      if (a.dist != b.dist) return a.dist < b.dist;
                      if (a.preferred != b.preferred) return a.preferred;
                      return a.index < b.index;
                    });
  std::vector<Neighbor> out;
  out.reserve(kMaxNeighbors);
  for (std::size_t i = 0; i < keep; ++i) {
    const Token& t = doc.tokens[entries[i].index];
    out.push_back({t.text, entries[i].rel, t.index, t.line_id});
  }
  while (out.size() < static_cast<std::size_t>(kMaxNeighbors)) out.push_back(Neighbor::pad());
  return out;
}

std::vector<Candidate> build_candidates(const Document& doc, const FieldSchema& schema) {
  std::vector<Candidate> out;
  for (BaseType type : {BaseType::kDate, BaseType::kAmount, BaseType::kNumber, BaseType::kAddress, BaseType::kName,
                        BaseType::kText}) {
    if (schema.names_of_type(type).empty()) continue;
    for (const TokenRange& span : annotate(doc, type)) {
      Candidate c;
      c.doc_id = doc.doc_id;
      c.base_type = type;
      c.value_range = span;
      c.position = value_position(doc, span);
      c.neighbors = nearest_neighbors(doc, span, c.position);
      for (const FieldSpan& fs : doc.annotations) {
        const FieldSpec* f = schema.find(fs.field);
        if (f && f->base_type == type && fs.range == span) {
          c.label_for = fs.field;
          break;
        }
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace fieldswap
