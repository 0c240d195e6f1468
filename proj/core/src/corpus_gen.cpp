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

#include "fieldswap/corpus_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace fieldswap {

namespace {

constexpr double kCharWidth = 0.0075;
constexpr double kSpace = 0.008;
constexpr double kLeftMargin = 0.06;

constexpr const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                   "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

const std::vector<std::string>& boilerplate() {
  static const std::vector<std::string> words = {
      "Confidential", "Page",     "1",        "of",      "2",        "Department", "Memo",   "Direct",
      "Deposit",      "Reference", "Copy",    "Original", "Payroll", "Services",   "LLC",    "Inc",
      "Notes",        "Thank",    "you",      "Remit",   "Internal", "Use",        "Only",   "Questions?",
      "Call",         "Support",  "Online",   "Portal",  "Customer", "Retain",     "Records", "Void"};
  return words;
}

const std::vector<std::string>& street_names() {
  static const std::vector<std::string> v = {"Oak",    "Maple", "Cedar",  "Pine",   "Elm",     "Lake",
                                             "Hill",   "River", "Park",   "Sunset", "Washington", "Lincoln",
                                             "Madison", "Grant", "Spring", "Forest"};
  return v;
}
const std::vector<std::string>& street_suffixes() {
  static const std::vector<std::string> v = {"Street", "Avenue", "Road", "Drive", "Lane", "Boulevard", "Court", "Way"};
  return v;
}
const std::vector<std::string>& cities() {
  static const std::vector<std::string> v = {"Springfield", "Riverton", "Fairview", "Greenville", "Franklin",
                                             "Clinton",     "Salem",    "Madison",  "Georgetown", "Arlington"};
  return v;
}
const std::vector<std::string>& states() {
  static const std::vector<std::string> v = {"CA", "NY", "TX", "IL", "WA", "OR", "MA", "GA", "OH", "PA"};
  return v;
}
const std::vector<std::string>& first_names() {
  static const std::vector<std::string> v = {"John", "Maria", "David", "Linda", "James", "Susan",
                                             "Robert", "Karen", "Ahmed", "Mei", "Carlos", "Priya"};
  return v;
}
const std::vector<std::string>& last_names() {
  static const std::vector<std::string> v = {"Smith", "Garcia", "Chen", "Johnson", "Patel", "Brown",
                                             "Miller", "Lopez", "Wilson", "Nguyen", "Davis", "Clark"};
  return v;
}
const std::vector<std::string>& company_words() {
  static const std::vector<std::string> v = {"Acme", "Blue", "Summit", "Harbor", "Pioneer", "Golden",
                                             "Atlas", "Northern", "Crescent", "Vista", "Beacon", "Granite"};
  return v;
}
const std::vector<std::string>& company_kinds() {
  static const std::vector<std::string> v = {"Media", "Holdings", "Partners", "Group", "Broadcasting", "Marketing"};
  return v;
}
const std::vector<std::string>& company_suffixes() {
  static const std::vector<std::string> v = {"LLC", "Inc", "Corp", "Co"};
  return v;
}

std::vector<std::string> synth_value(BaseType type, Rng& rng, double scale) {
  switch (type) {
    case BaseType::kAmount: {
      const double v = std::exp(rng.uniform(std::log(5.0), std::log(5000.0))) * scale;
      return {format_amount(v, rng.bernoulli(0.6))};
    }
    case BaseType::kDate:
      return format_date(rng.range(2019, 2024), rng.range(1, 12), rng.range(1, 28), rng.range(0, 3));
    case BaseType::kNumber: {
      std::string s = std::to_string(rng.range(1, 9));
      const int len = rng.range(6, 10);
      while (static_cast<int>(s.size()) < len) s += static_cast<char>('0' + rng.range(0, 9));
      return {s};
    }
    case BaseType::kAddress: {
      std::vector<std::string> out = {std::to_string(rng.range(10, 9999)), rng.pick(street_names()),
                                      rng.pick(street_suffixes())};
      const int extra = rng.range(0, 3);
      if (extra >= 1) out.push_back(rng.pick(cities()));
      if (extra >= 2) out.push_back(rng.pick(states()));
      if (extra >= 3) out.push_back(std::to_string(rng.range(10000, 99999)));
      return out;
    }
    case BaseType::kName: {
      if (rng.bernoulli(0.5)) return {rng.pick(first_names()), rng.pick(last_names())};
      return {rng.pick(company_words()), rng.pick(company_kinds()), rng.pick(company_suffixes())};
    }
    case BaseType::kText:
      return {rng.pick(boilerplate())};
  }
  return {};
}

double words_width(const std::vector<std::string>& words) {
  double w = 0.0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    w += std::max(0.008, kCharWidth * static_cast<double>(words[i].size()));
    if (i + 1 < words.size()) w += kSpace;
  }
  return w;
}

struct PendingToken {
  std::string text;
  Box box;
};

struct PendingLine {
  std::vector<PendingToken> tokens;
};

struct PendingSpan {
  std::string field;
  int line = 0;
  int start = 0;
  int end = 0;
};

// Accumulates lines, then sorts them into reading order and assigns indices.
class PageBuilder {
 public:
  PageBuilder(Rng& rng, double jitter) : rng_(rng), jitter_(jitter) {}

  /// Starts a new line whose nominal top is `y`.
  int begin_line(double y) {
    lines_.emplace_back();
    line_y_.push_back(y + rng_.uniform(-jitter_, jitter_));
    cursor_ = 0.0;
    return static_cast<int>(lines_.size()) - 1;
  }

  /// Appends words starting at `x`; returns [first, last) token positions in
  /// the current line.
  std::pair<int, int> put(const std::vector<std::string>& words, double x) {
    PendingLine& line = lines_.back();
    const int first = static_cast<int>(line.tokens.size());
    cursor_ = x;
    for (const std::string& w : words) {
      const double width = std::max(0.008, kCharWidth * static_cast<double>(w.size()));
      Box b{cursor_ + rng_.uniform(-jitter_, jitter_), line_y_.back() + rng_.uniform(-jitter_, jitter_) / 4.0,
            width, kTokenHeight};
      line.tokens.push_back({w, b});
      cursor_ += width + kSpace;
    }
    return {first, static_cast<int>(line.tokens.size())};
  }

  double cursor() const { return cursor_; }

  void annotate(const std::string& field, std::pair<int, int> pos) {
    spans_.push_back({field, static_cast<int>(lines_.size()) - 1, pos.first, pos.second});
  }

  int token_count() const {
    int n = 0;
    for (const auto& l : lines_) n += static_cast<int>(l.tokens.size());
    return n;
  }

  /// True when `b`, inflated by the clearance, touches no existing token.
  bool is_free(const Box& b, double cx, double cy) const {
    for (const auto& l : lines_) {
      for (const auto& t : l.tokens) {
        if (b.x - cx < t.box.x + t.box.w && t.box.x < b.x + b.w + cx && b.y - cy < t.box.y + t.box.h &&
            t.box.y < b.y + b.h + cy) {
          return false;
        }
      }
    }
    return true;
  }

  Document finish(std::string doc_id, std::string domain_tag) {
    std::vector<int> order(lines_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    auto key = [&](int l) {
      const auto& toks = lines_[l].tokens;
      return std::pair<double, double>{line_y_[l], toks.empty() ? 0.0 : toks.front().box.x};
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });

    Document doc;
    doc.doc_id = std::move(doc_id);
    doc.domain_tag = std::move(domain_tag);
    std::vector<int> line_offset(lines_.size(), 0);
    int line_id = 0;
    for (int l : order) {
      if (lines_[l].tokens.empty()) continue;
      line_offset[l] = static_cast<int>(doc.tokens.size());
      for (auto& pt : lines_[l].tokens) {
        Token t;
        t.text = pt.text;
        t.box = pt.box;
        t.box.x = std::clamp(t.box.x, 0.0, 1.0 - t.box.w);
        t.box.y = std::clamp(t.box.y, 0.0, 1.0 - t.box.h);
        t.line_id = line_id;
        t.index = static_cast<int>(doc.tokens.size());
        doc.tokens.push_back(std::move(t));
      }
      ++line_id;
    }
    for (const PendingSpan& s : spans_) {
      doc.annotations.push_back({s.field, {line_offset[s.line] + s.start, line_offset[s.line] + s.end}});
    }
    std::sort(doc.annotations.begin(), doc.annotations.end(),
              [](const FieldSpan& a, const FieldSpan& b) { return a.range.start < b.range.start; });
    return doc;
  }

 private:
  Rng& rng_;
  double jitter_;
  double cursor_ = 0.0;
  std::vector<PendingLine> lines_;
  std::vector<double> line_y_;
  std::vector<PendingSpan> spans_;
};

struct FieldPlan {
  const FieldSpec* spec = nullptr;
  std::optional<std::vector<std::string>> phrase;
  std::vector<std::string> value;
};

std::optional<std::vector<std::string>> sample_phrase(const CorpusSpec& spec, const FieldSpec& f, Rng& rng) {
  if (!f.expects_key_phrase) return std::nullopt;
  auto it = spec.phrase_bank.find(f.name);
  if (it == spec.phrase_bank.end() || it->second.empty()) return std::nullopt;
  const std::string& phrase = rng.pick(it->second);
  if (rng.bernoulli(spec.noise.phrase_dropout_rate)) return std::nullopt;
  return split_words(phrase);
}

Document render_document(const CorpusSpec& spec, int doc_index) {
  Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(doc_index)));
  const TemplateSpec& tpl = spec.templates[rng.below(spec.templates.size())];
  PageBuilder page(rng, tpl.jitter);
  const FieldSchema& schema = spec.schema;

  std::map<std::string, int> group_of;
  for (std::size_t g = 0; g < spec.contradictory_groups.size(); ++g) {
    for (const auto& f : spec.contradictory_groups[g]) group_of[f] = static_cast<int>(g);
  }
  const bool use_table = tpl.layout == LayoutKind::kTwoColumnTable && !spec.contradictory_groups.empty();

  // Presence and phrases. Grouped fields share one draw.
  std::vector<bool> group_present(spec.contradictory_groups.size(), false);
  std::vector<std::optional<std::vector<std::string>>> group_phrase(spec.contradictory_groups.size());
  for (std::size_t g = 0; g < spec.contradictory_groups.size(); ++g) {
    const FieldSpec& lead = schema.at(spec.contradictory_groups[g].front());
    group_present[g] = rng.bernoulli(spec.frequency(lead.name));
    group_phrase[g] = sample_phrase(spec, lead, rng);
  }

  std::vector<FieldPlan> header;
  std::vector<FieldPlan> body;
  for (const FieldSpec& f : schema.fields()) {
    if (group_of.count(f.name) && use_table) continue;
    if (!rng.bernoulli(spec.frequency(f.name))) continue;
    FieldPlan plan{&f, sample_phrase(spec, f, rng), synth_value(f.base_type, rng, 1.0)};
    if (f.expects_key_phrase) {
      body.push_back(std::move(plan));
    } else {
      header.push_back(std::move(plan));
    }
  }
  rng.shuffle(body);

  // Header block: phrase-less values stacked tightly at the top left.
  double y = 0.04;
  for (const FieldPlan& p : header) {
    page.begin_line(y);
    page.annotate(p.spec->name, page.put(p.value, kLeftMargin + rng.uniform(0.0, 0.02)));
    y += 0.026;
  }
  y = header.empty() ? 0.06 : y + 0.22;

  if (tpl.layout == LayoutKind::kKeyAboveValue) {
    const double col_x[2] = {kLeftMargin, 0.52};
    int col = 0;
    for (const FieldPlan& p : body) {
      const double x = col_x[col] + rng.uniform(0.0, 0.02);
      if (p.phrase) {
        page.begin_line(y);
        page.put(*p.phrase, x);
      }
      page.begin_line(y + 0.022);
      page.annotate(p.spec->name, page.put(p.value, x));
      if (++col == 2) {
        col = 0;
        y += 0.075;
      }
    }
    if (col != 0) y += 0.075;
  } else {
    const double gap = rng.uniform(0.012, 0.03);
    for (const FieldPlan& p : body) {
      page.begin_line(y);
      double x = kLeftMargin + rng.uniform(0.0, 0.02);
      if (p.phrase) {
        std::vector<std::string> words = *p.phrase;
        if (rng.bernoulli(0.3)) words.back() += ":";
        page.put(words, x);
        x = page.cursor() - kSpace + gap;
      }
      page.annotate(p.spec->name, page.put(p.value, x));
      y += 0.045;
    }
  }

  if (use_table) {
    y += 0.04;
    const std::size_t ncols = tpl.column_headers.size();
    const double col0 = 0.40 + rng.uniform(-0.03, 0.03);
    const double col_step = rng.uniform(0.10, 0.115);
    const double row_step = rng.uniform(0.065, 0.08);
    const double gap = rng.uniform(0.015, 0.03);

    page.begin_line(y);
    page.put({"Description"}, kLeftMargin);
    for (std::size_t c = 0; c < ncols; ++c) page.put(split_words(tpl.column_headers[c]), col0 + col_step * c);
    y += 0.07;

    std::vector<int> rows;
    for (std::size_t g = 0; g < spec.contradictory_groups.size(); ++g) {
      if (group_present[g]) rows.push_back(static_cast<int>(g));
    }
    rng.shuffle(rows);
    for (int g : rows) {
      const auto& members = spec.contradictory_groups[g];
      page.begin_line(y);
      if (group_phrase[g]) {
        const double w = words_width(*group_phrase[g]);
        page.put(*group_phrase[g], std::max(kLeftMargin, col0 - gap - w));
      }
      double scale = 1.0;
      for (std::size_t c = 0; c < members.size() && c < ncols; ++c) {
        const FieldSpec& f = schema.at(members[c]);
        page.annotate(f.name, page.put(synth_value(f.base_type, rng, scale), col0 + col_step * c));
        scale *= rng.uniform(3.0, 12.0);
      }
      y += row_step;
    }
  }

  // Distractors: short boilerplate runs in free space, kept clear of content.
  const double expected = spec.noise.distractor_token_rate * page.token_count();
  int n_distract = static_cast<int>(std::floor(expected));
  if (rng.bernoulli(expected - std::floor(expected))) ++n_distract;
  for (int d = 0; d < n_distract; ++d) {
    std::vector<std::string> words = {rng.pick(boilerplate())};
    if (rng.bernoulli(0.4)) words.push_back(rng.pick(boilerplate()));
    const double w = words_width(words);
    for (int attempt = 0; attempt < 40; ++attempt) {
      const Box b{rng.uniform(0.02, 0.97 - w), rng.uniform(0.02, 0.96), w, kTokenHeight};
      if (page.is_free(b, 0.04, 0.03)) {
        page.begin_line(b.y);
        page.put(words, b.x);
        break;
      }
    }
  }

  char id[64];
  std::snprintf(id, sizeof(id), "%s-%05d", spec.name.c_str(), doc_index);
  return page.finish(id, spec.domain_tag);
}

}  // namespace

std::string_view to_string(LayoutKind k) {
  switch (k) {
    case LayoutKind::kKeyLeftValueRight:
      return "key_left_value_right";
    case LayoutKind::kKeyAboveValue:
      return "key_above_value";
    case LayoutKind::kTwoColumnTable:
      return "two_column_table";
  }
  return "?";
}

double CorpusSpec::frequency(std::string_view field) const {
  auto it = field_frequency.find(std::string(field));
  return it == field_frequency.end() ? 1.0 : it->second;
}

std::string format_amount(double value, bool currency_sign) {
  const long long cents = std::llround(value * 100.0);
  std::string digits = std::to_string(cents / 100);
  std::string grouped;
  const int n = static_cast<int>(digits.size());
  for (int i = 0; i < n; ++i) {
    grouped += digits[i];
    const int remaining = n - 1 - i;
    if (remaining > 0 && remaining % 3 == 0) grouped += ',';
  }
  char frac[8];
  std::snprintf(frac, sizeof(frac), ".%02lld", cents % 100);
  return (currency_sign ? "$" : "") + grouped + frac;
}

std::vector<std::string> format_date(int year, int month, int day, int style) {
  char buf[32];
  switch (style) {
    case 0:
      std::snprintf(buf, sizeof(buf), "%02d/%02d/%04d", month, day, year);
      return {buf};
    case 1:
      std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
      return {buf};
    case 2:
      return {kMonths[month - 1], std::to_string(day) + ",", std::to_string(year)};
    default:
      std::snprintf(buf, sizeof(buf), "%02d-%s-%04d", day, kMonths[month - 1], year);
      return {buf};
  }
}

std::vector<std::string> validate_spec(const CorpusSpec& spec) {
  std::vector<std::string> out;
  if (spec.templates.empty()) out.push_back("no templates");
  for (const auto& t : spec.templates) {
    if (!(t.jitter >= 0.0 && t.jitter < kTokenHeight / 2.0)) out.push_back("template jitter must be in [0, half line height)");
    if (t.layout == LayoutKind::kTwoColumnTable && t.column_headers.empty())
      out.push_back("two_column_table template needs column headers");
  }
  for (const auto& [f, p] : spec.field_frequency) {
    if (!spec.schema.find(f)) out.push_back("field_frequency names unknown field '" + f + "'");
    if (!(p > 0.0 && p <= 1.0)) out.push_back("frequency of '" + f + "' outside (0,1]");
  }
  for (const auto& [f, phrases] : spec.phrase_bank) {
    const FieldSpec* fs = spec.schema.find(f);
    if (!fs) {
      out.push_back("phrase_bank names unknown field '" + f + "'");
    } else if (!fs->expects_key_phrase && !phrases.empty()) {
      out.push_back("field '" + f + "' expects no key phrase but has phrases");
    }
  }
  for (const auto& group : spec.contradictory_groups) {
    if (group.empty()) out.push_back("empty contradictory group");
    std::optional<BaseType> type;
    for (const auto& f : group) {
      const FieldSpec* fs = spec.schema.find(f);
      if (!fs) {
        out.push_back("contradictory group names unknown field '" + f + "'");
        continue;
      }
      if (type && *type != fs->base_type) out.push_back("contradictory group mixes base types");
      type = fs->base_type;
    }
  }
  const auto& n = spec.noise;
  if (!(n.distractor_token_rate >= 0.0 && n.distractor_token_rate <= 1.0)) out.push_back("distractor_token_rate outside [0,1]");
  if (!(n.phrase_dropout_rate >= 0.0 && n.phrase_dropout_rate <= 1.0)) out.push_back("phrase_dropout_rate outside [0,1]");
  return out;
}

std::vector<Document> generate_corpus_range(const CorpusSpec& spec, int first, int last) {
  if (first < 0 || last < first) throw DataError("generate_corpus: bad document range");
  const auto problems = validate_spec(spec);
  if (!problems.empty()) throw DataError("corpus spec '" + spec.name + "': " + problems.front());
  std::vector<Document> docs;
  docs.reserve(static_cast<std::size_t>(last - first));
  for (int i = first; i < last; ++i) docs.push_back(render_document(spec, i));
  return docs;
}

std::vector<Document> generate_corpus(const CorpusSpec& spec, int count) {
  if (count < 0) throw DataError("generate_corpus: count must be >= 0");
  return generate_corpus_range(spec, 0, count);
}

}  // namespace fieldswap
