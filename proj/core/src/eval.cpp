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

#include "fieldswap/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fieldswap/candidates.hpp"
#include "json.hpp"

namespace fieldswap {

using nlohmann::json;

double max_f1(std::span<const double> scores, std::span<const int> labels, int missed_positives) {
  const std::size_t n = scores.size();
  const double positives = double(std::count(labels.begin(), labels.end(), 1) + missed_positives);
  if (positives == 0.0) throw std::invalid_argument("max_f1: no positive instances");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double best = 0.0, tp = 0.0, fp = 0.0;
  std::size_t i = 0;
  while (i < n) {
    // Tied scores cross the threshold together.
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? tp : fp) += 1.0;
      ++j;
    }
    if (tp > 0.0) best = std::max(best, 2.0 * tp / (tp + fp + positives));
    i = j;
  }
  return best;
}

double macro_f1(std::span<const double> per_field) {
  if (per_field.empty()) throw std::invalid_argument("macro_f1: no fields to average");
  return std::accumulate(per_field.begin(), per_field.end(), 0.0) / double(per_field.size());
}

EvalResult evaluate(const Ensemble& ensemble, std::span<const Document> test, const FieldSchema& schema) {
  if (ensemble.members.empty()) throw std::invalid_argument("evaluate: empty ensemble");
  const ModelParams& first = ensemble.members.front();
  std::map<BaseType, std::vector<int>> heads;
  for (const FieldSpec& f : schema.fields()) {
    const int h = first.field_index(f.name);
    if (h < 0) throw DataError("ensemble has no head for field '" + f.name + "'");
    heads[f.base_type].push_back(h);
  }
  std::map<std::string, std::vector<double>> scores;
  std::map<std::string, std::vector<int>> labels;
  std::map<std::string, int> missed;
  for (const Document& doc : test) {
    const std::vector<Candidate> cands = build_candidates(doc, schema);
    for (const Candidate& c : cands) {
      auto it = heads.find(c.base_type);
      if (it == heads.end()) continue;
      const std::vector<double> s = ensemble.scores(c, it->second);
      for (std::size_t k = 0; k < s.size(); ++k) {
        const std::string& field = first.fields[it->second[k]];
        scores[field].push_back(s[k]);
        labels[field].push_back(c.label_for && *c.label_for == field ? 1 : 0);
      }
    }
    for (const FieldSpan& span : doc.annotations) {
      const bool covered = std::any_of(cands.begin(), cands.end(), [&](const Candidate& c) {
        return c.value_range == span.range && c.label_for && *c.label_for == span.field;
      });
      if (!covered) ++missed[span.field];
    }
  }
  EvalResult r;
  std::vector<double> included;
  for (const FieldSpec& f : schema.fields()) {
    const std::vector<int>& l = labels[f.name];
    const int m = missed[f.name];
    if (m == 0 && std::count(l.begin(), l.end(), 1) == 0) {
      r.per_field[f.name] = std::nullopt;
      continue;
    }
    const double f1 = max_f1(scores[f.name], l, m);
    r.per_field[f.name] = f1;
    included.push_back(f1);
  }
  r.macro = macro_f1(included);
  return r;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kBaseline:
      return "baseline";
    case Method::kFieldToField:
      return "f2f";
    case Method::kTypeToType:
      return "t2t";
    case Method::kAllToAll:
      return "a2a";
    case Method::kHuman:
      return "human";
    case Method::kNoDownweight:
      return "no_downweight";
    case Method::kNoFinetune:
      return "no_finetune";
  }
  return "baseline";
}

Method parse_method(std::string_view s) {
  for (Method m : {Method::kBaseline, Method::kFieldToField, Method::kTypeToType, Method::kAllToAll, Method::kHuman,
                   Method::kNoDownweight, Method::kNoFinetune}) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(s) +
                              "' (expected baseline, f2f, t2t, a2a, human, no_downweight or no_finetune)");
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<int> sample_collection(int pool_size, int size, int c, int collections, std::uint64_t seed) {
  if (size > pool_size) throw std::invalid_argument("collection size exceeds the pool");
  std::vector<int> idx(pool_size);
  std::iota(idx.begin(), idx.end(), 0);
  if (size * collections <= pool_size) {
    Rng rng(seed);
    rng.shuffle(idx);
    idx = std::vector<int>(idx.begin() + c * size, idx.begin() + (c + 1) * size);
  } else {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(c) + 1));
    rng.shuffle(idx);
    idx.resize(size);
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

AugmentOptions augment_for(Method m, const ModelParams* importance_model, const InferOptions& infer,
                           const HumanConfig* human, TrainConfig& config) {
  AugmentOptions a;
  a.importance_model = importance_model;
  a.infer = infer;
  a.enabled = m != Method::kBaseline;
  switch (m) {
    case Method::kFieldToField:
      a.strategy = Strategy::kFieldToField;
      break;
    case Method::kAllToAll:
      a.strategy = Strategy::kAllToAll;
      break;
    case Method::kHuman:
      a.human = *human;
      break;
    case Method::kNoDownweight:
      config.disable_downweight = true;
      break;
    case Method::kNoFinetune:
      config.disable_finetune = true;
      break;
    default:
      break;
  }
  return a;
}

}  // namespace

ExperimentReport learning_curve(const LearningCurveOptions& opts) {
  if (opts.sizes.empty() || opts.methods.empty()) throw std::invalid_argument("learning_curve: no sizes or methods");
  for (int s : opts.sizes) {
    if (s < 2) throw std::invalid_argument("learning_curve: train size must be >= 2");
    if (s > opts.pool_size) {
      throw std::invalid_argument("learning_curve: train size " + std::to_string(s) + " exceeds pool size " +
                                  std::to_string(opts.pool_size));
    }
  }
  const std::vector<Document> pool = generate_corpus_range(opts.spec, 0, opts.pool_size);
  const std::vector<Document> test = generate_corpus_range(opts.spec, opts.pool_size, opts.pool_size + opts.test_size);

  ModelParams pretrained;
  if (opts.pretrained) {
    pretrained = *opts.pretrained;
  } else {
    const std::vector<Document> ood = generate_corpus(opts.pretrain_spec, opts.pretrain_docs);
    pretrained = pretrain(ood, opts.pretrain_spec.schema, opts.train).params;
  }
  const HumanConfig human = human_config_from_spec(opts.spec);

  ExperimentReport report;
  report.domain = opts.spec.name;
  report.sizes = opts.sizes;
  report.methods = opts.methods;
  for (int size : opts.sizes) {
    for (Method m : opts.methods) {
      for (int c = 0; c < opts.collections; ++c) {
        for (int s = 0; s < opts.split_seeds; ++s) {
          for (int t = 0; t < opts.init_seeds; ++t) report.cells.push_back({size, m, c, s, t, {}, 0});
        }
      }
    }
  }

  auto run_cell = [&](CellResult& cell) {
    const std::vector<int> idx =
        sample_collection(opts.pool_size, cell.size, cell.collection, opts.collections, mix_seed(opts.spec.seed, 0xc0));
    std::vector<Document> docs;
    for (int i : idx) docs.push_back(pool[i]);
    TrainConfig config = opts.train;
    const AugmentOptions aug = augment_for(cell.method, &pretrained, opts.infer, &human, config);
    const EnsembleResult er = train_ensemble(docs, opts.spec.schema, &pretrained, aug, config,
                                             mix_seed(0x5b, static_cast<std::uint64_t>(cell.split_seed)),
                                             mix_seed(0x1b, static_cast<std::uint64_t>(cell.init_seed)),
                                             opts.ensemble_size);
    for (const AugmentReport& r : er.reports) cell.synthetic_examples += r.totals().emitted;
    cell.eval = evaluate(er.ensemble, test, opts.spec.schema);
  };

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (std::size_t i = next++; i < report.cells.size(); i = next++) {
      try {
        run_cell(report.cells[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, opts.jobs);
  std::vector<std::thread> threads;
  for (int j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);

  std::map<std::pair<int, Method>, std::vector<double>> by_key;
  for (const CellResult& c : report.cells) by_key[{c.size, c.method}].push_back(c.eval.macro);
  for (auto& [key, v] : by_key) report.medians[key] = median(v);
  return report;
}

std::string ExperimentReport::to_json() const {
  json cells_j = json::array();
  for (const CellResult& c : cells) {
    json per_field = json::object();
    for (const auto& [f, v] : c.eval.per_field) per_field[f] = v ? json(*v) : json(nullptr);
    cells_j.push_back({{"size", c.size},
                       {"method", to_string(c.method)},
                       {"collection", c.collection},
                       {"split_seed", c.split_seed},
                       {"init_seed", c.init_seed},
                       {"macro_f1", c.eval.macro},
                       {"synthetic_examples", c.synthetic_examples},
                       {"per_field_f1", per_field}});
  }
  json medians_j = json::array();
  for (const auto& [key, v] : medians) {
    medians_j.push_back({{"size", key.first}, {"method", to_string(key.second)}, {"median_macro_f1", v}});
  }
  json methods_j = json::array();
  for (Method m : methods) methods_j.push_back(to_string(m));
  json j = {{"domain", domain}, {"sizes", sizes}, {"methods", methods_j}, {"medians", medians_j}, {"cells", cells_j}};
  return j.dump(2);
}

std::string ExperimentReport::to_text() const {
  std::ostringstream out;
  out << "domain: " << domain << "\nmedian macro-F1 (x100)\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%6s", "size");
  out << buf;
  for (Method m : methods) {
    std::snprintf(buf, sizeof(buf), " %14s", std::string(to_string(m)).c_str());
    out << buf;
  }
  out << '\n';
  for (int size : sizes) {
    std::snprintf(buf, sizeof(buf), "%6d", size);
    out << buf;
    for (Method m : methods) {
      auto it = medians.find({size, m});
      std::snprintf(buf, sizeof(buf), " %14.2f", it == medians.end() ? 0.0 : 100.0 * it->second);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace fieldswap
