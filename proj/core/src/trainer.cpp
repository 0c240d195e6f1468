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

#include "fieldswap/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fieldswap/candidates.hpp"
#include "fieldswap/importance.hpp"
#include "json.hpp"

namespace fieldswap {

using nlohmann::json;

std::vector<std::string> TrainConfig::validate() const {
  std::vector<std::string> errs;
  if (!(learning_rate > 0.0)) errs.push_back("learning_rate must be > 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) errs.push_back("dropout must be in [0, 1)");
  if (batch_size < 1) errs.push_back("batch_size must be >= 1");
  if (!(downweight > 0.0 && downweight <= 1.0)) errs.push_back("downweight must be in (0, 1]");
  if (stage1_epochs < 0 || stage2_epochs < 0) errs.push_back("epoch counts must be >= 0");
  if (patience < 1) errs.push_back("patience must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) errs.push_back("train_fraction must be in (0, 1)");
  return errs;
}

std::string_view to_string(Optimizer o) { return o == Optimizer::kSgd ? "sgd" : "adam"; }

Optimizer parse_optimizer(std::string_view s) {
  if (s == "sgd") return Optimizer::kSgd;
  if (s == "adam") return Optimizer::kAdam;
  throw std::invalid_argument("unknown optimizer '" + std::string(s) + "' (expected sgd or adam)");
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  double npos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * double(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        pos_rank_sum += avg_rank;
        npos += 1.0;
      }
    }
    i = j;
  }
  const double nneg = double(n) - npos;
  if (npos == 0.0 || nneg == 0.0) throw std::invalid_argument("auc_roc: need both positive and negative labels");
  return (pos_rank_sum - npos * (npos + 1.0) / 2.0) / (npos * nneg);
}

namespace {

// Head indices per base type, in schema order.
std::map<BaseType, std::vector<int>> heads_by_type(const FieldSchema& schema, const ModelParams& params) {
  std::map<BaseType, std::vector<int>> out;
  for (const FieldSpec& f : schema.fields()) {
    const int h = params.field_index(f.name);
    if (h < 0) throw std::invalid_argument("model has no head for field '" + f.name + "'");
    out[f.base_type].push_back(h);
  }
  return out;
}

class AdamState {
 public:
  explicit AdamState(const ModelParams& like) : m_(like.zeros_like()), v_(like.zeros_like()) {}

  void step(ModelParams& params, ModelParams& grad, const TrainConfig& config) {
    ++t_;
    if (config.optimizer == Optimizer::kSgd) {
      apply(params, grad, [&](double& p, double g, double&, double&) { p -= config.learning_rate * g; });
      return;
    }
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, double(t_));
    const double c2 = 1.0 - std::pow(b2, double(t_));
    apply(params, grad, [&](double& p, double g, double& m, double& v) {
      m = b1 * m + (1.0 - b1) * g;
      v = b2 * v + (1.0 - b2) * g * g;
      p -= config.learning_rate * (m / c1) / (std::sqrt(v / c2) + eps);
    });
  }

 private:
  template <typename F>
  void apply(ModelParams& params, ModelParams& grad, F&& f) {
    std::vector<ad::Matrix*> ps, gs, ms, vs;
    params.for_each_tensor([&](std::string_view, ad::Matrix& x) { ps.push_back(&x); });
    grad.for_each_tensor([&](std::string_view, ad::Matrix& x) { gs.push_back(&x); });
    m_.for_each_tensor([&](std::string_view, ad::Matrix& x) { ms.push_back(&x); });
    v_.for_each_tensor([&](std::string_view, ad::Matrix& x) { vs.push_back(&x); });
    for (std::size_t t = 0; t < ps.size(); ++t) {
      for (std::size_t i = 0; i < ps[t]->data.size(); ++i) {
        f(ps[t]->data[i], gs[t]->data[i], ms[t]->data[i], vs[t]->data[i]);
      }
    }
  }

  ModelParams m_;
  ModelParams v_;
  long t_ = 0;
};

}  // namespace

double validation_auc(std::span<const Candidate> val, const FieldSchema& schema, const ModelParams& params) {
  const auto heads = heads_by_type(schema, params);
  std::vector<double> scores;
  std::vector<int> labels;
  for (const Candidate& c : val) {
    auto it = heads.find(c.base_type);
    if (it == heads.end()) continue;
    std::vector<double> s(it->second.size(), 0.0);
    if (c.real_neighbor_count() > 0) s = score_heads(c, it->second, params);
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      scores.push_back(s[k]);
      labels.push_back(c.label_for && params.fields[it->second[k]] == *c.label_for ? 1 : 0);
    }
  }
  const auto npos = std::count(labels.begin(), labels.end(), 1);
  if (npos == 0 || npos == static_cast<long>(labels.size())) return 0.5;
  return auc_roc(scores, labels);
}

TrainResult train_stage(std::string_view stage, std::span<const TrainingExample> examples,
                        std::span<const Candidate> val, const FieldSchema& schema, const ModelParams& init,
                        int max_epochs, const TrainConfig& config, std::uint64_t seed) {
  const auto heads = heads_by_type(schema, init);
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Candidate& c = *examples[i].candidate;
    if (c.real_neighbor_count() > 0 && heads.count(c.base_type)) usable.push_back(i);
  }

  TrainResult result;
  ModelParams params = init;
  result.params = params;
  result.best_val_auc = validation_auc(val, schema, params);
  result.log.push_back({std::string(stage), 0, 0.0, result.best_val_auc});
  if (usable.empty()) return result;

  AdamState opt(params);
  ModelParams grad = params.zeros_like();
  Rng shuffle_rng(mix_seed(seed, 0x5f));
  Rng dropout_rng(mix_seed(seed, 0xd0));
  std::vector<BatchEntry> batch;
  std::vector<int> touched;
  int since_best = 0;
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    std::vector<std::size_t> order = usable;
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    int steps = 0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      batch.clear();
      const std::size_t end = std::min(order.size(), b + static_cast<std::size_t>(config.batch_size));
      for (std::size_t k = b; k < end; ++k) {
        const TrainingExample& ex = examples[order[k]];
        for (int h : heads.at(ex.candidate->base_type)) {
          const double label = ex.candidate->label_for && params.fields[h] == *ex.candidate->label_for ? 1.0 : 0.0;
          batch.push_back({ex.candidate, h, label, ex.weight});
        }
      }
      grad.for_each_tensor([](std::string_view, ad::Matrix& m) { m.zero(); });
      touched.clear();
      loss_sum += accumulate_loss_and_grads(batch, params, grad, touched, config.dropout, &dropout_rng);
      opt.step(params, grad, config);
      ++steps;
    }
    const double auc = validation_auc(val, schema, params);
    result.log.push_back({std::string(stage), epoch, loss_sum / steps, auc});
    if (auc > result.best_val_auc) {
      result.best_val_auc = auc;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return result;
}

TrainResult train_two_stage(std::span<const Candidate> train, std::span<const Candidate> augmented,
                            std::span<const Candidate> val, const FieldSchema& schema, const ModelParams& init,
                            const TrainConfig& config) {
  if (const auto errs = config.validate(); !errs.empty()) throw std::invalid_argument("train config: " + errs.front());
  std::vector<TrainingExample> originals;
  for (const Candidate& c : train) originals.push_back({&c, 1.0});

  const std::uint64_t stage1_seed = mix_seed(config.seed, 1);
  const std::uint64_t stage2_seed = mix_seed(config.seed, 2);
  if (augmented.empty()) return train_stage("stage2", originals, val, schema, init, config.stage2_epochs, config, stage2_seed);

  std::vector<TrainingExample> mixed = originals;
  const double w = config.disable_downweight ? 1.0 : config.downweight;
  for (const Candidate& c : augmented) mixed.push_back({&c, w});
  TrainResult s1 = train_stage("stage1", mixed, val, schema, init, config.stage1_epochs, config, stage1_seed);
  if (config.disable_finetune) return s1;
  TrainResult s2 = train_stage("stage2", originals, val, schema, s1.params, config.stage2_epochs, config, stage2_seed);
  s2.log.insert(s2.log.begin(), s1.log.begin(), s1.log.end());
  return s2;
}

void split_documents(std::span<const Document> docs, double train_fraction, std::uint64_t seed,
                     std::vector<Document>& train, std::vector<Document>& val) {
  if (docs.size() < 2) throw std::invalid_argument("need at least 2 documents to split into train and validation");
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0x5b1));
  rng.shuffle(order);
  auto ntrain = static_cast<std::size_t>(std::llround(train_fraction * double(docs.size())));
  ntrain = std::clamp<std::size_t>(ntrain, 1, docs.size() - 1);
  train.clear();
  val.clear();
  for (std::size_t i = 0; i < order.size(); ++i) (i < ntrain ? train : val).push_back(docs[order[i]]);
}

std::vector<Candidate> build_all_candidates(std::span<const Document> docs, const FieldSchema& schema) {
  std::vector<Candidate> out;
  for (const Document& d : docs) {
    auto c = build_candidates(d, schema);
    out.insert(out.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
  }
  return out;
}

TrainResult pretrain(std::span<const Document> docs, const FieldSchema& schema, const TrainConfig& config,
                     ModelDims dims) {
  if (docs.empty()) throw std::invalid_argument("pretrain: empty corpus");
  std::vector<Document> train_docs, val_docs;
  split_documents(docs, config.train_fraction, config.seed, train_docs, val_docs);
  const std::vector<Candidate> train = build_all_candidates(train_docs, schema);
  const std::vector<Candidate> val = build_all_candidates(val_docs, schema);
  std::vector<TrainingExample> examples;
  for (const Candidate& c : train) examples.push_back({&c, 1.0});
  const ModelParams init = init_params(schema, mix_seed(config.seed, 0x1a1), dims);
  return train_stage("pretrain", examples, val, schema, init, config.stage2_epochs, config, mix_seed(config.seed, 3));
}

std::vector<SyntheticExample> augment_split(std::span<const Document> train_docs,
                                            std::span<const Candidate> train_candidates, const FieldSchema& schema,
                                            const AugmentOptions& opts, AugmentReport* report,
                                            KeyPhraseConfig* used_config) {
  KeyPhraseConfig config;
  if (opts.config) {
    config = *opts.config;
  } else {
    if (!opts.importance_model) throw std::invalid_argument("phrase inference needs an importance model");
    config = infer_config(train_docs, schema, *opts.importance_model, opts.infer);
  }
  if (opts.human) config = merge(config, *opts.human);
  const std::vector<FieldPair> pairs = config.pairs.empty() ? build_pairs(schema, opts.strategy) : config.pairs;

  std::vector<Candidate> positives;
  for (const Candidate& c : train_candidates) {
    if (c.label_for) positives.push_back(c);
  }
  std::vector<SyntheticExample> out;
  if (opts.importance_model) {
    out = generate(positives, *opts.importance_model, config, pairs, report);
  } else {
    std::vector<std::vector<double>> flat;
    for (const Candidate& c : positives) flat.emplace_back(c.neighbors.size(), 0.0);
    out = generate(positives, flat, config, pairs, report);
  }
  // Cross-type pairs (all-to-all) retype the example so it trains the
  // target's heads.
  for (SyntheticExample& ex : out) ex.candidate.base_type = schema.at(*ex.candidate.label_for).base_type;
  if (used_config) *used_config = std::move(config);
  return out;
}

std::vector<double> Ensemble::scores(const Candidate& cand, std::span<const int> heads) const {
  std::vector<double> out(heads.size(), 0.0);
  if (members.empty() || cand.real_neighbor_count() == 0) return out;
  for (const ModelParams& m : members) {
    const std::vector<double> s = score_heads(cand, heads, m);
    for (std::size_t k = 0; k < s.size(); ++k) out[k] += s[k];
  }
  for (double& x : out) x /= double(members.size());
  return out;
}

std::vector<std::string> Ensemble::fields() const { return members.empty() ? std::vector<std::string>{} : members[0].fields; }

EnsembleResult train_ensemble(std::span<const Document> docs, const FieldSchema& schema, const ModelParams* pretrained,
                              const AugmentOptions& augment, const TrainConfig& config, std::uint64_t split_seed,
                              std::uint64_t init_seed, int n) {
  if (n < 1) throw std::invalid_argument("ensemble size must be >= 1");
  EnsembleResult result;
  for (int i = 0; i < n; ++i) {
    std::vector<Document> train_docs, val_docs;
    split_documents(docs, config.train_fraction, mix_seed(split_seed, i), train_docs, val_docs);
    const std::vector<Candidate> train = build_all_candidates(train_docs, schema);
    const std::vector<Candidate> val = build_all_candidates(val_docs, schema);

    AugmentReport report;
    std::vector<Candidate> augmented;
    if (augment.enabled) {
      for (SyntheticExample& ex : augment_split(train_docs, train, schema, augment, &report)) {
        augmented.push_back(std::move(ex.candidate));
      }
    }
    const std::uint64_t member_init = mix_seed(init_seed, i);
    const ModelParams init =
        pretrained ? transfer_params(*pretrained, schema, member_init) : init_params(schema, member_init);
    TrainConfig member_config = config;
    member_config.seed = mix_seed(member_init, mix_seed(split_seed, i));
    TrainResult r = train_two_stage(train, augmented, val, schema, init, member_config);
    result.ensemble.members.push_back(std::move(r.params));
    result.logs.push_back(std::move(r.log));
    result.reports.push_back(std::move(report));
  }
  return result;
}

void save_ensemble(const std::string& dir, const Ensemble& ensemble) {
  std::filesystem::create_directories(dir);
  json files = json::array();
  for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
    const std::string name = "member_" + std::to_string(i) + ".json";
    save_params((std::filesystem::path(dir) / name).string(), ensemble.members[i]);
    files.push_back(name);
  }
  json manifest = {{"format", "fieldswap-ensemble"}, {"version", 1}, {"members", files}};
  std::ofstream out(std::filesystem::path(dir) / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write ensemble manifest in '" + dir + "'");
  out << manifest.dump(2) << '\n';
}

Ensemble load_ensemble(const std::string& dir) {
  const std::filesystem::path manifest_path = std::filesystem::path(dir) / "manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw DataError("cannot open ensemble manifest '" + manifest_path.string() + "'");
  Ensemble e;
  try {
    const json manifest = json::parse(in);
    if (manifest.at("format") != "fieldswap-ensemble" || manifest.at("version") != 1) {
      throw DataError("unsupported ensemble manifest '" + manifest_path.string() + "'");
    }
    for (const json& f : manifest.at("members")) {
      e.members.push_back(load_params((std::filesystem::path(dir) / f.get<std::string>()).string()));
    }
  } catch (const json::exception& ex) {
    throw DataError(manifest_path.string() + ": " + ex.what());
  }
  if (e.members.empty()) throw DataError("ensemble '" + dir + "' has no members");
  for (const ModelParams& m : e.members) {
    if (m.fields != e.members[0].fields) throw DataError("ensemble '" + dir + "' members disagree on fields");
  }
  return e;
}

std::string log_to_jsonl(std::span<const std::vector<LogRecord>> logs) {
  std::string out;
  for (std::size_t m = 0; m < logs.size(); ++m) {
    for (const LogRecord& r : logs[m]) {
      json j = {{"member", m}, {"stage", r.stage}, {"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_auc", r.val_auc}};
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

}  // namespace fieldswap
