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

#include "fieldswap/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fieldswap {

using ad::Matrix;
using ad::ParamRef;
using ad::Tape;
using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;

void fill_normal(Matrix& m, Rng& rng, double stddev) {
  for (double& x : m.data) x = rng.normal() * stddev;
}

ParamRef ref(const Matrix& value, Matrix* grad) { return {&value, grad}; }

struct Encoded {
  Tape::Var per_neighbor = -1;
  Tape::Var pooled = -1;
  std::vector<int> slots;
};

// Builds the encoder graph for one candidate. `g` may be null (no gradients).
Encoded encode(Tape& tape, const Candidate& cand, const ModelParams& p, ModelParams* g, std::vector<int>* touched) {
  Encoded e;
  std::vector<int> buckets;
  for (std::size_t i = 0; i < cand.neighbors.size(); ++i) {
    const Neighbor& n = cand.neighbors[i];
    if (n.is_pad()) continue;
    e.slots.push_back(static_cast<int>(i));
    buckets.push_back(token_bucket(n.text, p.dims.vocab));
  }
  if (e.slots.empty()) throw std::invalid_argument("candidate has no non-PAD neighbors to encode");
  const int n = static_cast<int>(e.slots.size());
  Matrix rel(n, 2);
  for (int r = 0; r < n; ++r) {
    const Neighbor& nb = cand.neighbors[e.slots[r]];
    rel(r, 0) = nb.rel_pos.x * kPositionScale;
    rel(r, 1) = nb.rel_pos.y * kPositionScale;
  }
  auto gp = [g](Matrix ModelParams::*m) { return g ? &(g->*m) : nullptr; };
  const Tape::Var emb = tape.gather_rows(ref(p.token_embedding, gp(&ModelParams::token_embedding)), buckets, touched);
  const Tape::Var pos = tape.affine(tape.constant(std::move(rel)), ref(p.pos_w, gp(&ModelParams::pos_w)),
                                    ref(p.pos_b, gp(&ModelParams::pos_b)));
  const Tape::Var x = tape.concat_cols(emb, pos);
  const Tape::Var q = tape.affine(x, ref(p.wq, gp(&ModelParams::wq)), {});
  const Tape::Var k = tape.affine(x, ref(p.wk, gp(&ModelParams::wk)), {});
  const Tape::Var v = tape.affine(x, ref(p.wv, gp(&ModelParams::wv)), {});
  const Tape::Var att = tape.softmax_rows(tape.scale(tape.matmul_nt(q, k), 1.0 / std::sqrt(double(p.dims.d()))));
  e.per_neighbor = tape.add(x, tape.matmul(att, v));
  e.pooled = tape.max_rows(e.per_neighbor);
  return e;
}

// Pooled encoding (optionally dropped out) concatenated with the candidate
// position encoding.
Tape::Var head_input(Tape& tape, const Candidate& cand, Tape::Var pooled, const ModelParams& p, ModelParams* g,
                     double dropout, Rng* rng) {
  Tape::Var h = pooled;
  if (rng && dropout > 0.0) {
    Matrix mask(1, p.dims.d());
    for (double& m : mask.data) m = rng->bernoulli(dropout) ? 0.0 : 1.0 / (1.0 - dropout);
    h = tape.mul_const(h, std::move(mask));
  }
  Matrix pos(1, 2);
  pos(0, 0) = (cand.position.x - 0.5) * kPositionScale;
  pos(0, 1) = (cand.position.y - 0.5) * kPositionScale;
  const Tape::Var c = tape.affine(tape.constant(std::move(pos)), ref(p.cand_w, g ? &g->cand_w : nullptr),
                                  ref(p.cand_b, g ? &g->cand_b : nullptr));
  return tape.concat_cols(h, c);
}

std::vector<double> matrix_row(const Matrix& m, int r) { return {m.row(r), m.row(r) + m.cols}; }

}  // namespace

int ModelParams::field_index(std::string_view name) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void ModelParams::for_each_tensor(const std::function<void(std::string_view, Matrix&)>& fn) {
  fn("token_embedding", token_embedding);
  fn("pos_w", pos_w);
  fn("pos_b", pos_b);
  fn("wq", wq);
  fn("wk", wk);
  fn("wv", wv);
  fn("cand_w", cand_w);
  fn("cand_b", cand_b);
  fn("head_w", head_w);
  fn("head_b", head_b);
}

void ModelParams::for_each_tensor(const std::function<void(std::string_view, const Matrix&)>& fn) const {
  const_cast<ModelParams*>(this)->for_each_tensor([&](std::string_view n, Matrix& m) { fn(n, m); });
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  z.for_each_tensor([](std::string_view, Matrix& m) { m.zero(); });
  return z;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  for_each_tensor([&](std::string_view, const Matrix& m) {
    for (double x : m.data) ok = ok && std::isfinite(x);
  });
  return ok;
}

int token_bucket(std::string_view text, int vocab) {
  std::string key = normalize_token(text);
  if (key.empty()) key = std::string(text);
  for (char& c : key) {
    if (c >= '0' && c <= '9') c = '0';
  }
  return static_cast<int>(fnv1a64(key) % static_cast<std::uint64_t>(vocab));
}

ModelParams init_params(const FieldSchema& schema, std::uint64_t seed, ModelDims dims) {
  ModelParams p;
  p.dims = dims;
  p.seed = seed;
  p.fields = schema.names();
  const int d = dims.d();
  p.token_embedding = Matrix(dims.vocab, dims.d_text);
  p.pos_w = Matrix(2, dims.d_pos);
  p.pos_b = Matrix(1, dims.d_pos);
  p.wq = Matrix(d, d);
  p.wk = Matrix(d, d);
  p.wv = Matrix(d, d);
  p.cand_w = Matrix(2, dims.d_cand);
  p.cand_b = Matrix(1, dims.d_cand);
  Rng rng(mix_seed(seed, 0x1417));
  fill_normal(p.token_embedding, rng, 0.5);
  fill_normal(p.pos_w, rng, 1.0);
  fill_normal(p.wq, rng, 1.0 / std::sqrt(double(d)));
  fill_normal(p.wk, rng, 1.0 / std::sqrt(double(d)));
  fill_normal(p.wv, rng, 1.0 / std::sqrt(double(d)));
  fill_normal(p.cand_w, rng, 0.5);
  return transfer_params(p, schema, seed);
}

ModelParams transfer_params(const ModelParams& pretrained, const FieldSchema& schema, std::uint64_t seed) {
  ModelParams p = pretrained;
  p.seed = seed;
  p.fields = schema.names();
  const int width = p.dims.d() + p.dims.d_cand;
  p.head_w = Matrix(static_cast<int>(p.fields.size()), width);
  p.head_b = Matrix(1, static_cast<int>(p.fields.size()));
  Rng rng(mix_seed(seed, 0x4ead));
  fill_normal(p.head_w, rng, 0.05);
  return p;
}

NeighborhoodEncoding encode_neighborhood(const Candidate& cand, const ModelParams& params) {
  Tape tape(false);
  const Encoded e = encode(tape, cand, params, nullptr, nullptr);
  NeighborhoodEncoding out;
  const Matrix& h = tape.value(e.per_neighbor);
  for (int r = 0; r < h.rows; ++r) out.per_neighbor.push_back(matrix_row(h, r));
  out.pooled = matrix_row(tape.value(e.pooled), 0);
  out.slots = e.slots;
  return out;
}

std::vector<double> score_heads(const Candidate& cand, std::span<const int> heads, const ModelParams& params) {
  Tape tape(false);
  const Encoded e = encode(tape, cand, params, nullptr, nullptr);
  const Tape::Var z = head_input(tape, cand, e.pooled, params, nullptr, 0.0, nullptr);
  const Tape::Var logits = tape.select_heads(z, ref(params.head_w, nullptr), ref(params.head_b, nullptr), heads);
  std::vector<double> out;
  for (double l : tape.value(logits).data) out.push_back(ad::sigmoid(l));
  return out;
}

double score(const Candidate& cand, std::string_view field, const ModelParams& params, const FieldSchema& schema) {
  const FieldSpec* spec = schema.find(field);
  const int head = params.field_index(field);
  if (!spec || head < 0) throw std::invalid_argument("unknown field '" + std::string(field) + "'");
  if (spec->base_type != cand.base_type) {
    throw std::invalid_argument("field '" + std::string(field) + "' has base type " +
                                std::string(to_string(spec->base_type)) + " but candidate is " +
                                std::string(to_string(cand.base_type)));
  }
  const int heads[] = {head};
  return score_heads(cand, heads, params).front();
}

double accumulate_loss_and_grads(std::span<const BatchEntry> batch, const ModelParams& params, ModelParams& grad,
                                 std::vector<int>& touched_rows, double dropout, Rng* dropout_rng) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grads: empty batch");
  Tape tape(true);
  std::vector<Tape::Var> losses;
  double total_weight = 0.0;
  std::size_t i = 0;
  while (i < batch.size()) {
    std::size_t j = i;
    while (j < batch.size() && batch[j].candidate == batch[i].candidate) ++j;
    const Candidate& cand = *batch[i].candidate;
    std::vector<int> heads;
    std::vector<double> labels, weights;
    for (std::size_t k = i; k < j; ++k) {
      heads.push_back(batch[k].field);
      labels.push_back(batch[k].label);
      weights.push_back(batch[k].weight);
      total_weight += batch[k].weight;
    }
    const Encoded e = encode(tape, cand, params, &grad, &touched_rows);
    const Tape::Var z = head_input(tape, cand, e.pooled, params, &grad, dropout, dropout_rng);
    const Tape::Var logits = tape.select_heads(z, ref(params.head_w, &grad.head_w), ref(params.head_b, &grad.head_b), heads);
    losses.push_back(tape.bce_with_logits(logits, labels, weights));
    i = j;
  }
  const Tape::Var loss = tape.scale(tape.sum(losses), 1.0 / total_weight);
  tape.backward(loss);
  return tape.value(loss)(0, 0);
}

LossAndGrad loss_and_grads(std::span<const BatchEntry> batch, const ModelParams& params) {
  LossAndGrad out{0.0, params.zeros_like()};
  std::vector<int> touched;
  out.loss = accumulate_loss_and_grads(batch, params, out.grad, touched, 0.0, nullptr);
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

std::string params_to_json(const ModelParams& params) {
  json tensors = json::object();
  params.for_each_tensor([&](std::string_view name, const Matrix& m) {
    tensors[std::string(name)] = {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
  });
  json j = {{"format", "fieldswap-checkpoint"},
            {"version", kCheckpointVersion},
            {"dims",
             {{"vocab", params.dims.vocab},
              {"d_text", params.dims.d_text},
              {"d_pos", params.dims.d_pos},
              {"d_cand", params.dims.d_cand}}},
            {"seed", params.seed},
            {"fields", params.fields},
            {"tensors", tensors}};
  return j.dump();
}

ModelParams params_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "fieldswap-checkpoint") throw DataError("checkpoint: wrong format tag");
    if (j.at("version").get<int>() != kCheckpointVersion) throw DataError("checkpoint: unsupported version");
    ModelParams p;
    const json& jd = j.at("dims");
    p.dims = {jd.at("vocab").get<int>(), jd.at("d_text").get<int>(), jd.at("d_pos").get<int>(),
              jd.at("d_cand").get<int>()};
    p.seed = j.at("seed").get<std::uint64_t>();
    p.fields = j.at("fields").get<std::vector<std::string>>();
    const json& tensors = j.at("tensors");
    p.for_each_tensor([&](std::string_view name, Matrix& m) {
      const json& t = tensors.at(std::string(name));
      m.rows = t.at("rows").get<int>();
      m.cols = t.at("cols").get<int>();
      m.data = t.at("data").get<std::vector<double>>();
      if (m.data.size() != static_cast<std::size_t>(m.rows) * m.cols) {
        throw DataError("checkpoint: tensor '" + std::string(name) + "' has the wrong element count");
      }
    });
    const int d = p.dims.d();
    const int f = static_cast<int>(p.fields.size());
    auto expect = [](const Matrix& m, int r, int c, const char* name) {
      if (m.rows != r || m.cols != c) throw DataError(std::string("checkpoint: tensor '") + name + "' has the wrong shape");
    };
    expect(p.token_embedding, p.dims.vocab, p.dims.d_text, "token_embedding");
    expect(p.pos_w, 2, p.dims.d_pos, "pos_w");
    expect(p.pos_b, 1, p.dims.d_pos, "pos_b");
    expect(p.wq, d, d, "wq");
    expect(p.wk, d, d, "wk");
    expect(p.wv, d, d, "wv");
    expect(p.cand_w, 2, p.dims.d_cand, "cand_w");
    expect(p.cand_b, 1, p.dims.d_cand, "cand_b");
    expect(p.head_w, f, d + p.dims.d_cand, "head_w");
    expect(p.head_b, 1, f, "head_b");
    return p;
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
}

void save_params(const std::string& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << params_to_json(params) << '\n';
}

ModelParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return params_from_json(ss.str());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace fieldswap
