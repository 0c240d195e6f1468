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

#include "fieldswap/autodiff.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace fieldswap::ad {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tape::Var Tape::push(Matrix value) {
  nodes_.push_back({std::move(value), {}, {}});
  return static_cast<Var>(nodes_.size()) - 1;
}

Matrix& Tape::grad_of(Var v) {
  Node& n = nodes_[v];
  if (n.grad.rows != n.value.rows || n.grad.cols != n.value.cols) n.grad = Matrix(n.value.rows, n.value.cols);
  return n.grad;
}

Tape::Var Tape::constant(Matrix m) { return push(std::move(m)); }

Tape::Var Tape::gather_rows(ParamRef table, std::span<const int> rows, std::vector<int>* touched) {
  const Matrix& t = *table.value;
  Matrix out(static_cast<int>(rows.size()), t.cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(t.row(rows[r]), t.row(rows[r]) + t.cols, out.row(static_cast<int>(r)));
  }
  const Var v = push(std::move(out));
  if (record_ && table.grad) {
    std::vector<int> idx(rows.begin(), rows.end());
    nodes_[v].back = [this, v, table, idx = std::move(idx), touched]() {
      const Matrix& g = nodes_[v].grad;
      for (std::size_t r = 0; r < idx.size(); ++r) {
        double* dst = table.grad->row(idx[r]);
        const double* src = g.row(static_cast<int>(r));
        for (int c = 0; c < g.cols; ++c) dst[c] += src[c];
        if (touched) touched->push_back(idx[r]);
      }
    };
  }
  return v;
}

Tape::Var Tape::affine(Var x, ParamRef w, ParamRef b) {
  const Matrix& xv = nodes_[x].value;
  const Matrix& wv = *w.value;
  if (xv.cols != wv.rows) throw std::invalid_argument("affine: shape mismatch");
  Matrix out(xv.rows, wv.cols);
  for (int i = 0; i < xv.rows; ++i) {
    double* o = out.row(i);
    if (b.value) std::copy(b.value->data.begin(), b.value->data.end(), o);
    const double* xr = xv.row(i);
    for (int k = 0; k < xv.cols; ++k) {
      const double a = xr[k];
      const double* wr = wv.row(k);
      for (int j = 0; j < wv.cols; ++j) o[j] += a * wr[j];
    }
  }
  const Var v = push(std::move(out));
  if (record_) {
    nodes_[v].back = [this, v, x, w, b]() {
      const Matrix& g = nodes_[v].grad;
      const Matrix& xv = nodes_[x].value;
      const Matrix& wv = *w.value;
      Matrix& gx = grad_of(x);
      for (int i = 0; i < g.rows; ++i) {
        const double* gr = g.row(i);
        const double* xr = xv.row(i);
        double* gxr = gx.row(i);
        for (int k = 0; k < wv.rows; ++k) {
          const double* wr = wv.row(k);
          double acc = 0.0;
          for (int j = 0; j < wv.cols; ++j) acc += gr[j] * wr[j];
          gxr[k] += acc;
          if (w.grad) {
            double* gw = w.grad->row(k);
            const double a = xr[k];
            for (int j = 0; j < wv.cols; ++j) gw[j] += a * gr[j];
          }
        }
        if (b.grad) {
          for (int j = 0; j < g.cols; ++j) b.grad->data[j] += gr[j];
        }
      }
    };
  }
  return v;
}

Tape::Var Tape::concat_cols(Var a, Var b) {
  const Matrix& av = nodes_[a].value;
  const Matrix& bv = nodes_[b].value;
  if (av.rows != bv.rows) throw std::invalid_argument("concat_cols: row mismatch");
  Matrix out(av.rows, av.cols + bv.cols);
  for (int i = 0; i < av.rows; ++i) {
    std::copy(av.row(i), av.row(i) + av.cols, out.row(i));
    std::copy(bv.row(i), bv.row(i) + bv.cols, out.row(i) + av.cols);
  }
  const Var v = push(std::move(out));
  if (record_) {
    nodes_[v].back = [this, v, a, b]() {
      const Matrix& g = nodes_[v].grad;
      Matrix& ga = grad_of(a);
      Matrix& gb = grad_of(b);
      for (int i = 0; i < g.rows; ++i) {
        for (int c = 0; c < ga.cols; ++c) ga(i, c) += g(i, c);
        for (int c = 0; c < gb.cols; ++c) gb(i, c) += g(i, ga.cols + c);
      }
    };
  }
  return v;
}

Tape::Var Tape::matmul_nt(Var a, Var b) {
  const Matrix& av = nodes_[a].value;
  const Matrix& bv = nodes_[b].value;
  if (av.cols != bv.cols) throw std::invalid_argument("matmul_nt: shape mismatch");
  Matrix out(av.rows, bv.rows);
  for (int i = 0; i < av.rows; ++i) {
    for (int j = 0; j < bv.rows; ++j) {
      double acc = 0.0;
      const double* ar = av.row(i);
      const double* br = bv.row(j);
      for (int k = 0; k < av.cols; ++k) acc += ar[k] * br[k];
      out(i, j) = acc;
    }
  }
  const Var v = push(std::move(out));
  if (record_) {
    nodes_[v].back = [this, v, a, b]() {
      const Matrix& g = nodes_[v].grad;
      const Matrix& av = nodes_[a].value;
      const Matrix& bv = nodes_[b].value;
      Matrix& ga = grad_of(a);
      Matrix& gb = grad_of(b);
      for (int i = 0; i < g.rows; ++i) {
        for (int j = 0; j < g.cols; ++j) {
          const double gij = g(i, j);
          if (gij == 0.0) continue;
          for (int k = 0; k < av.cols; ++k) {
            ga(i, k) += gij * bv(j, k);
            gb(j, k) += gij * av(i, k);
          }
        }
      }
    };
  }
  return v;
}

Tape::Var Tape::matmul(Var a, Var b) {
  const Matrix& av = nodes_[a].value;
  const Matrix& bv = nodes_[b].value;
  if (av.cols != bv.rows) throw std::invalid_argument("matmul: shape mismatch");
  Matrix out(av.rows, bv.cols);
  for (int i = 0; i < av.rows; ++i) {
    double* o = out.row(i);
    for (int k = 0; k < av.cols; ++k) {
      const double s = av(i, k);
      const double* br = bv.row(k);
      for (int j = 0; j < bv.cols; ++j) o[j] += s * br[j];
    }
  }
  const Var v = push(std::move(out));
  if (record_) {
    nodes_[v].back = [this, v, a, b]() {
      const Matrix& g = nodes_[v].grad;
      const Matrix& av = nodes_[a].value;
      const Matrix& bv = nodes_[b].value;
      Matrix& ga = grad_of(a);
      Matrix& gb = grad_of(b);
      for (int i = 0; i < g.rows; ++i) {
        const double* gr = g.row(i);
        for (int k = 0; k < av.cols; ++k) {
          const double* br = bv.row(k);
          double acc = 0.0;
          for (int j = 0; j < g.cols; ++j) acc += gr[j] * br[j];
          ga(i, k) += acc;
          const double s = av(i, k);
          double* gbr = gb.row(k);
          for (int j = 0; j < g.cols; ++j) gbr[j] += s * gr[j];
        }
      }
    };
  }
  return v;
}

Tape::Var Tape::add(Var a, Var b) {
  const Matrix& av = nodes_[a].value;
  const Matrix& bv = nodes_[b].value;
  if (av.rows != bv.rows || av.cols != bv.cols) throw std::invalid_argument("add: shape mismatch");
  Matrix out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += bv.data[i];
  const Var v = push(std::move(out));
  if (record_) {
    nodes_[v].back = [this, v, a, b]() {
      const Matrix& g = nodes_[v].grad;
      Matrix& ga = grad_of(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
      Matrix& gb = grad_of(b);
      for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] += g.data[i];
    };
  }
  return v;
}

Tape::Var Tape::scale(Var a, double s) {
  Matrix out = nodes_[a].value;
  for (double& x : out.data) x *= s;
  const Var v = push(std::move(out));
  if (record_) {
    nodes_[v].back = [this, v, a, s]() {
      const Matrix& g = nodes_[v].grad;
      Matrix& ga = grad_of(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += s * g.data[i];
    };
  }
  return v;
}

Tape::Var Tape::mul_const(Var a, Matrix m) {
  const Matrix& av = nodes_[a].value;
  if (av.rows != m.rows || av.cols != m.cols) throw std::invalid_argument("mul_const: shape mismatch");
  Matrix out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= m.data[i];
  const Var v = push(std::move(out));
  if (record_) {
    nodes_[v].back = [this, v, a, m = std::move(m)]() {
      const Matrix& g = nodes_[v].grad;
      Matrix& ga = grad_of(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += m.data[i] * g.data[i];
    };
  }
  return v;
}

Tape::Var Tape::softmax_rows(Var a) {
  Matrix out = nodes_[a].value;
  for (int i = 0; i < out.rows; ++i) {
    double* r = out.row(i);
    double mx = r[0];
    for (int j = 1; j < out.cols; ++j) mx = std::max(mx, r[j]);
    double z = 0.0;
    for (int j = 0; j < out.cols; ++j) {
      r[j] = std::exp(r[j] - mx);
      z += r[j];
    }
    for (int j = 0; j < out.cols; ++j) r[j] /= z;
  }
  const Var v = push(std::move(out));
  if (record_) {
    nodes_[v].back = [this, v, a]() {
      const Matrix& g = nodes_[v].grad;
      const Matrix& y = nodes_[v].value;
      Matrix& ga = grad_of(a);
      for (int i = 0; i < y.rows; ++i) {
        double dot = 0.0;
        for (int j = 0; j < y.cols; ++j) dot += g(i, j) * y(i, j);
        for (int j = 0; j < y.cols; ++j) ga(i, j) += y(i, j) * (g(i, j) - dot);
      }
    };
  }
  return v;
}

Tape::Var Tape::max_rows(Var a) {
  const Matrix& av = nodes_[a].value;
  if (av.rows == 0) throw std::invalid_argument("max_rows: empty input");
  Matrix out(1, av.cols);
  std::vector<int> arg(static_cast<std::size_t>(av.cols), 0);
  for (int c = 0; c < av.cols; ++c) {
    double best = av(0, c);
    for (int r = 1; r < av.rows; ++r) {
      if (av(r, c) > best) {
        best = av(r, c);
        arg[c] = r;
      }
    }
    out(0, c) = best;
  }
  const Var v = push(std::move(out));
  if (record_) {
    nodes_[v].back = [this, v, a, arg = std::move(arg)]() {
      const Matrix& g = nodes_[v].grad;
      Matrix& ga = grad_of(a);
      for (int c = 0; c < g.cols; ++c) ga(arg[c], c) += g(0, c);
    };
  }
  return v;
}

Tape::Var Tape::select_heads(Var z, ParamRef w, ParamRef b, std::span<const int> fields) {
  const Matrix& zv = nodes_[z].value;
  const Matrix& wv = *w.value;
  if (zv.rows != 1 || zv.cols != wv.cols) throw std::invalid_argument("select_heads: shape mismatch");
  Matrix out(1, static_cast<int>(fields.size()));
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const double* wr = wv.row(fields[f]);
    double acc = b.value->data[fields[f]];
    for (int k = 0; k < zv.cols; ++k) acc += wr[k] * zv(0, k);
    out(0, static_cast<int>(f)) = acc;
  }
  const Var v = push(std::move(out));
  if (record_) {
    std::vector<int> idx(fields.begin(), fields.end());
    nodes_[v].back = [this, v, z, w, b, idx = std::move(idx)]() {
      const Matrix& g = nodes_[v].grad;
      const Matrix& zv = nodes_[z].value;
      const Matrix& wv = *w.value;
      Matrix& gz = grad_of(z);
      for (std::size_t f = 0; f < idx.size(); ++f) {
        const double gf = g(0, static_cast<int>(f));
        const double* wr = wv.row(idx[f]);
        for (int k = 0; k < zv.cols; ++k) gz(0, k) += gf * wr[k];
        if (w.grad) {
          double* gw = w.grad->row(idx[f]);
          for (int k = 0; k < zv.cols; ++k) gw[k] += gf * zv(0, k);
        }
        if (b.grad) b.grad->data[idx[f]] += gf;
      }
    };
  }
  return v;
}

Tape::Var Tape::bce_with_logits(Var logits, std::span<const double> labels, std::span<const double> weights) {
  const Matrix& lv = nodes_[logits].value;
  if (lv.rows != 1 || static_cast<std::size_t>(lv.cols) != labels.size() || labels.size() != weights.size()) {
    throw std::invalid_argument("bce_with_logits: shape mismatch");
  }
  Matrix out(1, 1);
  for (int j = 0; j < lv.cols; ++j) {
    const double l = lv(0, j);
    const double y = labels[j];
    out(0, 0) += weights[j] * (std::max(l, 0.0) - l * y + std::log1p(std::exp(-std::abs(l))));
  }
  const Var v = push(std::move(out));
  if (record_) {
    std::vector<double> ys(labels.begin(), labels.end());
    std::vector<double> ws(weights.begin(), weights.end());
    nodes_[v].back = [this, v, logits, ys = std::move(ys), ws = std::move(ws)]() {
      const double g = nodes_[v].grad(0, 0);
      const Matrix& lv = nodes_[logits].value;
      Matrix& gl = grad_of(logits);
      for (int j = 0; j < lv.cols; ++j) gl(0, j) += g * ws[j] * (sigmoid(lv(0, j)) - ys[j]);
    };
  }
  return v;
}

Tape::Var Tape::sum(std::span<const Var> scalars) {
  Matrix out(1, 1);
  for (Var s : scalars) out(0, 0) += nodes_[s].value(0, 0);
  const Var v = push(std::move(out));
  if (record_) {
    std::vector<Var> in(scalars.begin(), scalars.end());
    nodes_[v].back = [this, v, in = std::move(in)]() {
      const double g = nodes_[v].grad(0, 0);
      for (Var s : in) grad_of(s)(0, 0) += g;
    };
  }
  return v;
}

void Tape::backward(Var out) {
  if (!record_) throw std::logic_error("backward on a non-recording tape");
  grad_of(out)(0, 0) = 1.0;
  for (Var v = out; v >= 0; --v) {
    Node& n = nodes_[v];
    if (n.back && n.grad.rows == n.value.rows && n.grad.cols == n.value.cols && !n.grad.data.empty()) n.back();
  }
}

}  // namespace fieldswap::ad
