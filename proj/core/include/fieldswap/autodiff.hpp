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

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fieldswap::ad {

/// Dense row-major matrix of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  std::size_t size() const { return data.size(); }
  void zero() { std::fill(data.begin(), data.end(), 0.0); }
  bool operator==(const Matrix&) const = default;
};

/// A trainable tensor as seen by the tape: read-only value plus an optional
/// gradient sink that backward() accumulates into.
struct ParamRef {
  const Matrix* value = nullptr;
  Matrix* grad = nullptr;
};

/// Reverse-mode tape. Each op appends a node holding its forward value and,
/// when recording, a closure that propagates the node's gradient to its
/// inputs. Nodes are identified by index.
class Tape {
 public:
  using Var = int;

  explicit Tape(bool record = true) : record_(record) {}

  Var constant(Matrix m);
  const Matrix& value(Var v) const { return nodes_[v].value; }
  const Matrix& grad(Var v) const { return nodes_[v].grad; }

  /// Rows of `table` selected by `rows` -> [rows.size() x table.cols].
  /// Backward accumulates into the selected rows and records them in
  /// `touched` when non-null.
  Var gather_rows(ParamRef table, std::span<const int> rows, std::vector<int>* touched = nullptr);
  /// x[n x k] * W[k x m] (+ b[1 x m] when b.value is set).
  Var affine(Var x, ParamRef w, ParamRef b);
  Var concat_cols(Var a, Var b);
  /// a[n x k] * b[m x k]^T -> [n x m].
  Var matmul_nt(Var a, Var b);
  /// a[n x k] * b[k x m].
  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var scale(Var a, double s);
  /// Elementwise product with a constant matrix of the same shape.
  Var mul_const(Var a, Matrix m);
  Var softmax_rows(Var a);
  /// Column-wise max over rows -> [1 x cols].
  Var max_rows(Var a);
  /// Logits z[1 x D] against the selected rows of W[F x D] and b[1 x F] -> [1 x fields.size()].
  Var select_heads(Var z, ParamRef w, ParamRef b, std::span<const int> fields);
  /// Sum over entries of weight * BCE(sigmoid(logit), label) -> [1 x 1].
  Var bce_with_logits(Var logits, std::span<const double> labels, std::span<const double> weights);
  /// Sum of [1 x 1] scalars.
  Var sum(std::span<const Var> scalars);

  /// Seeds d(out)/d(out) = 1 and runs every recorded closure in reverse.
  void backward(Var out);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void()> back;
  };

  Var push(Matrix value);
  Matrix& grad_of(Var v);

  bool record_;
  std::vector<Node> nodes_;
};

double sigmoid(double x);

}  // namespace fieldswap::ad
