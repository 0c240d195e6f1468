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


#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>

#include "fieldswap/autodiff.hpp"
#include "fieldswap/common.hpp"

namespace fieldswap::ad {
namespace {

Matrix random_matrix(Rng& rng, int r, int c, double scale = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data) v = scale * rng.normal();
  return m;
}

using Graph = std::function<Tape::Var(Tape&, const std::vector<Tape::Var>&, const std::vector<ParamRef>&)>;

// Reduces any matrix to a scalar r^T M c with fixed random weights so every
// output coordinate reaches the loss.
struct Reducer {
  std::vector<double> pool;
  Tape::Var operator()(Tape& t, Tape::Var m) const {
    const int rows = t.value(m).rows, cols = t.value(m).cols;
    Matrix r(1, rows), c(cols, 1);
    for (int i = 0; i < rows; ++i) r.data[i] = pool[i];
    for (int j = 0; j < cols; ++j) c.data[j] = pool[16 + j];
    return t.matmul(t.matmul(t.constant(std::move(r)), m), t.constant(std::move(c)));
  }
};

// Compares the tape gradient of every input coordinate with central finite
// differences; returns the worst relative error.
double check(std::vector<Matrix> inputs, const Graph& g, double h = 1e-5) {
  auto run = [&](std::vector<Matrix>& in, std::vector<Matrix>* grads) {
    Tape t(grads != nullptr);
    std::vector<Tape::Var> vars;
    std::vector<ParamRef> refs;
    for (std::size_t i = 0; i < in.size(); ++i) {
      std::vector<int> all(in[i].rows);
      std::iota(all.begin(), all.end(), 0);
      ParamRef ref{&in[i], grads ? &(*grads)[i] : nullptr};
      refs.push_back(ref);
      vars.push_back(t.gather_rows(ref, all));
    }
    const Tape::Var out = g(t, vars, refs);
    if (grads) t.backward(out);
    return t.value(out)(0, 0);
  };
  std::vector<Matrix> grads;
  for (const Matrix& m : inputs) grads.emplace_back(m.rows, m.cols);
  run(inputs, &grads);
  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t k = 0; k < inputs[i].data.size(); ++k) {
      const double orig = inputs[i].data[k];
      inputs[i].data[k] = orig + h;
      const double up = run(inputs, nullptr);
      inputs[i].data[k] = orig - h;
      const double down = run(inputs, nullptr);
      inputs[i].data[k] = orig;
      const double numeric = (up - down) / (2 * h);
      const double analytic = grads[i].data[k];
      worst = std::max(worst, std::abs(numeric - analytic) / std::max(1.0, std::abs(numeric) + std::abs(analytic)));
    }
  }
  return worst;
}

class OpGradient : public ::testing::Test {
 protected:
  Rng rng{2024};
  Reducer reduce() {
    return Reducer{random_matrix(rng, 1, 32).data};
  }
};

TEST_F(OpGradient, AffineWithAndWithoutBias) {
  const Reducer r = reduce();
  EXPECT_LT(check({random_matrix(rng, 3, 4), random_matrix(rng, 4, 2), random_matrix(rng, 1, 2)},
                  [&](Tape& t, const auto& v, const auto& p) { return r(t, t.affine(v[0], p[1], p[2])); }),
            1e-8);
  EXPECT_LT(check({random_matrix(rng, 3, 4), random_matrix(rng, 4, 2)},
                  [&](Tape& t, const auto& v, const auto& p) { return r(t, t.affine(v[0], p[1], {})); }),
            1e-8);
}

TEST_F(OpGradient, MatmulsAndConcat) {
  const Reducer r = reduce();
  EXPECT_LT(check({random_matrix(rng, 3, 4), random_matrix(rng, 5, 4)},
                  [&](Tape& t, const auto& v, const auto&) { return r(t, t.matmul_nt(v[0], v[1])); }),
            1e-8);
  EXPECT_LT(check({random_matrix(rng, 3, 4), random_matrix(rng, 4, 2)},
                  [&](Tape& t, const auto& v, const auto&) { return r(t, t.matmul(v[0], v[1])); }),
            1e-8);
  EXPECT_LT(check({random_matrix(rng, 3, 2), random_matrix(rng, 3, 3)},
                  [&](Tape& t, const auto& v, const auto&) { return r(t, t.concat_cols(v[0], v[1])); }),
            1e-8);
}

TEST_F(OpGradient, ElementwiseOps) {
  const Reducer r = reduce();
  const Matrix mask = random_matrix(rng, 2, 3);
  EXPECT_LT(check({random_matrix(rng, 2, 3), random_matrix(rng, 2, 3)},
                  [&](Tape& t, const auto& v, const auto&) {
                    return r(t, t.mul_const(t.scale(t.add(v[0], v[1]), -0.7), mask));
                  }),
            1e-8);
}

TEST_F(OpGradient, SoftmaxAndMax) {
  const Reducer r = reduce();
  EXPECT_LT(check({random_matrix(rng, 4, 5, 2.0)},
                  [&](Tape& t, const auto& v, const auto&) { return r(t, t.softmax_rows(v[0])); }),
            1e-8);
  EXPECT_LT(check({random_matrix(rng, 4, 5)}, [&](Tape& t, const auto& v, const auto&) { return r(t, t.max_rows(v[0])); }),
            1e-8);
}

TEST_F(OpGradient, GatherWithRepeatedRows) {
  const Reducer r = reduce();
  EXPECT_LT(check({random_matrix(rng, 5, 3)},
                  [&](Tape& t, const auto&, const auto& p) {
                    const int rows[] = {4, 1, 4, 0};
                    return r(t, t.gather_rows(p[0], rows));
                  }),
            1e-8);
}

TEST_F(OpGradient, HeadsAndBce) {
  const std::vector<double> labels = {1.0, 0.0, 1.0};
  const std::vector<double> weights = {0.4, 1.0, 2.0};
  EXPECT_LT(check({random_matrix(rng, 1, 4), random_matrix(rng, 5, 4), random_matrix(rng, 1, 5)},
                  [&](Tape& t, const auto& v, const auto& p) {
                    const int heads[] = {3, 0, 3};
                    const Tape::Var logits = t.select_heads(v[0], p[1], p[2], heads);
                    const Tape::Var a = t.bce_with_logits(logits, labels, weights);
                    const Tape::Var b = t.bce_with_logits(t.scale(logits, 0.5), labels, weights);
                    const Tape::Var parts[] = {a, b};
                    return t.sum(parts);
                  }),
            1e-8);
}

TEST(Tape, BceMatchesClosedFormAndStaysFinite) {
  Tape t(false);
  Matrix z(1, 3);
  z.data = {0.3, -800.0, 800.0};
  const std::vector<double> y = {1.0, 1.0, 0.0};
  const std::vector<double> w = {1.0, 1.0, 1.0};
  const double l = t.value(t.bce_with_logits(t.constant(z), y, w))(0, 0);
  const double expect = std::log1p(std::exp(-0.3)) + 800.0 + 800.0;
  EXPECT_NEAR(l, expect, 1e-9);
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_TRUE(std::isfinite(sigmoid(-1000.0)));
}

TEST(Tape, SoftmaxRowsSumToOne) {
  Tape t(false);
  Rng rng(5);
  const Matrix& s = t.value(t.softmax_rows(t.constant(random_matrix(rng, 3, 6, 50.0))));
  for (int r = 0; r < 3; ++r) {
    double sum = 0;
    for (int c = 0; c < 6; ++c) sum += s(r, c);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Tape, GatherRecordsTouchedRows) {
  Rng rng(1);
  Matrix table = random_matrix(rng, 6, 2);
  Matrix grad(6, 2);
  Tape t(true);
  std::vector<int> touched;
  const int rows[] = {5, 2, 5};
  const Tape::Var g = t.gather_rows(ParamRef{&table, &grad}, rows, &touched);
  Matrix r(1, 3);
  r.data = {1, 1, 1};
  Matrix one(2, 1);
  one.data = {1, 1};
  const Tape::Var s = t.matmul(t.constant(r), t.matmul(g, t.constant(one)));
  t.backward(s);
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  EXPECT_EQ(touched, (std::vector<int>{2, 5}));
  EXPECT_DOUBLE_EQ(grad(5, 0), 2.0);
  EXPECT_DOUBLE_EQ(grad(2, 1), 1.0);
  EXPECT_DOUBLE_EQ(grad(0, 0), 0.0);
}

}  // namespace
}  // namespace fieldswap::ad
