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
#include <limits>

#include "fieldswap/common.hpp"
#include "fieldswap/importance.hpp"
#include "test_util.hpp"

namespace fieldswap {
namespace {

using testing::make_candidate;
using testing::nb;

// Exhaustive simplex projection: for every support S the equality-constrained
// minimizer is p_i = z_i - tau on S with tau = (sum_S z - 1) / |S|; keep the
// feasible one closest to z.
std::vector<double> brute_force_projection(const std::vector<double>& z) {
  const int n = static_cast<int>(z.size());
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double sum = 0;
    int k = 0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        sum += z[i];
        ++k;
      }
    }
    const double tau = (sum - 1.0) / k;
    std::vector<double> p(n, 0.0);
    bool feasible = true;
    double dist = 0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        p[i] = z[i] - tau;
        feasible = feasible && p[i] >= -1e-15;
      }
      dist += (p[i] - z[i]) * (p[i] - z[i]);
    }
    if (feasible && dist < best_dist) {
      best_dist = dist;
      best = p;
    }
  }
  return best;
}

TEST(Sparsemax, HandExamples) {
  EXPECT_EQ(sparsemax(std::vector<double>{0.3, 0.3}), (std::vector<double>{0.5, 0.5}));
  const auto a = sparsemax(std::vector<double>{1.0, 0.5});
  EXPECT_NEAR(a[0], 0.75, 1e-15);
  EXPECT_NEAR(a[1], 0.25, 1e-15);
  EXPECT_EQ(sparsemax(std::vector<double>{3.0, 0.0, 0.0}), (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_EQ(sparsemax(std::vector<double>{-4.0}), (std::vector<double>{1.0}));
}

TEST(Sparsemax, MatchesBruteForceProjection) {
  Rng rng(11);
  double worst = 0;
  for (int t = 0; t < 300; ++t) {
    std::vector<double> z(1 + rng.below(12));
    for (double& v : z) v = rng.normal() * (t % 3 == 0 ? 0.1 : 2.0);
    const auto got = sparsemax(z);
    const auto want = brute_force_projection(z);
    double sum = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      worst = std::max(worst, std::abs(got[i] - want[i]));
      EXPECT_GE(got[i], 0.0);
      sum += got[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Sparsemax, ShiftInvariant) {
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> z(1 + rng.below(16)), shifted;
    for (double& v : z) v = rng.normal();
    const double c = rng.uniform(-5, 5);
    for (double v : z) shifted.push_back(v + c);
    const auto a = sparsemax(z), b = sparsemax(shifted);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(Cosine, HandValuesAndZeroNorm) {
  EXPECT_NEAR(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{1, 1}), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(cosine_similarity(std::vector<double>{0, 0}, std::vector<double>{1, 1}), 0.0);
  EXPECT_NEAR(cosine_similarity(std::vector<double>{1, 2}, std::vector<double>{-1, -2}), -1.0, 1e-15);
}

TEST(NeighborImportance, SingleNeighborScoresOne) {
  const ModelParams p = init_params(testing::paystub_schema(), 1);
  const NeighborImportance imp = neighbor_importance(make_candidate({nb("Bonus", -0.2, 0, 0, 0)}), p);
  EXPECT_NEAR(imp.raw[0], 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(imp.weights[0], 1.0);
  for (int s = 1; s < kMaxNeighbors; ++s) {
    EXPECT_EQ(imp.raw[s], 0.0);
    EXPECT_EQ(imp.weights[s], 0.0);
  }
}

TEST(NeighborImportance, RangesAndSimplex) {
  const ModelParams p = init_params(testing::paystub_schema(), 2);
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const Candidate c = testing::random_candidate(rng, 1 + t % kMaxNeighbors);
    const NeighborImportance imp = neighbor_importance(c, p);
    double sum = 0;
    for (int s = 0; s < kMaxNeighbors; ++s) {
      EXPECT_GE(imp.raw[s], -1.0 - 1e-12);
      EXPECT_LE(imp.raw[s], 1.0 + 1e-12);
      EXPECT_GE(imp.weights[s], 0.0);
      sum += imp.weights[s];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

NeighborImportance hand_importance(std::vector<double> raw, std::vector<double> weights) {
  raw.resize(kMaxNeighbors, 0.0);
  weights.resize(kMaxNeighbors, 0.0);
  return {raw, weights};
}

TEST(Phrases, ImportantTokenGrowsAlongItsLine) {
  // Slots: Salary (important), $ value row filler, Base; Base and Salary are
  // source tokens 4 and 5 on line 2.
  const Candidate c = make_candidate(
      {nb("Salary", -0.1, 0, 5, 2), nb("Current", 0.0, -0.1, 1, 0), nb("Base", -0.17, 0, 4, 2)});
  const auto phrases = phrases_from_importance(c, hand_importance({0.9, 0.1, 0.5}, {1.0, 0.0, 0.0}));
  ASSERT_EQ(phrases.size(), 1u);
  EXPECT_EQ(phrases[0].text(), "Base Salary");
  EXPECT_EQ(phrases[0].slots, (std::vector<int>{2, 0}));
  EXPECT_EQ(phrases[0].token_indices, (std::vector<int>{4, 5}));
  EXPECT_EQ(phrases[0].line_id, 2);
  EXPECT_NEAR(phrases[0].score, 0.7, 1e-15);
}

TEST(Phrases, BarePunctuationDropped) {
  const Candidate c = make_candidate({nb(":", -0.05, 0, 3, 1), nb("Total", 0.0, -0.2, 0, 0)});
  EXPECT_TRUE(phrases_from_importance(c, hand_importance({0.8, 0.2}, {1.0, 0.0})).empty());
}

TEST(Phrases, PunctuationTrimmedAtEnds) {
  const Candidate c = make_candidate({nb("Date:", -0.05, 0, 4, 1), nb("Pay", -0.1, 0, 3, 1), nb("-", -0.15, 0, 2, 1)});
  const auto phrases = phrases_from_importance(c, hand_importance({0.6, 0.4, 0.9}, {0.7, 0.3, 0.0}));
  ASSERT_EQ(phrases.size(), 1u);
  EXPECT_EQ(phrases[0].text(), "Pay Date");
  EXPECT_NEAR(phrases[0].score, 0.5, 1e-15);  // the trimmed "-" does not count
}

// 5-token document: line 0 = [Net, Pay, Gross], line 1 = [Amount, Due].
// The candidate's neighbors are only "Pay" and "Due", so each is a singleton.
TEST(Phrases, RunRestrictedToNeighbors) {
  const Candidate c = make_candidate({nb("Pay", -0.1, 0, 1, 0), nb("Due", -0.1, 0.05, 4, 1)});
  const auto phrases = phrases_from_importance(c, hand_importance({0.7, 0.6}, {0.6, 0.4}));
  ASSERT_EQ(phrases.size(), 2u);
  EXPECT_EQ(phrases[0].text(), "Pay");
  EXPECT_EQ(phrases[1].text(), "Due");
}

TEST(Phrases, DifferentLineDoesNotJoin) {
  const Candidate c = make_candidate({nb("Net", -0.1, 0, 1, 0), nb("Pay", -0.1, 0.05, 2, 1)});
  const auto phrases = phrases_from_importance(c, hand_importance({0.7, 0.6}, {1.0, 0.0}));
  ASSERT_EQ(phrases.size(), 1u);
  EXPECT_EQ(phrases[0].text(), "Net");
}

TEST(Phrases, SwappedAndPadSlotsNeverJoin) {
  Candidate c = make_candidate({nb("Gross", -0.2, 0, 3, 1), nb("Amount", -0.1, 0, 4, 1)});
  c.neighbors[1].source_token_index.reset();
  const auto phrases = phrases_from_importance(c, hand_importance({0.7, 0.9}, {0.5, 0.5}));
  ASSERT_EQ(phrases.size(), 1u);
  EXPECT_EQ(phrases[0].text(), "Gross");
}

TEST(Phrases, ExcludedTokensBreakRuns) {
  // "Bonus $100.00" where the amount is ground truth of another field and
  // sits between the phrase and a trailing word.
  const Candidate c = make_candidate({nb("Bonus", -0.3, 0, 1, 0), nb("$100.00", -0.15, 0, 2, 0), nb("Extra", -0.05, 0, 3, 0)});
  std::vector<bool> excluded(10, false);
  excluded[2] = true;
  const auto phrases = phrases_from_importance(c, hand_importance({0.8, 0.9, 0.1}, {0.6, 0.4, 0.0}), &excluded);
  ASSERT_EQ(phrases.size(), 1u);
  EXPECT_EQ(phrases[0].text(), "Bonus");
  for (const auto& p : phrases) {
    for (int t : p.token_indices) EXPECT_FALSE(excluded[t]);
  }
}

TEST(Phrases, DuplicateSpansCollapsedAndScoresClamped) {
  const Candidate c = make_candidate({nb("Net", -0.2, 0, 1, 0), nb("Pay", -0.1, 0, 2, 0)});
  const auto phrases = phrases_from_importance(c, hand_importance({1.0, -0.4}, {0.5, 0.5}));
  ASSERT_EQ(phrases.size(), 1u);
  EXPECT_EQ(phrases[0].text(), "Net Pay");
  EXPECT_NEAR(phrases[0].score, kMaxPhraseScore / 2, 1e-15);
}

TEST(Phrases, ModelPhrasesAlwaysContainAnImportantToken) {
  const ModelParams p = init_params(testing::paystub_schema(), 6);
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const Candidate c = testing::random_candidate(rng, 1 + t % kMaxNeighbors);
    const NeighborImportance imp = neighbor_importance(c, p);
    for (const ImportantPhrase& ph : phrases_from_importance(c, imp)) {
      bool any = false;
      for (int s : ph.slots) any = any || imp.weights[s] > 0.0;
      EXPECT_TRUE(any);
      EXPECT_GE(ph.score, 0.0);
      EXPECT_LT(ph.score, 1.0);
      EXPECT_FALSE(ph.text().empty());
    }
  }
}

}  // namespace
}  // namespace fieldswap
