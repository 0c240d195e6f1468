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

// Small builders shared by the unit suites.

#pragma once

#include <string>
#include <vector>

#include "fieldswap/doc_model.hpp"
#include "fieldswap/scorer.hpp"

namespace fieldswap::testing {

inline Neighbor nb(std::string text, double dx, double dy, int token, int line) {
  return Neighbor{std::move(text), {dx, dy}, token, line};
}

/// Candidate with the given real neighbors followed by PAD slots.
inline Candidate make_candidate(std::vector<Neighbor> real, BaseType type = BaseType::kAmount,
                                std::optional<std::string> label = std::nullopt) {
  Candidate c;
  c.doc_id = "doc";
  c.base_type = type;
  c.value_range = {100, 101};
  c.position = {0.6, 0.4};
  c.neighbors = std::move(real);
  while (c.neighbors.size() < static_cast<std::size_t>(kMaxNeighbors)) c.neighbors.push_back(Neighbor::pad());
  c.label_for = std::move(label);
  return c;
}

inline FieldSchema paystub_schema() {
  return FieldSchema({{"current.salary", BaseType::kAmount, true},
                      {"current.overtime", BaseType::kAmount, true},
                      {"current.bonus", BaseType::kAmount, true},
                      {"pay_date", BaseType::kDate, true}});
}

inline ModelDims tiny_dims() { return ModelDims{64, 3, 2, 2}; }

/// Deterministic pseudo-random neighborhood with `n_real` real slots.
inline Candidate random_candidate(Rng& rng, int n_real, BaseType type = BaseType::kAmount) {
  static const std::vector<std::string> words = {"Base", "Salary", "Overtime", "Bonus", "Net", "Pay",
                                                 "Date", "Total", "$1.00", "Period", "Due", ":"};
  std::vector<Neighbor> real;
  for (int i = 0; i < n_real; ++i) {
    real.push_back(nb(rng.pick(words), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), i, static_cast<int>(rng.below(3))));
  }
  Candidate c = make_candidate(std::move(real), type);
  c.position = {rng.uniform(), rng.uniform()};
  return c;
}

}  // namespace fieldswap::testing
