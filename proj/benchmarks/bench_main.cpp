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

#include <benchmark/benchmark.h>

#include <vector>

#include "fieldswap/candidates.hpp"
#include "fieldswap/corpus_gen.hpp"
#include "fieldswap/importance.hpp"
#include "fieldswap/scorer.hpp"
#include "fieldswap/swap.hpp"

namespace fs = fieldswap;

namespace {

struct Fixture {
  fs::CorpusSpec spec = fs::builtin_spec("synth-earnings");
  std::vector<fs::Candidate> positives;
  std::vector<fs::Candidate> all;
  fs::ModelParams params = fs::init_params(spec.schema, 1);

  Fixture() {
    for (const fs::Document& d : fs::generate_corpus(spec, 20)) {
      for (fs::Candidate& c : fs::build_candidates(d, spec.schema)) {
        if (c.label_for) positives.push_back(c);
        all.push_back(std::move(c));
      }
    }
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Encode(benchmark::State& state) {
  const Fixture& f = fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fs::encode_neighborhood(f.all[i++ % f.all.size()], f.params));
  }
}
BENCHMARK(BM_Encode);

void BM_LossAndGrads(benchmark::State& state) {
  const Fixture& f = fixture();
  std::vector<fs::BatchEntry> batch;
  for (int i = 0; i < state.range(0); ++i) {
    const fs::Candidate& c = f.all[i % f.all.size()];
    batch.push_back({&c, f.params.field_index(c.label_for ? *c.label_for : "net_pay"), c.label_for ? 1.0 : 0.0, 1.0});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fs::loss_and_grads(batch, f.params).loss);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossAndGrads)->Arg(16)->Arg(128);

void BM_Sparsemax(benchmark::State& state) {
  fs::Rng rng(3);
  std::vector<double> z(state.range(0));
  for (double& v : z) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(fs::sparsemax(z));
}
BENCHMARK(BM_Sparsemax)->Arg(10)->Arg(64);

void BM_Generate(benchmark::State& state) {
  const Fixture& f = fixture();
  fs::KeyPhraseConfig config;
  for (const fs::FieldSpec& field : f.spec.schema.fields()) {
    auto& list = config.phrases[field.name];
    for (const std::string& p : f.spec.phrase_bank.at(field.name)) list.push_back({p, 0.5});
  }
  const auto pairs = fs::build_pairs(f.spec.schema, fs::Strategy::kTypeToType);
  std::vector<std::vector<double>> imp;
  for (const fs::Candidate& c : f.positives) imp.push_back(fs::neighbor_importance(c, f.params).raw);
  for (auto _ : state) benchmark::DoNotOptimize(fs::generate(f.positives, imp, config, pairs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.positives.size()));
}
BENCHMARK(BM_Generate);

}  // namespace

BENCHMARK_MAIN();
