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

// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fieldswap/common.hpp"
#include "fieldswap/corpus_gen.hpp"
#include "fieldswap/eval.hpp"
#include "fieldswap/importance.hpp"
#include "fieldswap/keyphrase.hpp"
#include "fieldswap/swap.hpp"
#include "fieldswap/trainer.hpp"

namespace fs = fieldswap;
namespace stdfs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double cpu_seconds() { return double(std::clock()) / CLOCKS_PER_SEC; }

class Stopwatch {
 public:
  double wall() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }
  double cpu() const { return cpu_seconds() - cpu_start_; }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  double cpu_start_ = cpu_seconds();
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Sparsemax against an exhaustive simplex projection
// ---------------------------------------------------------------------------

std::vector<double> exhaustive_projection(const std::vector<double>& z) {
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
    bool feasible = true;
    double dist = 0;
    for (int i = 0; i < n && feasible; ++i) {
      const double p = (mask >> i & 1) ? z[i] - tau : 0.0;
      feasible = p >= -1e-15;
      dist += (p - z[i]) * (p - z[i]);
    }
    if (feasible && dist < best_dist) {
      best_dist = dist;
      best.assign(n, 0.0);
      for (int i = 0; i < n; ++i) best[i] = (mask >> i & 1) ? z[i] - tau : 0.0;
    }
  }
  return best;
}

Outcome criterion_sparsemax() {
  Stopwatch sw;
  fs::Rng rng(1);
  double worst = 0, worst_sum = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> z(1 + rng.below(16));
    const double scale = std::exp(rng.uniform(-3, 2));
    for (double& v : z) v = scale * rng.normal();
    const auto got = fs::sparsemax(z);
    const auto want = exhaustive_projection(z);
    double sum = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      worst = std::max(worst, std::abs(got[i] - want[i]));
      if (got[i] < 0) worst = std::max(worst, -got[i]);
      sum += got[i];
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  const double secs = sw.wall();
  return {worst <= 1e-8 && worst_sum <= 1e-9 && secs < 5.0,
          fmt("1000 vectors, max |diff| %.2e (<=1e-8), max |sum-1| %.2e (<=1e-9), %.2f s (<5)", worst, worst_sum, secs)};
}

// ---------------------------------------------------------------------------
// 2. Gradients against central finite differences
// ---------------------------------------------------------------------------

Outcome criterion_gradients() {
  Stopwatch sw;
  fs::Rng rng(2);
  const std::vector<std::string> vocab = {"Base", "Salary", "Overtime", "Bonus", "Net", "Pay", "Date", "Total", "Due", "$1.00", ":"};
  int configs = 0;
  long coords = 0;
  double worst = 0;
  std::string where;
  for (; configs < 120; ++configs) {
    const int nf = 1 + static_cast<int>(rng.below(4));
    std::vector<fs::FieldSpec> fields;
    for (int f = 0; f < nf; ++f) fields.push_back({"f" + std::to_string(f), fs::BaseType::kAmount, true});
    const fs::FieldSchema schema(fields);
    const fs::ModelDims dims{16 + static_cast<int>(rng.below(16)), 1 + static_cast<int>(rng.below(4)),
                             1 + static_cast<int>(rng.below(3)), 1 + static_cast<int>(rng.below(3))};
    fs::ModelParams p = fs::init_params(schema, rng.next(), dims);
    const int batch_n = 1 + static_cast<int>(rng.below(6));
    std::vector<fs::Candidate> cands;
    for (int i = 0; i < batch_n; ++i) {
      fs::Candidate c;
      c.base_type = fs::BaseType::kAmount;
      c.position = {rng.uniform(), rng.uniform()};
      const int real = 1 + static_cast<int>(rng.below(fs::kMaxNeighbors));
      for (int s = 0; s < fs::kMaxNeighbors; ++s) {
        c.neighbors.push_back(s < real ? fs::Neighbor{rng.pick(vocab), {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)}, s, 0}
                                       : fs::Neighbor::pad());
      }
      rng.shuffle(c.neighbors);
      cands.push_back(std::move(c));
    }
    std::vector<fs::BatchEntry> batch;
    for (int i = 0; i < batch_n; ++i) {
      const int heads = 1 + static_cast<int>(rng.below(nf));
      for (int h = 0; h < heads; ++h) {
        batch.push_back({&cands[i], static_cast<int>(rng.below(nf)), double(rng.below(2)), rng.uniform(0.05, 1.0)});
      }
    }
    const fs::LossAndGrad lg = fs::loss_and_grads(batch, p);
    std::vector<const fs::ad::Matrix*> grads;
    lg.grad.for_each_tensor([&](std::string_view, const fs::ad::Matrix& m) { grads.push_back(&m); });
    std::size_t t = 0;
    const double h = 1e-4;
    fs::ModelParams probe = p;
    probe.for_each_tensor([&](std::string_view name, fs::ad::Matrix& m) {
      const fs::ad::Matrix& g = *grads[t++];
      for (std::size_t k = 0; k < m.data.size(); ++k) {
        const double orig = m.data[k];
        m.data[k] = orig + h;
        const double up = fs::loss_and_grads(batch, probe).loss;
        m.data[k] = orig - h;
        const double down = fs::loss_and_grads(batch, probe).loss;
        m.data[k] = orig;
        const double numeric = (up - down) / (2 * h);
        const double scale = std::max(std::abs(numeric), std::abs(g.data[k]));
        // Coordinates whose gradient vanishes (untouched embedding rows)
        // compare absolutely; finite differences there are pure rounding.
        const double err = scale < 1e-7 ? std::abs(numeric - g.data[k]) : std::abs(numeric - g.data[k]) / scale;
        ++coords;
        if (err > worst) {
          worst = err;
          where = fmt("config %d %s[%zu]: analytic %.9g numeric %.9g", configs, std::string(name).c_str(), k, g.data[k], numeric);
        }
      }
    });
  }
  const double secs = sw.wall();
  return {worst <= 1e-4 && secs < 60.0,
          fmt("%d configurations, %ld coordinates, worst relative error %.2e (<=1e-4), %.1f s (<60)", configs, coords, worst,
              secs) +
              (worst > 1e-4 ? "; " + where : "")};
}

// ---------------------------------------------------------------------------
// 3. Aggregation algebra
// ---------------------------------------------------------------------------

Outcome criterion_aggregation() {
  fs::Rng rng(3);
  bool ok = fs::aggregate_importance(std::vector<double>{0.5, 0.5}) == 0.75;
  std::string why = ok ? "" : "{0.5,0.5} != 0.75";
  int checks = 0;
  for (int t = 0; t < 2000; ++t) {
    const double s = rng.uniform() * fs::kMaxPhraseScore;
    if (std::abs(fs::aggregate_importance(std::vector<double>{s}) - s) > 1e-15) {
      ok = false;
      why = "single-occurrence identity";
    }
    std::vector<double> v;
    double prev = 0;
    for (int i = 0; i < 1 + t % 50; ++i) {
      v.push_back(rng.uniform() * fs::kMaxPhraseScore);
      const double a = fs::aggregate_importance(v);
      ++checks;
      if (!(a >= prev && a >= 0.0 && a < 1.0)) {
        ok = false;
        why = "range/monotonicity";
      }
      prev = a;
    }
  }
  const std::vector<double> saturated(5000, fs::kMaxPhraseScore);
  if (!(fs::aggregate_importance(saturated) < 1.0)) {
    ok = false;
    why = "saturation reached 1";
  }
  fs::PhraseAccumulator acc;
  acc.add("x", 0.5);
  acc.add("X", 0.5);
  const auto ranked = acc.ranked(1, 0.0);
  if (ranked.size() != 1 || std::abs(ranked[0].importance - 0.75) > 1e-15) {
    ok = false;
    why = "accumulator disagrees with aggregate";
  }
  return {ok, fmt("{0.5,0.5}->0.75 exact, identity, range [0,1), monotone over %d prefixes", checks) +
                  (ok ? "" : "; failed: " + why)};
}

// ---------------------------------------------------------------------------
// 4. Key-phrase recovery
// ---------------------------------------------------------------------------

bool related(const std::string& a, const std::string& b) {
  const std::string x = fs::phrase_key(a), y = fs::phrase_key(b);
  return x.find(y) != std::string::npos || y.find(x) != std::string::npos;
}

Outcome criterion_recovery(const fs::ModelParams& pretrained, std::string& log) {
  const fs::InferOptions opts{3, 0.2};
  const fs::CorpusSpec earn = fs::builtin_spec("synth-earnings");
  const auto docs = fs::generate_corpus(earn, 50);
  const fs::KeyPhraseConfig config = fs::infer_config(docs, earn.schema, pretrained, opts);
  std::set<std::string> present;
  for (const auto& d : docs) {
    for (const auto& s : d.annotations) present.insert(s.field);
  }
  int fields = 0, recovered = 0;
  std::string misses;
  for (const fs::FieldSpec& f : earn.schema.fields()) {
    if (!f.expects_key_phrase || !earn.phrase_bank.count(f.name) || !present.count(f.name)) continue;
    ++fields;
    bool hit = false;
    for (const fs::RankedPhrase& p : config.phrases.at(f.name)) {
      for (const std::string& planted : earn.phrase_bank.at(f.name)) hit = hit || related(p.text, planted);
    }
    recovered += hit;
    if (!hit) misses += " " + f.name;
  }

  const fs::CorpusSpec noph = fs::builtin_spec("synth-nophrase");
  const auto ndocs = fs::generate_corpus(noph, 50);
  const fs::KeyPhraseConfig nconfig = fs::infer_config(ndocs, noph.schema, pretrained, opts);
  int nofields = 0, silent = 0;
  for (const fs::FieldSpec& f : noph.schema.fields()) {
    if (f.expects_key_phrase) continue;
    ++nofields;
    silent += nconfig.phrases.at(f.name).empty();
  }
  log += "synth-earnings inferred phrases:\n" + fs::config_to_json(config) + "\nsynth-nophrase inferred phrases:\n" +
         fs::config_to_json(nconfig) + "\n";
  const double r1 = double(recovered) / fields, r2 = double(silent) / nofields;
  return {r1 >= 0.8 && r2 >= 0.7, fmt("earnings %d/%d phrase fields recovered (%.0f%%, >=80%%); nophrase %d/%d silent (%.0f%%, >=70%%)",
                                      recovered, fields, 100 * r1, silent, nofields, 100 * r2) +
                                      (misses.empty() ? "" : "; missed:" + misses)};
}

// ---------------------------------------------------------------------------
// 5. Swap rules
// ---------------------------------------------------------------------------

fs::Neighbor nb(std::string text, double dx, double dy, int token, int line) {
  return fs::Neighbor{std::move(text), {dx, dy}, token, line};
}

fs::Candidate candidate_with(std::vector<fs::Neighbor> real, std::optional<std::string> label) {
  fs::Candidate c;
  c.doc_id = "d";
  c.base_type = fs::BaseType::kAmount;
  c.value_range = {50, 51};
  c.position = {0.6, 0.4};
  c.neighbors = std::move(real);
  while (c.neighbors.size() < static_cast<std::size_t>(fs::kMaxNeighbors)) c.neighbors.push_back(fs::Neighbor::pad());
  c.label_for = std::move(label);
  return c;
}

fs::KeyPhraseConfig config_with(const fs::FieldSchema& schema, const std::map<std::string, std::vector<std::string>>& lists) {
  fs::KeyPhraseConfig c;
  for (const std::string& f : schema.names()) c.phrases[f] = {};
  for (const auto& [f, l] : lists) {
    for (std::size_t i = 0; i < l.size(); ++i) c.phrases[f].push_back({l[i], 0.9 - 0.1 * double(i)});
  }
  return c;
}

Outcome criterion_swap_rules() {
  std::vector<std::string> failures;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  };
  const fs::FieldSchema schema({{"current.salary", fs::BaseType::kAmount, true},
                                {"current.overtime", fs::BaseType::kAmount, true},
                                {"current.bonus", fs::BaseType::kAmount, true}});
  const std::vector<double> flat(fs::kMaxNeighbors, 0.1);

  // Two-token source phrase onto a one-token target: Base Salary -> Overtime.
  {
    const fs::Candidate src = candidate_with(
        {nb("Base", -0.15, 0, 10, 3), nb("Salary", -0.08, 0, 11, 3), nb("Current", 0, -0.07, 5, 1)}, "current.salary");
    const auto config = config_with(schema, {{"current.salary", {"Base Salary", "Base"}}, {"current.overtime", {"Overtime"}}});
    const std::vector<fs::FieldPair> pairs = {{"current.salary", "current.overtime"}};
    const std::vector<std::vector<double>> imp = {flat};
    const auto out = fs::generate(std::span(&src, 1), imp, config, pairs);
    fs::Candidate want = src;
    want.label_for = "current.overtime";
    want.neighbors[0] = fs::Neighbor{"Overtime", {-0.15, 0}, std::nullopt, 3};
    want.neighbors[1] = fs::Neighbor::pad();
    expect(out.size() == 1 && fs::candidate_to_json_line(out[0].candidate) == fs::candidate_to_json_line(want),
           "Base Salary -> Overtime swap");
  }
  // Equal length.
  {
    const fs::Candidate c = candidate_with({nb("Amount", -0.2, 0, 3, 1), nb("Due", -0.1, 0, 4, 1), nb("Date", 0, -0.1, 1, 0)}, "x");
    const std::vector<int> slots = {0, 1};
    const std::vector<std::string> words = {"Total", "Payable"};
    const auto out = fs::replace_phrase(c.neighbors, slots, words, flat);
    expect(out && (*out)[0].text == "Total" && (*out)[1].text == "Payable" && (*out)[0].rel_pos == c.neighbors[0].rel_pos &&
               (*out)[1].rel_pos == c.neighbors[1].rel_pos && (*out)[2] == c.neighbors[2],
           "equal-length rule");
  }
  // Overflow: n_s = 1, n_t = 3; slots 3 and 7 are least important.
  {
    std::vector<fs::Neighbor> real;
    for (int i = 0; i < fs::kMaxNeighbors; ++i) real.push_back(nb("w" + std::to_string(i), 0.02 * (i + 1), 0.01, i, i));
    const fs::Candidate c = candidate_with(real, "x");
    const std::vector<double> imp = {0.8, 0.7, 0.6, 0.0, 0.5, 0.4, 0.3, 0.05, 0.2, 0.9};
    const std::vector<int> slots = {5};
    const std::vector<std::string> words = {"A", "B", "C"};
    std::vector<int> replaced;
    const auto out = fs::replace_phrase(c.neighbors, slots, words, imp, &replaced);
    bool ok = out && replaced == std::vector<int>{5, 3, 7} && (*out)[5].text == "A" && (*out)[3].text == "B" &&
              (*out)[7].text == "C";
    for (int s : {3, 7}) ok = ok && out && (*out)[s].rel_pos == c.neighbors[5].rel_pos;
    expect(ok, "overflow rule");
  }
  // Skip rules.
  {
    const fs::Candidate src = candidate_with({nb("bonus", -0.1, 0, 2, 0)}, "current.bonus");
    const std::vector<std::vector<double>> imp = {flat};
    fs::AugmentReport r;
    const auto c1 = config_with(schema, {{"current.bonus", {"Bonus"}}});
    const std::vector<fs::FieldPair> self = {{"current.bonus", "current.bonus"}};
    expect(fs::generate(std::span(&src, 1), imp, c1, self, &r).empty() && r.totals().unchanged == 1, "unchanged skip");
    fs::AugmentReport r2;
    const auto c2 = config_with(schema, {{"current.bonus", {"Gross Bonus"}}, {"current.salary", {"Salary"}}});
    const std::vector<fs::FieldPair> p2 = {{"current.bonus", "current.salary"}};
    expect(fs::generate(std::span(&src, 1), imp, c2, p2, &r2).empty() && r2.totals().no_match == 1, "no-match skip");
  }
  // Fuzz: no emitted example keeps its source neighborhood.
  const std::vector<std::string> vocab = {"Base", "Salary", "Bonus", "Pay", "Net", "OT", "Date", "Total", "bonus", "BASE"};
  fs::Rng rng(5);
  long emitted = 0, unchanged = 0;
  while (emitted < 10000) {
    std::map<std::string, std::vector<std::string>> lists;
    for (const std::string& f : schema.names()) {
      for (int i = 0; i < 1 + static_cast<int>(rng.below(3)); ++i) {
        std::string p = rng.pick(vocab);
        for (int w = 0; w < static_cast<int>(rng.below(3)); ++w) p += " " + rng.pick(vocab);
        lists[f].push_back(p);
      }
    }
    const auto config = config_with(schema, lists);
    const auto pairs = fs::build_pairs(schema, static_cast<fs::Strategy>(rng.below(3)));
    std::vector<fs::Candidate> positives;
    std::vector<std::vector<double>> imp;
    for (int i = 0; i < 50; ++i) {
      std::vector<fs::Neighbor> real;
      const int n = 1 + static_cast<int>(rng.below(fs::kMaxNeighbors));
      for (int s = 0; s < n; ++s) {
        real.push_back(nb(rng.pick(vocab), std::round(rng.uniform(-3, 3)) / 10, std::round(rng.uniform(-3, 3)) / 10, s, s / 3));
      }
      rng.shuffle(real);
      positives.push_back(candidate_with(real, schema.names()[rng.below(3)]));
      std::vector<double> v(fs::kMaxNeighbors);
      for (double& x : v) x = std::round(rng.uniform() * 3) / 3;
      imp.push_back(v);
    }
    for (const fs::SyntheticExample& ex : fs::generate(positives, imp, config, pairs)) {
      ++emitted;
      unchanged += fs::same_neighborhood(ex.candidate.neighbors, positives[ex.source_index].neighbors);
    }
  }
  expect(unchanged == 0, "fuzz produced unchanged neighborhoods");
  std::string detail = fmt("Base Salary -> Overtime, equal-length, overflow, no-match and unchanged rules; fuzz %ld emitted, %ld unchanged", emitted,
                           unchanged);
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

// ---------------------------------------------------------------------------
// 6-8. Learning-curve criteria
// ---------------------------------------------------------------------------

double med(const fs::ExperimentReport& r, int size, fs::Method m) { return 100.0 * r.medians.at({size, m}); }

void write_file(const stdfs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// ---------------------------------------------------------------------------
// 9. CLI determinism
// ---------------------------------------------------------------------------

std::string slurp(const stdfs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion_cli(const stdfs::path& root) {
  const std::string cli = FIELDSWAP_CLI;
  const std::vector<std::pair<std::string, std::vector<std::string>>> steps = {
      {"gen-corpus --spec synth-earnings --count 12 --seed 4 --out {d}/train.jsonl", {"train.jsonl", "train.jsonl.schema.json"}},
      {"gen-corpus --spec synth-earnings --count 10 --seed 5 --out {d}/test.jsonl", {"test.jsonl"}},
      {"gen-corpus --spec synth-invoices-ood --count 20 --out {d}/ood.jsonl", {"ood.jsonl"}},
      {"pretrain --corpus {d}/ood.jsonl --out {d}/pre.json --stage2-epochs 3 --batch-size 16", {"pre.json"}},
      {"infer-phrases --corpus {d}/train.jsonl --ckpt {d}/pre.json --out {d}/config.json --debug-dump {d}/imp.jsonl",
       {"config.json", "imp.jsonl"}},
      {"augment --corpus {d}/train.jsonl --config {d}/config.json --strategy t2t --ckpt {d}/pre.json --report {d}/aug.json --out {d}/syn.jsonl",
       {"aug.json", "syn.jsonl"}},
      {"train --corpus {d}/train.jsonl --config {d}/config.json --strategy t2t --ckpt {d}/pre.json --ensemble-size 2 "
       "--stage1-epochs 2 --stage2-epochs 2 --out {d}/ens --log {d}/log.jsonl",
       {"ens/manifest.json", "ens/member_0.json", "ens/member_1.json", "log.jsonl"}},
      {"eval --ensemble {d}/ens --test {d}/test.jsonl --out {d}/eval.json --text {d}/eval.txt", {"eval.json", "eval.txt"}},
      {"learning-curve --domain synth-bills --sizes 4 --methods baseline,t2t --pool-size 8 --test-size 5 --collections 2 "
       "--split-seeds 1 --init-seeds 1 --ensemble-size 1 --stage1-epochs 1 --stage2-epochs 1 --pretrained {d}/pre.json --jobs 2 "
       "--out {d}/lc.json --text {d}/lc.txt",
       {"lc.json", "lc.txt"}},
  };
  std::vector<std::string> outputs[2];
  for (int run = 0; run < 2; ++run) {
    const stdfs::path dir = root / ("cli_run" + std::to_string(run));
    stdfs::remove_all(dir);
    stdfs::create_directories(dir);
    for (const auto& [args, files] : steps) {
      std::string a = args;
      for (std::size_t p; (p = a.find("{d}")) != std::string::npos;) a.replace(p, 3, dir.string());
      const std::string cmd = "\"" + cli + "\" " + a + " > \"" + (dir / "stdout.txt").string() + "\" 2>&1";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + a + "\n" + slurp(dir / "stdout.txt")};
      for (const std::string& f : files) outputs[run].push_back(slurp(dir / f));
    }
  }
  int differing = 0;
  for (std::size_t i = 0; i < outputs[0].size(); ++i) differing += outputs[0][i] != outputs[1][i];
  return {differing == 0, fmt("%zu report files from %zu invocations compared across two runs, %d differ", outputs[0].size(),
                              steps.size(), differing)};
}

void print(int n, const Outcome& o) {
  std::printf("[%s] criterion %d: %s\n", o.pass ? "PASS" : "FAIL", n, o.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  stdfs::path workdir = "acceptance_work";
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--workdir" && i + 1 < argc) {
      workdir = argv[++i];
    } else if (a == "--jobs" && i + 1 < argc) {
      jobs = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--workdir DIR] [--jobs N]\n");
      return 2;
    }
  }
  stdfs::create_directories(workdir);
  int failed = 0;
  auto record = [&](int n, const Outcome& o) {
    print(n, o);
    failed += !o.pass;
  };

  record(1, criterion_sparsemax());
  record(2, criterion_gradients());
  record(3, criterion_aggregation());

  // Shared out-of-domain pretraining, as the learning curve would do it.
  fs::LearningCurveOptions lc;
  lc.spec = fs::builtin_spec("synth-earnings");
  lc.jobs = jobs;
  Stopwatch pre_sw;
  const fs::CorpusSpec ood = fs::builtin_spec("synth-invoices-ood");
  lc.pretrained = fs::pretrain(fs::generate_corpus(ood, lc.pretrain_docs), ood.schema, lc.train).params;
  const double pretrain_cpu = pre_sw.cpu();
  fs::save_params((workdir / "pretrained.json").string(), *lc.pretrained);

  std::string phrase_log;
  record(4, criterion_recovery(*lc.pretrained, phrase_log));
  write_file(workdir / "inferred_phrases.txt", phrase_log);
  record(5, criterion_swap_rules());

  // 6: baseline vs type-to-type on sizes {10, 25, 50}.
  Stopwatch grid_sw;
  lc.sizes = {10, 25, 50};
  lc.methods = {fs::Method::kBaseline, fs::Method::kTypeToType};
  const fs::ExperimentReport grid = fs::learning_curve(lc);
  const double grid_cpu = grid_sw.cpu() + pretrain_cpu, grid_wall = grid_sw.wall();
  write_file(workdir / "criterion6.json", grid.to_json());
  write_file(workdir / "criterion6.txt", grid.to_text());
  {
    const double gain10 = med(grid, 10, fs::Method::kTypeToType) - med(grid, 10, fs::Method::kBaseline);
    double worst_drop = -1e9;
    std::string per_size;
    for (int s : lc.sizes) {
      const double b = med(grid, s, fs::Method::kBaseline), t = med(grid, s, fs::Method::kTypeToType);
      worst_drop = std::max(worst_drop, b - t);
      per_size += fmt(" %d: %.2f vs %.2f;", s, t, b);
    }
    // Single-core hosts cannot measure an 8-core wall clock; the grid is
    // embarrassingly parallel, so CPU time / 8 bounds it.
    const double eight_core = grid_cpu / 8.0;
    record(6, {gain10 >= 2.0 && worst_drop <= 0.5 && eight_core < 1800.0,
               fmt("t2t vs baseline median macro-F1 x100:%s gain at 10 = %+.2f (>=2), max(baseline - t2t) = %.2f (<=0.5); "
                   "grid %.0f s wall on %d job(s), %.0f CPU s -> %.0f s on 8 cores (<1800)",
                   per_size.c_str(), gain10, worst_drop, grid_wall, jobs, grid_cpu, eight_core)});
  }

  // 7: no-fine-tune ablation at size 50, plus flag sensitivity.
  {
    fs::LearningCurveOptions ab = lc;
    ab.sizes = {50};
    ab.methods = {fs::Method::kNoFinetune};
    const fs::ExperimentReport r = fs::learning_curve(ab);
    write_file(workdir / "criterion7.json", r.to_json());
    const double full = med(grid, 50, fs::Method::kTypeToType), nofine = med(r, 50, fs::Method::kNoFinetune);

    const auto docs = fs::generate_corpus_range(lc.spec, 0, 50);
    fs::AugmentOptions aug;
    aug.enabled = true;
    aug.importance_model = &*lc.pretrained;
    fs::TrainConfig base = lc.train, no_down = lc.train, no_fine = lc.train;
    no_down.disable_downweight = true;
    no_fine.disable_finetune = true;
    const auto a = fs::train_ensemble(docs, lc.spec.schema, &*lc.pretrained, aug, base, 1, 1, 1);
    const auto b = fs::train_ensemble(docs, lc.spec.schema, &*lc.pretrained, aug, no_down, 1, 1, 1);
    const auto c = fs::train_ensemble(docs, lc.spec.schema, &*lc.pretrained, aug, no_fine, 1, 1, 1);
    const bool differ = !(a.ensemble.members[0] == b.ensemble.members[0]) && !(a.ensemble.members[0] == c.ensemble.members[0]);
    record(7, {full >= nofine && differ,
               fmt("size 50 median: full %.2f vs no-fine-tune %.2f (full >= no-fine-tune); downweight/fine-tune flags change "
                   "the checkpoint: %s",
                   full, nofine, differ ? "yes" : "no")});
  }

  // 8: human expert config vs automatic at size 10.
  {
    fs::LearningCurveOptions hu = lc;
    hu.sizes = {10};
    hu.methods = {fs::Method::kHuman};
    const fs::ExperimentReport r = fs::learning_curve(hu);
    write_file(workdir / "criterion8.json", r.to_json());
    const double human = med(r, 10, fs::Method::kHuman), automatic = med(grid, 10, fs::Method::kTypeToType);
    record(8, {human >= automatic, fmt("size 10 median: human %.2f vs automatic %.2f, delta %+.2f (>= 0)", human, automatic,
                                       human - automatic)});
  }

  record(9, criterion_cli(workdir));

  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
