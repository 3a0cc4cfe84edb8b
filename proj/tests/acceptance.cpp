// Copyright 2026 The tracellm Authors.
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

// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned
// below. Exit status is nonzero when any gating criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "tracellm/tracellm.hpp"

namespace {

using namespace tracellm;
namespace oracle = tracellm::testing::oracle;
namespace fs = std::filesystem;
using Vec = std::vector<double>;

constexpr double kF2Rounding = 0.01;         // AC1
constexpr double kCosineTol = 1e-9;          // AC7 hand TF-IDF
constexpr double kLsiTol = 1e-8;             // AC7 full-rank LSI vs VSM
constexpr double kLdaRowTol = 1e-9;          // AC7 topic rows
constexpr double kLdaIdentical = 0.99;       // AC7 identical documents
constexpr double kExactTol = 1e-12;          // AC4, AC6 oracle agreement
constexpr double kApproxTol = 0.02;          // AC6 cutoff agreement
constexpr double kLiveTol = 0.10;            // AC9
constexpr double kCostRelTol = 1e-9;         // AC10

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::pass;
  std::vector<std::string> notes;
};

/// Collects failures for one criterion; the first few are printed.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (notes_.size() < 12) notes_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  Outcome done() const { return {failures_ == 0 ? Status::pass : Status::fail, notes_}; }
  std::size_t failures() const { return failures_; }

 private:
  std::size_t failures_ = 0;
  std::vector<std::string> notes_;
};

std::string fmt(double v, int digits = 4) { return format_fixed(v, digits); }

// --- AC1 ---------------------------------------------------------------------

struct PublishedRow {
  const char* dataset;
  const char* method;
  double p, r, f2;
};

// Precision, recall and F2 as printed in the comparison table.
const PublishedRow kComparisonTable[] = {
    {"CM1", "VSM", 0.32, 0.61, 0.52},
    {"CM1", "LSI", 0.28, 0.67, 0.52},
    {"CM1", "LDA", 0.26, 0.54, 0.45},
    {"CM1", "BERT", 0.67, 0.22, 0.26},
    {"CM1", "Rodriguez et al.", 0.06, 1.00, 0.23},
    {"CM1", "Hey et al.", 0.44, 0.80, 0.69},
    {"CM1", "LLM balanced diversity", 0.40, 0.82, 0.68},
    {"CM1", "LLM 0-shot", 0.52, 0.59, 0.57},
    {"CM1", "LLM 2-shot random", 0.42, 0.58, 0.53},
    {"UC-TC", "VSM", 0.49, 0.72, 0.66},
    {"UC-TC", "LSI", 0.48, 0.73, 0.65},
    {"UC-TC", "LDA", 0.40, 0.86, 0.70},
    {"UC-TC", "BERT", 0.16, 0.80, 0.44},
    {"UC-TC", "Rodriguez et al.", 0.25, 0.96, 0.62},
    {"UC-TC", "Hey et al.", 0.34, 1.00, 0.72},
    {"UC-TC", "LLM balanced diversity", 0.58, 0.93, 0.83},
    {"UC-TC", "LLM 0-shot", 0.72, 0.80, 0.79},
    {"UC-TC", "LLM 2-shot random", 0.63, 0.79, 0.75},
    {"UC-ID", "VSM", 0.44, 0.70, 0.63},
    {"UC-ID", "LSI", 0.40, 0.54, 0.49},
    {"UC-ID", "LDA", 0.37, 0.52, 0.47},
    {"UC-ID", "BERT", 0.11, 0.60, 0.32},
    {"UC-ID", "Rodriguez et al.", 0.19, 1.00, 0.54},
    {"UC-ID", "Hey et al.", 0.26, 1.00, 0.63},
    {"UC-ID", "LLM balanced diversity", 0.89, 0.80, 0.82},
    {"UC-ID", "LLM 0-shot", 0.82, 0.90, 0.88},
    {"UC-ID", "LLM 2-shot random", 0.79, 0.82, 0.81},
    {"CCHIT", "VSM", 0.12, 0.39, 0.26},
    {"CCHIT", "LSI", 0.10, 0.45, 0.26},
    {"CCHIT", "LDA", 0.03, 0.13, 0.06},
    {"CCHIT", "BERT", 0.05, 0.29, 0.16},
    {"CCHIT", "Rodriguez et al.", 0.04, 0.94, 0.15},
    {"CCHIT", "Etezadi et al.", 0.08, 0.81, 0.30},
    {"CCHIT", "Hey et al.", 0.10, 0.57, 0.29},
    {"CCHIT", "LLM balanced diversity", 0.41, 0.84, 0.69},
    {"CCHIT", "LLM 0-shot", 0.33, 0.79, 0.62},
    {"CCHIT", "LLM 2-shot random", 0.23, 0.89, 0.57},
};

Outcome ac1_metric_consistency() {
  Check c;
  std::size_t rows = 0;
  for (const auto& row : kComparisonTable) {
    ++rows;
    const double f2 = 5 * row.p * row.r / (4 * row.p + row.r);
    const double delta = std::abs(f2 - row.f2);
    if (delta <= kF2Rounding + 1e-12) continue;
    // F2 grows in both P and R, so the extremes of the rounding box bound it.
    const double lo = f_beta(row.p - 0.005, row.r - 0.005, 2.0);
    const double hi = f_beta(row.p + 0.005, row.r + 0.005, 2.0);
    const bool boxed = hi >= row.f2 - 0.005 && lo <= row.f2 + 0.005;
    c.expect(false, std::string(row.dataset) + " " + row.method + ": P=" + fmt(row.p, 2) +
                        " R=" + fmt(row.r, 2) + " gives F2=" + fmt(f2) + ", printed " +
                        fmt(row.f2, 2) + " (|d|=" + fmt(delta) + "; " +
                        (boxed ? "reachable within the P/R rounding box"
                               : "outside the P/R rounding box, consistent with mean of per-run F2") +
                        ")");
  }
  c.note(std::to_string(rows - c.failures()) + "/" + std::to_string(rows) + " rows within " +
         fmt(kF2Rounding, 2));
  return c.done();
}

// --- AC2 ---------------------------------------------------------------------

struct DatasetCounts {
  testing::ShapedSpec (*shape)();
  std::size_t pairs, true_links, false_links;
};

Outcome ac2_dataset_integrity() {
  Check c;
  testing::TempDir tmp;
  // Expected: total pairs, #TL and #FL as tabulated.
  const DatasetCounts expected[] = {{testing::cm1_shape, 1166, 45, 1121},
                                    {testing::uc_tc_shape, 1890, 63, 1827},
                                    {testing::uc_id_shape, 600, 26, 574},
                                    {testing::cchit_shape, 10640, 78, 10562}};
  for (const auto& e : expected) {
    const auto shape = e.shape();
    Diagnostics diag;
    const auto ds = load_dataset(testing::write_shaped_dataset(tmp / shape.name, shape), std::nullopt, &diag);
    const auto pairs = enumerate_pairs(ds);
    std::size_t t = 0;
    for (const auto& p : pairs) t += p.label ? 1 : 0;
    c.expect(pairs.size() == e.pairs && ds.pair_count() == e.pairs,
             shape.name + ": pairs " + std::to_string(pairs.size()));
    c.expect(t == e.true_links && ds.true_links().size() == e.true_links,
             shape.name + ": true links " + std::to_string(t));
    c.expect(pairs.size() - t == e.false_links, shape.name + ": false links");
    c.expect(diag.empty(), shape.name + ": unexpected warnings");
  }
  return c.done();
}

// --- AC3 ---------------------------------------------------------------------

TraceDataset random_dataset(std::mt19937_64& rng) {
  const std::size_t ns = 1 + rng() % 12, nt = 1 + rng() % 10;
  std::vector<Artifact> src, tgt;
  for (std::size_t i = 0; i < ns; ++i) src.push_back({"S" + std::to_string(i), Side::source, "s" + std::to_string(i)});
  for (std::size_t j = 0; j < nt; ++j) tgt.push_back({"T" + std::to_string(j), Side::target, "t" + std::to_string(j)});
  std::vector<PairKey> links;
  const auto density = rng() % 5;  // 0..4 in 10
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      if (rng() % 10 < density) links.push_back({src[i].id, tgt[j].id});
    }
  }
  return TraceDataset::make("random", src, tgt, links, {});
}

Outcome ac3_split_properties() {
  Check c;
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto ds = random_dataset(rng);
    const auto pairs = enumerate_pairs(ds);
    std::uint64_t r[3];
    do {
      for (auto& x : r) x = rng() % 6;
    } while (r[0] + r[1] + r[2] == 0);
    const auto ratios = Ratios::parse(std::to_string(r[0]) + ":" + std::to_string(r[1]) + ":" +
                                      std::to_string(r[2]));
    const std::uint64_t seed = rng();
    const bool by_link = trial % 2 == 0;
    const std::string tag = "trial " + std::to_string(trial) + (by_link ? " by_link" : " by_artifact");

    const auto split = by_link ? split_by_link(pairs, ratios, seed) : split_by_artifact(ds, ratios, seed);
    const auto again = by_link ? split_by_link(pairs, ratios, seed) : split_by_artifact(ds, ratios, seed);
    c.expect(dump_split(split) == dump_split(again), tag + ": not deterministic");

    std::set<PairKey> seen;
    std::size_t total = 0, n_true = ds.true_links().size();
    std::array<std::set<std::string>, 3> owners;
    const auto subsets = split.subsets();
    for (std::size_t s = 0; s < 3; ++s) {
      std::size_t t = 0;
      for (const auto& p : *subsets[s]) {
        c.expect(seen.insert(p.key()).second, tag + ": pair in two subsets");
        c.expect(p.label == ds.is_linked(p.key()), tag + ": label drift");
        t += p.label ? 1 : 0;
        owners[s].insert(p.source_id);
      }
      total += subsets[s]->size();
      if (r[s] == 0) c.expect(subsets[s]->empty(), tag + ": zero-ratio subset not empty");
      if (by_link && !subsets[s]->empty()) {
        const double size = static_cast<double>(subsets[s]->size());
        const double dev = std::abs(t / size - static_cast<double>(n_true) / pairs.size());
        c.expect(dev <= 1.0 / size + 1e-12, tag + ": stratification deviation " + fmt(dev));
      }
      if (!by_link) {
        c.expect(subsets[s]->size() == owners[s].size() * ds.targets().size(),
                 tag + ": source split across subsets");
      }
    }
    c.expect(total == pairs.size(), tag + ": partition incomplete");
    if (!by_link) {
      for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a + 1; b < 3; ++b) {
          for (const auto& s : owners[a]) c.expect(!owners[b].count(s), tag + ": source " + s + " shared");
        }
      }
    }
  }
  return c.done();
}

// --- AC4 ---------------------------------------------------------------------

Vec random_vec(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(dim);
  for (auto& x : v) x = u(rng);
  v[0] += 1.5;
  return v;
}

Outcome ac4_selection_oracles() {
  Check c;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::size_t balanced_cases = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng() % 7, dim = 2 + rng() % 3;
    const std::string tag = "pool " + std::to_string(trial);
    std::vector<Vec> vs;
    std::vector<Demonstration> pool;
    for (std::size_t i = 0; i < n; ++i) {
      vs.push_back(random_vec(rng, dim));
      Demonstration d;
      d.pair = {"S" + std::to_string(i), "T", rng() % 2 == 0};
      d.representation = d.pair.key().str();
      d.embedding = EmbeddingVector(vs.back());
      d.confidence = u01(rng);
      pool.push_back(d);
    }
    const auto query = random_vec(rng, dim);
    Vec sims(n), confs(n);
    for (std::size_t i = 0; i < n; ++i) {
      sims[i] = oracle::cos_sim(query, vs[i]);
      confs[i] = *pool[i].confidence;
    }

    for (std::size_t k = 1; k <= n; ++k) {
      if (k >= 2) {
        c.expect(select_diverse(pool, k).pool_indices == oracle::greedy_diverse(vs, k),
                 tag + ": diversity k=" + std::to_string(k));
      }
      double got = 0;
      for (auto i : select_similar(EmbeddingVector(query), pool, k).pool_indices) got += sims[i];
      c.expect(std::abs(got - oracle::best_subset_sum(sims, k, true)) <= kExactTol,
               tag + ": similarity k=" + std::to_string(k));
      got = 0;
      for (auto i : select_least_confident(pool, k).pool_indices) got += confs[i];
      c.expect(std::abs(got - oracle::best_subset_sum(confs, k, false)) <= kExactTol,
               tag + ": least confidence k=" + std::to_string(k));
    }

    std::size_t n_true = 0;
    for (const auto& d : pool) n_true += d.pair.label ? 1 : 0;
    for (std::size_t k = 2; k <= n; k += 2) {
      if (n_true < k / 2 || n - n_true < k / 2) continue;
      for (auto strategy : {Strategy::random, Strategy::diversity, Strategy::uncertainty}) {
        ++balanced_cases;
        const auto r = select(strategy, pool, k, true, trial);
        std::size_t t = 0;
        for (std::size_t i = 0; i < r.selected.size(); ++i) {
          t += r.selected[i].pair.label ? 1 : 0;
          c.expect(r.selected[i].pair.label == (i % 2 == 0), tag + ": label-aware order");
        }
        c.expect(r.selected.size() == k && t == k / 2,
                 tag + ": label-aware balance k=" + std::to_string(k));
      }
    }
  }
  c.note(std::to_string(balanced_cases) + " label-aware cases");
  return c.done();
}

// --- AC5 ---------------------------------------------------------------------

Outcome ac5_prompt_goldens() {
  Check c;
  const auto catalog = PromptCatalog::load(fs::path(TRACELLM_DATA_DIR) / "prompts.json");
  const auto meta = testing::cm1_shape().meta;
  const char* src = "The DPU-CCM shall collect a heartbeat from each task every 16 seconds.";
  const char* tgt = "The heartbeat monitor polls all registered tasks and logs missed beats.";
  for (const char* id : {"P1", "P2", "P3", "P4", "P5", "P6", "P7", "template", "gpt-4o-mini",
                         "gpt-4o", "claude-3-5-haiku", "claude-3-5-sonnet", "gemini-1.5-flash",
                         "gemini-1.5-pro", "llama-3.1-8b", "llama-3.1-70b"}) {
    const auto golden = read_file(fs::path(TRACELLM_TEST_DIR) / "golden" / (std::string(id) + ".txt"));
    c.expect(render_prompt(catalog.get(id), meta, src, tgt) == golden, std::string(id) + ": golden mismatch");
  }
  const auto& p1 = catalog.get("P1");
  const std::pair<testing::ShapedSpec, const char*> questions[] = {
      {testing::uc_tc_shape(), "Does (2) test (1)?"},
      {testing::cchit_shape(), "Does (1) satisfy (2)?"},
      {testing::uc_id_shape(), "Does (2) realize (1)?"},
      {testing::cm1_shape(), "Does (2) fulfill (1)?"}};
  for (const auto& [shape, q] : questions) {
    c.expect(render_instruction(p1, shape.meta).find(q) != std::string::npos, shape.name + ": " + q);
  }
  return c.done();
}

// --- AC6 ---------------------------------------------------------------------

Vec normals(std::mt19937_64& rng, std::size_t n, double shift) {
  std::normal_distribution<double> g(shift, 1.0);
  Vec v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

Outcome ac6_stat_oracles() {
  Check c;
  std::mt19937_64 rng(606);
  std::size_t cases = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int t = 0; t < 100; ++t, ++cases) {
      const auto a = normals(rng, n, 0.4), b = normals(rng, n, 0.0);
      const auto r = wilcoxon_signed_rank(a, b);
      c.expect(r.exact && std::abs(r.p_value - oracle::wilcoxon_exact_p(a, b)) <= kExactTol,
               "wilcoxon n=" + std::to_string(n));
    }
  }
  for (std::size_t na = 1; na <= 6; ++na) {
    for (std::size_t nb = 1; nb <= 6; ++nb) {
      for (int t = 0; t < 20; ++t, ++cases) {
        const auto a = normals(rng, na, 0.5), b = normals(rng, nb, 0.0);
        const auto r = mann_whitney_u(a, b);
        c.expect(r.exact && std::abs(r.p_value - oracle::mann_whitney_exact_p(a, b)) <= kExactTol,
                 "mann-whitney " + std::to_string(na) + "+" + std::to_string(nb));
      }
    }
  }

  // Just past the exact cutoffs.
  double worst_w = 0, worst_u = 0;
  for (int t = 0; t < 40; ++t) {
    const auto a = normals(rng, kWilcoxonExactMaxN + 1, 0.3 * (t % 4));
    const auto b = normals(rng, kWilcoxonExactMaxN + 1, 0.0);
    const auto r = wilcoxon_signed_rank(a, b);
    const double d = std::abs(r.p_value - oracle::wilcoxon_exact_p(a, b));
    worst_w = std::max(worst_w, d);
    c.expect(!r.exact && d <= kApproxTol, "wilcoxon approximation |dp|=" + fmt(d));
  }
  const std::size_t total = kMannWhitneyExactMaxN + 1;
  for (std::size_t na = 4; na <= total / 2; ++na) {
    for (int t = 0; t < 10; ++t) {
      const auto a = normals(rng, na, 0.3 * (t % 4));
      const auto b = normals(rng, total - na, 0.0);
      const auto r = mann_whitney_u(a, b);
      const double d = std::abs(r.p_value - oracle::mann_whitney_exact_p(a, b));
      worst_u = std::max(worst_u, d);
      c.expect(!r.exact && d <= kApproxTol, "mann-whitney approximation " + std::to_string(na) +
                                                "+" + std::to_string(total - na) + " |dp|=" + fmt(d));
    }
  }
  c.note(std::to_string(cases) + " exact cases; max |dp| at cutoff: wilcoxon " + fmt(worst_w) +
         ", mann-whitney " + fmt(worst_u));
  return c.done();
}

// --- AC7 ---------------------------------------------------------------------

std::vector<TokenizedDoc> docs(std::initializer_list<const char*> texts) {
  std::vector<TokenizedDoc> out;
  for (const auto* t : texts) out.push_back(preprocess(t));
  return out;
}

std::vector<TokenizedDoc> random_corpus(std::mt19937_64& rng, std::size_t n) {
  const char* words[] = {"sensor", "packet", "clinic", "audit", "timer", "queue", "record", "buffer"};
  std::vector<TokenizedDoc> out(n);
  for (auto& d : out) {
    const std::size_t len = 1 + rng() % 6;
    for (std::size_t i = 0; i < len; ++i) d.tokens.push_back(words[rng() % 8]);
  }
  return out;
}

Outcome ac7_baseline_oracles() {
  Check c;
  // idf = ln((1+N)/(1+df)) + 1 over d0 "apple banana", d1 "apple cherry", d2 "apple apple banana".
  const double b = std::log(4.0 / 3.0) + 1.0, ch = std::log(2.0) + 1.0;
  const double c01 = 1.0 / (std::sqrt(1 + b * b) * std::sqrt(1 + ch * ch));
  const double c02 = (2 + b * b) / (std::sqrt(1 + b * b) * std::sqrt(4 + b * b));
  const auto m = vsm_scores(docs({"apple banana"}), docs({"apple cherry", "apple apple banana"}));
  c.expect(std::abs(m.at(0, 0) - c01) <= kCosineTol, "vsm cos(d0,d1)");
  c.expect(std::abs(m.at(0, 1) - c02) <= kCosineTol, "vsm cos(d0,d2)");

  std::mt19937_64 rng(707);
  for (int t = 0; t < 20; ++t) {
    const auto src = random_corpus(rng, 4), tgt = random_corpus(rng, 5);
    const auto lsi = lsi_scores(src, tgt, 1000);
    const auto vsm = vsm_scores(src, tgt);
    double worst = 0;
    for (std::size_t i = 0; i < vsm.values.size(); ++i) {
      worst = std::max(worst, std::abs(lsi.values[i] - vsm.values[i]));
    }
    c.expect(worst <= kLsiTol, "full-rank lsi vs vsm |d|=" + std::to_string(worst));
  }

  const auto toy = docs({"sensor packet telemetry sensor", "clinic patient visit clinic",
                         "packet sensor buffer", "patient record visit"});
  const auto src = docs({"sensor packet telemetry buffer sensor packet"});
  const auto tgt = docs({"sensor packet telemetry buffer sensor packet",
                         "clinic patient visit record clinic patient"});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto model = fit_lda(toy, 3, 10, seed);
    for (Eigen::Index d = 0; d < model.theta.rows(); ++d) {
      c.expect(std::abs(model.theta.row(d).sum() - 1.0) <= kLdaRowTol, "lda row sum");
    }
    const auto s = lda_scores(src, tgt, 2, 10, seed);
    c.expect(s.at(0, 0) >= kLdaIdentical, "lda identical documents seed " + std::to_string(seed) +
                                              ": " + fmt(s.at(0, 0)));
  }

  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 50; ++t) {
    Vec s(50);
    std::vector<bool> l(50);
    for (std::size_t i = 0; i < 50; ++i) {
      l[i] = rng() % 4 == 0;
      s[i] = std::clamp(u(rng) * 0.7 + (l[i] ? 0.25 : 0.0), 0.0, 1.0);
    }
    double best_t = 0, best_f = -1;
    for (int i = 1; i <= 100; ++i) {
      std::size_t tp = 0, fp = 0, fn = 0;
      for (std::size_t j = 0; j < 50; ++j) {
        const bool p = s[j] >= i / 100.0;
        tp += p && l[j];
        fp += p && !l[j];
        fn += !p && l[j];
      }
      const double f = oracle::f2_from_counts(tp, fp, fn);
      if (f > best_f) best_f = f, best_t = i / 100.0;
    }
    const auto r = sweep_threshold(std::span<const double>(s), l);
    c.expect(r.best_threshold == best_t && std::abs(r.best_f2 - best_f) <= kExactTol,
             "sweep instance " + std::to_string(t));
  }
  return c.done();
}

// --- AC8 ---------------------------------------------------------------------

Outcome ac8_offline_determinism() {
  Check c;
  testing::TempDir tmp;
  const auto manifest = testing::write_shaped_dataset(tmp / "cm1", testing::cm1_shape());
  const auto ds = load_dataset(manifest);
  write_file(tmp / "split.json", dump_split(split_by_link(enumerate_pairs(ds), Ratios::parse("4:2:4"), 0)));
  testing::write_embedding_file(tmp / "emb.json", ds);

  ExperimentConfig cfg;
  cfg.dataset = manifest;
  cfg.split_file = tmp / "split.json";
  cfg.prompts_file = fs::path(TRACELLM_DATA_DIR) / "prompts.json";
  cfg.prompt_id = "P6";
  cfg.strategy = Strategy::diversity;
  cfg.balanced = true;
  cfg.shots = 2;
  cfg.repeats = 5;
  cfg.client.gold_echo = true;
  cfg.output_dir = tmp / "runs";
  EmbeddingProviderConfig e;
  e.file_path = tmp / "emb.json";
  cfg.embeddings = e;

  const auto r = run_experiment(cfg);
  c.expect(r.runs.size() == 5, "expected 5 runs, got " + std::to_string(r.runs.size()));
  for (const auto& m : r.runs) {
    c.expect(m.precision == 1.0 && m.recall == 1.0 && m.f1 == 1.0 && m.f2 == 1.0,
             "run not perfect: f2=" + fmt(m.f2));
  }
  for (const auto* s : {&r.aggregate.precision, &r.aggregate.recall, &r.aggregate.f1, &r.aggregate.f2}) {
    c.expect(s->mean == 1.0 && s->std == 0.0, "aggregate not 1.0 +- 0");
  }
  c.expect(r.flagged == 0, "flagged responses");
  return c.done();
}

// --- AC9 ---------------------------------------------------------------------

// Zero-shot P6 F2 on CM1 as published, keyed by model name.
const std::map<std::string, double> kZeroShotF2 = {
    {"gpt-4o-mini", 0.57},       {"gpt-4o", 0.46},         {"claude-3-5-haiku", 0.42},
    {"claude-3-5-sonnet", 0.58}, {"gemini-1.5-flash", 0.50}, {"gemini-1.5-pro", 0.38},
    {"llama-3.1-8b", 0.07},      {"llama-3.1-70b", 0.35}};

Outcome ac9_live_check() {
  Outcome o;
  const auto base = env_var("TRACELLM_API_BASE");
  const auto manifest = env_var("TRACELLM_CM1_MANIFEST");
  if (!base || !manifest) {
    o.status = Status::skip;
    o.notes.push_back("set TRACELLM_API_BASE, TRACELLM_API_KEY and TRACELLM_CM1_MANIFEST to run");
    return o;
  }
  const auto model = env_var("TRACELLM_MODEL").value_or("gpt-4o-mini");
  const auto ref = kZeroShotF2.find(model);
  if (ref == kZeroShotF2.end()) {
    o.status = Status::skip;
    o.notes.push_back("no published zero-shot row for model '" + model + "'");
    return o;
  }
  testing::TempDir tmp;
  const auto ds = load_dataset(*manifest);
  write_file(tmp / "split.json", dump_split(split_by_link(enumerate_pairs(ds), Ratios::parse("4:2:4"), 0)));
  ExperimentConfig cfg;
  cfg.dataset = *manifest;
  cfg.split_file = tmp / "split.json";
  cfg.prompts_file = fs::path(TRACELLM_DATA_DIR) / "prompts.json";
  cfg.prompt_id = "P6";
  cfg.model = model;
  cfg.repeats = 1;
  cfg.client.kind = "http";
  cfg.output_dir = tmp / "runs";
  const auto r = run_experiment(cfg);
  const double d = std::abs(r.aggregate.f2.mean - ref->second);
  o.status = d <= kLiveTol ? Status::pass : Status::fail;
  o.notes.push_back(model + ": F2 " + fmt(r.aggregate.f2.mean) + " vs published " +
                    fmt(ref->second, 2) + " (tolerance " + fmt(kLiveTol, 2) + ")");
  return o;
}

// --- AC10 --------------------------------------------------------------------

struct CostRow {
  const char* model;
  double input, output, total;
};

// Input, output and total cost in USD as tabulated.
const CostRow kCostTable[] = {
    {"gpt-4o-mini", 5.900, 0.009, 5.909},         {"gpt-4o", 98.334, 0.151, 98.485},
    {"claude-3-5-haiku", 9.833, 0.019, 9.852},    {"claude-3-5-sonnet", 118.001, 0.227, 118.228},
    {"gemini-1.5-flash", 2.950, 0.005, 2.955},    {"gemini-1.5-pro", 49.167, 0.076, 49.243},
    {"llama-3.1-8b", 7.080, 0.003, 7.083},        {"llama-3.1-70b", 34.614, 0.013, 34.627}};

bool rel_close(double a, double b) { return std::abs(a - b) <= kCostRelTol * std::max(std::abs(b), 1e-300); }

Outcome ac10_cost_additivity() {
  Check c;
  PricingTable pricing;
  for (const auto& row : kCostTable) pricing.set(row.model, {1.0, 1.0});  // one dollar per million
  for (const auto& row : kCostTable) {
    const std::string m = row.model;
    const Usage whole{static_cast<long long>(std::llround(row.input * 1e6)),
                      static_cast<long long>(std::llround(row.output * 1e6))};
    const std::vector<Usage> one{whole};
    const auto r = cost_report(std::span<const Usage>(one), pricing, m);
    c.expect(rel_close(r.input_cost, row.input), m + ": input cost " + fmt(r.input_cost, 6));
    c.expect(rel_close(r.output_cost, row.output), m + ": output cost " + fmt(r.output_cost, 6));
    c.expect(rel_close(r.total_cost, row.total), m + ": total " + fmt(r.total_cost, 6));
    c.expect(r.input_cost + r.output_cost == r.total_cost, m + ": input + output != total");

    // 30 runs summing to the same usage.
    std::vector<Usage> runs(30, Usage{whole.input_tokens / 30, whole.output_tokens / 30});
    runs.back().input_tokens += whole.input_tokens % 30;
    runs.back().output_tokens += whole.output_tokens % 30;
    const auto split = cost_report(std::span<const Usage>(runs), pricing, m);
    c.expect(rel_close(split.total_cost, r.total_cost), m + ": per-run sum differs");
    for (int lambda : {2, 10, 1000}) {
      const std::vector<Usage> scaled{{whole.input_tokens * lambda, whole.output_tokens * lambda}};
      const auto s = cost_report(std::span<const Usage>(scaled), pricing, m);
      c.expect(rel_close(s.total_cost, lambda * r.total_cost), m + ": not linear at x" + std::to_string(lambda));
    }
  }
  return c.done();
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;  // 0: unbounded
  bool gating;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "F2 recomputed from published P and R", 1, true, ac1_metric_consistency},
      {2, "dataset counts", 5, true, ac2_dataset_integrity},
      {3, "split properties (1000 cases)", 30, true, ac3_split_properties},
      {4, "selection oracles (500 pools)", 60, true, ac4_selection_oracles},
      {5, "prompt golden files and relation questions", 1, true, ac5_prompt_goldens},
      {6, "statistical test oracles", 60, true, ac6_stat_oracles},
      {7, "baseline oracles", 120, true, ac7_baseline_oracles},
      {8, "offline end-to-end determinism", 60, true, ac8_offline_determinism},
      {9, "live endpoint check (non-gating)", 0, false, ac9_live_check},
      {10, "cost additivity and scaling", 1, true, ac10_cost_additivity},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o.status = Status::fail;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.budget_seconds > 0 && secs > cr.budget_seconds && o.status == Status::pass) {
      o.status = Status::fail;
      o.notes.push_back("over time budget of " + fmt(cr.budget_seconds, 0) + " s");
    }
    const char* word = o.status == Status::pass ? "PASS" : o.status == Status::skip ? "SKIP" : "FAIL";
    std::printf("AC%-2d %s  %-45s %8.3f s\n", cr.id, word, cr.title, secs);
    for (const auto& n : o.notes) std::printf("       %s\n", n.c_str());
    if (o.status == Status::fail && cr.gating) ++failed;
  }
  std::printf("%d gating criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
