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

#pragma once

// Information-retrieval baselines and the threshold classifier.
//
// Every model scores all (source, target) pairs of a dataset. Models are
// fitted jointly on the source and target documents (unsupervised), so
// scores never depend on labels. A pair is predicted linked when its score
// is >= the threshold picked by sweep_threshold.
//
//   VSM   cosine of TF-IDF vectors, tf = raw count,
//         idf = ln((1 + N) / (1 + df)) + 1
//   LSI   cosine of rank-k document coordinates U_k S_k of the TF-IDF matrix
//   LDA   cosine of topic distributions from collapsed Gibbs sampling,
//         alpha = 50 / K, beta = 0.01, theta averaged over the second half
//         of the passes
//   embed cosine of externally supplied artifact embeddings

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

// <resolv.h> defines _res as a macro, which collides with Eigen parameter names.
#pragma push_macro("_res")
#undef _res
#include <Eigen/Dense>
#include <Eigen/SVD>
#pragma pop_macro("_res")

#include "tracellm/corpus.hpp"
#include "tracellm/embeddings.hpp"
#include "tracellm/error.hpp"
#include "tracellm/metrics.hpp"
#include "tracellm/rng.hpp"
#include "tracellm/stopwords.hpp"
#include "tracellm/text.hpp"

namespace tracellm {

// ---------------------------------------------------------------------------
// Preprocessing

struct TokenizedDoc {
  std::vector<std::string> tokens;
  bool empty() const { return tokens.empty(); }
};

/// Splits on every character that is not a letter or digit, except a hyphen
/// between two word characters ("DPU-CCM" stays one token). Bytes >= 0x80 are
/// treated as letters so UTF-8 words are not torn apart. Tokens are
/// lowercased and stopwords dropped.
inline TokenizedDoc preprocess(std::string_view text, Diagnostics* diag = nullptr) {
  const auto word_char = [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  };
  TokenizedDoc doc;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) {
      auto tok = to_lower_ascii(cur);
      if (!is_stopword(tok)) doc.tokens.push_back(std::move(tok));
      cur.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (word_char(c)) {
      cur += c;
    } else if (c == '-' && !cur.empty() && i + 1 < text.size() && word_char(text[i + 1])) {
      cur += c;
    } else {
      flush();
    }
  }
  flush();
  if (doc.empty()) warn(diag, "document has no tokens after preprocessing");
  return doc;
}

// ---------------------------------------------------------------------------
// Scores

/// Dense |sources| x |targets| score table.
struct ScoreMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> values;

  ScoreMatrix() = default;
  ScoreMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// Keys each score by its pair, sources and targets in dataset order.
inline std::map<PairKey, double> pair_scores(const ScoreMatrix& m, const TraceDataset& ds) {
  if (m.rows != ds.sources().size() || m.cols != ds.targets().size()) {
    throw Error("score matrix shape does not match the dataset");
  }
  std::map<PairKey, double> out;
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      out.emplace(PairKey{ds.sources()[i].id, ds.targets()[j].id}, m.at(i, j));
    }
  }
  return out;
}

namespace detail {

inline double dense_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

inline ScoreMatrix cross_cosines(const Eigen::MatrixXd& rows, std::size_t n_src) {
  const std::size_t n_tgt = static_cast<std::size_t>(rows.rows()) - n_src;
  ScoreMatrix out(n_src, n_tgt);
  for (std::size_t i = 0; i < n_src; ++i) {
    for (std::size_t j = 0; j < n_tgt; ++j) {
      out.at(i, j) = dense_cosine(rows.row(static_cast<Eigen::Index>(i)).transpose(),
                                  rows.row(static_cast<Eigen::Index>(n_src + j)).transpose());
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// TF-IDF

class TfIdfMatrix {
 public:
  /// Fits vocabulary and idf on `docs`, then weights every doc.
  static TfIdfMatrix fit(const std::vector<TokenizedDoc>& docs) {
    TfIdfMatrix m;
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
      std::vector<std::string> uniq = d.tokens;
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      for (const auto& t : uniq) ++df[t];
    }
    if (df.empty()) throw Error("empty vocabulary: no document has any tokens");
    const double n = static_cast<double>(docs.size());
    for (const auto& [term, count] : df) {
      m.index_.emplace(term, m.vocab_.size());
      m.vocab_.push_back(term);
      m.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    m.rows_.reserve(docs.size());
    for (const auto& d : docs) {
      std::map<std::size_t, double> row;
      for (const auto& t : d.tokens) row[m.index_.at(t)] += 1.0;
      for (auto& [col, w] : row) w *= m.idf_[col];
      m.rows_.push_back(std::move(row));
    }
    return m;
  }

  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::vector<double>& idf() const { return idf_; }
  const std::vector<std::map<std::size_t, double>>& rows() const { return rows_; }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_.size()),
                                              static_cast<Eigen::Index>(vocab_.size()));
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      for (const auto& [c, w] : rows_[r]) {
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w;
      }
    }
    return x;
  }

  /// Sparse cosine of two rows; 0 when either row is empty.
  double cosine_rows(std::size_t a, std::size_t b) const {
    const auto& ra = rows_[a];
    const auto& rb = rows_[b];
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [c, w] : ra) {
      na += w * w;
      if (auto it = rb.find(c); it != rb.end()) dot += w * it->second;
    }
    for (const auto& [c, w] : rb) nb += w * w;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
  }

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> idf_;
  std::vector<std::map<std::size_t, double>> rows_;
};

namespace detail {

inline std::vector<TokenizedDoc> joint_docs(const std::vector<TokenizedDoc>& src,
                                            const std::vector<TokenizedDoc>& tgt) {
  if (src.empty() || tgt.empty()) throw Error("baseline needs source and target documents");
  std::vector<TokenizedDoc> all(src);
  all.insert(all.end(), tgt.begin(), tgt.end());
  return all;
}

}  // namespace detail

inline ScoreMatrix vsm_scores(const std::vector<TokenizedDoc>& src,
                              const std::vector<TokenizedDoc>& tgt) {
  const auto m = TfIdfMatrix::fit(detail::joint_docs(src, tgt));
  ScoreMatrix out(src.size(), tgt.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < tgt.size(); ++j) out.at(i, j) = m.cosine_rows(i, src.size() + j);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LSI

/// Rank-k document coordinates U_k S_k of `x` (one row per document).
/// Components beyond the numerical rank are dropped with a warning.
inline Eigen::MatrixXd lsi_document_coordinates(const Eigen::MatrixXd& x, std::size_t n_components,
                                                Diagnostics* diag = nullptr) {
  if (n_components == 0) throw Error("lsi: n_components must be positive");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double tol = s.size() > 0 ? s(0) * 1e-10 * static_cast<double>(std::max(x.rows(), x.cols()))
                                  : 0.0;
  std::size_t rank = 0;
  while (rank < static_cast<std::size_t>(s.size()) && s(static_cast<Eigen::Index>(rank)) > tol) {
    ++rank;
  }
  if (rank == 0) throw Error("lsi: TF-IDF matrix is zero");
  std::size_t k = n_components;
  if (k > rank) {
    warn(diag, "lsi: n_components=" + std::to_string(n_components) + " exceeds rank " +
                   std::to_string(rank) + ", clamped");
    k = rank;
  }
  const auto ki = static_cast<Eigen::Index>(k);
  return svd.matrixU().leftCols(ki) * s.head(ki).asDiagonal();
}

inline ScoreMatrix lsi_scores(const std::vector<TokenizedDoc>& src,
                              const std::vector<TokenizedDoc>& tgt, std::size_t n_components,
                              Diagnostics* diag = nullptr) {
  const auto m = TfIdfMatrix::fit(detail::joint_docs(src, tgt));
  return detail::cross_cosines(lsi_document_coordinates(m.dense(), n_components, diag),
                               src.size());
}

// ---------------------------------------------------------------------------
// LDA

struct LdaModel {
  std::size_t num_topics = 0;
  Eigen::MatrixXd theta;  // documents x topics, rows sum to 1
};

inline LdaModel fit_lda(const std::vector<TokenizedDoc>& docs, std::size_t num_topics,
                        std::size_t passes, std::uint64_t seed) {
  if (num_topics == 0) throw Error("lda: num_topics must be positive");
  if (passes == 0) throw Error("lda: passes must be positive");
  if (docs.empty()) throw Error("lda: no documents");

  std::map<std::string, std::size_t> vocab;
  for (const auto& d : docs) {
    for (const auto& t : d.tokens) vocab.emplace(t, 0);
  }
  if (vocab.empty()) throw Error("lda: empty vocabulary");
  std::size_t next_id = 0;
  for (auto& [term, id] : vocab) id = next_id++;

  const std::size_t K = num_topics, V = vocab.size(), D = docs.size();
  const double alpha = 50.0 / static_cast<double>(K);
  const double beta = 0.01;
  const double vbeta = beta * static_cast<double>(V);

  std::vector<std::vector<std::size_t>> words(D), z(D);
  std::vector<std::vector<std::size_t>> n_dk(D, std::vector<std::size_t>(K, 0));
  std::vector<std::vector<std::size_t>> n_kw(K, std::vector<std::size_t>(V, 0));
  std::vector<std::size_t> n_k(K, 0);
  Rng rng(seed);
  for (std::size_t d = 0; d < D; ++d) {
    for (const auto& t : docs[d].tokens) {
      const std::size_t w = vocab.at(t);
      const auto k = static_cast<std::size_t>(rng.uniform_below(K));
      words[d].push_back(w);
      z[d].push_back(k);
      ++n_dk[d][k];
      ++n_kw[k][w];
      ++n_k[k];
    }
  }

  const std::size_t burn_in = passes / 2;
  LdaModel model;
  model.num_topics = K;
  model.theta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(K));
  std::vector<double> p(K);
  std::size_t kept = 0;
  for (std::size_t pass = 0; pass < passes; ++pass) {
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const std::size_t w = words[d][i];
        std::size_t k = z[d][i];
        --n_dk[d][k];
        --n_kw[k][w];
        --n_k[k];
        double total = 0.0;
        for (std::size_t t = 0; t < K; ++t) {
          total += (static_cast<double>(n_dk[d][t]) + alpha) *
                   (static_cast<double>(n_kw[t][w]) + beta) /
                   (static_cast<double>(n_k[t]) + vbeta);
          p[t] = total;
        }
        const double u = rng.uniform01() * total;
        k = static_cast<std::size_t>(std::upper_bound(p.begin(), p.end(), u) - p.begin());
        if (k >= K) k = K - 1;
        z[d][i] = k;
        ++n_dk[d][k];
        ++n_kw[k][w];
        ++n_k[k];
      }
    }
    if (pass >= burn_in) {
      ++kept;
      for (std::size_t d = 0; d < D; ++d) {
        const double denom = static_cast<double>(words[d].size()) + static_cast<double>(K) * alpha;
        for (std::size_t t = 0; t < K; ++t) {
          model.theta(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t)) +=
              (static_cast<double>(n_dk[d][t]) + alpha) / denom;
        }
      }
    }
  }
  model.theta /= static_cast<double>(kept);
  // Renormalize away the rounding of the running sum.
  for (Eigen::Index d = 0; d < model.theta.rows(); ++d) {
    model.theta.row(d) /= model.theta.row(d).sum();
  }
  return model;
}

inline ScoreMatrix lda_scores(const std::vector<TokenizedDoc>& src,
                              const std::vector<TokenizedDoc>& tgt, std::size_t num_topics,
                              std::size_t passes, std::uint64_t seed) {
  const auto model = fit_lda(detail::joint_docs(src, tgt), num_topics, passes, seed);
  return detail::cross_cosines(model.theta, src.size());
}

// ---------------------------------------------------------------------------
// Embedding cosine

/// Cosine of per-artifact embeddings (each artifact text embedded alone).
inline ScoreMatrix embedding_scores(const TraceDataset& ds, EmbeddingProvider& provider) {
  std::vector<std::string> texts;
  for (const auto& a : ds.sources()) texts.push_back(a.text);
  for (const auto& a : ds.targets()) texts.push_back(a.text);
  const auto vecs = provider.embed(texts);
  const std::size_t ns = ds.sources().size();
  ScoreMatrix out(ns, ds.targets().size());
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < out.cols; ++j) out.at(i, j) = cosine(vecs[i], vecs[ns + j]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Threshold sweep

struct ThresholdSweepResult {
  double best_threshold = 0.0;
  double best_f2 = 0.0;
  std::vector<std::pair<double, double>> curve;  // (threshold, f2)
};

/// Thresholds i/100 for i = 1..100.
inline std::vector<double> default_threshold_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 100; ++i) g.push_back(i / 100.0);
  return g;
}

inline double f2_at(std::span<const double> scores, const std::vector<bool>& labels, double t) {
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) c.add(scores[i] >= t, labels[i]);
  return f_beta(precision(c), recall(c), 2.0);
}

/// Linked when score >= t; returns the F2-maximizing t, ties to the smallest.
inline ThresholdSweepResult sweep_threshold(std::span<const double> scores,
                                            const std::vector<bool>& labels,
                                            const std::vector<double>& grid = default_threshold_grid(),
                                            Diagnostics* diag = nullptr) {
  if (scores.size() != labels.size()) throw Error("sweep_threshold: scores and labels differ in size");
  if (grid.empty()) throw Error("sweep_threshold: empty grid");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  if (positives == 0 || positives == labels.size()) {
    warn(diag, "sweep_threshold: labels are all one class, F2 is degenerate");
  }
  ThresholdSweepResult r;
  bool first = true;
  for (double t : grid) {
    const double f2 = f2_at(scores, labels, t);
    r.curve.emplace_back(t, f2);
    if (first || f2 > r.best_f2) {
      r.best_f2 = f2;
      r.best_threshold = t;
      first = false;
    }
  }
  return r;
}

inline ThresholdSweepResult sweep_threshold(const std::map<PairKey, double>& scores,
                                            const std::map<PairKey, bool>& labels,
                                            const std::vector<double>& grid = default_threshold_grid(),
                                            Diagnostics* diag = nullptr) {
  if (scores.size() != labels.size()) throw Error("sweep_threshold: key sets differ");
  std::vector<double> s;
  std::vector<bool> l;
  auto it = labels.begin();
  for (const auto& [k, v] : scores) {
    if (it->first != k) throw Error("sweep_threshold: key mismatch at " + k.str());
    s.push_back(v);
    l.push_back(it->second);
    ++it;
  }
  return sweep_threshold(std::span<const double>(s), l, grid, diag);
}

// ---------------------------------------------------------------------------
// Tuning and evaluation

enum class BaselineModel { vsm, lsi, lda, embed };

inline std::string to_string(BaselineModel m) {
  switch (m) {
    case BaselineModel::vsm: return "vsm";
    case BaselineModel::lsi: return "lsi";
    case BaselineModel::lda: return "lda";
    case BaselineModel::embed: return "embed";
  }
  return "?";
}

inline BaselineModel parse_baseline_model(std::string_view s) {
  if (s == "vsm") return BaselineModel::vsm;
  if (s == "lsi") return BaselineModel::lsi;
  if (s == "lda") return BaselineModel::lda;
  if (s == "embed") return BaselineModel::embed;
  throw Error("unknown baseline model '" + std::string(s) + "' (vsm|lsi|lda|embed)");
}

struct BaselineGrid {
  std::vector<std::size_t> n_components{50, 100, 150};
  std::vector<std::size_t> num_topics{5, 10, 20, 30};
  std::vector<std::size_t> passes{10, 15, 20};
  std::vector<double> thresholds = default_threshold_grid();
  std::uint64_t seed = 0;
};

struct BaselineSetting {
  std::size_t n_components = 0;
  std::size_t num_topics = 0;
  std::size_t passes = 0;

  std::string str() const {
    std::string s;
    if (n_components) s += "n_components=" + std::to_string(n_components);
    if (num_topics) s += "num_topics=" + std::to_string(num_topics) + " passes=" + std::to_string(passes);
    return s.empty() ? "-" : s;
  }
};

struct BaselineCandidate {
  BaselineSetting setting;
  double threshold = 0.0;
  double tuning_f2 = 0.0;      // train+validation, at the threshold
  double validation_f2 = 0.0;  // validation only, at the threshold
};

struct BaselinePrediction {
  PairKey pair;
  double score = 0.0;
  bool predicted = false;
  bool label = false;
};

struct BaselineReport {
  BaselineModel model = BaselineModel::vsm;
  BaselineCandidate chosen;
  std::vector<BaselineCandidate> candidates;
  ThresholdSweepResult sweep;  // of the chosen setting, on train+validation
  std::vector<BaselinePrediction> test_predictions;
  RunMetrics test_metrics;
};

namespace detail {

inline std::vector<double> subset_scores(const std::map<PairKey, double>& scores,
                                         const std::vector<CandidatePair>& pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(scores.at(p.key()));
  return out;
}

inline std::vector<bool> subset_labels(const std::vector<CandidatePair>& pairs) {
  std::vector<bool> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.label);
  return out;
}

}  // namespace detail

/// Picks a threshold on train+validation for each grid setting, keeps the
/// setting with the best validation F2 at its threshold (first in grid order
/// on ties), then scores the test partition with the frozen choice.
/// `embed_provider` is required for BaselineModel::embed.
inline BaselineReport run_baseline(BaselineModel model, const TraceDataset& ds,
                                   const DatasetSplit& split, const BaselineGrid& grid = {},
                                   EmbeddingProvider* embed_provider = nullptr,
                                   Diagnostics* diag = nullptr) {
  std::vector<CandidatePair> tuning = split.train;
  tuning.insert(tuning.end(), split.validation.begin(), split.validation.end());
  if (tuning.empty()) throw Error("baseline needs a non-empty train+validation partition");
  if (split.test.empty()) throw Error("baseline needs a non-empty test partition");
  const bool have_validation = !split.validation.empty();
  if (!have_validation) {
    warn(diag, "empty validation partition: settings compared on train+validation F2");
  }

  std::vector<TokenizedDoc> src, tgt;
  if (model != BaselineModel::embed) {
    for (const auto& a : ds.sources()) src.push_back(preprocess(a.text, diag));
    for (const auto& a : ds.targets()) tgt.push_back(preprocess(a.text, diag));
  }

  std::vector<BaselineSetting> settings;
  switch (model) {
    case BaselineModel::vsm:
    case BaselineModel::embed:
      settings.push_back({});
      break;
    case BaselineModel::lsi:
      for (auto n : grid.n_components) settings.push_back({n, 0, 0});
      break;
    case BaselineModel::lda:
      for (auto k : grid.num_topics) {
        for (auto p : grid.passes) settings.push_back({0, k, p});
      }
      break;
  }
  if (settings.empty()) throw Error("baseline grid is empty");

  const auto tuning_labels = detail::subset_labels(tuning);
  const auto val_labels = detail::subset_labels(split.validation);

  BaselineReport report;
  report.model = model;
  std::map<PairKey, double> best_scores;
  std::optional<std::size_t> best;
  for (const auto& s : settings) {
    ScoreMatrix m;
    switch (model) {
      case BaselineModel::vsm: m = vsm_scores(src, tgt); break;
      case BaselineModel::lsi: m = lsi_scores(src, tgt, s.n_components, diag); break;
      case BaselineModel::lda: m = lda_scores(src, tgt, s.num_topics, s.passes, grid.seed); break;
      case BaselineModel::embed:
        if (!embed_provider) throw Error("embed baseline needs an embedding provider");
        m = embedding_scores(ds, *embed_provider);
        break;
    }
    const auto scores = pair_scores(m, ds);
    const auto tuning_scores = detail::subset_scores(scores, tuning);
    auto sweep = sweep_threshold(std::span<const double>(tuning_scores), tuning_labels,
                                 grid.thresholds, diag);
    BaselineCandidate c{s, sweep.best_threshold, sweep.best_f2, sweep.best_f2};
    if (have_validation) {
      const auto vs = detail::subset_scores(scores, split.validation);
      c.validation_f2 = f2_at(vs, val_labels, c.threshold);
    }
    report.candidates.push_back(c);
    if (!best || c.validation_f2 > report.candidates[*best].validation_f2) {
      best = report.candidates.size() - 1;
      report.sweep = std::move(sweep);
      best_scores = scores;
    }
  }
  report.chosen = report.candidates[*best];

  Confusion conf;
  for (const auto& p : split.test) {
    const double sc = best_scores.at(p.key());
    const bool pred = sc >= report.chosen.threshold;
    report.test_predictions.push_back({p.key(), sc, pred, p.label});
    conf.add(pred, p.label);
  }
  report.test_metrics = metrics_from(conf);
  report.test_metrics.strategy = to_string(model);
  report.test_metrics.seed = grid.seed;
  return report;
}

/// CSV: pair,score,threshold,predicted,label
inline std::string baseline_report_csv(const BaselineReport& r) {
  std::string out = "pair,score,threshold,predicted,label\n";
  for (const auto& p : r.test_predictions) {
    out += csv_escape(p.pair.str()) + "," + format_fixed(p.score, 9) + "," +
           format_fixed(r.chosen.threshold, 2) + "," + (p.predicted ? "1" : "0") + "," +
           (p.label ? "1" : "0") + "\n";
  }
  return out;
}

/// CSV: threshold,f2
inline std::string sweep_curve_csv(const ThresholdSweepResult& s) {
  std::string out = "threshold,f2\n";
  for (const auto& [t, f2] : s.curve) out += format_fixed(t, 2) + "," + format_fixed(f2, 9) + "\n";
  return out;
}

}  // namespace tracellm
