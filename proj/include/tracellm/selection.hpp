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

// Demonstration selection.
//
//   random      k draws without replacement, in draw order
//   diversity   greedy: most dissimilar pair first, then each pick minimizes
//               its summed cosine to everything already picked
//   similarity  top-k cosine to the query, most similar first
//   uncertainty top-k least confident (lowest P(gold | pair)), least first
//
// Ties always go to the lowest pool index. A k larger than the pool is
// clamped with a warning. select_label_aware splits the budget between the
// true and false classes and runs a strategy inside each.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tracellm/corpus.hpp"
#include "tracellm/demonstration.hpp"
#include "tracellm/embeddings.hpp"
#include "tracellm/error.hpp"
#include "tracellm/llm_client.hpp"
#include "tracellm/parallel.hpp"
#include "tracellm/prompting.hpp"
#include "tracellm/rng.hpp"

namespace tracellm {

namespace detail {

inline std::size_t clamp_k(std::size_t k, std::size_t n, const char* what, Diagnostics* diag) {
  if (k > n) {
    warn(diag, std::string(what) + ": k=" + std::to_string(k) + " exceeds pool size " +
                   std::to_string(n) + ", clamped");
    return n;
  }
  return k;
}

inline SelectionResult make_result(const std::vector<Demonstration>& pool,
                                   std::vector<std::size_t> order, Strategy s, std::size_t k) {
  SelectionResult r;
  r.strategy = s;
  r.k = k;
  r.pool_indices = std::move(order);
  r.selected.reserve(r.pool_indices.size());
  for (auto i : r.pool_indices) r.selected.push_back(pool[i]);
  return r;
}

inline const EmbeddingVector& embedding_of(const Demonstration& d, std::size_t i) {
  if (!d.embedding) {
    throw Error("missing embedding for pool item " + std::to_string(i) + " (" + d.pair.key().str() +
                ")");
  }
  return *d.embedding;
}

/// Indices sorted by `key` (ascending when `ascending`), ties by index.
inline std::vector<std::size_t> ranked(const std::vector<double>& key, bool ascending) {
  std::vector<std::size_t> idx(key.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return ascending ? key[a] < key[b] : key[a] > key[b];
  });
  return idx;
}

}  // namespace detail

inline SelectionResult select_random(const std::vector<Demonstration>& pool, std::size_t k,
                                     std::uint64_t seed, Diagnostics* diag = nullptr) {
  if (pool.empty()) throw Error("select_random: empty pool");
  if (k < 1) throw Error("select_random: k must be >= 1");
  const std::size_t take = detail::clamp_k(k, pool.size(), "select_random", diag);
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  // Partial Fisher-Yates: position i receives the i-th draw.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  auto r = detail::make_result(pool, std::move(idx), Strategy::random, k);
  r.seed = seed;
  return r;
}

inline SelectionResult select_diverse(const std::vector<Demonstration>& pool, std::size_t k,
                                      Diagnostics* diag = nullptr) {
  if (k < 2) throw Error("select_diverse: k must be >= 2");
  if (pool.empty()) throw Error("select_diverse: empty pool");
  const std::size_t n = pool.size();
  for (std::size_t i = 0; i < n; ++i) detail::embedding_of(pool[i], i);
  const std::size_t take = detail::clamp_k(k, n, "select_diverse", diag);
  if (n == 1) return detail::make_result(pool, {0}, Strategy::diversity, k);

  std::vector<double> sim(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      sim[i * n + j] = sim[j * n + i] = cosine(*pool[i].embedding, *pool[j].embedding);
    }
  }

  std::size_t bi = 0, bj = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sim[i * n + j] < sim[bi * n + bj]) bi = i, bj = j;
    }
  }
  std::vector<std::size_t> order{bi, bj};
  std::vector<bool> used(n, false);
  used[bi] = used[bj] = true;
  std::vector<double> summed(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) summed[c] = sim[c * n + bi] + sim[c * n + bj];

  while (order.size() < take) {
    std::optional<std::size_t> best;
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c]) continue;
      if (!best || summed[c] < summed[*best]) best = c;
    }
    order.push_back(*best);
    used[*best] = true;
    for (std::size_t c = 0; c < n; ++c) summed[c] += sim[c * n + *best];
  }
  order.resize(take);
  return detail::make_result(pool, std::move(order), Strategy::diversity, k);
}

inline SelectionResult select_similar(const EmbeddingVector& query,
                                      const std::vector<Demonstration>& pool, std::size_t k,
                                      Diagnostics* diag = nullptr) {
  if (pool.empty()) throw Error("select_similar: empty pool");
  if (k < 1) throw Error("select_similar: k must be >= 1");
  const std::size_t take = detail::clamp_k(k, pool.size(), "select_similar", diag);
  std::vector<double> score(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    score[i] = cosine(query, detail::embedding_of(pool[i], i));
  }
  auto idx = detail::ranked(score, /*ascending=*/false);
  idx.resize(take);
  return detail::make_result(pool, std::move(idx), Strategy::similarity, k);
}

inline SelectionResult select_least_confident(const std::vector<Demonstration>& pool,
                                              std::size_t k, Diagnostics* diag = nullptr) {
  if (pool.empty()) throw Error("select_least_confident: empty pool");
  if (k < 1) throw Error("select_least_confident: k must be >= 1");
  const std::size_t take = detail::clamp_k(k, pool.size(), "select_least_confident", diag);
  std::vector<double> conf(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!pool[i].confidence) {
      throw Error("missing confidence for pool item " + std::to_string(i) + " (" +
                  pool[i].pair.key().str() + ")");
    }
    conf[i] = *pool[i].confidence;
  }
  auto idx = detail::ranked(conf, /*ascending=*/true);
  idx.resize(take);
  return detail::make_result(pool, std::move(idx), Strategy::uncertainty, k);
}

/// A strategy bound to its extra inputs (seed, query), applied to one pool.
using Selector =
    std::function<SelectionResult(const std::vector<Demonstration>& pool, std::size_t k)>;

/// Binds `strategy` to a Selector. Diversity asked for a single item runs
/// with k=2 and keeps the first pick.
inline Selector make_selector(Strategy strategy, std::uint64_t seed = 0,
                              std::optional<EmbeddingVector> query = std::nullopt,
                              Diagnostics* diag = nullptr) {
  switch (strategy) {
    case Strategy::random:
      return [=](const std::vector<Demonstration>& p, std::size_t k) {
        return select_random(p, k, seed, diag);
      };
    case Strategy::diversity:
      return [=](const std::vector<Demonstration>& p, std::size_t k) {
        if (k >= 2) return select_diverse(p, k, diag);
        auto r = select_diverse(p, 2, nullptr);
        r.selected.resize(std::min<std::size_t>(r.selected.size(), 1));
        r.pool_indices.resize(r.selected.size());
        r.k = k;
        return r;
      };
    case Strategy::similarity:
      if (!query) throw Error("similarity selection needs a query embedding");
      return [=](const std::vector<Demonstration>& p, std::size_t k) {
        return select_similar(*query, p, k, diag);
      };
    case Strategy::uncertainty:
      return [=](const std::vector<Demonstration>& p, std::size_t k) {
        return select_least_confident(p, k, diag);
      };
  }
  throw Error("unknown strategy");
}

/// Per-class quotas for a budget of k over {true, false}: floor(k/2) each,
/// the odd remainder to the true class.
inline std::pair<std::size_t, std::size_t> label_quotas(std::size_t k) {
  return {k / 2 + k % 2, k / 2};
}

inline SelectionResult select_label_aware(const std::vector<Demonstration>& pool,
                                          const Selector& strategy, std::size_t k,
                                          Diagnostics* diag = nullptr) {
  if (pool.empty()) throw Error("select_label_aware: empty pool");
  if (k < 1) throw Error("select_label_aware: k must be >= 1");
  if (k < 2) warn(diag, "label-aware selection with k < 2 cannot cover both labels");

  std::vector<std::size_t> members[2];  // [0] true, [1] false
  for (std::size_t i = 0; i < pool.size(); ++i) members[pool[i].pair.label ? 0 : 1].push_back(i);

  auto [qt, qf] = label_quotas(k);
  std::size_t quota[2] = {qt, qf};
  for (int c = 0; c < 2; ++c) {
    const int o = 1 - c;
    if (quota[c] > members[c].size()) {
      const std::size_t shortfall = quota[c] - members[c].size();
      warn(diag, std::string("label-aware: only ") + std::to_string(members[c].size()) + " " +
                     (c == 0 ? "true" : "false") + " demonstrations for a quota of " +
                     std::to_string(quota[c]) + ", reassigning " + std::to_string(shortfall));
      quota[c] = members[c].size();
      quota[o] = std::min(quota[o] + shortfall, members[o].size());
    }
  }
  if (quota[0] + quota[1] < k) {
    warn(diag, "label-aware: k=" + std::to_string(k) + " exceeds pool size " +
                   std::to_string(pool.size()) + ", clamped");
  }

  std::vector<std::size_t> picked[2];
  Strategy used = Strategy::random;
  for (int c = 0; c < 2; ++c) {
    if (quota[c] == 0) continue;
    std::vector<Demonstration> sub;
    sub.reserve(members[c].size());
    for (auto i : members[c]) sub.push_back(pool[i]);
    auto r = strategy(sub, quota[c]);
    used = r.strategy;
    for (auto si : r.pool_indices) picked[c].push_back(members[c][si]);
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < std::max(picked[0].size(), picked[1].size()); ++i) {
    if (i < picked[0].size()) order.push_back(picked[0][i]);
    if (i < picked[1].size()) order.push_back(picked[1][i]);
  }
  auto r = detail::make_result(pool, std::move(order), used, k);
  r.balanced = true;
  return r;
}

/// Dispatches on strategy and the balanced flag.
inline SelectionResult select(Strategy strategy, const std::vector<Demonstration>& pool,
                              std::size_t k, bool balanced, std::uint64_t seed = 0,
                              std::optional<EmbeddingVector> query = std::nullopt,
                              Diagnostics* diag = nullptr) {
  SelectionResult r;
  if (balanced) {
    r = select_label_aware(pool, make_selector(strategy, seed, query, diag), k, diag);
  } else {
    r = make_selector(strategy, seed, query, diag)(pool, k);
  }
  r.strategy = strategy;
  if (strategy == Strategy::random) r.seed = seed;
  return r;
}

// ---------------------------------------------------------------------------
// Confidence for the uncertainty strategy

enum class ConfidenceMode { automatic, logprob, sampling };

struct ConfidenceOptions {
  ConfidenceMode mode = ConfidenceMode::automatic;
  std::size_t samples = 5;          // m, sampling mode
  double sampling_temperature = 1.0;
  std::size_t max_concurrency = 4;
  std::string model;
};

/// Probability mass of the gold answer in a first-token distribution.
/// Tokens are trimmed and case-folded, so "Yes", " yes" and "YES" all count.
inline double gold_token_mass(const std::map<std::string, double>& logprobs, bool gold) {
  const auto want = to_lower_ascii(answer_word(gold));
  double mass = 0.0;
  for (const auto& [tok, lp] : logprobs) {
    if (to_lower_ascii(trim_view(tok)) == want) mass += std::exp(lp);
  }
  return std::clamp(mass, 0.0, 1.0);
}

/// Fills `confidence` on every pool item with P(gold label | pair) under the
/// zero-shot prompt `spec`.
inline void compute_confidences(std::vector<Demonstration>& pool, const PromptSpec& spec,
                                const TraceDataset& ds, LlmClient& client,
                                const ConfidenceOptions& opts = {}) {
  ConfidenceMode mode = opts.mode;
  if (mode == ConfidenceMode::automatic) {
    if (client.supports_logprobs()) {
      mode = ConfidenceMode::logprob;
    } else if (client.supports_sampling()) {
      mode = ConfidenceMode::sampling;
    } else {
      throw Error("client supports neither token log-probabilities nor sampling");
    }
  }
  if (mode == ConfidenceMode::logprob && !client.supports_logprobs()) {
    throw Error("client does not expose token log-probabilities");
  }
  if (mode == ConfidenceMode::sampling && !client.supports_sampling()) {
    throw Error("client does not support repeated sampling");
  }
  if (mode == ConfidenceMode::sampling && opts.samples == 0) {
    throw Error("sampling mode needs at least one sample");
  }

  std::vector<double> out(pool.size());
  const auto one = [&](std::size_t i) {
    const auto& d = pool[i];
    CompletionRequest req;
    req.model = opts.model;
    req.prompt = build_prompt(spec, ds, d.pair);
    if (mode == ConfidenceMode::logprob) {
      req.want_logprobs = true;
      const auto res = client.complete(req);
      if (!res.token_logprobs) {
        throw Error("client returned no log-probabilities for " + d.pair.key().str());
      }
      out[i] = gold_token_mass(*res.token_logprobs, d.pair.label);
    } else {
      req.temperature = opts.sampling_temperature;
      std::size_t hits = 0;
      for (std::size_t s = 0; s < opts.samples; ++s) {
        const auto res = client.complete(req);
        try {
          hits += parse_verdict(res.text).linked == d.pair.label ? 1 : 0;
        } catch (const UnparseableVerdict&) {
          // An unparseable sample is not the gold answer.
        }
      }
      out[i] = static_cast<double>(hits) / static_cast<double>(opts.samples);
    }
  };
  // The samples of one pair are drawn sequentially inside `one`.
  parallel_for(pool.size(), opts.max_concurrency, one);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i].confidence = out[i];
}

}  // namespace tracellm
