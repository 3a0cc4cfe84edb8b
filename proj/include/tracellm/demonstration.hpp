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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracellm/corpus.hpp"
#include "tracellm/embeddings.hpp"

namespace tracellm {

/// A labeled pair offered to the model as a few-shot example.
struct Demonstration {
  CandidatePair pair;
  std::string representation;
  std::optional<EmbeddingVector> embedding;
  std::optional<double> confidence;  // P(gold label | pair), in [0, 1]
};

enum class Strategy { random, diversity, similarity, uncertainty };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::random: return "random";
    case Strategy::diversity: return "diversity";
    case Strategy::similarity: return "similarity";
    case Strategy::uncertainty: return "uncertainty";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "random") return Strategy::random;
  if (s == "diversity") return Strategy::diversity;
  if (s == "similarity") return Strategy::similarity;
  if (s == "uncertainty") return Strategy::uncertainty;
  throw Error("unknown strategy '" + std::string(s) +
              "' (random|diversity|similarity|uncertainty)");
}

struct SelectionResult {
  std::vector<Demonstration> selected;    // in prompt order
  std::vector<std::size_t> pool_indices;  // selected[i] == pool[pool_indices[i]]
  Strategy strategy = Strategy::random;
  std::size_t k = 0;
  bool balanced = false;
  std::optional<std::uint64_t> seed;
};

/// Builds a pool from candidate pairs; embeddings and confidences are filled
/// in later as the strategy needs them.
inline std::vector<Demonstration> make_pool(const std::vector<CandidatePair>& pairs,
                                            const TraceDataset& ds) {
  std::vector<Demonstration> pool;
  pool.reserve(pairs.size());
  for (const auto& p : pairs) pool.push_back({p, pair_representation(p, ds), {}, {}});
  return pool;
}

/// Fills every pool embedding from `provider` in one call (one vector per
/// pool item, computed once per pool).
inline void attach_embeddings(std::vector<Demonstration>& pool, EmbeddingProvider& provider) {
  std::vector<std::string> texts;
  texts.reserve(pool.size());
  for (const auto& d : pool) texts.push_back(d.representation);
  auto vectors = provider.embed(texts);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i].embedding = std::move(vectors[i]);
}

}  // namespace tracellm
