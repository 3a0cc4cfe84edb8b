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

// Vector representations of artifacts and demonstration pairs.
//
// Embedding file format (JSON), either a flat object
//   {"<key>": [v0, v1, ...], ...}
// or
//   {"vectors": {"<key>": [...]}, "aliases": {"<name>": "<key>"}}
// A text is resolved by: aliases[text], then vectors[text_key(text)] (the
// 16-hex-digit FNV-1a of the text), then vectors[text] verbatim.

#include <cmath>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "tracellm/corpus.hpp"
#include "tracellm/error.hpp"
#include "tracellm/http.hpp"
#include "tracellm/parallel.hpp"
#include "tracellm/text.hpp"

namespace tracellm {

class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error("embedding vector must have dim >= 1");
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error("embedding vector has a non-finite component");
    }
  }

  EmbeddingVector(std::initializer_list<double> values)
      : EmbeddingVector(std::vector<double>(values)) {}

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool operator==(const EmbeddingVector&) const = default;

  EmbeddingVector scaled(double alpha) const {
    std::vector<double> out(values_);
    for (double& v : out) v *= alpha;
    return EmbeddingVector(std::move(out));
  }

 private:
  std::vector<double> values_;
};

/// dot(u, v) / (|u| |v|), clamped to [-1, 1]. The product is accumulated in
/// index order so cosine(u, v) == cosine(v, u) bit-for-bit.
inline double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw Error("cosine: dim mismatch (" + std::to_string(u.dim()) + " vs " +
                std::to_string(v.dim()) + ")");
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw Error("cosine: zero-norm vector");
  const double c = dot / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(c, -1.0, 1.0);
}

/// Source text, one space, target text.
inline std::string pair_representation(const CandidatePair& p, const TraceDataset& ds) {
  return ds.source_text(p.source_id) + " " + ds.target_text(p.target_id);
}

enum class EmbeddingKind { file, remote };

struct EmbeddingProviderConfig {
  EmbeddingKind kind = EmbeddingKind::file;
  std::filesystem::path file_path;
  std::string endpoint;
  std::string model_name;
  std::size_t batch_size = 32;
  std::size_t max_concurrency = 4;
  RetryPolicy retry;

  static EmbeddingProviderConfig from_json(const nlohmann::json& j) {
    EmbeddingProviderConfig c;
    const auto kind = j.value("kind", "file");
    if (kind == "file") {
      c.kind = EmbeddingKind::file;
      c.file_path = j.value("file_path", "");
    } else if (kind == "remote") {
      c.kind = EmbeddingKind::remote;
      c.endpoint = j.value("endpoint", "");
      c.model_name = j.value("model_name", "");
    } else {
      throw Error("embedding provider kind must be 'file' or 'remote'");
    }
    c.batch_size = j.value("batch_size", std::size_t{32});
    c.max_concurrency = j.value("max_concurrency", std::size_t{4});
    c.validate();
    return c;
  }

  void validate() const {
    if (batch_size == 0) throw Error("embedding batch_size must be positive");
    if (kind == EmbeddingKind::file && file_path.empty()) {
      throw Error("file embedding provider needs file_path");
    }
    if (kind == EmbeddingKind::remote && (endpoint.empty() || model_name.empty())) {
      throw Error("remote embedding provider needs endpoint and model_name");
    }
  }
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  /// One vector per text, same order, all of one dimension.
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
};

namespace detail {

inline void check_uniform_dim(const std::vector<EmbeddingVector>& out) {
  for (const auto& v : out) {
    if (v.dim() != out.front().dim()) {
      throw Error("embedding dim mismatch (" + std::to_string(v.dim()) + " vs " +
                  std::to_string(out.front().dim()) + ")");
    }
  }
}

inline EmbeddingVector vector_from_json(const nlohmann::json& arr, const std::string& what) {
  if (!arr.is_array()) throw Error("embedding for '" + what + "' is not an array");
  std::vector<double> values;
  values.reserve(arr.size());
  for (const auto& x : arr) {
    if (!x.is_number()) throw Error("embedding for '" + what + "' has a non-numeric entry");
    values.push_back(x.get<double>());
  }
  return EmbeddingVector(std::move(values));
}

}  // namespace detail

/// Read-only after construction; safe to share between threads.
class FileEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(const nlohmann::json& doc) { load(doc); }

  static FileEmbeddingProvider from_file(const std::filesystem::path& path) {
    try {
      return FileEmbeddingProvider(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error("embedding file is not valid JSON: " + std::string(e.what()));
    }
  }

  std::optional<EmbeddingVector> find(const std::string& text) const {
    if (auto a = aliases_.find(text); a != aliases_.end()) {
      if (auto v = vectors_.find(a->second); v != vectors_.end()) return v->second;
    }
    if (auto v = vectors_.find(text_key(text)); v != vectors_.end()) return v->second;
    if (auto v = vectors_.find(text); v != vectors_.end()) return v->second;
    return std::nullopt;
  }

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
      auto v = find(t);
      if (!v) {
        throw Error("missing key: no embedding for text '" + t.substr(0, 60) + "' (key " +
                    text_key(t) + ")");
      }
      out.push_back(std::move(*v));
    }
    if (!out.empty()) detail::check_uniform_dim(out);
    return out;
  }

  std::size_t size() const { return vectors_.size(); }

 private:
  void load(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error("embedding file must be a JSON object");
    const bool structured = doc.contains("vectors") && doc["vectors"].is_object();
    const auto& vectors = structured ? doc["vectors"] : doc;
    for (const auto& [key, arr] : vectors.items()) {
      vectors_.emplace(key, detail::vector_from_json(arr, key));
    }
    if (structured && doc.contains("aliases")) {
      for (const auto& [name, key] : doc["aliases"].items()) {
        aliases_.emplace(name, key.get<std::string>());
      }
    }
  }

  std::unordered_map<std::string, EmbeddingVector> vectors_;
  std::unordered_map<std::string, std::string> aliases_;
};

/// POSTs {"model", "input"} batches to the endpoint; responses
/// {"data": [{"index", "embedding"}]} are reordered by index.
class RemoteEmbeddingProvider : public EmbeddingProvider {
 public:
  RemoteEmbeddingProvider(EmbeddingProviderConfig cfg, Sleeper sleeper = real_sleeper())
      : cfg_(std::move(cfg)),
        poster_(Endpoint::parse(cfg_.endpoint), env_var("TRACELLM_API_KEY"), cfg_.retry,
                std::move(sleeper)) {}

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override {
    const std::size_t batches = (texts.size() + cfg_.batch_size - 1) / cfg_.batch_size;
    std::vector<std::vector<EmbeddingVector>> results(batches);
    parallel_for(batches, cfg_.max_concurrency, [&](std::size_t b) {
      const std::size_t begin = b * cfg_.batch_size;
      const std::size_t end = std::min(texts.size(), begin + cfg_.batch_size);
      results[b] = embed_batch(texts.subspan(begin, end - begin));
    });
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (auto& r : results) {
      for (auto& v : r) out.push_back(std::move(v));
    }
    if (!out.empty()) detail::check_uniform_dim(out);
    return out;
  }

 private:
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> batch) {
    nlohmann::json payload = {{"model", cfg_.model_name},
                              {"input", std::vector<std::string>(batch.begin(), batch.end())}};
    const auto res = poster_.post("", payload);
    const auto& body = res.body;
    if (!body.contains("data") || !body["data"].is_array()) {
      throw Error("malformed embedding response: missing data array");
    }
    const auto& data = body["data"];
    if (data.size() != batch.size()) {
      throw Error("count mismatch: sent " + std::to_string(batch.size()) + " texts, got " +
                  std::to_string(data.size()) + " embeddings");
    }
    std::vector<std::optional<EmbeddingVector>> slots(batch.size());
    for (const auto& entry : data) {
      const auto idx = entry.at("index").get<std::size_t>();
      if (idx >= slots.size() || slots[idx]) {
        throw Error("malformed embedding response: bad or repeated index " + std::to_string(idx));
      }
      slots[idx] = detail::vector_from_json(entry.at("embedding"), "index " + std::to_string(idx));
    }
    std::vector<EmbeddingVector> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
  }

  EmbeddingProviderConfig cfg_;
  JsonPoster poster_;
};

inline std::unique_ptr<EmbeddingProvider> make_embedding_provider(
    const EmbeddingProviderConfig& cfg) {
  cfg.validate();
  if (cfg.kind == EmbeddingKind::file) {
    return std::make_unique<FileEmbeddingProvider>(
        FileEmbeddingProvider::from_file(cfg.file_path));
  }
  return std::make_unique<RemoteEmbeddingProvider>(cfg);
}

inline std::vector<EmbeddingVector> embed_texts(const EmbeddingProviderConfig& cfg,
                                                std::span<const std::string> texts) {
  if (texts.empty()) return {};
  return make_embedding_provider(cfg)->embed(texts);
}

}  // namespace tracellm
