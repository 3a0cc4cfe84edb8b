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

#include <gtest/gtest.h>

#include <atomic>
#include <random>

#include "support/fixtures.hpp"
#include "support/local_server.hpp"
#include "tracellm/embeddings.hpp"

namespace tracellm {
namespace {

TEST(Cosine, AnalyticValues) {
  EXPECT_DOUBLE_EQ(cosine({1, 0}, {1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(cosine({1, 0}, {0, 1}), 0.0);
  EXPECT_NEAR(cosine({1, 0}, {0.6, 0.8}), 0.6, 1e-15);
}

TEST(Cosine, Errors) {
  EXPECT_THROW(cosine({1, 0}, {1, 0, 0}), Error);
  EXPECT_THROW(cosine({0, 0}, {1, 0}), Error);
  EXPECT_THROW(EmbeddingVector(std::vector<double>{}), Error);
  EXPECT_THROW(EmbeddingVector({1.0, std::nan("")}), Error);
}

TEST(Cosine, SymmetryAndScaleInvariance) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(5), b(5);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    const EmbeddingVector u(a), v(b);
    EXPECT_EQ(cosine(u, v), cosine(v, u));
    const double alpha = std::exp(g(rng) * 3);
    EXPECT_NEAR(cosine(u.scaled(alpha), v), cosine(u, v), 1e-12);
    EXPECT_LE(std::abs(cosine(u, v)), 1.0);
  }
}

TEST(FileProvider, LookupPreservesOrder) {
  FileEmbeddingProvider p(nlohmann::json::parse(R"({"a":[1,0],"b":[0,1]})"));
  const std::vector<std::string> texts{"b", "a"};
  const auto out = p.embed(texts);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], EmbeddingVector({0, 1}));
  EXPECT_EQ(out[1], EmbeddingVector({1, 0}));
}

TEST(FileProvider, HashKeysAndAliases) {
  nlohmann::json doc;
  doc["vectors"][text_key("some long artifact text")] = {1, 2};
  doc["vectors"]["k2"] = {3, 4};
  doc["aliases"]["R1"] = "k2";
  FileEmbeddingProvider p(doc);
  EXPECT_EQ(*p.find("some long artifact text"), EmbeddingVector({1, 2}));
  EXPECT_EQ(*p.find("R1"), EmbeddingVector({3, 4}));
  const std::vector<std::string> missing{"absent"};
  try {
    p.embed(missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing key"), std::string::npos);
  }
}

TEST(FileProvider, DimMismatchAcrossBatch) {
  FileEmbeddingProvider p(nlohmann::json::parse(R"({"a":[1,0],"b":[0,1,2]})"));
  const std::vector<std::string> texts{"a", "b"};
  EXPECT_THROW(p.embed(texts), Error);
}

TEST(EmbedTexts, EmptyInputIsEmpty) {
  EmbeddingProviderConfig cfg;
  cfg.file_path = "/nonexistent/never-read.json";
  EXPECT_TRUE(embed_texts(cfg, {}).empty());
}

TEST(PairRepresentation, ConcatenatesTrimmedTexts) {
  std::vector<Artifact> s{{"S", Side::source, "A "}};
  std::vector<Artifact> t{{"T", Side::target, "B"}};
  const auto ds = TraceDataset::make("d", s, t, {}, {});
  EXPECT_EQ(pair_representation({"S", "T", false}, ds), "A B");
  EXPECT_THROW(pair_representation({"S", "X", false}, ds), DataError);
}

using testing::LocalServer;

TEST(RemoteProvider, BatchesAndReordersByIndex) {
  std::atomic<int> calls{0};
  LocalServer srv("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json data = nlohmann::json::array();
    const auto& input = body["input"];
    // Reverse order on the wire; the provider must reorder by index.
    for (std::size_t i = input.size(); i-- > 0;) {
      const double len = static_cast<double>(input[i].get<std::string>().size());
      data.push_back({{"index", i}, {"embedding", {len, 1.0}}});
    }
    res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
  });
  EmbeddingProviderConfig cfg;
  cfg.kind = EmbeddingKind::remote;
  cfg.endpoint = srv.origin() + "/v1/embeddings";
  cfg.model_name = "mpnet";
  cfg.batch_size = 2;
  const std::vector<std::string> texts{"a", "bb", "ccc", "dddd", "eeeee"};
  const auto out = embed_texts(cfg, texts);
  ASSERT_EQ(out.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(out[i][0], static_cast<double>(i + 1));
  EXPECT_EQ(calls.load(), 3);
}

TEST(RemoteProvider, CountMismatch) {
  LocalServer srv("/v1/embeddings", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"data":[{"index":0,"embedding":[1]},{"index":1,"embedding":[1]},)"
                    R"({"index":2,"embedding":[1]}]})",
                    "application/json");
  });
  EmbeddingProviderConfig cfg;
  cfg.kind = EmbeddingKind::remote;
  cfg.endpoint = srv.origin() + "/v1/embeddings";
  cfg.model_name = "m";
  const std::vector<std::string> texts{"x", "y"};
  try {
    embed_texts(cfg, texts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("count mismatch"), std::string::npos);
  }
}

TEST(ProviderConfig, KindConsistency) {
  EXPECT_THROW(EmbeddingProviderConfig::from_json({{"kind", "remote"}}), Error);
  EXPECT_THROW(EmbeddingProviderConfig::from_json({{"kind", "file"}}), Error);
  EXPECT_THROW(EmbeddingProviderConfig::from_json({{"kind", "gpu"}}), Error);
  EXPECT_NO_THROW(EmbeddingProviderConfig::from_json({{"kind", "file"}, {"file_path", "x.json"}}));
}

}  // namespace
}  // namespace tracellm
