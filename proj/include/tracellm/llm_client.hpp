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

// Chat-completion clients and cost accounting.
//
// Two implementations share the LlmClient interface:
//   ScriptedClient  - offline, deterministic; answers come from a table keyed
//                     by prompt hash or by "source|target" pair key.
//   HttpChatClient  - OpenAI-compatible /chat/completions endpoint. Base URL
//                     from TRACELLM_API_BASE, bearer token from
//                     TRACELLM_API_KEY. Credentials are never read from files.

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "tracellm/corpus.hpp"
#include "tracellm/error.hpp"
#include "tracellm/http.hpp"
#include "tracellm/prompting.hpp"
#include "tracellm/text.hpp"

namespace tracellm {

struct CompletionRequest {
  std::string model;
  RenderedPrompt prompt;
  double temperature = 0.0;
  int max_tokens = 1;
  bool want_logprobs = false;

  void validate() const {
    if (!(temperature >= 0.0)) throw Error("temperature must be >= 0");
    if (max_tokens < 1) throw Error("max_tokens must be >= 1");
  }
};

struct Usage {
  long long input_tokens = 0;
  long long output_tokens = 0;
};

struct CompletionResponse {
  std::string text;
  long long input_tokens = 0;
  long long output_tokens = 0;
  std::optional<std::map<std::string, double>> token_logprobs;
  int attempts = 1;

  Usage usage() const { return {input_tokens, output_tokens}; }
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual CompletionResponse complete(const CompletionRequest& req) = 0;
  virtual bool supports_logprobs() const = 0;
  virtual bool supports_sampling() const = 0;
};

/// Whitespace token count. Not billing-grade; used only by the scripted
/// client so offline runs still produce usage numbers.
inline long long whitespace_token_count(std::string_view text) {
  return static_cast<long long>(split_whitespace(text).size());
}

/// Offline client. Each key maps to one or more responses; repeated calls on
/// the same key cycle through them, so sampling-mode confidences can be
/// scripted. Thread-safe.
class ScriptedClient : public LlmClient {
 public:
  ScriptedClient() = default;
  ScriptedClient(ScriptedClient&& o) noexcept
      : by_pair_(std::move(o.by_pair_)),
        by_prompt_(std::move(o.by_prompt_)),
        logprobs_(std::move(o.logprobs_)),
        calls_(std::move(o.calls_)) {}

  void script_pair(const PairKey& key, std::vector<std::string> responses) {
    by_pair_[key.str()] = std::move(responses);
  }
  void script_prompt(std::string_view prompt_text, std::vector<std::string> responses) {
    by_prompt_[text_key(prompt_text)] = std::move(responses);
  }
  void script_logprobs(const PairKey& key, std::map<std::string, double> logprobs) {
    logprobs_[key.str()] = std::move(logprobs);
  }

  /// Answers every pair of the dataset with its gold label.
  static ScriptedClient gold_echo(const TraceDataset& ds) {
    ScriptedClient c;
    for (const auto& p : enumerate_pairs(ds)) c.script_pair(p.key(), {answer_word(p.label)});
    return c;
  }

  /// {"responses": {"S|T": "Yes" | ["Yes", "No"]},
  ///  "by_prompt_hash": {"<hex>": ...},
  ///  "logprobs": {"S|T": {"Yes": -0.1, "No": -2.3}}}
  static ScriptedClient from_json(const nlohmann::json& j) {
    ScriptedClient c;
    const auto list = [](const nlohmann::json& v) {
      std::vector<std::string> out;
      if (v.is_string()) {
        out.push_back(v.get<std::string>());
      } else {
        for (const auto& s : v) out.push_back(s.get<std::string>());
      }
      if (out.empty()) throw Error("scripted response list is empty");
      return out;
    };
    if (j.contains("responses")) {
      for (const auto& [k, v] : j["responses"].items()) c.by_pair_[k] = list(v);
    }
    if (j.contains("by_prompt_hash")) {
      for (const auto& [k, v] : j["by_prompt_hash"].items()) c.by_prompt_[k] = list(v);
    }
    if (j.contains("logprobs")) {
      for (const auto& [k, v] : j["logprobs"].items()) {
        c.logprobs_[k] = v.get<std::map<std::string, double>>();
      }
    }
    return c;
  }

  CompletionResponse complete(const CompletionRequest& req) override {
    req.validate();
    const auto pair_key = req.prompt.pair_key.str();
    CompletionResponse res;
    res.input_tokens = whitespace_token_count(req.prompt.text);
    if (req.want_logprobs) {
      const auto it = logprobs_.find(pair_key);
      if (it == logprobs_.end()) throw Error("unscripted pair: " + pair_key + " (logprobs)");
      res.token_logprobs = it->second;
      // The emitted text is the most probable scripted token.
      double best = -INFINITY;
      for (const auto& [tok, lp] : it->second) {
        if (lp > best) {
          best = lp;
          res.text = tok;
        }
      }
    } else {
      const std::vector<std::string>* list = nullptr;
      std::string counter_key;
      if (auto it = by_prompt_.find(text_key(req.prompt.text)); it != by_prompt_.end()) {
        list = &it->second;
        counter_key = "#" + it->first;
      } else if (auto it2 = by_pair_.find(pair_key); it2 != by_pair_.end()) {
        list = &it2->second;
        counter_key = pair_key;
      } else {
        throw Error("unscripted pair: " + pair_key);
      }
      std::size_t n;
      {
        std::lock_guard lock(mutex_);
        n = calls_[counter_key]++;
      }
      res.text = (*list)[n % list->size()];
    }
    res.output_tokens = whitespace_token_count(res.text);
    return res;
  }

  bool supports_logprobs() const override { return !logprobs_.empty(); }
  bool supports_sampling() const override { return !by_pair_.empty() || !by_prompt_.empty(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> by_pair_;
  std::unordered_map<std::string, std::vector<std::string>> by_prompt_;
  std::unordered_map<std::string, std::map<std::string, double>> logprobs_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::size_t> calls_;
};

struct HttpClientConfig {
  std::string api_base;  // e.g. https://openrouter.ai/api/v1
  std::optional<std::string> api_key;
  RetryPolicy retry;
  int top_logprobs = 5;

  /// Reads TRACELLM_API_BASE and TRACELLM_API_KEY.
  static HttpClientConfig from_env() {
    HttpClientConfig c;
    const auto base = env_var("TRACELLM_API_BASE");
    if (!base) throw Error("TRACELLM_API_BASE is not set");
    c.api_base = *base;
    c.api_key = env_var("TRACELLM_API_KEY");
    return c;
  }
};

class HttpChatClient : public LlmClient {
 public:
  explicit HttpChatClient(HttpClientConfig cfg, Sleeper sleeper = real_sleeper())
      : cfg_(std::move(cfg)),
        poster_(Endpoint::parse(cfg_.api_base), cfg_.api_key, cfg_.retry, std::move(sleeper)) {}

  static nlohmann::json request_body(const CompletionRequest& req, int top_logprobs) {
    nlohmann::json body = {
        {"model", req.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.prompt.text}}})},
        {"temperature", req.temperature},
        {"max_tokens", req.max_tokens}};
    if (req.want_logprobs) {
      body["logprobs"] = true;
      body["top_logprobs"] = top_logprobs;
    }
    return body;
  }

  static CompletionResponse parse_response(const nlohmann::json& body) {
    try {
      CompletionResponse res;
      const auto& choice = body.at("choices").at(0);
      const auto& content = choice.at("message").at("content");
      res.text = content.is_null() ? "" : content.get<std::string>();
      if (body.contains("usage") && body["usage"].is_object()) {
        res.input_tokens = body["usage"].value("prompt_tokens", 0LL);
        res.output_tokens = body["usage"].value("completion_tokens", 0LL);
      }
      if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
          choice["logprobs"].contains("content") && choice["logprobs"]["content"].is_array() &&
          !choice["logprobs"]["content"].empty()) {
        const auto& first = choice["logprobs"]["content"][0];
        std::map<std::string, double> lp;
        if (first.contains("top_logprobs")) {
          for (const auto& t : first["top_logprobs"]) {
            lp[t.at("token").get<std::string>()] = t.at("logprob").get<double>();
          }
        }
        if (lp.empty() && first.contains("token")) {
          lp[first["token"].get<std::string>()] = first.at("logprob").get<double>();
        }
        res.token_logprobs = std::move(lp);
      }
      if (res.input_tokens < 0 || res.output_tokens < 0) {
        throw Error("malformed response: negative token counts");
      }
      return res;
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed response: " + std::string(e.what()));
    }
  }

  CompletionResponse complete(const CompletionRequest& req) override {
    req.validate();
    const auto result = poster_.post("/chat/completions", request_body(req, cfg_.top_logprobs));
    auto res = parse_response(result.body);
    res.attempts = result.attempts;
    return res;
  }

  bool supports_logprobs() const override { return true; }
  bool supports_sampling() const override { return true; }

 private:
  HttpClientConfig cfg_;
  JsonPoster poster_;
};

// ---------------------------------------------------------------------------
// Cost accounting

struct ModelRates {
  double input_cost_per_million = 0.0;
  double output_cost_per_million = 0.0;
};

class PricingTable {
 public:
  void set(const std::string& model, ModelRates rates) {
    if (rates.input_cost_per_million < 0 || rates.output_cost_per_million < 0) {
      throw Error("negative rate for model '" + model + "'");
    }
    rates_[model] = rates;
  }

  const ModelRates& get(const std::string& model) const {
    const auto it = rates_.find(model);
    if (it == rates_.end()) throw Error("unknown model '" + model + "' in pricing table");
    return it->second;
  }

  static PricingTable from_json(const nlohmann::json& j) {
    PricingTable t;
    for (const auto& [model, r] : j.items()) {
      t.set(model, {r.at("input_cost_per_million").get<double>(),
                    r.at("output_cost_per_million").get<double>()});
    }
    return t;
  }

 private:
  std::map<std::string, ModelRates> rates_;
};

struct CostReport {
  std::string model;
  long long calls = 0;
  long long input_tokens = 0;
  long long output_tokens = 0;
  double input_cost = 0.0;
  double output_cost = 0.0;
  double total_cost = 0.0;

  CostReport& operator+=(const CostReport& o) {
    calls += o.calls;
    input_tokens += o.input_tokens;
    output_tokens += o.output_tokens;
    input_cost += o.input_cost;
    output_cost += o.output_cost;
    total_cost += o.total_cost;
    return *this;
  }

  nlohmann::json to_json() const {
    return {{"model", model},           {"calls", calls},
            {"input_tokens", input_tokens}, {"output_tokens", output_tokens},
            {"input_cost", input_cost},     {"output_cost", output_cost},
            {"total_cost", total_cost}};
  }
};

inline CostReport operator+(CostReport a, const CostReport& b) { return a += b; }

inline CostReport cost_report(std::span<const Usage> usages, const PricingTable& pricing,
                              const std::string& model) {
  const auto& rates = pricing.get(model);
  CostReport r;
  r.model = model;
  for (const auto& u : usages) {
    ++r.calls;
    r.input_tokens += u.input_tokens;
    r.output_tokens += u.output_tokens;
  }
  r.input_cost = static_cast<double>(r.input_tokens) / 1e6 * rates.input_cost_per_million;
  r.output_cost = static_cast<double>(r.output_tokens) / 1e6 * rates.output_cost_per_million;
  r.total_cost = r.input_cost + r.output_cost;
  return r;
}

inline CostReport cost_report(std::span<const CompletionResponse> responses,
                              const PricingTable& pricing, const std::string& model) {
  std::vector<Usage> usages;
  usages.reserve(responses.size());
  for (const auto& r : responses) usages.push_back(r.usage());
  return cost_report(std::span<const Usage>(usages), pricing, model);
}

}  // namespace tracellm
