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

// JSON-over-HTTP POST with the retry policy shared by the chat and
// embedding clients: at most `max_attempts` tries, exponential backoff with
// seeded jitter, retrying only transport errors, 429 and 5xx.

#if defined(TRACELLM_WITH_OPENSSL) && !defined(CPPHTTPLIB_OPENSSL_SUPPORT)
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "tracellm/error.hpp"
#include "tracellm/rng.hpp"

namespace tracellm {

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{16000};
  std::uint64_t jitter_seed = 0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

/// "https://host:port/api/v1" -> {"https://host:port", "/api/v1"}.
struct Endpoint {
  std::string origin;
  std::string path_prefix;

  static Endpoint parse(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
      throw Error("endpoint URL needs a scheme (http:// or https://): " + url);
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
      throw Error("unsupported URL scheme '" + scheme + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = url.substr(0, path_start);
    e.path_prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
    return e;
  }
};

inline std::optional<std::string> env_var(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

struct HttpJsonResult {
  nlohmann::json body;
  int attempts = 0;
};

class JsonPoster {
 public:
  JsonPoster(Endpoint endpoint, std::optional<std::string> bearer, RetryPolicy policy,
             Sleeper sleeper = real_sleeper())
      : endpoint_(std::move(endpoint)),
        bearer_(std::move(bearer)),
        policy_(policy),
        sleeper_(std::move(sleeper)),
        jitter_(policy.jitter_seed) {}

  /// POSTs `payload` to prefix + `path`. Throws AuthError on 401/403,
  /// TransportError once retries are exhausted, Error on other 4xx or on a
  /// body that is not JSON.
  HttpJsonResult post(const std::string& path, const nlohmann::json& payload) {
    const std::string body = payload.dump();
    httplib::Headers headers;
    if (bearer_) headers.emplace("Authorization", "Bearer " + *bearer_);
    std::string last_problem;
    for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
      httplib::Client client(endpoint_.origin);
      client.set_connection_timeout(std::chrono::seconds(10));
      client.set_read_timeout(std::chrono::seconds(120));
      auto res = client.Post(endpoint_.path_prefix + path, headers, body, "application/json");
      bool retryable = false;
      if (!res) {
        last_problem = "transport error: " + httplib::to_string(res.error());
        retryable = true;
      } else if (res->status == 401 || res->status == 403) {
        throw AuthError("authentication failed (HTTP " + std::to_string(res->status) + ")");
      } else if (res->status == 429 || res->status >= 500) {
        last_problem = "HTTP " + std::to_string(res->status);
        retryable = true;
      } else if (res->status < 200 || res->status >= 300) {
        throw Error("request rejected (HTTP " + std::to_string(res->status) + "): " +
                    res->body.substr(0, 200));
      } else {
        try {
          return {nlohmann::json::parse(res->body), attempt};
        } catch (const nlohmann::json::parse_error&) {
          throw Error("malformed response: body is not JSON");
        }
      }
      if (retryable && attempt < policy_.max_attempts) sleeper_(backoff(attempt));
    }
    throw TransportError("giving up after " + std::to_string(policy_.max_attempts) +
                         " attempts: " + last_problem);
  }

  std::chrono::milliseconds backoff(int attempt) {
    const auto exp = policy_.base_delay.count() * (std::int64_t{1} << std::min(attempt - 1, 20));
    const auto capped = std::min<std::int64_t>(exp, policy_.max_delay.count());
    double u;
    {
      std::lock_guard lock(jitter_mutex_);
      u = jitter_.uniform01();
    }
    return std::chrono::milliseconds(static_cast<std::int64_t>(capped * (0.5 + 0.5 * u)));
  }

 private:
  Endpoint endpoint_;
  std::optional<std::string> bearer_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  std::mutex jitter_mutex_;
  Rng jitter_;
};

}  // namespace tracellm
