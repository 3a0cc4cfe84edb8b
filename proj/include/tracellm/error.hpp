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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tracellm {

/// Base for every error thrown by the library. Operational failures (I/O,
/// transport, bad arguments) use this type directly; the CLI maps it to
/// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates an integrity rule (unknown id, duplicate id, empty
/// artifact, malformed answer row). The CLI maps it to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Remote endpoint failures that survived the retry policy.
class TransportError : public Error {
 public:
  using Error::Error;
};

class AuthError : public TransportError {
 public:
  using TransportError::TransportError;
};

/// Non-fatal findings collected while an operation runs. Passed by pointer;
/// a null sink discards warnings.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
  bool empty() const { return warnings.empty(); }
};

inline void warn(Diagnostics* sink, std::string message) {
  if (sink != nullptr) sink->warn(std::move(message));
}

}  // namespace tracellm
