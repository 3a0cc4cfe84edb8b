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

// On-disk fixtures for tests: temporary directories and synthetic datasets
// with the shape (artifact counts, link counts, template values) of the four
// benchmark corpora. Texts are generated, not real.

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracellm/corpus.hpp"
#include "tracellm/embeddings.hpp"
#include "tracellm/text.hpp"

namespace tracellm::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("tracellm-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& p) const { return path_ / p; }

 private:
  fs::path path_;
};

struct ShapedSpec {
  std::string name;
  std::size_t sources = 0;
  std::size_t targets = 0;
  std::size_t true_links = 0;
  std::size_t false_links = 0;  // as tabulated; sources*targets - true_links
  TemplateMeta meta;
};

inline ShapedSpec cm1_shape() {
  return {"CM1", 22, 53, 45, 1121,
          {"an aerospace", "a high-level requirement", "a design element", "(2) fulfill (1)"}};
}
inline ShapedSpec uc_tc_shape() {
  return {"EasyClinic-UC-TC", 30, 63, 63, 1827,
          {"a healthcare", "a use case", "a test case", "(2) test (1)"}};
}
inline ShapedSpec uc_id_shape() {
  return {"EasyClinic-UC-ID", 30, 20, 26, 574,
          {"a healthcare", "a use case", "an interaction diagram", "(2) realize (1)"}};
}
inline ShapedSpec cchit_shape() {
  return {"CCHIT", 1064, 10, 78, 10562,
          {"a healthcare", "a requirement", "a regulation", "(1) satisfy (2)"}};
}

namespace detail {

inline const std::vector<std::string>& word_bank() {
  static const std::vector<std::string> words = [] {
    const char* stems[] = {"sensor", "telemetry", "command", "buffer", "packet", "memory",
                           "heartbeat", "task", "queue", "error", "patient", "record",
                           "clinic", "visit", "report", "schedule", "access", "audit",
                           "encrypt", "backup", "monitor", "interface", "timer", "status"};
    const char* suffixes[] = {"", "s", "ing", "ed", "-id", "-log"};
    std::vector<std::string> out;
    for (const auto* s : stems) {
      for (const auto* x : suffixes) out.push_back(std::string(s) + x);
    }
    return out;
  }();
  return words;
}

inline std::string sentence(std::mt19937_64& rng, const std::string& prefix, std::size_t n) {
  const auto& bank = word_bank();
  std::uniform_int_distribution<std::size_t> pick(0, bank.size() - 1);
  std::string s = prefix;
  for (std::size_t i = 0; i < n; ++i) s += " " + bank[pick(rng)];
  return s + ".";
}

}  // namespace detail

/// Writes sources/, targets/, answers.csv and manifest.json under `dir` and
/// returns the manifest path. True links are a seeded sample of all pairs;
/// a linked target reuses words of its source so lexical baselines have
/// signal to find.
inline fs::path write_shaped_dataset(const fs::path& dir, const ShapedSpec& spec,
                                     std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  fs::create_directories(dir / "sources");
  fs::create_directories(dir / "targets");
  std::vector<std::string> src_text(spec.sources), tgt_text(spec.targets);
  const auto sid = [](std::size_t i) { return "S" + std::to_string(i + 1); };
  const auto tid = [](std::size_t j) { return "T" + std::to_string(j + 1); };
  for (std::size_t i = 0; i < spec.sources; ++i) {
    src_text[i] = detail::sentence(rng, "The system shall handle item " + sid(i), 8);
  }

  std::vector<std::size_t> cells(spec.sources * spec.targets);
  for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = c;
  std::shuffle(cells.begin(), cells.end(), rng);
  cells.resize(spec.true_links);
  std::sort(cells.begin(), cells.end());

  std::vector<std::string> borrowed(spec.targets);
  for (auto c : cells) {
    const auto& s = src_text[c / spec.targets];
    borrowed[c % spec.targets] += " " + s.substr(s.find(sid(c / spec.targets)));
  }
  for (std::size_t j = 0; j < spec.targets; ++j) {
    tgt_text[j] = detail::sentence(rng, "Component " + tid(j) + " provides", 6) + borrowed[j];
  }

  for (std::size_t i = 0; i < spec.sources; ++i) {
    write_file(dir / "sources" / (sid(i) + ".txt"), src_text[i] + "\n");
  }
  for (std::size_t j = 0; j < spec.targets; ++j) {
    write_file(dir / "targets" / (tid(j) + ".txt"), tgt_text[j] + "\n");
  }
  std::string answers = "source_id,target_id\n";
  for (auto c : cells) answers += sid(c / spec.targets) + "," + tid(c % spec.targets) + "\n";
  write_file(dir / "answers.csv", answers);

  nlohmann::json order_s = nlohmann::json::array(), order_t = nlohmann::json::array();
  for (std::size_t i = 0; i < spec.sources; ++i) order_s.push_back(sid(i));
  for (std::size_t j = 0; j < spec.targets; ++j) order_t.push_back(tid(j));
  const nlohmann::json manifest = {{"name", spec.name},
                                   {"template_meta", template_meta_to_json(spec.meta)},
                                   {"sources_dir", "sources"},
                                   {"targets_dir", "targets"},
                                   {"answer_set", "answers.csv"},
                                   {"source_order", order_s},
                                   {"target_order", order_t}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return dir / "manifest.json";
}

/// Random vectors keyed by text_key for every pair representation and every
/// artifact text of `ds`.
inline fs::path write_embedding_file(const fs::path& path, const TraceDataset& ds,
                                     std::size_t dim = 8, std::uint64_t seed = 11) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  nlohmann::json vectors = nlohmann::json::object();
  const auto add = [&](const std::string& text) {
    std::vector<double> v(dim);
    for (auto& x : v) x = u(rng);
    v[0] += 2.0;  // keeps every vector away from zero norm
    vectors[text_key(text)] = v;
  };
  for (const auto& p : enumerate_pairs(ds)) add(pair_representation(p, ds));
  for (const auto& a : ds.sources()) add(a.text);
  for (const auto& a : ds.targets()) add(a.text);
  write_file(path, nlohmann::json{{"vectors", vectors}}.dump() + "\n");
  return path;
}

}  // namespace tracellm::testing
