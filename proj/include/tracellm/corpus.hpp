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

// Traceability datasets: loading, candidate-pair enumeration and
// train/validation/test splitting.
//
// On-disk layout (paths relative to the manifest's directory):
//
//   manifest.json   {"name", "template_meta": {...}, "sources_dir",
//                    "targets_dir", "answer_set",
//                    optional "source_order"/"target_order" id arrays}
//   <dir>/<id>.txt  one UTF-8 artifact per file
//   answers.csv     header "source_id,target_id", one true link per row
//
// Without an explicit order array, artifacts are ordered by id (byte-wise).

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "tracellm/error.hpp"
#include "tracellm/rng.hpp"
#include "tracellm/text.hpp"

namespace tracellm {

enum class Side { source, target };

struct Artifact {
  std::string id;
  Side side = Side::source;
  std::string text;
};

/// Dataset-specific phrases substituted into prompt templates. Values are
/// inserted verbatim, so they carry their own articles ("an aerospace",
/// "a design element").
struct TemplateMeta {
  std::string domain;
  std::string artifact1_name;
  std::string artifact2_name;
  std::string relation_phrase;  // "<subject> <verb> <object>", e.g. "(2) fulfill (1)"
};

struct PairKey {
  std::string source_id;
  std::string target_id;

  auto operator<=>(const PairKey&) const = default;
  bool operator==(const PairKey&) const = default;

  /// "source|target"; the textual key used in logs, scripts and CSVs.
  std::string str() const { return source_id + "|" + target_id; }

  static PairKey parse(std::string_view s) {
    const auto bar = s.find('|');
    if (bar == std::string_view::npos) {
      throw Error("malformed pair key (expected source|target): " + std::string(s));
    }
    return {std::string(s.substr(0, bar)), std::string(s.substr(bar + 1))};
  }
};

struct CandidatePair {
  std::string source_id;
  std::string target_id;
  bool label = false;

  PairKey key() const { return {source_id, target_id}; }
  bool operator==(const CandidatePair&) const = default;
};

class TraceDataset {
 public:
  TraceDataset() = default;

  /// Validates and builds. Texts are trimmed here, once; nothing downstream
  /// re-normalizes them.
  static TraceDataset make(std::string name, std::vector<Artifact> sources,
                           std::vector<Artifact> targets,
                           const std::vector<PairKey>& links, TemplateMeta meta) {
    TraceDataset ds;
    ds.name_ = std::move(name);
    ds.meta_ = std::move(meta);
    ds.sources_ = std::move(sources);
    ds.targets_ = std::move(targets);
    index_side(ds.sources_, Side::source, ds.source_index_);
    index_side(ds.targets_, Side::target, ds.target_index_);
    for (const auto& link : links) {
      if (!ds.source_index_.contains(link.source_id)) {
        throw DataError("unknown source id '" + link.source_id + "' in true links");
      }
      if (!ds.target_index_.contains(link.target_id)) {
        throw DataError("unknown target id '" + link.target_id + "' in true links");
      }
      ds.true_links_.insert(link);
    }
    return ds;
  }

  const std::string& name() const { return name_; }
  const TemplateMeta& meta() const { return meta_; }
  const std::vector<Artifact>& sources() const { return sources_; }
  const std::vector<Artifact>& targets() const { return targets_; }
  const std::set<PairKey>& true_links() const { return true_links_; }

  bool is_linked(const PairKey& key) const { return true_links_.contains(key); }

  const std::string& source_text(const std::string& id) const {
    const auto it = source_index_.find(id);
    if (it == source_index_.end()) throw DataError("unknown source id '" + id + "'");
    return sources_[it->second].text;
  }

  const std::string& target_text(const std::string& id) const {
    const auto it = target_index_.find(id);
    if (it == target_index_.end()) throw DataError("unknown target id '" + id + "'");
    return targets_[it->second].text;
  }

  std::size_t pair_count() const { return sources_.size() * targets_.size(); }

  std::string summary() const {
    return "sources=" + std::to_string(sources_.size()) +
           " targets=" + std::to_string(targets_.size()) +
           " true_links=" + std::to_string(true_links_.size()) +
           " pairs=" + std::to_string(pair_count());
  }

 private:
  static void index_side(std::vector<Artifact>& items, Side side,
                         std::unordered_map<std::string, std::size_t>& index) {
    const char* what = side == Side::source ? "source" : "target";
    for (std::size_t i = 0; i < items.size(); ++i) {
      Artifact& a = items[i];
      a.side = side;
      a.text = trim(a.text);
      if (a.id.empty()) throw DataError(std::string("empty ") + what + " id");
      if (a.text.empty()) {
        throw DataError(std::string("empty ") + what + " artifact text: " + a.id);
      }
      if (!index.emplace(a.id, i).second) {
        throw DataError(std::string("duplicate ") + what + " id '" + a.id + "'");
      }
    }
  }

  std::string name_;
  TemplateMeta meta_;
  std::vector<Artifact> sources_;
  std::vector<Artifact> targets_;
  std::set<PairKey> true_links_;
  std::unordered_map<std::string, std::size_t> source_index_;
  std::unordered_map<std::string, std::size_t> target_index_;
};

inline TemplateMeta template_meta_from_json(const nlohmann::json& j) {
  TemplateMeta m;
  m.domain = j.value("domain", "");
  m.artifact1_name = j.value("artifact1_name", "");
  m.artifact2_name = j.value("artifact2_name", "");
  m.relation_phrase = j.value("relation_phrase", "");
  return m;
}

inline nlohmann::json template_meta_to_json(const TemplateMeta& m) {
  return {{"domain", m.domain},
          {"artifact1_name", m.artifact1_name},
          {"artifact2_name", m.artifact2_name},
          {"relation_phrase", m.relation_phrase}};
}

namespace detail {

inline std::vector<Artifact> load_artifacts(const std::filesystem::path& dir,
                                            const nlohmann::json* order, Side side) {
  namespace fs = std::filesystem;
  const char* what = side == Side::source ? "source" : "target";
  if (!fs::is_directory(dir)) {
    throw Error(std::string(what) + " directory not found: " + dir.string());
  }
  std::vector<std::string> ids;
  if (order != nullptr) {
    std::set<std::string> seen;
    for (const auto& id : *order) {
      const auto s = id.get<std::string>();
      if (!seen.insert(s).second) {
        throw DataError(std::string("duplicate ") + what + " id '" + s + "'");
      }
      ids.push_back(s);
    }
  } else {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        ids.push_back(entry.path().stem().string());
      }
    }
    std::sort(ids.begin(), ids.end());
  }
  if (ids.empty()) {
    throw DataError(std::string("no ") + what + " artifacts in " + dir.string());
  }
  std::vector<Artifact> out;
  out.reserve(ids.size());
  for (auto& id : ids) {
    const auto path = dir / (id + ".txt");
    if (!fs::is_regular_file(path)) {
      throw Error(std::string("missing ") + what + " file: " + path.string());
    }
    std::string text = read_file(path);
    if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
    if (!is_valid_utf8(text)) {
      throw DataError(std::string("invalid UTF-8 in ") + what + " artifact " + id);
    }
    if (trim_view(text).empty()) {
      throw DataError(std::string("empty ") + what + " artifact text: " + id);
    }
    out.push_back({std::move(id), side, std::move(text)});
  }
  return out;
}

}  // namespace detail

/// Parses an answer-set CSV. Row numbers in errors are 1-based file lines.
/// Duplicate rows are tolerated with a warning.
inline std::vector<PairKey> parse_answer_set(std::string_view csv,
                                             std::string_view label,
                                             Diagnostics* diag = nullptr) {
  std::string data(csv);
  if (data.starts_with("\xEF\xBB\xBF")) data.erase(0, 3);
  const auto lines = split_lines(data);
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<PairKey> links;
  std::set<PairKey> seen;
  for (const auto& raw : lines) {
    ++line_no;
    if (trim_view(raw).empty()) continue;
    auto fields = split_csv_line(raw);
    for (auto& f : fields) f = trim(f);
    if (!header_seen) {
      if (fields.size() != 2 || fields[0] != "source_id" || fields[1] != "target_id") {
        throw DataError(std::string(label) + " row " + std::to_string(line_no) +
                        ": expected header 'source_id,target_id'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw DataError(std::string(label) + " row " + std::to_string(line_no) +
                      ": expected two non-empty fields");
    }
    PairKey key{fields[0], fields[1]};
    if (!seen.insert(key).second) {
      warn(diag, std::string(label) + " row " + std::to_string(line_no) +
                     ": duplicate link " + key.str());
      continue;
    }
    links.push_back(std::move(key));
  }
  if (!header_seen) {
    throw DataError(std::string(label) + ": missing header 'source_id,target_id'");
  }
  return links;
}

/// Loads and validates a dataset. `root` defaults to the manifest's directory.
inline TraceDataset load_dataset(const std::filesystem::path& manifest_path,
                                 std::optional<std::filesystem::path> root = std::nullopt,
                                 Diagnostics* diag = nullptr) {
  namespace fs = std::filesystem;
  if (!fs::is_regular_file(manifest_path)) {
    throw Error("manifest not found: " + manifest_path.string());
  }
  const fs::path base = root ? *root : manifest_path.parent_path();
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("manifest is not valid JSON: " + std::string(e.what()));
  }
  const auto field = [&](const char* key) -> std::string {
    if (!manifest.contains(key) || !manifest[key].is_string()) {
      throw Error(std::string("manifest missing string field '") + key + "'");
    }
    return manifest[key].get<std::string>();
  };
  const auto order = [&](const char* key) -> const nlohmann::json* {
    return manifest.contains(key) ? &manifest[key] : nullptr;
  };

  auto sources =
      detail::load_artifacts(base / field("sources_dir"), order("source_order"), Side::source);
  auto targets =
      detail::load_artifacts(base / field("targets_dir"), order("target_order"), Side::target);

  const fs::path answers_path = base / field("answer_set");
  if (!fs::is_regular_file(answers_path)) {
    throw Error("answer set not found: " + answers_path.string());
  }
  const std::string label = answers_path.filename().string();
  const auto links = parse_answer_set(read_file(answers_path), label, diag);

  std::set<std::string> src_ids, tgt_ids;
  for (const auto& a : sources) src_ids.insert(a.id);
  for (const auto& a : targets) tgt_ids.insert(a.id);
  // Re-scan for row numbers so integrity errors point at the offending line.
  {
    std::size_t line_no = 0;
    for (const auto& raw : split_lines(read_file(answers_path))) {
      ++line_no;
      auto fields = split_csv_line(raw);
      if (fields.size() != 2 || line_no == 1) continue;
      const auto s = trim(fields[0]);
      const auto t = trim(fields[1]);
      if (s.empty() || t.empty()) continue;
      if (!src_ids.contains(s)) {
        throw DataError(label + " row " + std::to_string(line_no) +
                        ": unknown source id '" + s + "'");
      }
      if (!tgt_ids.contains(t)) {
        throw DataError(label + " row " + std::to_string(line_no) +
                        ": unknown target id '" + t + "'");
      }
    }
  }

  TemplateMeta meta;
  if (manifest.contains("template_meta")) meta = template_meta_from_json(manifest["template_meta"]);
  return TraceDataset::make(manifest.value("name", manifest_path.stem().string()),
                            std::move(sources), std::move(targets), links, std::move(meta));
}

/// All source x target pairs, sources outer, targets inner, in dataset order.
inline std::vector<CandidatePair> enumerate_pairs(const TraceDataset& ds) {
  std::vector<CandidatePair> out;
  out.reserve(ds.pair_count());
  for (const auto& s : ds.sources()) {
    for (const auto& t : ds.targets()) {
      out.push_back({s.id, t.id, ds.is_linked({s.id, t.id})});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splitting

/// Split proportions as exact rationals: each part is an integer count of
/// 1e-6 units, so "4:2:4" and "0.4:0.2:0.4" describe the same split.
struct Ratios {
  std::array<std::uint64_t, 3> parts{4, 2, 4};

  std::uint64_t total() const { return parts[0] + parts[1] + parts[2]; }
  bool operator==(const Ratios&) const = default;

  static Ratios parse(std::string_view text) {
    Ratios r;
    std::size_t idx = 0;
    std::size_t start = 0;
    for (int part = 0; part < 3; ++part) {
      const auto end = part < 2 ? text.find(':', start) : text.size();
      if (end == std::string_view::npos) {
        throw Error("ratios must look like 4:2:4, got '" + std::string(text) + "'");
      }
      r.parts[idx++] = parse_part(trim_view(text.substr(start, end - start)), text);
      start = end + 1;
    }
    if (r.total() == 0) throw Error("ratios must not all be zero");
    return r;
  }

  std::string str() const {
    std::string out;
    for (int i = 0; i < 3; ++i) {
      if (i) out += ':';
      out += format_part(parts[i]);
    }
    return out;
  }

 private:
  static constexpr std::uint64_t kScale = 1000000;

  static std::uint64_t parse_part(std::string_view s, std::string_view whole) {
    const auto bad = [&] {
      return Error("invalid ratio component in '" + std::string(whole) + "'");
    };
    if (s.empty()) throw bad();
    std::uint64_t integral = 0, frac = 0, frac_scale = kScale;
    bool in_frac = false;
    for (char c : s) {
      if (c == '.' && !in_frac) {
        in_frac = true;
      } else if (c >= '0' && c <= '9') {
        if (!in_frac) {
          integral = integral * 10 + static_cast<std::uint64_t>(c - '0');
          if (integral > 1000000000ULL) throw bad();
        } else {
          frac_scale /= 10;
          if (frac_scale == 0) throw bad();
          frac += static_cast<std::uint64_t>(c - '0') * frac_scale;
        }
      } else {
        throw bad();
      }
    }
    return integral * kScale + frac;
  }

  static std::string format_part(std::uint64_t v) {
    std::string out = std::to_string(v / kScale);
    std::uint64_t frac = v % kScale;
    if (frac != 0) {
      std::string digits = std::to_string(frac);
      digits.insert(0, 6 - digits.size(), '0');
      while (digits.back() == '0') digits.pop_back();
      out += "." + digits;
    }
    return out;
  }
};

/// Per-subset sizes for `n` items: floor(n * r_i / R), then the remainder
/// one-each to subsets with a positive ratio in train -> val -> test order.
inline std::array<std::size_t, 3> allocate_counts(std::size_t n, const Ratios& ratios) {
  std::array<std::size_t, 3> counts{};
  std::size_t assigned = 0;
  const auto total = static_cast<unsigned __int128>(ratios.total());
  for (int i = 0; i < 3; ++i) {
    counts[i] = static_cast<std::size_t>(static_cast<unsigned __int128>(n) *
                                         ratios.parts[i] / total);
    assigned += counts[i];
  }
  std::size_t remainder = n - assigned;
  while (remainder > 0) {
    for (int i = 0; i < 3 && remainder > 0; ++i) {
      if (ratios.parts[i] == 0) continue;
      ++counts[i];
      --remainder;
    }
  }
  return counts;
}

enum class SplitMethod { by_link, by_artifact };

inline std::string to_string(SplitMethod m) {
  return m == SplitMethod::by_link ? "by_link" : "by_artifact";
}

inline SplitMethod parse_split_method(std::string_view s) {
  if (s == "by_link") return SplitMethod::by_link;
  if (s == "by_artifact") return SplitMethod::by_artifact;
  throw Error("unknown split method '" + std::string(s) + "' (by_link|by_artifact)");
}

struct DatasetSplit {
  std::vector<CandidatePair> train;
  std::vector<CandidatePair> validation;
  std::vector<CandidatePair> test;
  std::uint64_t seed = 0;
  SplitMethod method = SplitMethod::by_link;
  Ratios ratios;

  std::array<const std::vector<CandidatePair>*, 3> subsets() const {
    return {&train, &validation, &test};
  }
};

namespace detail {

inline const char* subset_name(int i) {
  static constexpr const char* names[] = {"train", "validation", "test"};
  return names[i];
}

}  // namespace detail

/// Stratified split over candidate pairs. Each label class is shuffled with
/// its own seeded stream and cut by allocate_counts; subsets keep the input
/// order of their members.
inline DatasetSplit split_by_link(const std::vector<CandidatePair>& pairs,
                                  const Ratios& ratios, std::uint64_t seed,
                                  Diagnostics* diag = nullptr) {
  DatasetSplit split;
  split.seed = seed;
  split.method = SplitMethod::by_link;
  split.ratios = ratios;

  int positive_subsets = 0;
  for (auto p : ratios.parts) positive_subsets += p > 0 ? 1 : 0;

  std::array<std::vector<std::size_t>, 3> members;
  for (int cls = 0; cls < 2; ++cls) {
    const bool label = cls == 0;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (pairs[i].label == label) idx.push_back(i);
    }
    if (idx.empty()) continue;
    if (idx.size() < static_cast<std::size_t>(positive_subsets)) {
      warn(diag, std::string("label class '") + (label ? "true" : "false") + "' has " +
                     std::to_string(idx.size()) + " member(s) for " +
                     std::to_string(positive_subsets) +
                     " subsets; some subsets receive none");
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    rng.shuffle(std::span<std::size_t>(idx));
    const auto counts = allocate_counts(idx.size(), ratios);
    std::size_t pos = 0;
    for (int s = 0; s < 3; ++s) {
      for (std::size_t c = 0; c < counts[s]; ++c) members[s].push_back(idx[pos++]);
    }
  }
  std::array<std::vector<CandidatePair>*, 3> out{&split.train, &split.validation, &split.test};
  for (int s = 0; s < 3; ++s) {
    std::sort(members[s].begin(), members[s].end());
    out[s]->reserve(members[s].size());
    for (auto i : members[s]) out[s]->push_back(pairs[i]);
  }
  return split;
}

/// Partitions source artifacts; every subset holds all pairs of its sources
/// with every target.
inline DatasetSplit split_by_artifact(const TraceDataset& ds, const Ratios& ratios,
                                      std::uint64_t seed, Diagnostics* diag = nullptr) {
  DatasetSplit split;
  split.seed = seed;
  split.method = SplitMethod::by_artifact;
  split.ratios = ratios;

  const std::size_t n = ds.sources().size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(derive_seed(seed, 0));
  rng.shuffle(std::span<std::size_t>(idx));
  const auto counts = allocate_counts(n, ratios);

  std::array<std::vector<std::size_t>, 3> members;
  std::size_t pos = 0;
  for (int s = 0; s < 3; ++s) {
    for (std::size_t c = 0; c < counts[s]; ++c) members[s].push_back(idx[pos++]);
    if (counts[s] == 0 && ratios.parts[s] > 0) {
      warn(diag, std::string("subset '") + detail::subset_name(s) +
                     "' received no source artifacts");
    }
  }
  std::array<std::vector<CandidatePair>*, 3> out{&split.train, &split.validation, &split.test};
  for (int s = 0; s < 3; ++s) {
    std::sort(members[s].begin(), members[s].end());
    for (auto si : members[s]) {
      const auto& src = ds.sources()[si];
      for (const auto& tgt : ds.targets()) {
        out[s]->push_back({src.id, tgt.id, ds.is_linked({src.id, tgt.id})});
      }
    }
  }
  return split;
}

inline nlohmann::json pairs_to_json(const std::vector<CandidatePair>& pairs) {
  auto arr = nlohmann::json::array();
  for (const auto& p : pairs) {
    arr.push_back({{"source_id", p.source_id}, {"target_id", p.target_id}, {"label", p.label}});
  }
  return arr;
}

inline std::vector<CandidatePair> pairs_from_json(const nlohmann::json& arr) {
  std::vector<CandidatePair> out;
  out.reserve(arr.size());
  for (const auto& p : arr) {
    out.push_back({p.at("source_id").get<std::string>(), p.at("target_id").get<std::string>(),
                   p.at("label").get<bool>()});
  }
  return out;
}

inline nlohmann::json split_to_json(const DatasetSplit& split) {
  return {{"method", to_string(split.method)},
          {"seed", split.seed},
          {"ratios", split.ratios.str()},
          {"train", pairs_to_json(split.train)},
          {"validation", pairs_to_json(split.validation)},
          {"test", pairs_to_json(split.test)}};
}

inline DatasetSplit split_from_json(const nlohmann::json& j) {
  try {
    DatasetSplit s;
    s.method = parse_split_method(j.at("method").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.ratios = Ratios::parse(j.at("ratios").get<std::string>());
    s.train = pairs_from_json(j.at("train"));
    s.validation = pairs_from_json(j.at("validation"));
    s.test = pairs_from_json(j.at("test"));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed split file: " + std::string(e.what()));
  }
}

inline DatasetSplit load_split(const std::filesystem::path& path) {
  try {
    return split_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("split file is not valid JSON: " + std::string(e.what()));
  }
}

/// Byte-stable serialization (sorted keys, two-space indent, trailing newline).
inline std::string dump_split(const DatasetSplit& split) {
  return split_to_json(split).dump(2) + "\n";
}

}  // namespace tracellm
