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

// Prompt rendering.
//
// An instruction is the space-joined sequence
//   [role_clause] [domain_clause] task [reasoning_clause] answer_instruction
// with slots filled from the dataset's TemplateMeta:
//   {domain} {artifact1} {artifact2} {relation}
//   {relation+ADVERB}  relation phrase with ADVERB after its subject,
//                      "(2) fulfill (1)" -> "(2) directly fulfill (1)"
//
// A query block is the instruction, a blank line, then "(1): <source>" and
// "(2): <target>" on their own lines. A demonstration block is a query block
// followed by "Answer: Yes" or "Answer: No". Blocks are separated by a blank
// line; demonstrations come first, the unanswered query block last.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tracellm/corpus.hpp"
#include "tracellm/demonstration.hpp"
#include "tracellm/error.hpp"
#include "tracellm/text.hpp"

namespace tracellm {

struct PromptSpec {
  std::string id;
  std::optional<std::string> role_clause;
  std::optional<std::string> domain_clause_template;
  std::string task_template;
  std::optional<std::string> reasoning_clause;
  std::string answer_instruction;

  /// Prompts that ask for reasoning cannot fit a one-token answer; they are
  /// sent with a larger output cap and judged on their final word.
  bool asks_for_reasoning() const { return reasoning_clause.has_value(); }

  void validate() const {
    const auto has = [&](std::string_view slot) {
      return task_template.find(slot) != std::string::npos;
    };
    if (!has("{artifact1}") || !has("{artifact2}") || !has("{relation")) {
      throw Error("prompt '" + id +
                  "': task_template needs {artifact1}, {artifact2} and a {relation} slot");
    }
    const auto answer = to_lower_ascii(answer_instruction);
    if (answer.find("'yes'") == std::string::npos || answer.find("'no'") == std::string::npos) {
      throw Error("prompt '" + id + "': answer_instruction must ask for 'Yes' or 'No'");
    }
  }

  static PromptSpec from_json(const nlohmann::json& j) {
    PromptSpec s;
    s.id = j.at("id").get<std::string>();
    const auto opt = [&](const char* key) -> std::optional<std::string> {
      if (!j.contains(key) || j[key].is_null()) return std::nullopt;
      return j[key].get<std::string>();
    };
    s.role_clause = opt("role_clause");
    s.domain_clause_template = opt("domain_clause_template");
    s.task_template = j.at("task_template").get<std::string>();
    s.reasoning_clause = opt("reasoning_clause");
    s.answer_instruction = j.at("answer_instruction").get<std::string>();
    s.validate();
    return s;
  }
};

class PromptCatalog {
 public:
  explicit PromptCatalog(std::vector<PromptSpec> specs) : specs_(std::move(specs)) {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (specs_[i].id == specs_[j].id) throw Error("duplicate prompt id '" + specs_[i].id + "'");
      }
    }
  }

  static PromptCatalog from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) throw Error("prompt catalog must be a JSON array");
    std::vector<PromptSpec> specs;
    for (const auto& j : arr) specs.push_back(PromptSpec::from_json(j));
    return PromptCatalog(std::move(specs));
  }

  static PromptCatalog load(const std::filesystem::path& path) {
    try {
      return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("invalid prompt catalog " + path.string() + ": " + e.what());
    }
  }

  const PromptSpec& get(std::string_view id) const {
    for (const auto& s : specs_) {
      if (s.id == id) return s;
    }
    throw Error("unknown prompt id '" + std::string(id) + "'");
  }

  const std::vector<PromptSpec>& specs() const { return specs_; }

 private:
  std::vector<PromptSpec> specs_;
};

namespace detail {

inline std::string relation_with_adverb(const std::string& phrase, std::string_view adverb) {
  const auto words = split_whitespace(phrase);
  if (words.size() < 2) {
    throw Error("relation phrase '" + phrase + "' needs a subject and a verb");
  }
  std::string out = words[0] + " " + std::string(adverb);
  for (std::size_t i = 1; i < words.size(); ++i) out += " " + words[i];
  return out;
}

inline std::string slot_value(std::string_view slot, const TemplateMeta& meta) {
  const auto need = [&](const std::string& v) -> const std::string& {
    if (trim_view(v).empty()) {
      throw Error("unresolved slot {" + std::string(slot) + "}: dataset template_meta has no value");
    }
    return v;
  };
  if (slot == "domain") return need(meta.domain);
  if (slot == "artifact1") return need(meta.artifact1_name);
  if (slot == "artifact2") return need(meta.artifact2_name);
  if (slot == "relation") return need(meta.relation_phrase);
  if (slot.starts_with("relation+")) {
    return relation_with_adverb(need(meta.relation_phrase), slot.substr(9));
  }
  throw Error("unresolved slot {" + std::string(slot) + "}: unknown slot name");
}

}  // namespace detail

inline std::string fill_slots(std::string_view tmpl, const TemplateMeta& meta) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const auto open = tmpl.find('{', i);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(i));
      break;
    }
    const auto close = tmpl.find('}', open);
    if (close == std::string_view::npos) throw Error("unterminated slot in template");
    out.append(tmpl.substr(i, open - i));
    out += detail::slot_value(tmpl.substr(open + 1, close - open - 1), meta);
    i = close + 1;
  }
  return out;
}

/// The instruction sentence(s) of a prompt, without artifact texts.
inline std::string render_instruction(const PromptSpec& spec, const TemplateMeta& meta) {
  std::vector<std::string> parts;
  if (spec.role_clause) parts.push_back(*spec.role_clause);
  if (spec.domain_clause_template) parts.push_back(fill_slots(*spec.domain_clause_template, meta));
  parts.push_back(fill_slots(spec.task_template, meta));
  if (spec.reasoning_clause) parts.push_back(*spec.reasoning_clause);
  parts.push_back(spec.answer_instruction);
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

inline std::string render_block(std::string_view instruction, std::string_view source_text,
                                std::string_view target_text) {
  std::string out(instruction);
  out += "\n\n(1): ";
  out += source_text;
  out += "\n(2): ";
  out += target_text;
  return out;
}

/// Zero-shot prompt for one pair.
inline std::string render_prompt(const PromptSpec& spec, const TemplateMeta& meta,
                                 std::string_view source_text, std::string_view target_text) {
  return render_block(render_instruction(spec, meta), source_text, target_text);
}

inline std::string answer_word(bool linked) { return linked ? "Yes" : "No"; }

struct DemonstrationBlock {
  std::string rendered_pair;
  std::string gold_answer;
};

struct RenderedPrompt {
  std::string text;
  std::vector<DemonstrationBlock> demonstrations;
  PairKey pair_key;
};

/// Prepends answered demonstration blocks to `prompt_body` (a query block
/// built from the same instruction). Order of `demos` is kept.
inline RenderedPrompt attach_demonstrations(std::string_view instruction,
                                            std::string_view prompt_body,
                                            const std::vector<Demonstration>& demos,
                                            bool balanced, const TraceDataset& ds,
                                            PairKey query, Diagnostics* diag = nullptr) {
  RenderedPrompt out;
  out.pair_key = std::move(query);
  std::size_t positives = 0;
  for (const auto& d : demos) {
    DemonstrationBlock block;
    block.rendered_pair = render_block(instruction, ds.source_text(d.pair.source_id),
                                       ds.target_text(d.pair.target_id));
    block.gold_answer = answer_word(d.pair.label);
    positives += d.pair.label ? 1 : 0;
    out.text += block.rendered_pair + "\nAnswer: " + block.gold_answer + "\n\n";
    out.demonstrations.push_back(std::move(block));
  }
  out.text += prompt_body;
  if (balanced && !demos.empty()) {
    const std::size_t negatives = demos.size() - positives;
    const std::size_t gap = positives > negatives ? positives - negatives : negatives - positives;
    if (gap > 1 || demos.size() % 2 != 0) {
      warn(diag, "balanced selection but demonstrations are " + std::to_string(positives) +
                     " true / " + std::to_string(negatives) + " false for " + out.pair_key.str());
    }
  }
  return out;
}

/// Full prompt for one pair: demonstrations (possibly none) then the query.
inline RenderedPrompt build_prompt(const PromptSpec& spec, const TraceDataset& ds,
                                   const CandidatePair& query,
                                   const std::vector<Demonstration>& demos = {},
                                   bool balanced = false, Diagnostics* diag = nullptr) {
  const auto instruction = render_instruction(spec, ds.meta());
  const auto body = render_block(instruction, ds.source_text(query.source_id),
                                 ds.target_text(query.target_id));
  return attach_demonstrations(instruction, body, demos, balanced, ds, query.key(), diag);
}

// ---------------------------------------------------------------------------
// Verdicts

class UnparseableVerdict : public Error {
 public:
  explicit UnparseableVerdict(const std::string& raw)
      : Error("unparseable verdict: '" + raw + "'"), raw_(raw) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

struct Verdict {
  bool linked = false;
  std::string raw;
};

/// Trim, case-fold, then "yes" or "no"; anything else throws.
inline Verdict parse_verdict(std::string_view raw) {
  const auto folded = to_lower_ascii(trim_view(raw));
  if (folded == "yes") return {true, std::string(raw)};
  if (folded == "no") return {false, std::string(raw)};
  throw UnparseableVerdict(std::string(raw));
}

/// For reasoning prompts: the verdict is the last alphabetic word.
inline Verdict parse_final_verdict(std::string_view raw) {
  std::size_t end = raw.size();
  const auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  while (end > 0 && !is_alpha(raw[end - 1])) --end;
  std::size_t begin = end;
  while (begin > 0 && is_alpha(raw[begin - 1])) --begin;
  try {
    auto v = parse_verdict(raw.substr(begin, end - begin));
    v.raw = std::string(raw);
    return v;
  } catch (const UnparseableVerdict&) {
    throw UnparseableVerdict(std::string(raw));
  }
}

}  // namespace tracellm
