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

// Experiment runner.
//
// A run queries the model once per test pair and scores the verdicts. Runs
// iterate over seeds x repeats; the seed drives demonstration selection, a
// repeat re-queries with the same demonstrations. Demonstrations come only
// from the train partition. Similarity selection is redone per query, every
// other strategy picks one set per seed.
//
// Output directory <output_dir>/<config_hash>/:
//   config.json        canonical config
//   predictions.jsonl  append-only log keyed by (config_hash, run, pair)
//   metrics.csv        one row per run, then mean and std rows
//   cost.json          token usage and cost
//   run.log            warnings and timestamps (the only time-dependent file)
//   prompts.jsonl      rendered prompts, with log_prompts
//
// An interrupted experiment resumes from predictions.jsonl: logged pairs are
// not queried again.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracellm/corpus.hpp"
#include "tracellm/demonstration.hpp"
#include "tracellm/embeddings.hpp"
#include "tracellm/error.hpp"
#include "tracellm/llm_client.hpp"
#include "tracellm/metrics.hpp"
#include "tracellm/parallel.hpp"
#include "tracellm/prompting.hpp"
#include "tracellm/rng.hpp"
#include "tracellm/selection.hpp"
#include "tracellm/text.hpp"

#ifndef TRACELLM_DATA_DIR
#define TRACELLM_DATA_DIR "data"
#endif

namespace tracellm {

namespace fs = std::filesystem;

struct ClientConfig {
  std::string kind = "scripted";  // scripted | http
  bool gold_echo = false;
  fs::path script_path;
};

struct ExperimentConfig {
  fs::path dataset;  // manifest
  fs::path split_file;
  fs::path prompts_file = fs::path(TRACELLM_DATA_DIR) / "prompts.json";
  std::string prompt_id = "P1";
  Strategy strategy = Strategy::random;
  bool balanced = false;
  int shots = 0;
  int repeats = 5;
  std::string model = "scripted";
  std::vector<std::uint64_t> seeds{0};
  std::size_t max_concurrency = 4;
  double temperature = 0.0;
  int max_tokens = 1;
  int reasoning_max_tokens = 512;
  ClientConfig client;
  std::optional<EmbeddingProviderConfig> embeddings;
  ConfidenceMode confidence_mode = ConfidenceMode::automatic;
  std::size_t confidence_samples = 5;
  std::optional<fs::path> pricing_file;
  fs::path output_dir = "runs";
  bool log_prompts = false;

  void validate() const {
    if (shots != 0 && shots != 2 && shots != 4 && shots != 6) {
      throw Error("shots must be one of 0, 2, 4, 6 (got " + std::to_string(shots) + ")");
    }
    if (repeats < 1) throw Error("repeats must be >= 1");
    if (seeds.empty()) throw Error("seeds must not be empty");
    if (max_concurrency < 1) throw Error("max_concurrency must be >= 1");
    if (temperature < 0) throw Error("temperature must be >= 0");
    if (max_tokens < 1 || reasoning_max_tokens < 1) throw Error("max_tokens must be >= 1");
    if (client.kind != "scripted" && client.kind != "http") {
      throw Error("client.kind must be 'scripted' or 'http'");
    }
    if (client.kind == "scripted" && !client.gold_echo && client.script_path.empty()) {
      throw Error("scripted client needs gold_echo or a script file");
    }
    if (shots > 0 && (strategy == Strategy::diversity || strategy == Strategy::similarity) &&
        !embeddings) {
      throw Error(to_string(strategy) + " selection needs an embeddings provider");
    }
  }

  /// Paths are resolved against `base` (the config file's directory).
  static ExperimentConfig from_json(const nlohmann::json& j, const fs::path& base = {}) {
    try {
      ExperimentConfig c;
      const auto path = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
      c.dataset = path(j.at("dataset").get<std::string>());
      c.split_file = path(j.at("split_file").get<std::string>());
      if (j.contains("prompts_file")) c.prompts_file = path(j["prompts_file"].get<std::string>());
      c.prompt_id = j.value("prompt_id", c.prompt_id);
      c.strategy = parse_strategy(j.value("strategy", std::string("random")));
      c.balanced = j.value("balanced", false);
      c.shots = j.value("shots", 0);
      c.repeats = j.value("repeats", 5);
      c.model = j.value("model", c.model);
      if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
      c.max_concurrency = j.value("max_concurrency", std::size_t{4});
      c.temperature = j.value("temperature", 0.0);
      c.max_tokens = j.value("max_tokens", 1);
      c.reasoning_max_tokens = j.value("reasoning_max_tokens", 512);
      if (j.contains("client")) {
        const auto& cj = j["client"];
        c.client.kind = cj.value("kind", std::string("scripted"));
        c.client.gold_echo = cj.value("gold_echo", false);
        if (cj.contains("script")) c.client.script_path = path(cj["script"].get<std::string>());
      } else {
        c.client.gold_echo = true;
      }
      if (j.contains("embeddings") && !j["embeddings"].is_null()) {
        auto ej = j["embeddings"];
        if (ej.contains("file_path")) {
          ej["file_path"] = path(ej["file_path"].get<std::string>()).string();
        }
        c.embeddings = EmbeddingProviderConfig::from_json(ej);
      }
      if (j.contains("confidence")) {
        const auto mode = j["confidence"].value("mode", std::string("auto"));
        if (mode == "auto") c.confidence_mode = ConfidenceMode::automatic;
        else if (mode == "logprob") c.confidence_mode = ConfidenceMode::logprob;
        else if (mode == "sampling") c.confidence_mode = ConfidenceMode::sampling;
        else throw Error("confidence.mode must be auto, logprob or sampling");
        c.confidence_samples = j["confidence"].value("samples", std::size_t{5});
      }
      if (j.contains("pricing_file")) c.pricing_file = path(j["pricing_file"].get<std::string>());
      if (j.contains("output_dir")) c.output_dir = path(j["output_dir"].get<std::string>());
      c.log_prompts = j.value("log_prompts", false);
      c.validate();
      return c;
    } catch (const nlohmann::json::exception& e) {
      throw Error("invalid experiment config: " + std::string(e.what()));
    }
  }

  static ExperimentConfig load(const fs::path& path) {
    try {
      return from_json(nlohmann::json::parse(read_file(path)), path.parent_path());
    } catch (const nlohmann::json::parse_error& e) {
      throw Error("experiment config is not valid JSON: " + std::string(e.what()));
    }
  }

  /// The settings written to config.json. Output location and prompt
  /// logging are left out so they do not change the hash.
  nlohmann::json canonical() const {
    nlohmann::json j = {{"dataset", dataset.string()},
                        {"split_file", split_file.string()},
                        {"prompts_file", prompts_file.string()},
                        {"prompt_id", prompt_id},
                        {"strategy", to_string(strategy)},
                        {"balanced", balanced},
                        {"shots", shots},
                        {"repeats", repeats},
                        {"model", model},
                        {"seeds", seeds},
                        {"max_concurrency", max_concurrency},
                        {"temperature", temperature},
                        {"max_tokens", max_tokens},
                        {"reasoning_max_tokens", reasoning_max_tokens},
                        {"client",
                         {{"kind", client.kind},
                          {"gold_echo", client.gold_echo},
                          {"script", client.script_path.string()}}},
                        {"confidence",
                         {{"mode", confidence_mode == ConfidenceMode::automatic ? "auto"
                                   : confidence_mode == ConfidenceMode::logprob ? "logprob"
                                                                                 : "sampling"},
                          {"samples", confidence_samples}}}};
    if (embeddings) {
      j["embeddings"] = {{"kind", embeddings->kind == EmbeddingKind::file ? "file" : "remote"},
                         {"file_path", embeddings->file_path.string()},
                         {"endpoint", embeddings->endpoint},
                         {"model_name", embeddings->model_name}};
    }
    if (pricing_file) j["pricing_file"] = pricing_file->string();
    return j;
  }

  /// Concurrency does not change outputs, so a resumed run may use another.
  std::string hash() const {
    auto j = canonical();
    j.erase("max_concurrency");
    return text_key(j.dump());
  }
};

/// One line of predictions.jsonl.
struct PredictionRecord {
  std::string config_hash;
  int run = 0;
  PairKey pair;
  bool label = false;
  bool predicted = false;
  bool unparseable = false;
  std::string raw;
  long long input_tokens = 0;
  long long output_tokens = 0;
  int attempts = 0;
  std::string prompt_hash;

  nlohmann::json to_json() const {
    return {{"config_hash", config_hash}, {"run", run},
            {"pair", pair.str()},         {"label", label},
            {"predicted", predicted},     {"unparseable", unparseable},
            {"raw", raw},                 {"input_tokens", input_tokens},
            {"output_tokens", output_tokens}, {"attempts", attempts},
            {"prompt_hash", prompt_hash}};
  }

  static PredictionRecord from_json(const nlohmann::json& j) {
    PredictionRecord r;
    r.config_hash = j.at("config_hash").get<std::string>();
    r.run = j.at("run").get<int>();
    r.pair = PairKey::parse(j.at("pair").get<std::string>());
    r.label = j.at("label").get<bool>();
    r.predicted = j.at("predicted").get<bool>();
    r.unparseable = j.value("unparseable", false);
    r.raw = j.value("raw", "");
    r.input_tokens = j.value("input_tokens", 0LL);
    r.output_tokens = j.value("output_tokens", 0LL);
    r.attempts = j.value("attempts", 0);
    r.prompt_hash = j.value("prompt_hash", "");
    return r;
  }
};

/// Reads a prediction log; a torn last line (crash mid-write) is ignored.
inline std::vector<PredictionRecord> read_prediction_log(const fs::path& path,
                                                         Diagnostics* diag = nullptr) {
  std::vector<PredictionRecord> out;
  if (!fs::exists(path)) return out;
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim_view(lines[i]).empty()) continue;
    try {
      out.push_back(PredictionRecord::from_json(nlohmann::json::parse(lines[i])));
    } catch (const std::exception& e) {
      if (i + 1 == lines.size()) {
        warn(diag, "ignoring torn final line of " + path.filename().string());
      } else {
        throw Error(path.filename().string() + " line " + std::to_string(i + 1) + ": " + e.what());
      }
    }
  }
  return out;
}

struct ExperimentResult {
  std::string config_hash;
  fs::path run_dir;
  std::vector<RunMetrics> runs;
  AggregateMetrics aggregate;
  CostReport cost;
  bool priced = false;
  std::size_t flagged = 0;  // unparseable after one retry
  std::size_t queried = 0;  // model calls made by this invocation (verdict calls)
  Diagnostics diagnostics;
};

/// metrics.csv body for per-run rows plus mean and std rows.
inline std::string metrics_csv(const std::vector<RunMetrics>& runs, const AggregateMetrics& agg) {
  std::string out = "row,run,seed,shots,strategy,tp,fp,fn,tn,precision,recall,f1,f2,unparseable\n";
  for (const auto& m : runs) {
    out += "run," + std::to_string(m.run_index) + "," + std::to_string(m.seed) + "," +
           std::to_string(m.shots) + "," + m.strategy + "," + std::to_string(m.confusion.tp) +
           "," + std::to_string(m.confusion.fp) + "," + std::to_string(m.confusion.fn) + "," +
           std::to_string(m.confusion.tn) + "," + format_fixed(m.precision, 9) + "," +
           format_fixed(m.recall, 9) + "," + format_fixed(m.f1, 9) + "," +
           format_fixed(m.f2, 9) + "," + std::to_string(m.unparseable) + "\n";
  }
  const auto row = [&](const char* name, auto get) {
    out += std::string(name) + "," + std::to_string(agg.n_runs) + ",,,,,,,," +
           format_fixed(get(agg.precision), 9) + "," + format_fixed(get(agg.recall), 9) + "," +
           format_fixed(get(agg.f1), 9) + "," + format_fixed(get(agg.f2), 9) + ",\n";
  };
  row("mean", [](const MeanStd& s) { return s.mean; });
  row("std", [](const MeanStd& s) { return s.std; });
  return out;
}

/// Per-run rows of a metrics.csv, as written by metrics_csv.
inline std::vector<RunMetrics> read_metrics_csv(const fs::path& path) {
  if (!fs::exists(path)) throw Error("metrics file not found: " + path.string());
  std::vector<RunMetrics> out;
  const auto lines = split_lines(read_file(path));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv_line(lines[i]);
    if (f.empty() || f[0] != "run") continue;
    if (f.size() < 14) throw Error(path.string() + " line " + std::to_string(i + 1) + ": short row");
    RunMetrics m;
    m.run_index = std::stoi(f[1]);
    m.seed = std::stoull(f[2]);
    m.shots = std::stoi(f[3]);
    m.strategy = f[4];
    m.confusion = {std::stoull(f[5]), std::stoull(f[6]), std::stoull(f[7]), std::stoull(f[8])};
    m.precision = std::stod(f[9]);
    m.recall = std::stod(f[10]);
    m.f1 = std::stod(f[11]);
    m.f2 = std::stod(f[12]);
    m.unparseable = std::stoull(f[13]);
    out.push_back(m);
  }
  return out;
}

namespace detail {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline void append_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot append to " + path.string());
  out << data;
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

/// Checks that every split pair belongs to `ds` and carries its true label.
inline void check_split_against(const DatasetSplit& split, const TraceDataset& ds) {
  std::set<std::string> src, tgt;
  for (const auto& a : ds.sources()) src.insert(a.id);
  for (const auto& a : ds.targets()) tgt.insert(a.id);
  for (const auto* subset : split.subsets()) {
    for (const auto& p : *subset) {
      if (!src.contains(p.source_id) || !tgt.contains(p.target_id)) {
        throw DataError("split pair " + p.key().str() + " is not in dataset '" + ds.name() + "'");
      }
      if (p.label != ds.is_linked(p.key())) {
        throw DataError("split pair " + p.key().str() + " has a label that disagrees with the answer set");
      }
    }
  }
}

}  // namespace detail

inline std::unique_ptr<LlmClient> make_client(const ClientConfig& cfg, const TraceDataset& ds) {
  if (cfg.kind == "http") return std::make_unique<HttpChatClient>(HttpClientConfig::from_env());
  if (cfg.gold_echo) return std::make_unique<ScriptedClient>(ScriptedClient::gold_echo(ds));
  try {
    return std::make_unique<ScriptedClient>(
        ScriptedClient::from_json(nlohmann::json::parse(read_file(cfg.script_path))));
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid client script: " + std::string(e.what()));
  }
}

/// Runs (or resumes) an experiment. `client` and `embedder` override the
/// ones named by the config when given.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       LlmClient* client = nullptr,
                                       EmbeddingProvider* embedder = nullptr) {
  cfg.validate();
  ExperimentResult result;
  Diagnostics& diag = result.diagnostics;

  const auto ds = load_dataset(cfg.dataset, std::nullopt, &diag);
  const auto split = load_split(cfg.split_file);
  detail::check_split_against(split, ds);
  if (split.test.empty()) throw Error("split has an empty test partition");
  const auto catalog = PromptCatalog::load(cfg.prompts_file);
  const auto& spec = catalog.get(cfg.prompt_id);
  const bool reasoning = spec.asks_for_reasoning();

  std::unique_ptr<LlmClient> owned_client;
  if (!client) {
    owned_client = make_client(cfg.client, ds);
    client = owned_client.get();
  }
  std::unique_ptr<EmbeddingProvider> owned_embedder;
  if (!embedder && cfg.embeddings &&
      (cfg.strategy == Strategy::diversity || cfg.strategy == Strategy::similarity)) {
    owned_embedder = make_embedding_provider(*cfg.embeddings);
    embedder = owned_embedder.get();
  }

  result.config_hash = cfg.hash();
  result.run_dir = cfg.output_dir / result.config_hash;
  fs::create_directories(result.run_dir);
  write_file(result.run_dir / "config.json", cfg.canonical().dump(2) + "\n");
  const auto log_path = result.run_dir / "predictions.jsonl";
  const auto sidecar = result.run_dir / "run.log";
  detail::append_file(sidecar, detail::utc_timestamp() + " start " + result.config_hash + "\n");

  std::map<std::pair<int, PairKey>, PredictionRecord> done;
  for (auto& r : read_prediction_log(log_path, &diag)) {
    if (r.config_hash != result.config_hash) {
      throw Error("predictions.jsonl holds records of another config (" + r.config_hash + ")");
    }
    done.emplace(std::make_pair(r.run, r.pair), std::move(r));
  }

  // Demonstration pool, embedded and scored once per experiment.
  auto pool = make_pool(split.train, ds);
  const std::size_t k = static_cast<std::size_t>(cfg.shots);
  std::vector<std::optional<EmbeddingVector>> query_embeddings(split.test.size());
  if (k > 0) {
    if (pool.empty()) throw Error("few-shot run needs a non-empty train partition");
    if (cfg.strategy == Strategy::diversity || cfg.strategy == Strategy::similarity) {
      if (!embedder) throw Error(to_string(cfg.strategy) + " selection needs embeddings");
      attach_embeddings(pool, *embedder);
    }
    if (cfg.strategy == Strategy::similarity) {
      std::vector<std::string> reps;
      for (const auto& p : split.test) reps.push_back(pair_representation(p, ds));
      auto vecs = embedder->embed(reps);
      for (std::size_t i = 0; i < vecs.size(); ++i) query_embeddings[i] = std::move(vecs[i]);
    }
    if (cfg.strategy == Strategy::uncertainty) {
      ConfidenceOptions opts;
      opts.mode = cfg.confidence_mode;
      opts.samples = cfg.confidence_samples;
      opts.max_concurrency = cfg.max_concurrency;
      opts.model = cfg.model;
      compute_confidences(pool, spec, ds, *client, opts);
    }
  }

  const auto ask = [&](const RenderedPrompt& prompt, PredictionRecord& rec) {
    CompletionRequest req;
    req.model = cfg.model;
    req.prompt = prompt;
    req.temperature = cfg.temperature;
    req.max_tokens = reasoning ? cfg.reasoning_max_tokens : cfg.max_tokens;
    for (int attempt = 0; attempt < 2; ++attempt) {
      const auto res = client->complete(req);
      rec.input_tokens += res.input_tokens;
      rec.output_tokens += res.output_tokens;
      rec.attempts += res.attempts;
      rec.raw = res.text;
      try {
        rec.predicted = (reasoning ? parse_final_verdict(res.text) : parse_verdict(res.text)).linked;
        rec.unparseable = false;
        return;
      } catch (const UnparseableVerdict&) {
        rec.unparseable = true;
        rec.predicted = false;
      }
    }
  };

  std::vector<PredictionRecord> all_records;
  int run_index = 0;
  const std::size_t chunk = std::max<std::size_t>(1, cfg.max_concurrency * 8);
  for (const auto seed : cfg.seeds) {
    std::optional<SelectionResult> fixed;
    Diagnostics selection_diag;
    if (k > 0 && cfg.strategy != Strategy::similarity) {
      fixed = select(cfg.strategy, pool, k, cfg.balanced, seed, std::nullopt, &selection_diag);
    }
    for (int rep = 0; rep < cfg.repeats; ++rep, ++run_index) {
      std::vector<PredictionRecord> records(split.test.size());
      std::vector<std::string> prompt_lines(split.test.size());
      std::vector<bool> fresh(split.test.size(), false);
      for (std::size_t begin = 0; begin < split.test.size(); begin += chunk) {
        const std::size_t end = std::min(split.test.size(), begin + chunk);
        std::mutex diag_mutex;
        parallel_for(end - begin, cfg.max_concurrency, [&](std::size_t off) {
          const std::size_t i = begin + off;
          const auto& q = split.test[i];
          if (auto it = done.find({run_index, q.key()}); it != done.end()) {
            records[i] = it->second;
            return;
          }
          Diagnostics local;
          std::vector<Demonstration> demos;
          bool balanced = cfg.balanced;
          if (fixed) {
            demos = fixed->selected;
          } else if (k > 0) {
            demos = select(cfg.strategy, pool, k, cfg.balanced, seed, query_embeddings[i], &local)
                        .selected;
          }
          if (k == 0) balanced = false;
          const auto prompt = build_prompt(spec, ds, q, demos, balanced, &local);
          auto& rec = records[i];
          rec.config_hash = result.config_hash;
          rec.run = run_index;
          rec.pair = q.key();
          rec.label = q.label;
          rec.prompt_hash = text_key(prompt.text);
          ask(prompt, rec);
          fresh[i] = true;
          if (cfg.log_prompts) {
            prompt_lines[i] = nlohmann::json{{"run", run_index}, {"pair", q.key().str()},
                                             {"prompt", prompt.text}}
                                  .dump() +
                              "\n";
          }
          if (!local.empty()) {
            std::lock_guard lock(diag_mutex);
            for (auto& w : local.warnings) selection_diag.warn(std::move(w));
          }
        });
        // Append this chunk in test order so the log is independent of
        // completion order.
        std::string lines, plines;
        for (std::size_t i = begin; i < end; ++i) {
          if (!fresh[i]) continue;
          lines += records[i].to_json().dump() + "\n";
          plines += prompt_lines[i];
          ++result.queried;
        }
        if (!lines.empty()) detail::append_file(log_path, lines);
        if (!plines.empty()) detail::append_file(result.run_dir / "prompts.jsonl", plines);
      }

      Confusion c;
      std::size_t unparseable = 0;
      for (const auto& r : records) {
        c.add(r.predicted, r.label);
        unparseable += r.unparseable ? 1 : 0;
      }
      auto m = metrics_from(c);
      m.run_index = run_index;
      m.shots = cfg.shots;
      m.strategy = to_string(cfg.strategy) + (cfg.balanced ? "+balanced" : "");
      m.seed = seed;
      m.unparseable = unparseable;
      result.flagged += unparseable;
      result.runs.push_back(m);
      for (auto& r : records) all_records.push_back(std::move(r));
    }
    // Warnings repeat for every query of a run; keep each once.
    std::set<std::string> seen;
    for (auto& w : selection_diag.warnings) {
      if (seen.insert(w).second) diag.warn(std::move(w));
    }
  }

  result.aggregate = aggregate(result.runs);
  write_file(result.run_dir / "metrics.csv", metrics_csv(result.runs, result.aggregate));

  std::vector<Usage> usages;
  for (const auto& r : all_records) usages.push_back({r.input_tokens, r.output_tokens});
  PricingTable pricing;
  if (cfg.pricing_file) {
    try {
      pricing = PricingTable::from_json(nlohmann::json::parse(read_file(*cfg.pricing_file)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("invalid pricing file: " + std::string(e.what()));
    }
    result.cost = cost_report(std::span<const Usage>(usages), pricing, cfg.model);
    result.priced = true;
  } else {
    pricing.set(cfg.model, {0.0, 0.0});
    result.cost = cost_report(std::span<const Usage>(usages), pricing, cfg.model);
  }
  auto cost_json = result.cost.to_json();
  cost_json["priced"] = result.priced;
  cost_json["token_counts"] = cfg.client.kind == "scripted" ? "whitespace stub, not billing-grade"
                                                            : "provider usage";
  write_file(result.run_dir / "cost.json", cost_json.dump(2) + "\n");

  std::string log = detail::utc_timestamp() + " done runs=" + std::to_string(result.runs.size()) +
                    " queried=" + std::to_string(result.queried) +
                    " flagged=" + std::to_string(result.flagged) + "\n";
  for (const auto& w : diag.warnings) log += "warning: " + w + "\n";
  detail::append_file(sidecar, log);
  return result;
}

}  // namespace tracellm
