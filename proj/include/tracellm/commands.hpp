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

// Subcommand implementations behind the tracellm executable. Each returns a
// process exit code: 0 success, 1 operational error, 2 data-integrity
// failure. Output goes to `out`, diagnostics to `err`.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracellm/baselines.hpp"
#include "tracellm/corpus.hpp"
#include "tracellm/embeddings.hpp"
#include "tracellm/error.hpp"
#include "tracellm/experiment.hpp"
#include "tracellm/llm_client.hpp"
#include "tracellm/metrics.hpp"
#include "tracellm/selection.hpp"
#include "tracellm/stats.hpp"

namespace tracellm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitData = 2;

/// Runs `body`, mapping exceptions to exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

inline void print_warnings(const Diagnostics& d, std::ostream& err) {
  for (const auto& w : d.warnings) err << "warning: " << w << "\n";
}

inline int cmd_validate(const fs::path& manifest, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Diagnostics diag;
    const auto ds = load_dataset(manifest, std::nullopt, &diag);
    out << ds.summary() << "\n";
    print_warnings(diag, err);
    return diag.empty() ? kExitOk : kExitData;
  });
}

struct SplitArgs {
  fs::path manifest;
  std::string method = "by_link";
  std::string ratios = "4:2:4";
  std::uint64_t seed = 0;
  std::optional<fs::path> out;
};

inline int cmd_split(const SplitArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Diagnostics diag;
    const auto ds = load_dataset(a.manifest, std::nullopt, &diag);
    const auto ratios = Ratios::parse(a.ratios);
    const auto method = parse_split_method(a.method);
    const auto split = method == SplitMethod::by_link
                           ? split_by_link(enumerate_pairs(ds), ratios, a.seed, &diag)
                           : split_by_artifact(ds, ratios, a.seed, &diag);
    const auto text = dump_split(split);
    if (a.out) {
      write_file(*a.out, text);
      for (int i = 0; i < 3; ++i) {
        const auto& s = *split.subsets()[static_cast<std::size_t>(i)];
        const auto t = std::count_if(s.begin(), s.end(), [](const auto& p) { return p.label; });
        out << detail::subset_name(i) << ": pairs=" << s.size() << " true=" << t << "\n";
      }
    } else {
      out << text;
    }
    print_warnings(diag, err);
    return kExitOk;
  });
}

struct BaselineArgs {
  fs::path manifest;
  fs::path split;
  std::string model = "vsm";
  BaselineGrid grid;
  std::optional<fs::path> embeddings_file;
  std::optional<fs::path> out_dir;
};

inline int cmd_baseline(const BaselineArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Diagnostics diag;
    const auto ds = load_dataset(a.manifest, std::nullopt, &diag);
    const auto split = load_split(a.split);
    detail::check_split_against(split, ds);
    const auto model = parse_baseline_model(a.model);
    std::unique_ptr<EmbeddingProvider> provider;
    if (model == BaselineModel::embed) {
      if (!a.embeddings_file) throw Error("--model embed needs --embeddings");
      provider = std::make_unique<FileEmbeddingProvider>(
          FileEmbeddingProvider::from_file(*a.embeddings_file));
    }
    const auto r = run_baseline(model, ds, split, a.grid, provider.get(), &diag);
    out << "model=" << to_string(model) << " setting=" << r.chosen.setting.str()
        << " threshold=" << format_fixed(r.chosen.threshold, 2)
        << " tuning_f2=" << format_fixed(r.chosen.tuning_f2, 4)
        << " validation_f2=" << format_fixed(r.chosen.validation_f2, 4) << "\n";
    out << "test precision=" << format_fixed(r.test_metrics.precision, 4)
        << " recall=" << format_fixed(r.test_metrics.recall, 4)
        << " f1=" << format_fixed(r.test_metrics.f1, 4)
        << " f2=" << format_fixed(r.test_metrics.f2, 4) << "\n";
    if (a.out_dir) {
      write_file(*a.out_dir / "baseline_report.csv", baseline_report_csv(r));
      write_file(*a.out_dir / "sweep_curve.csv", sweep_curve_csv(r.sweep));
    }
    print_warnings(diag, err);
    return kExitOk;
  });
}

/// Flag overrides applied on top of an experiment config file.
struct RunOverrides {
  std::optional<std::string> prompt_id;
  std::optional<std::string> strategy;
  std::optional<bool> balanced;
  std::optional<int> shots;
  std::optional<int> repeats;
  std::optional<std::string> model;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::size_t> max_concurrency;
  std::optional<fs::path> output_dir;
  bool log_prompts = false;
};

inline ExperimentConfig load_config_with(const fs::path& config, const RunOverrides& o) {
  auto j = nlohmann::json::parse(read_file(config), nullptr, false);
  if (j.is_discarded()) throw Error("experiment config is not valid JSON: " + config.string());
  if (o.prompt_id) j["prompt_id"] = *o.prompt_id;
  if (o.strategy) j["strategy"] = *o.strategy;
  if (o.balanced) j["balanced"] = *o.balanced;
  if (o.shots) j["shots"] = *o.shots;
  if (o.repeats) j["repeats"] = *o.repeats;
  if (o.model) j["model"] = *o.model;
  if (o.seeds) j["seeds"] = *o.seeds;
  if (o.max_concurrency) j["max_concurrency"] = *o.max_concurrency;
  if (o.output_dir) j["output_dir"] = fs::absolute(*o.output_dir).string();
  if (o.log_prompts) j["log_prompts"] = true;
  return ExperimentConfig::from_json(j, config.parent_path());
}

inline int cmd_run(const fs::path& config, const RunOverrides& o, std::ostream& out,
                   std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_config_with(config, o);
    const auto r = run_experiment(cfg);
    out << "config_hash=" << r.config_hash << " runs=" << r.runs.size()
        << " queried=" << r.queried << " flagged=" << r.flagged << "\n";
    out << "mean precision=" << format_fixed(r.aggregate.precision.mean, 4)
        << " recall=" << format_fixed(r.aggregate.recall.mean, 4)
        << " f1=" << format_fixed(r.aggregate.f1.mean, 4)
        << " f2=" << format_fixed(r.aggregate.f2.mean, 4)
        << " (std f2=" << format_fixed(r.aggregate.f2.std, 4) << ")\n";
    out << "output: " << r.run_dir.string() << "\n";
    print_warnings(r.diagnostics, err);
    return kExitOk;
  });
}

/// CSV: pair_key,label,selected,strategy,order_index,dim,coord_0..coord_{d-1}
/// One row per train-pool item; order_index is empty for unselected items.
inline std::string selection_dump_csv(const std::vector<Demonstration>& pool,
                                      const SelectionResult& sel) {
  std::size_t dim = 0;
  for (const auto& d : pool) {
    if (d.embedding) dim = std::max(dim, d.embedding->dim());
  }
  std::string out = "pair_key,label,selected,strategy,order_index,dim";
  for (std::size_t i = 0; i < dim; ++i) out += ",coord_" + std::to_string(i);
  out += "\n";
  std::vector<std::optional<std::size_t>> order(pool.size());
  for (std::size_t i = 0; i < sel.pool_indices.size(); ++i) order[sel.pool_indices[i]] = i;
  const auto strategy = to_string(sel.strategy) + (sel.balanced ? "+balanced" : "");
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& d = pool[i];
    out += csv_escape(d.pair.key().str()) + "," + (d.pair.label ? "1" : "0") + "," +
           (order[i] ? "1" : "0") + "," + strategy + "," +
           (order[i] ? std::to_string(*order[i]) : "") + "," +
           std::to_string(d.embedding ? d.embedding->dim() : 0);
    for (std::size_t c = 0; c < dim; ++c) {
      out += ",";
      if (d.embedding && c < d.embedding->dim()) out += format_fixed((*d.embedding)[c], 9);
    }
    out += "\n";
  }
  return out;
}

inline int cmd_select_dump(const fs::path& config, const RunOverrides& o,
                           std::optional<fs::path> out_file, std::ostream& out,
                           std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = load_config_with(config, o);
    if (cfg.shots == 0) throw Error("select-dump needs shots > 0");
    Diagnostics diag;
    const auto ds = load_dataset(cfg.dataset, std::nullopt, &diag);
    const auto split = load_split(cfg.split_file);
    detail::check_split_against(split, ds);
    auto pool = make_pool(split.train, ds);
    if (pool.empty()) throw Error("empty demonstration pool (train partition has no pairs)");
    std::unique_ptr<EmbeddingProvider> embedder;
    if (cfg.embeddings) {
      embedder = make_embedding_provider(*cfg.embeddings);
      attach_embeddings(pool, *embedder);
    }
    std::optional<EmbeddingVector> query;
    if (cfg.strategy == Strategy::similarity) {
      if (!embedder || split.test.empty()) throw Error("similarity dump needs embeddings and a test pair");
      const std::vector<std::string> rep{pair_representation(split.test.front(), ds)};
      query = embedder->embed(rep).front();
      err << "similarity query: " << split.test.front().key().str() << "\n";
    }
    if (cfg.strategy == Strategy::uncertainty) {
      const auto catalog = PromptCatalog::load(cfg.prompts_file);
      auto client = make_client(cfg.client, ds);
      ConfidenceOptions opts;
      opts.mode = cfg.confidence_mode;
      opts.samples = cfg.confidence_samples;
      opts.model = cfg.model;
      compute_confidences(pool, catalog.get(cfg.prompt_id), ds, *client, opts);
    }
    const auto sel = select(cfg.strategy, pool, static_cast<std::size_t>(cfg.shots), cfg.balanced,
                            cfg.seeds.front(), query, &diag);
    const auto csv = selection_dump_csv(pool, sel);
    if (out_file) {
      write_file(*out_file, csv);
    } else {
      out << csv;
    }
    print_warnings(diag, err);
    return kExitOk;
  });
}

struct ReportArgs {
  std::vector<fs::path> run_dirs;
  bool compare = false;
  std::string test = "wilcoxon";
  std::optional<fs::path> out;
};

inline int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (a.run_dirs.empty()) throw Error("report needs at least one run directory");
    if (a.test != "wilcoxon" && a.test != "mannwhitney") {
      throw Error("--test must be wilcoxon or mannwhitney");
    }
    std::vector<std::vector<RunMetrics>> all;
    out << "dir,n_runs,precision_mean,precision_std,recall_mean,recall_std,f1_mean,f1_std,"
           "f2_mean,f2_std\n";
    for (const auto& d : a.run_dirs) {
      all.push_back(read_metrics_csv(d / "metrics.csv"));
      if (all.back().empty()) throw Error("no runs in " + (d / "metrics.csv").string());
      const auto g = aggregate(all.back());
      out << csv_escape(d.string()) << "," << g.n_runs;
      for (const auto* s : {&g.precision, &g.recall, &g.f1, &g.f2}) {
        out << "," << format_fixed(s->mean, 6) << "," << format_fixed(s->std, 6);
      }
      out << "\n";
    }
    if (!a.compare || a.run_dirs.size() < 2) return kExitOk;

    std::string table = "dir_a,dir_b,metric,test,statistic,p_value,exact,n,degenerate\n";
    const auto column = [](const std::vector<RunMetrics>& runs, int metric) {
      std::vector<double> v;
      for (const auto& m : runs) {
        v.push_back(metric == 0 ? m.precision : metric == 1 ? m.recall : metric == 2 ? m.f1 : m.f2);
      }
      return v;
    };
    static constexpr const char* names[] = {"precision", "recall", "f1", "f2"};
    for (std::size_t j = 1; j < all.size(); ++j) {
      if (a.test == "wilcoxon" && all[0].size() != all[j].size()) {
        throw Error("wilcoxon is a paired test: " + a.run_dirs[0].string() + " has " +
                    std::to_string(all[0].size()) + " runs, " + a.run_dirs[j].string() + " has " +
                    std::to_string(all[j].size()));
      }
      for (int m = 0; m < 4; ++m) {
        const auto x = column(all[0], m), y = column(all[j], m);
        const auto t = a.test == "wilcoxon" ? wilcoxon_signed_rank(x, y) : mann_whitney_u(x, y);
        table += csv_escape(a.run_dirs[0].string()) + "," + csv_escape(a.run_dirs[j].string()) +
                 "," + names[m] + "," + to_string(t.method) + "," + format_fixed(t.statistic, 6) +
                 "," + format_fixed(t.p_value, 6) + "," + (t.exact ? "exact" : "normal") + "," +
                 std::to_string(t.n) + "," + (t.degenerate ? "1" : "0") + "\n";
      }
    }
    out << "\n" << table;
    if (a.out) write_file(*a.out, table);
    return kExitOk;
  });
}

struct CostArgs {
  fs::path log;  // predictions.jsonl or a run directory
  fs::path pricing;
  std::string model;
};

inline int cmd_cost(const CostArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto path = fs::is_directory(a.log) ? a.log / "predictions.jsonl" : a.log;
    if (!fs::exists(path)) throw Error("prediction log not found: " + path.string());
    Diagnostics diag;
    std::vector<Usage> usages;
    for (const auto& r : read_prediction_log(path, &diag)) {
      usages.push_back({r.input_tokens, r.output_tokens});
    }
    PricingTable pricing;
    try {
      pricing = PricingTable::from_json(nlohmann::json::parse(read_file(a.pricing)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("invalid pricing file: " + std::string(e.what()));
    }
    out << cost_report(std::span<const Usage>(usages), pricing, a.model).to_json().dump(2) << "\n";
    print_warnings(diag, err);
    return kExitOk;
  });
}

}  // namespace tracellm
