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

// tracellm: dataset validation, splitting, IR baselines, LLM experiments,
// demonstration dumps, statistical reports and cost summaries.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tracellm/commands.hpp"

namespace {

using tracellm::fs::path;

// Experiment flags shared by `run` and `select-dump`.
struct RunFlags {
  std::string prompt, strategy, model, out;
  bool balanced = false, unbalanced = false, log_prompts = false;
  int shots = -1, repeats = -1;
  std::vector<std::uint64_t> seeds;
  std::size_t max_concurrency = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--prompt", prompt, "Prompt id from the catalog (P1..P7, model names, template)");
    cmd->add_option("--strategy", strategy, "random|diversity|similarity|uncertainty");
    auto* b = cmd->add_flag("--balanced", balanced, "Label-aware selection");
    auto* u = cmd->add_flag("--unbalanced", unbalanced, "Plain selection");
    b->excludes(u);
    cmd->add_option("--shots", shots, "0, 2, 4 or 6");
    cmd->add_option("--repeats", repeats, "Repetitions per seed");
    cmd->add_option("--model", model, "Model name sent to the endpoint");
    cmd->add_option("--seeds", seeds, "Comma-separated selection seeds")->delimiter(',');
    cmd->add_option("--max-concurrency", max_concurrency, "In-flight request bound");
    cmd->add_option("--output-dir", out, "Parent of the config-hash output directory");
    cmd->add_flag("--log-prompts", log_prompts, "Write rendered prompts to prompts.jsonl");
  }

  tracellm::RunOverrides overrides() const {
    tracellm::RunOverrides o;
    if (!prompt.empty()) o.prompt_id = prompt;
    if (!strategy.empty()) o.strategy = strategy;
    if (balanced) o.balanced = true;
    if (unbalanced) o.balanced = false;
    if (shots >= 0) o.shots = shots;
    if (repeats >= 0) o.repeats = repeats;
    if (!model.empty()) o.model = model;
    if (!seeds.empty()) o.seeds = seeds;
    if (max_concurrency > 0) o.max_concurrency = max_concurrency;
    if (!out.empty()) o.output_dir = path(out);
    o.log_prompts = log_prompts;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace link recovery experiments with language models and IR baselines"};
  app.require_subcommand(1);
  int code = tracellm::kExitOk;

  std::string manifest;
  auto* validate = app.add_subcommand("validate", "Load a dataset and report counts and integrity findings");
  validate->add_option("manifest", manifest, "Dataset manifest (JSON)")->required();

  tracellm::SplitArgs split_args;
  std::string split_manifest, split_out;
  auto* split = app.add_subcommand("split", "Write a train/validation/test split");
  split->add_option("manifest", split_manifest, "Dataset manifest")->required();
  split->add_option("--method", split_args.method, "by_link|by_artifact")->capture_default_str();
  split->add_option("--ratios", split_args.ratios, "train:validation:test")->capture_default_str();
  split->add_option("--seed", split_args.seed, "Shuffle seed")->capture_default_str();
  split->add_option("--out", split_out, "Output file (stdout when omitted)");

  tracellm::BaselineArgs base_args;
  std::string base_manifest, base_split, base_emb, base_out;
  auto* baseline = app.add_subcommand("baseline", "Tune and evaluate an IR baseline");
  baseline->add_option("manifest", base_manifest, "Dataset manifest")->required();
  baseline->add_option("split", base_split, "Split file")->required();
  baseline->add_option("--model", base_args.model, "vsm|lsi|lda|embed")->capture_default_str();
  baseline->add_option("--n-components", base_args.grid.n_components, "LSI grid")
      ->delimiter(',')->capture_default_str();
  baseline->add_option("--num-topics", base_args.grid.num_topics, "LDA topic grid")
      ->delimiter(',')->capture_default_str();
  baseline->add_option("--passes", base_args.grid.passes, "LDA passes grid")
      ->delimiter(',')->capture_default_str();
  baseline->add_option("--seed", base_args.grid.seed, "LDA sampler seed")->capture_default_str();
  baseline->add_option("--embeddings", base_emb, "Embedding file for --model embed");
  baseline->add_option("--out", base_out, "Directory for baseline_report.csv and sweep_curve.csv");

  std::string run_config;
  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", run_config, "Experiment config (JSON)")->required();
  run_flags.attach(run);

  std::string dump_config, dump_out;
  RunFlags dump_flags;
  auto* dump = app.add_subcommand("select-dump", "Dump the train pool with selection flags and embeddings");
  dump->add_option("config", dump_config, "Experiment config (JSON)")->required();
  dump->add_option("--out", dump_out, "CSV output (stdout when omitted)");
  dump_flags.attach(dump);

  tracellm::ReportArgs report_args;
  std::vector<std::string> report_dirs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Aggregate run directories and compare them");
  report->add_option("run_dirs", report_dirs, "Run output directories")->required();
  report->add_flag("--compare", report_args.compare, "Test the first directory against the others");
  report->add_option("--test", report_args.test, "wilcoxon|mannwhitney")->capture_default_str();
  report->add_option("--out", report_out, "Write the test table as CSV");

  tracellm::CostArgs cost_args;
  std::string cost_log, cost_pricing;
  auto* cost = app.add_subcommand("cost", "Token usage and cost of a prediction log");
  cost->add_option("log", cost_log, "predictions.jsonl or run directory")->required();
  cost->add_option("--pricing", cost_pricing, "Pricing table (JSON)")->required();
  cost->add_option("--model", cost_args.model, "Model row of the pricing table")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? tracellm::kExitOk : tracellm::kExitError;
  }

  auto& out = std::cout;
  auto& err = std::cerr;
  if (*validate) {
    code = tracellm::cmd_validate(manifest, out, err);
  } else if (*split) {
    split_args.manifest = split_manifest;
    if (!split_out.empty()) split_args.out = path(split_out);
    code = tracellm::cmd_split(split_args, out, err);
  } else if (*baseline) {
    base_args.manifest = base_manifest;
    base_args.split = base_split;
    if (!base_emb.empty()) base_args.embeddings_file = path(base_emb);
    if (!base_out.empty()) base_args.out_dir = path(base_out);
    code = tracellm::cmd_baseline(base_args, out, err);
  } else if (*run) {
    code = tracellm::cmd_run(run_config, run_flags.overrides(), out, err);
  } else if (*dump) {
    std::optional<path> file;
    if (!dump_out.empty()) file = path(dump_out);
    code = tracellm::cmd_select_dump(dump_config, dump_flags.overrides(), file, out, err);
  } else if (*report) {
    for (const auto& d : report_dirs) report_args.run_dirs.emplace_back(d);
    if (!report_out.empty()) report_args.out = path(report_out);
    code = tracellm::cmd_report(report_args, out, err);
  } else if (*cost) {
    cost_args.log = cost_log;
    cost_args.pricing = cost_pricing;
    code = tracellm::cmd_cost(cost_args, out, err);
  }
  return code;
}
