// Copyright 2026 The GazeBench Authors.
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

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.h"
#include "util.h"

namespace {

namespace cli = gazebench::cli;
using Path = std::filesystem::path;

// Copies an optional CLI value only when it was given on the command line,
// in the config file or through the environment.
template <typename T, typename U>
void take(const CLI::Option* opt, const U& value, std::optional<T>& dst) {
  if (opt->count() > 0) dst = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scanpath and gaze-explanation evaluation toolkit", "gazebench"};
  app.set_version_flag("--version", std::string(cli::kToolVersion));
  app.set_config("--config", "", "TOML file with option values", false);
  app.require_subcommand(1);

  // stats
  cli::StatsOptions stats;
  Path stats_out;
  auto* stats_cmd = app.add_subcommand("stats", "Dataset statistics table");
  stats_cmd->add_option("datasets", stats.datasets, "Dataset files")
      ->required()
      ->check(CLI::ExistingFile);
  auto* stats_out_opt =
      stats_cmd->add_option("-o,--out", stats_out, "Write .md or .csv");

  // sample
  cli::SampleOptions sample;
  std::uint64_t sample_seed = 0;
  Path sample_stimuli;
  auto* sample_cmd = app.add_subcommand(
      "sample", "Monte Carlo scanpaths from decoder output files");
  sample_cmd->add_option("--decoders", sample.decoders,
                         "Decoder JSON files or directories")
      ->required();
  auto* sample_seed_opt =
      sample_cmd->add_option("--seed", sample_seed, "Random seed (required)")
          ->envname("GAZEBENCH_SEED");
  sample_cmd->add_option("-n,--samples", sample.samples, "Scanpaths per stimulus")
      ->capture_default_str();
  auto* sample_stimuli_opt = sample_cmd->add_option(
      "--stimuli", sample_stimuli, "Dataset whose stimulus records are copied");
  sample_cmd->add_option("--name", sample.name, "Output dataset name")
      ->capture_default_str();
  sample_cmd->add_option("-o,--out", sample.out, "Output dataset file")->required();

  // evaluate
  cli::EvaluateOptions eval;
  std::uint64_t eval_seed = 0;
  double sigma_px = 0.0, bandwidth_px = 0.0;
  auto* eval_cmd =
      app.add_subcommand("evaluate", "Score predictions against human data");
  eval_cmd->alias("eval");
  eval_cmd->add_option("--pred", eval.pred, "Predicted dataset")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--truth", eval.truth, "Ground-truth dataset")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("-o,--out-dir", eval.out_dir, "Report directory")
      ->required();
  eval_cmd->add_option("--metrics", eval.metrics, "Comma-separated metric names")
      ->delimiter(',');
  eval_cmd->add_flag("--best", eval.best,
                     "Score each prediction by its best-matching human scanpath");
  auto* eval_seed_opt =
      eval_cmd->add_option("--seed", eval_seed, "Seed for shuffled-AUC negatives")
          ->envname("GAZEBENCH_SEED");
  auto* sigma_opt = eval_cmd->add_option(
      "--sigma-px", sigma_px, "Saliency blur sigma (default 1 degree)");
  auto* bw_opt = eval_cmd->add_option("--bandwidth-px", bandwidth_px,
                                      "MeanShift bandwidth (default 2 degrees)");
  eval_cmd->add_option("--grid-cols", eval.grid_cols)->capture_default_str();
  eval_cmd->add_option("--grid-rows", eval.grid_rows)->capture_default_str();
  eval_cmd->add_option("--threads", eval.threads, "0 = hardware concurrency")
      ->envname("GAZEBENCH_THREADS");

  // align
  cli::AlignOptions align;
  Path align_out;
  auto* align_cmd = app.add_subcommand(
      "align", "Alignment loss and residuals for feature bundles");
  align_cmd->add_option("--features", align.bundles, "Bundle JSON (object or array)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* align_out_opt = align_cmd->add_option("-o,--out", align_out, "CSV output");
  align_cmd->add_flag("--gradient", align.gradient, "Also print gradient norms");

  // annotate-qc
  cli::QcOptionsCli qc;
  std::string qc_url;
  Path qc_cache;
  double qc_bw = 0.0;
  bool no_cluster = false;
  auto* qc_cmd = app.add_subcommand("annotate-qc", "Quality control of explanations");
  qc_cmd->add_option("--dataset", qc.dataset)->required()->check(CLI::ExistingFile);
  qc_cmd->add_option("-o,--out-dir", qc.out_dir)->required();
  qc_cmd->add_option("--embedder", qc.embedder, "bow, http or cache")
      ->capture_default_str()
      ->envname("GAZEBENCH_EMBEDDER");
  auto* qc_url_opt =
      qc_cmd->add_option("--embed-url", qc_url)->envname("GAZEBENCH_EMBED_URL");
  auto* qc_cache_opt =
      qc_cmd->add_option("--embed-cache", qc_cache)->envname("GAZEBENCH_EMBED_CACHE");
  auto* qc_bw_opt = qc_cmd->add_option("--bandwidth-px", qc_bw);
  qc_cmd->add_option("--tau", qc.tau, "Cluster consistency threshold")
      ->capture_default_str();
  qc_cmd->add_flag("--no-cluster-rule", no_cluster);

  // faith
  cli::FaithOptions faith;
  std::string faith_url;
  Path faith_cache;
  auto* faith_cmd =
      app.add_subcommand("faith", "Faithfulness ROC of explanations on search data");
  faith_cmd->add_option("--dataset", faith.dataset)->required()->check(CLI::ExistingFile);
  faith_cmd->add_option("-o,--out-dir", faith.out_dir)->required();
  faith_cmd->add_option("--threshold-px", faith.threshold)->capture_default_str();
  faith_cmd->add_option("--sweep", faith.sweep, "Comma-separated thresholds in px")
      ->delimiter(',');
  faith_cmd->add_option("--embedder", faith.embedder)
      ->capture_default_str()
      ->envname("GAZEBENCH_EMBEDDER");
  auto* faith_url_opt =
      faith_cmd->add_option("--embed-url", faith_url)->envname("GAZEBENCH_EMBED_URL");
  auto* faith_cache_opt = faith_cmd->add_option("--embed-cache", faith_cache)
                              ->envname("GAZEBENCH_EMBED_CACHE");

  // annotate
  cli::AnnotateOptions ann;
  double ann_ppd = 0.0;
  std::string vlm_url, vlm_key;
  Path vlm_cache;
  auto* ann_cmd = app.add_subcommand(
      "annotate", "Describe each fixation with a remote vision-language service");
  ann_cmd->add_option("--dataset", ann.dataset)->required()->check(CLI::ExistingFile);
  ann_cmd->add_option("-o,--out", ann.out)->required();
  auto* ppd_opt = ann_cmd->add_option("--ppd", ann_ppd, "Native pixels per degree");
  auto* vlm_url_opt =
      ann_cmd->add_option("--vlm-url", vlm_url)->envname("GAZEBENCH_VLM_URL");
  auto* vlm_key_opt =
      ann_cmd->add_option("--vlm-key", vlm_key)->envname("GAZEBENCH_VLM_KEY");
  auto* vlm_cache_opt =
      ann_cmd->add_option("--cache-dir", vlm_cache)->envname("GAZEBENCH_VLM_CACHE");
  ann_cmd->add_flag("--offline", ann.offline, "Answer from the cache only");
  ann_cmd->add_option("--stroke-px", ann.stroke_px)->capture_default_str();
  ann_cmd->add_option("--max-in-flight", ann.max_in_flight)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*stats_cmd) {
      take(stats_out_opt, stats_out, stats.out);
      cli::run_stats(stats);
    } else if (*sample_cmd) {
      take(sample_seed_opt, sample_seed, sample.seed);
      take(sample_stimuli_opt, sample_stimuli, sample.stimuli);
      cli::run_sample(sample);
    } else if (*eval_cmd) {
      take(eval_seed_opt, eval_seed, eval.seed);
      take(sigma_opt, sigma_px, eval.sigma_px);
      take(bw_opt, bandwidth_px, eval.bandwidth_px);
      cli::run_evaluate(eval);
    } else if (*align_cmd) {
      take(align_out_opt, align_out, align.out);
      cli::run_align(align);
    } else if (*qc_cmd) {
      take(qc_url_opt, qc_url, qc.embed_url);
      take(qc_cache_opt, qc_cache, qc.embed_cache);
      take(qc_bw_opt, qc_bw, qc.bandwidth_px);
      qc.cluster_rule = !no_cluster;
      cli::run_annotate_qc(qc);
    } else if (*faith_cmd) {
      take(faith_url_opt, faith_url, faith.embed_url);
      take(faith_cache_opt, faith_cache, faith.embed_cache);
      cli::run_faith(faith);
    } else if (*ann_cmd) {
      take(ppd_opt, ann_ppd, ann.ppd);
      take(vlm_url_opt, vlm_url, ann.vlm_url);
      take(vlm_key_opt, vlm_key, ann.vlm_key);
      take(vlm_cache_opt, vlm_cache, ann.cache_dir);
      cli::run_annotate(ann);
    }
  } catch (const std::exception& e) {
    return cli::report_failure(e);
  }
  return 0;
}
