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

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.h"
#include "gazebench/cluster.h"
#include "gazebench/core.h"
#include "gazebench/dataset_io.h"
#include "gazebench/error.h"
#include "gazebench/hashing.h"
#include "gazebench/langmetrics.h"
#include "gazebench/parallel.h"
#include "gazebench/random.h"
#include "gazebench/report.h"
#include "gazebench/salmetrics.h"
#include "gazebench/seqmetrics.h"
#include "json.hpp"
#include "util.h"

namespace gazebench::cli {
namespace {

using Opt = std::optional<double>;

const std::vector<std::string> kPairColumns = {"SM", "MM", "SED", "SS", "SemSS"};
const std::vector<std::string> kScanpathColumns = {
    "SM", "MM", "SED", "SS", "SemSS", "CC", "NSS", "AUC", "sAUC"};
const std::vector<std::string> kLanguageColumns = {"B-4", "M",   "R",   "C-R",
                                                   "Voc", "Len", "UnP%"};

struct PairRow {
  std::string pred_id;
  std::string truth_id;
  std::vector<Opt> values;  // kPairColumns order
};

struct StimulusResult {
  std::vector<PairRow> pairs;
  std::map<std::string, Opt> metrics;
};

// One generated sentence and the human sentences at the same fixation index.
struct LanguageItem {
  TokenSeq candidate;
  std::vector<TokenSeq> refs;
  std::size_t document = 0;
};

Opt mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

std::set<std::string> requested_metrics(const std::vector<std::string>& names) {
  if (names.empty()) {
    return {known_metrics().begin(), known_metrics().end()};
  }
  std::set<std::string> out;
  for (const auto& n : names) {
    if (std::find(known_metrics().begin(), known_metrics().end(), n) ==
        known_metrics().end()) {
      std::string all;
      for (const auto& k : known_metrics()) all += (all.empty() ? "" : ",") + k;
      throw ValidationError("unknown metric '" + n + "' (known: " + all + ")",
                            {n});
    }
    out.insert(n);
  }
  return out;
}

double pixels_or(const StimulusRecord& s, std::optional<double> override_px,
                 double degrees, double fallback_px) {
  if (override_px) return *override_px;
  if (s.pixels_per_degree) return degrees * *s.pixels_per_degree;
  return fallback_px;
}

// Pair metrics for one stimulus. With `best`, each prediction keeps its best
// match over the human scanpaths (lowest SED, highest otherwise); without,
// every pair counts. The stimulus value is the mean of those numbers.
StimulusResult evaluate_stimulus(
    const StimulusRecord& stim, const std::vector<const ExplainedScanpath*>& preds,
    const std::vector<const ExplainedScanpath*>& truths,
    const std::set<std::string>& metrics, const EvaluateOptions& opts,
    std::span<const Point> negative_pool, std::uint64_t stimulus_seed) {
  StimulusResult res;
  const GridSpec grid{opts.grid_cols, opts.grid_rows, {stim.width, stim.height}};
  ScanMatchConfig sm_cfg;
  sm_cfg.grid = grid;
  const bool want_ss = metrics.count("ss") > 0;
  const bool want_semss = metrics.count("semss") > 0 && stim.label_map;
  std::vector<Point> truth_points;
  for (const auto* sp : truths) {
    for (const auto& f : sp->fixations) truth_points.push_back(f.position());
  }
  ClusterModel clusters;
  if (want_ss) {
    clusters = meanshift_fit(truth_points,
                             pixels_or(stim, opts.bandwidth_px, 2.0,
                                       kDefaultClusterBandwidthPx));
  }

  std::vector<std::vector<double>> per_metric(kPairColumns.size());
  for (const auto* p : preds) {
    std::vector<std::vector<double>> per_truth(kPairColumns.size());
    for (const auto* t : truths) {
      PairRow row{p->id(), t->id(), std::vector<Opt>(kPairColumns.size())};
      if (metrics.count("sm")) row.values[0] = scanmatch(*p, *t, sm_cfg);
      if (metrics.count("mm")) {
        row.values[1] = multimatch(*p, *t, {stim.width, stim.height}).mean();
      }
      if (metrics.count("sed")) row.values[2] = sed(*p, *t, grid);
      if (want_ss) row.values[3] = sequence_score(*p, *t, clusters);
      if (want_semss) row.values[4] = semantic_sequence_score(*p, *t, stim);
      for (std::size_t c = 0; c < kPairColumns.size(); ++c) {
        if (row.values[c]) per_truth[c].push_back(*row.values[c]);
      }
      res.pairs.push_back(std::move(row));
    }
    for (std::size_t c = 0; c < kPairColumns.size(); ++c) {
      auto& xs = per_truth[c];
      if (xs.empty()) continue;
      if (!opts.best) {
        per_metric[c].insert(per_metric[c].end(), xs.begin(), xs.end());
      } else if (kPairColumns[c] == "SED") {
        per_metric[c].push_back(*std::min_element(xs.begin(), xs.end()));
      } else {
        per_metric[c].push_back(*std::max_element(xs.begin(), xs.end()));
      }
    }
  }
  for (std::size_t c = 0; c < kPairColumns.size(); ++c) {
    res.metrics[kPairColumns[c]] = mean_of(per_metric[c]);
  }

  const bool want_saliency = metrics.count("cc") || metrics.count("nss") ||
                             metrics.count("auc") || metrics.count("sauc");
  if (want_saliency) {
    const double sigma = pixels_or(stim, opts.sigma_px, 1.0, kDefaultSaliencySigmaPx);
    const ImageSize size{stim.width, stim.height};
    std::vector<ExplainedScanpath> pred_copy, truth_copy;
    for (const auto* p : preds) pred_copy.push_back(*p);
    for (const auto* t : truths) truth_copy.push_back(*t);
    const SaliencyMap pred_map = aggregate_saliency(
        std::span<const ExplainedScanpath>(pred_copy), size, sigma);
    if (metrics.count("cc")) {
      res.metrics["CC"] = cc(pred_map,
                             aggregate_saliency(std::span<const ExplainedScanpath>(
                                                    truth_copy),
                                                size, sigma));
    }
    if (metrics.count("nss")) res.metrics["NSS"] = nss(pred_map, truth_points);
    if (metrics.count("auc")) res.metrics["AUC"] = auc_judd(pred_map, truth_points);
    if (metrics.count("sauc")) {
      res.metrics["sAUC"] = sauc(
          pred_map, truth_points,
          shuffled_negatives(negative_pool, truth_points.size(), stimulus_seed));
    }
  }
  return res;
}

std::string config_json(const EvaluateOptions& opts,
                        const std::set<std::string>& metrics) {
  nlohmann::json j;
  j["metrics"] = std::vector<std::string>(metrics.begin(), metrics.end());
  j["aggregation"] = opts.best ? "best" : "mean";
  j["seed"] = opts.seed ? nlohmann::json(*opts.seed) : nlohmann::json(nullptr);
  j["sigma_px"] = opts.sigma_px ? nlohmann::json(*opts.sigma_px) : nlohmann::json("1deg");
  j["bandwidth_px"] =
      opts.bandwidth_px ? nlohmann::json(*opts.bandwidth_px) : nlohmann::json("2deg");
  j["grid"] = {opts.grid_cols, opts.grid_rows};
  j["tokenizer"] = kTokenizerVersion;
  j["pred_sha256"] = file_sha256(opts.pred);
  j["truth_sha256"] = file_sha256(opts.truth);
  return j.dump();
}

std::string fmt_opt(const Opt& v) { return v ? format_fixed(*v, 6) : "-"; }

}  // namespace

void run_evaluate(const EvaluateOptions& opts) {
  const std::set<std::string> metrics = requested_metrics(opts.metrics);
  if (metrics.count("sauc") && !opts.seed) {
    throw ValidationError(
        "sauc samples shuffled negatives and needs --seed (or leave it out of "
        "--metrics)");
  }
  if (opts.grid_cols < 1 || opts.grid_rows < 1) {
    throw ValidationError("grid needs at least one row and column");
  }
  const Dataset pred = parse_dataset(opts.pred);
  const Dataset truth = parse_dataset(opts.truth);

  std::vector<std::string> ids;
  for (const auto& [id, stim] : truth.stimuli) {
    if (!truth.scanpaths_for(id).empty() && !pred.scanpaths_for(id).empty()) {
      ids.push_back(id);
    }
  }
  if (ids.empty()) {
    throw ValidationError("no stimulus has both predicted and human scanpaths");
  }

  std::vector<std::vector<Point>> pools(ids.size());
  if (metrics.count("sauc")) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = 0; j < ids.size(); ++j) {
        if (j == i) continue;
        for (const auto* sp : truth.scanpaths_for(ids[j])) {
          for (const auto& f : sp->fixations) pools[i].push_back(f.position());
        }
      }
    }
  }

  std::vector<StimulusResult> results(ids.size());
  parallel_for(ids.size(), opts.threads, [&](std::size_t i) {
    results[i] = evaluate_stimulus(truth.stimulus(ids[i]),
                                   pred.scanpaths_for(ids[i]),
                                   truth.scanpaths_for(ids[i]), metrics, opts,
                                   pools[i], derive_seed(opts.seed.value_or(0), i));
  });

  // Language items: every explained predicted fixation with at least one
  // human explanation at the same index on the stimulus.
  const bool want_language = metrics.count("bleu4") || metrics.count("meteor") ||
                             metrics.count("rouge") || metrics.count("ciderr");
  std::vector<LanguageItem> items;
  std::vector<std::vector<TokenSeq>> documents;
  if (want_language) {
    for (const auto& id : ids) {
      std::map<std::size_t, std::size_t> doc_of_index;
      for (const auto* p : pred.scanpaths_for(id)) {
        for (std::size_t k = 0; k < p->size(); ++k) {
          if (!p->fixations[k].explanation) continue;
          std::vector<TokenSeq> refs;
          for (const auto* t : truth.scanpaths_for(id)) {
            if (k < t->size() && t->fixations[k].explanation) {
              refs.push_back(tokenize(*t->fixations[k].explanation));
            }
          }
          if (refs.empty()) continue;
          auto [it, fresh] = doc_of_index.emplace(k, documents.size());
          if (fresh) documents.push_back(refs);
          items.push_back(
              {tokenize(*p->fixations[k].explanation), std::move(refs), it->second});
        }
      }
    }
  }
  std::map<std::string, Opt> lang;
  if (!items.empty()) {
    std::optional<CiderCorpus> corpus;
    if (metrics.count("ciderr")) corpus.emplace(documents);
    std::vector<std::vector<double>> scores(items.size(), std::vector<double>(4, 0));
    parallel_for(items.size(), opts.threads, [&](std::size_t i) {
      const auto& it = items[i];
      if (metrics.count("bleu4")) scores[i][0] = bleu4(it.candidate, it.refs);
      if (metrics.count("meteor")) scores[i][1] = meteor(it.candidate, it.refs);
      if (metrics.count("rouge")) scores[i][2] = rouge_l(it.candidate, it.refs);
      if (corpus) scores[i][3] = corpus->score(it.candidate, it.refs);
    });
    const char* names[] = {"bleu4", "meteor", "rouge", "ciderr"};
    for (int m = 0; m < 4; ++m) {
      if (!metrics.count(names[m])) continue;
      double s = 0.0;
      for (const auto& row : scores) s += row[m];
      // Displayed x100 (the CIDEr-R raw scale is already x10).
      lang[kLanguageColumns[m]] = 100.0 * s / static_cast<double>(items.size());
    }
  }
  if (metrics.count("diversity")) {
    std::vector<ExplainedScanpath> explained;
    for (const auto& id : ids) {
      for (const auto* p : pred.scanpaths_for(id)) {
        for (const auto& f : p->fixations) {
          if (f.explanation) {
            explained.push_back(*p);
            break;
          }
        }
      }
    }
    if (!explained.empty()) {
      const DiversityStats d = diversity_stats(explained);
      lang["Voc"] = static_cast<double>(d.vocabulary);
      lang["Len"] = d.length;
      lang["UnP%"] = d.unique_percent;
    }
  }

  // Mean over stimuli of the per-stimulus values; stimuli where a metric is
  // undefined (no label map, undefined MultiMatch) do not enter its mean.
  std::map<std::string, Opt> overall;
  std::size_t semss_stimuli = 0;
  for (const auto& col : kScanpathColumns) {
    std::vector<double> xs;
    for (const auto& r : results) {
      auto it = r.metrics.find(col);
      if (it != r.metrics.end() && it->second) xs.push_back(*it->second);
    }
    if (col == "SemSS") semss_stimuli = xs.size();
    overall[col] = mean_of(xs);
  }

  const std::string label = pred.name.empty() ? "prediction" : pred.name;
  const std::string config = config_json(opts, metrics);
  std::vector<std::pair<std::string, std::string>> meta = {
      {"tool", std::string("gazebench ") + kToolVersion},
      {"config_sha256", sha256_hex(config)},
      {"seed", opts.seed ? std::to_string(*opts.seed) : "none"},
      {"aggregation", opts.best ? "best match per prediction, mean over stimuli"
                                : "mean over all pairs, mean over stimuli"},
      {"tokenizer", std::string(kTokenizerVersion)},
      {"sigma", opts.sigma_px ? format_fixed(*opts.sigma_px, 3) + " px"
                              : "1 deg (24 px without pixels_per_degree)"},
      {"bandwidth", opts.bandwidth_px ? format_fixed(*opts.bandwidth_px, 3) + " px"
                                      : "2 deg (48 px without pixels_per_degree)"},
      {"grid", std::to_string(opts.grid_cols) + "x" + std::to_string(opts.grid_rows)},
      {"stimuli", std::to_string(ids.size())},
      {"semss_stimuli", std::to_string(semss_stimuli)},
      {"language_items", std::to_string(items.size())},
  };

  MetricReport scan("Scanpath and saliency", "Method", kScanpathColumns, 3);
  std::vector<Opt> scan_row;
  for (const auto& c : kScanpathColumns) scan_row.push_back(overall[c]);
  scan.add_row(label, scan_row);

  MetricReport words("Explanations", "Method", kLanguageColumns, 1);
  words.set_decimals("Voc", 0);
  words.set_decimals("UnP%", 2);
  std::vector<Opt> word_row;
  for (const auto& c : kLanguageColumns) word_row.push_back(lang[c]);
  words.add_row(label, word_row);

  std::ostringstream md;
  md << "# Evaluation\n\n";
  for (const auto& [k, v] : meta) md << "- " << k << ": " << v << "\n";
  md << "\n" << scan.to_markdown() << "\n" << words.to_markdown();

  std::vector<std::string> all_columns = kScanpathColumns;
  all_columns.insert(all_columns.end(), kLanguageColumns.begin(),
                     kLanguageColumns.end());
  MetricReport combined("", "Method", all_columns, 3);
  for (const auto& c : kLanguageColumns) {
    combined.set_decimals(c, c == "Voc" ? 0 : (c == "UnP%" ? 2 : 1));
  }
  std::vector<Opt> all_row = scan_row;
  all_row.insert(all_row.end(), word_row.begin(), word_row.end());
  combined.add_row(label, all_row);
  for (const auto& [k, v] : meta) combined.add_metadata(k, v);

  std::ostringstream pairs;
  pairs << "stimulus_id,pred,truth";
  for (const auto& c : kPairColumns) pairs << "," << c;
  pairs << "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (const auto& row : results[i].pairs) {
      pairs << csv_field(ids[i]) << "," << csv_field(row.pred_id) << ","
            << csv_field(row.truth_id);
      for (const auto& v : row.values) pairs << "," << fmt_opt(v);
      pairs << "\n";
    }
  }

  write_file(opts.out_dir / "pairs.csv", pairs.str());
  write_file(opts.out_dir / "report.md", md.str());
  write_file(opts.out_dir / "report.csv", combined.to_csv());
  std::cout << scan.to_markdown() << "\n" << words.to_markdown();
}

}  // namespace gazebench::cli
