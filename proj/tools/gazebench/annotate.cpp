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

#include <cmath>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "commands.h"
#include "gazebench/annotool.h"
#include "gazebench/core.h"
#include "gazebench/dataset_io.h"
#include "gazebench/error.h"
#include "gazebench/faith.h"
#include "gazebench/png_io.h"
#include "gazebench/report.h"
#include "gazebench/roc.h"
#include "gazebench/service.h"
#include "json.hpp"
#include "util.h"

namespace gazebench::cli {
namespace {

constexpr QcRule kAllRules[] = {QcRule::kLength, QcRule::kCircleMention,
                                QcRule::kClusterInconsistency,
                                QcRule::kTextRecognition};

std::string threshold_name(double t) {
  std::string s = format_fixed(t, 3);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

void run_annotate_qc(const QcOptionsCli& opts) {
  const Dataset ds = parse_dataset(opts.dataset);
  std::shared_ptr<EmbeddingProvider> embedder;
  if (opts.cluster_rule) {
    embedder = make_embedder(opts.embedder, opts.embed_url, opts.embed_cache);
  }
  QcOptions qc;
  if (opts.bandwidth_px) qc.bandwidth_px = *opts.bandwidth_px;
  qc.threshold = opts.tau;
  const std::vector<QcFinding> findings = qc_dataset(ds, embedder.get(), qc);

  std::map<std::string, const ExplainedScanpath*> by_id;
  for (const auto& sp : ds.scanpaths) by_id[sp.id()] = &sp;

  std::ostringstream summary;
  summary << "rule,count\n";
  for (QcRule r : kAllRules) {
    std::size_t n = 0;
    for (const auto& f : findings) n += f.rule == r;
    summary << qc_rule_name(r) << "," << n << "\n";
  }
  summary << "total," << findings.size() << "\n";

  std::ostringstream queue;
  queue << "scanpath_id,fixation_index,explanation\n";
  for (const auto& f : findings) {
    if (f.rule != QcRule::kTextRecognition) continue;
    const auto& fx = by_id.at(f.scanpath_id)->fixations[f.fixation_index];
    queue << csv_field(f.scanpath_id) << "," << f.fixation_index << ","
          << csv_field(fx.explanation.value_or("")) << "\n";
  }

  write_file(opts.out_dir / "qc_findings.csv", qc_findings_csv(findings));
  write_file(opts.out_dir / "qc_summary.csv", summary.str());
  write_file(opts.out_dir / "review_queue.csv", queue.str());
  std::cout << summary.str();
}

void run_faith(const FaithOptions& opts) {
  const Dataset ds = parse_dataset(opts.dataset);
  auto embedder = make_embedder(opts.embedder, opts.embed_url, opts.embed_cache);
  const std::vector<FaithSample> samples = faith_samples(ds, *embedder);
  if (samples.empty()) {
    throw ValidationError(
        "no explained fixations on search stimuli with a target box and name");
  }
  std::ostringstream sample_csv;
  sample_csv << "scanpath_id,fixation_index,spatial_dist,semantic_sim\n";
  for (const auto& s : samples) {
    sample_csv << csv_field(s.scanpath_id) << "," << s.fixation_index << ","
               << format_fixed(s.spatial_dist, 6) << ","
               << format_fixed(s.semantic_sim, 6) << "\n";
  }
  write_file(opts.out_dir / "faith_samples.csv", sample_csv.str());

  if (opts.sweep.empty()) {
    const RocCurve roc = faithfulness_roc(samples, opts.threshold);
    write_file(opts.out_dir / "roc.csv", roc_to_csv(roc));
    std::cout << "threshold_px=" << threshold_name(opts.threshold)
              << " auc=" << format_fixed(roc.auc, 6) << "\n";
    return;
  }
  const ThresholdSweep sweep = faithfulness_sweep(samples, opts.sweep);
  std::ostringstream table;
  table << "threshold_px,auc\n";
  for (std::size_t i = 0; i < sweep.thresholds.size(); ++i) {
    const std::string t = threshold_name(sweep.thresholds[i]);
    table << t << "," << format_fixed(sweep.curves[i].auc, 6) << "\n";
    write_file(opts.out_dir / ("roc_" + t + ".csv"), roc_to_csv(sweep.curves[i]));
  }
  for (double t : sweep.skipped) table << threshold_name(t) << ",-\n";
  table << "mean," << format_fixed(sweep.mean_auc, 6) << "\n";
  write_file(opts.out_dir / "sweep.csv", table.str());
  std::cout << table.str();
}

// Fixations are stored on the canonical grid; the circles are drawn on the
// native image, so positions and the viewing geometry are scaled back.
void run_annotate(const AnnotateOptions& opts) {
  Dataset ds = parse_dataset(opts.dataset);
  std::shared_ptr<HttpTransport> transport;
  if (opts.vlm_url) {
    transport = std::make_shared<HttplibTransport>(*opts.vlm_url,
                                                   opts.vlm_key.value_or(""));
  }
  VlmConfig cfg;
  cfg.cache_dir = opts.cache_dir;
  cfg.offline = opts.offline;
  cfg.max_in_flight = opts.max_in_flight;
  VlmClient client(cfg, transport);
  const auto base = opts.dataset.parent_path();

  std::map<std::string, RgbImage> images;
  for (auto& sp : ds.scanpaths) {
    const StimulusRecord& stim = ds.stimulus(sp.stimulus_id);
    if (!stim.image_path) {
      throw ValidationError("stimulus '" + stim.stimulus_id + "' has no image",
                            {stim.stimulus_id});
    }
    auto it = images.find(stim.stimulus_id);
    if (it == images.end()) {
      it = images.emplace(stim.stimulus_id,
                          read_png_rgb((base / *stim.image_path).string()))
               .first;
    }
    const RgbImage& image = it->second;
    const double sx = static_cast<double>(image.width) / stim.width;
    const double sy = static_cast<double>(image.height) / stim.height;
    double ppd = 0.0;
    if (opts.ppd) {
      ppd = *opts.ppd;
    } else if (stim.pixels_per_degree) {
      ppd = *stim.pixels_per_degree * std::sqrt(sx * sy);
    } else {
      throw ValidationError("stimulus '" + stim.stimulus_id +
                                "' has no pixels_per_degree; pass --ppd",
                            {stim.stimulus_id});
    }
    ExplainedScanpath native = sp;
    for (auto& f : native.fixations) {
      f.x *= sx;
      f.y *= sy;
    }
    const std::vector<std::string> texts =
        annotate_scanpath(image, native, ViewingGeometry(ppd), client,
                          PromptTemplate{}, opts.stroke_px, opts.max_in_flight);
    for (std::size_t k = 0; k < texts.size(); ++k) {
      sp.fixations[k].explanation = texts[k];
    }
  }
  ds.metadata["prompt"] = PromptTemplate{}.version;
  write_file(opts.out, serialize_dataset(ds));

  nlohmann::json audit = nlohmann::json::array();
  for (const auto& a : client.audit_log()) {
    audit.push_back({{"request_sha256", a.request_sha256},
                     {"attempt", a.attempt},
                     {"status", a.status},
                     {"response", a.response}});
  }
  auto audit_path = opts.out;
  audit_path += ".audit.json";
  write_file(audit_path, audit.dump(1) + "\n");
}

}  // namespace gazebench::cli
