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

#include "commands.h"

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gazebench/align.h"
#include "gazebench/core.h"
#include "gazebench/dataset_io.h"
#include "gazebench/error.h"
#include "gazebench/report.h"
#include "json.hpp"
#include "util.h"

namespace gazebench::cli {

void run_stats(const StatsOptions& opts) {
  if (opts.datasets.empty()) throw ValidationError("stats needs a dataset");
  MetricReport merged;
  for (const auto& path : opts.datasets) {
    Dataset ds = parse_dataset(path);
    if (ds.name.empty()) ds.name = path.stem().string();
    const MetricReport one = dataset_stats(ds);
    if (merged.columns().empty()) {
      merged = MetricReport(one.title(), "Dataset", one.columns(), 2);
      merged.set_decimals("Images", 0);
      merged.set_decimals("Scanpaths", 0);
      for (const auto& [k, v] : one.metadata()) merged.add_metadata(k, v);
    }
    merged.add_row(one.rows().front().label, one.rows().front().values);
  }
  std::cout << merged.to_markdown();
  if (opts.out) {
    write_file(*opts.out, opts.out->extension() == ".csv" ? merged.to_csv()
                                                          : merged.to_markdown());
  }
}

void run_align(const AlignOptions& opts) {
  const std::string text = read_text_file(opts.bundles);
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(opts.bundles.string() + ": " + e.what());
  }
  std::vector<nlohmann::json> items;
  if (root.is_array()) {
    items.assign(root.begin(), root.end());
  } else {
    items.push_back(root);
  }
  std::ostringstream csv;
  csv << "bundle,loss,residual_explanation,residual_fixation,residual_multimodal";
  if (opts.gradient) csv << ",grad_explanation_norm,grad_fixated_norm";
  csv << "\n";
  for (std::size_t b = 0; b < items.size(); ++b) {
    const FeatureBundle fb = feature_bundle_from_json(items[b]);
    const SimilarityMatrices sm = similarity_matrices(fb);
    const AlignmentResiduals r = alignment_residuals(sm);
    csv << b << "," << format_fixed(alignment_loss(sm), 9) << ","
        << format_fixed(r.explanation, 9) << "," << format_fixed(r.fixation, 9)
        << "," << format_fixed(r.multimodal, 9);
    if (opts.gradient) {
      const AlignmentGradient g = alignment_loss_grad(fb);
      double ne = 0.0, ng = 0.0;
      for (const auto& v : g.explanation) ne += v.squaredNorm();
      for (const auto& v : g.fixated) ng += v.squaredNorm();
      csv << "," << format_fixed(std::sqrt(ne), 9) << ","
          << format_fixed(std::sqrt(ng), 9);
    }
    csv << "\n";
  }
  std::cout << csv.str();
  if (opts.out) write_file(*opts.out, csv.str());
}

int report_failure(const std::exception& e) {
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    std::cerr << "parse error: " << pe->what() << "\n";
    return 2;
  }
  if (const auto* ve = dynamic_cast<const ValidationError*>(&e)) {
    std::cerr << "validation error: " << ve->what() << "\n";
    for (const auto& s : ve->subjects()) std::cerr << "  at " << s << "\n";
    return 2;
  }
  if (const auto* se = dynamic_cast<const ServiceError*>(&e)) {
    std::cerr << "service error: " << se->what() << "\n";
    for (const auto& a : se->attempts()) std::cerr << "  " << a << "\n";
    return 3;
  }
  std::cerr << "error: " << e.what() << "\n";
  return 1;
}

}  // namespace gazebench::cli
