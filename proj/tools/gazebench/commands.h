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

#ifndef GAZEBENCH_TOOLS_COMMANDS_H_
#define GAZEBENCH_TOOLS_COMMANDS_H_

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gazebench::cli {

// Metric names accepted by `evaluate --metrics`.
inline const std::vector<std::string>& known_metrics() {
  static const std::vector<std::string> kNames = {
      "sm",  "mm",  "sed",  "ss",     "semss",  "cc",   "nss",      "auc",
      "sauc", "bleu4", "meteor", "rouge", "ciderr", "diversity"};
  return kNames;
}

struct StatsOptions {
  std::vector<std::filesystem::path> datasets;
  std::optional<std::filesystem::path> out;
};

struct SampleOptions {
  std::vector<std::filesystem::path> decoders;  // files or directories
  std::optional<std::filesystem::path> stimuli;  // dataset to copy records from
  std::optional<std::uint64_t> seed;
  int samples = 20;
  std::string name = "sampled";
  std::filesystem::path out;
};

struct EvaluateOptions {
  std::filesystem::path pred;
  std::filesystem::path truth;
  std::filesystem::path out_dir;
  std::vector<std::string> metrics;  // empty = all
  bool best = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma_px;      // overrides 1 degree of visual angle
  std::optional<double> bandwidth_px;  // overrides 2 degrees of visual angle
  int grid_cols = 16;
  int grid_rows = 12;
  std::size_t threads = 0;
};

struct AlignOptions {
  std::filesystem::path bundles;
  std::optional<std::filesystem::path> out;
  bool gradient = false;
};

struct QcOptionsCli {
  std::filesystem::path dataset;
  std::filesystem::path out_dir;
  std::string embedder = "bow";  // bow | http | cache
  std::optional<std::string> embed_url;
  std::optional<std::filesystem::path> embed_cache;
  bool cluster_rule = true;
  std::optional<double> bandwidth_px;
  double tau = 0.5;
};

struct FaithOptions {
  std::filesystem::path dataset;
  std::filesystem::path out_dir;
  double threshold = 0.0;
  std::vector<double> sweep;
  std::string embedder = "bow";
  std::optional<std::string> embed_url;
  std::optional<std::filesystem::path> embed_cache;
};

struct AnnotateOptions {
  std::filesystem::path dataset;
  std::filesystem::path out;
  std::optional<double> ppd;
  std::optional<std::string> vlm_url;
  std::optional<std::string> vlm_key;
  std::optional<std::filesystem::path> cache_dir;
  bool offline = false;
  double stroke_px = 4.0;
  std::size_t max_in_flight = 4;
};

// Each command writes its outputs and returns normally, or throws
// ParseError / ValidationError (exit 2), ServiceError (exit 3) or any other
// exception (exit 1).
void run_stats(const StatsOptions& opts);
void run_sample(const SampleOptions& opts);
void run_evaluate(const EvaluateOptions& opts);
void run_align(const AlignOptions& opts);
void run_annotate_qc(const QcOptionsCli& opts);
void run_faith(const FaithOptions& opts);
void run_annotate(const AnnotateOptions& opts);

// Maps an exception to the documented exit code and prints it to stderr.
int report_failure(const std::exception& e);

}  // namespace gazebench::cli

#endif  // GAZEBENCH_TOOLS_COMMANDS_H_
