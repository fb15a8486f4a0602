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

#ifndef GAZEBENCH_CORE_H_
#define GAZEBENCH_CORE_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gazebench/error.h"
#include "gazebench/grid.h"
#include "gazebench/report.h"

namespace gazebench {

inline constexpr int kCanonicalWidth = 512;
inline constexpr int kCanonicalHeight = 384;
inline constexpr std::size_t kDefaultMaxScanpathLength = 16;

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct ImageSize {
  int width = kCanonicalWidth;
  int height = kCanonicalHeight;
  bool operator==(const ImageSize&) const = default;
};

// Axis-aligned box in pixels, (x0, y0) top-left, (x1, y1) bottom-right.
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  bool operator==(const Box&) const = default;
};

struct Fixation {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> duration_ms;
  std::optional<std::string> explanation;

  Point position() const { return {x, y}; }
  bool operator==(const Fixation&) const = default;
};

// A negative log-likelihood that may hit a zero-probability event; when
// saturated, value is +inf.
struct LikelihoodTerm {
  double value = 0.0;
  bool saturated = false;
};

struct ExplainedScanpath {
  std::string stimulus_id;
  std::string observer_id;
  std::vector<Fixation> fixations;

  std::string id() const { return stimulus_id + "/" + observer_id; }
  std::size_t size() const { return fixations.size(); }
  bool operator==(const ExplainedScanpath&) const = default;
};

enum class Task { kFreeView, kSearch, kVqa };

inline std::string_view task_name(Task t) {
  switch (t) {
    case Task::kFreeView:
      return "free-view";
    case Task::kSearch:
      return "search";
    case Task::kVqa:
      return "vqa";
  }
  return "free-view";
}

inline std::optional<Task> task_from_name(std::string_view name) {
  if (name == "free-view") return Task::kFreeView;
  if (name == "search") return Task::kSearch;
  if (name == "vqa") return Task::kVqa;
  return std::nullopt;
}

struct StimulusRecord {
  std::string stimulus_id;
  int width = 0;
  int height = 0;
  Task task = Task::kFreeView;
  std::optional<std::string> target_name;
  std::optional<Box> target_box;
  std::optional<std::string> question;
  std::optional<std::string> observer_answer;
  // rows = height, cols = width.
  std::optional<Grid<int>> label_map;
  std::optional<double> pixels_per_degree;
  std::optional<std::string> image_path;

  ImageSize size() const { return {width, height}; }

  int label_at(double x, double y) const {
    if (!label_map) {
      throw ValidationError("stimulus '" + stimulus_id + "' has no label map");
    }
    const int c = std::clamp(static_cast<int>(std::floor(x)), 0, width - 1);
    const int r = std::clamp(static_cast<int>(std::floor(y)), 0, height - 1);
    return (*label_map)(r, c);
  }

  bool operator==(const StimulusRecord&) const = default;
};

// Throws ValidationError when the record breaks a StimulusRecord invariant.
inline void validate(const StimulusRecord& s) {
  if (s.stimulus_id.empty()) throw ValidationError("stimulus with empty id");
  if (s.width <= 0 || s.height <= 0) {
    throw ValidationError("stimulus '" + s.stimulus_id +
                          "' has non-positive size");
  }
  if (s.task == Task::kSearch && (!s.target_name || s.target_name->empty())) {
    throw ValidationError("search stimulus '" + s.stimulus_id +
                          "' has no target_name");
  }
  if (s.task == Task::kVqa && (!s.question || s.question->empty())) {
    throw ValidationError("vqa stimulus '" + s.stimulus_id +
                          "' has no question");
  }
  if (s.label_map &&
      (s.label_map->rows() != s.height || s.label_map->cols() != s.width)) {
    throw ValidationError("label map of '" + s.stimulus_id + "' is " +
                          std::to_string(s.label_map->cols()) + "x" +
                          std::to_string(s.label_map->rows()) +
                          ", stimulus is " + std::to_string(s.width) + "x" +
                          std::to_string(s.height));
  }
  if (s.pixels_per_degree &&
      !(std::isfinite(*s.pixels_per_degree) && *s.pixels_per_degree > 0)) {
    throw ValidationError("stimulus '" + s.stimulus_id +
                          "' has invalid pixels_per_degree");
  }
}

enum class Split { kTrain, kVal, kTest };

struct Dataset {
  std::string name;
  Split split = Split::kTest;
  std::map<std::string, StimulusRecord> stimuli;
  std::vector<ExplainedScanpath> scanpaths;
  std::map<std::string, std::string> metadata;

  const StimulusRecord& stimulus(const std::string& id) const {
    auto it = stimuli.find(id);
    if (it == stimuli.end()) {
      throw ValidationError("unknown stimulus '" + id + "'", {id});
    }
    return it->second;
  }

  std::vector<const ExplainedScanpath*> scanpaths_for(
      const std::string& stimulus_id) const {
    std::vector<const ExplainedScanpath*> out;
    for (const auto& sp : scanpaths) {
      if (sp.stimulus_id == stimulus_id) out.push_back(&sp);
    }
    return out;
  }

  bool operator==(const Dataset&) const = default;
};

// Casts every task into a question so datasets with different task designs
// share one instruction format.
inline std::string standardize_instruction(const StimulusRecord& record,
                                           bool include_answer) {
  std::string text;
  switch (record.task) {
    case Task::kFreeView:
      text = "What do you see in the image?";
      break;
    case Task::kSearch:
      if (!record.target_name || record.target_name->empty()) {
        throw ValidationError("search stimulus '" + record.stimulus_id +
                              "' has no target_name");
      }
      text = "Is there a " + *record.target_name + " in the image?";
      break;
    case Task::kVqa:
      if (!record.question || record.question->empty()) {
        throw ValidationError("vqa stimulus '" + record.stimulus_id +
                              "' has no question");
      }
      text = *record.question;
      break;
  }
  if (include_answer && record.observer_answer) {
    text += " Answer: " + *record.observer_answer;
  }
  return text;
}

inline std::size_t count_words(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Population (ddof = 0) statistics.
inline MeanStd mean_std(const std::vector<double>& xs) {
  if (xs.empty()) throw ValidationError("mean of empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

// Image/scanpath counts, scanpath length and explanation word counts
// (mean and population std). Word columns are empty when the dataset
// carries no explanations.
inline MetricReport dataset_stats(const Dataset& ds) {
  if (ds.scanpaths.empty()) {
    throw ValidationError("dataset_stats: dataset has no scanpaths");
  }
  std::vector<double> lengths;
  std::vector<double> words_per_fixation;
  std::vector<double> words_per_scanpath;
  for (const auto& sp : ds.scanpaths) {
    lengths.push_back(static_cast<double>(sp.size()));
    double total = 0.0;
    bool any = false;
    for (const auto& f : sp.fixations) {
      if (!f.explanation) continue;
      const auto n = static_cast<double>(count_words(*f.explanation));
      words_per_fixation.push_back(n);
      total += n;
      any = true;
    }
    if (any) words_per_scanpath.push_back(total);
  }
  MetricReport report("Dataset statistics", "Dataset",
                      {"Images", "Scanpaths", "Length mean", "Length std",
                       "Words/Fixation mean", "Words/Fixation std",
                       "Words/Scanpath mean", "Words/Scanpath std"},
                      2);
  report.set_decimals("Images", 0);
  report.set_decimals("Scanpaths", 0);
  const MeanStd len = mean_std(lengths);
  std::vector<std::optional<double>> row = {
      static_cast<double>(ds.stimuli.size()),
      static_cast<double>(ds.scanpaths.size()), len.mean, len.std};
  for (const auto* xs : {&words_per_fixation, &words_per_scanpath}) {
    if (xs->empty()) {
      row.insert(row.end(), {std::nullopt, std::nullopt});
    } else {
      const MeanStd m = mean_std(*xs);
      row.insert(row.end(), {m.mean, m.std});
    }
  }
  report.add_row(ds.name.empty() ? "dataset" : ds.name, std::move(row));
  report.add_metadata("std", "population (ddof=0)");
  report.add_metadata("tokenization", "whitespace");
  return report;
}

}  // namespace gazebench

#endif  // GAZEBENCH_CORE_H_
