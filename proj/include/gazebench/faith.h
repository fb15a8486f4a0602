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

#ifndef GAZEBENCH_FAITH_H_
#define GAZEBENCH_FAITH_H_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "gazebench/core.h"
#include "gazebench/embedding.h"
#include "gazebench/error.h"
#include "gazebench/roc.h"

namespace gazebench {

struct FaithSample {
  double spatial_dist = 0.0;   // px, 0 inside the target box
  double semantic_sim = 0.0;   // explanation vs target name, in [-1, 1]
  std::string scanpath_id;
  int fixation_index = 0;
};

// Distance to the nearest point of the box; 0 inside. A zero-area box is a
// point or a segment and needs no special case.
inline double spatial_proximity(Point p, const Box& box) {
  if (!(box.x0 <= box.x1 && box.y0 <= box.y1) || !std::isfinite(box.x0) ||
      !std::isfinite(box.x1) || !std::isfinite(box.y0) ||
      !std::isfinite(box.y1)) {
    throw ValidationError("invalid target box");
  }
  const double dx = std::max({box.x0 - p.x, 0.0, p.x - box.x1});
  const double dy = std::max({box.y0 - p.y, 0.0, p.y - box.y1});
  return std::hypot(dx, dy);
}

inline double semantic_similarity(const std::string& explanation,
                                  const std::string& target_name,
                                  EmbeddingProvider& provider) {
  return embedding_cosine(provider.embed(explanation),
                          provider.embed(target_name));
}

// One sample per explained fixation on a search stimulus with a target box.
// Embeddings are fetched with at most max_in_flight concurrent calls.
inline std::vector<FaithSample> faith_samples(const Dataset& ds,
                                              EmbeddingProvider& provider,
                                              std::size_t max_in_flight = 4) {
  std::vector<FaithSample> samples;
  std::vector<std::string> texts;
  std::vector<std::string> targets;
  for (const auto& sp : ds.scanpaths) {
    const StimulusRecord& s = ds.stimulus(sp.stimulus_id);
    if (s.task != Task::kSearch || !s.target_box || !s.target_name) continue;
    for (std::size_t k = 0; k < sp.fixations.size(); ++k) {
      const Fixation& f = sp.fixations[k];
      if (!f.explanation) continue;
      samples.push_back({spatial_proximity(f.position(), *s.target_box), 0.0,
                         sp.id(), static_cast<int>(k)});
      texts.push_back(*f.explanation);
      targets.push_back(*s.target_name);
    }
  }
  std::vector<std::string> all = texts;
  all.insert(all.end(), targets.begin(), targets.end());
  const std::vector<Embedding> vecs = embed_all(provider, all, max_in_flight);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].semantic_sim = embedding_cosine(vecs[i], vecs[texts.size() + i]);
  }
  return samples;
}

// Label: fixation within spatial_threshold px of the target. Score: semantic
// similarity. Samples are pooled across target categories.
inline RocCurve faithfulness_roc(std::span<const FaithSample> samples,
                                 double spatial_threshold) {
  std::vector<double> pos, neg;
  for (const auto& s : samples) {
    if (s.spatial_dist < 0) throw ValidationError("negative spatial distance");
    (s.spatial_dist <= spatial_threshold ? pos : neg).push_back(s.semantic_sim);
  }
  if (pos.empty() || neg.empty()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", spatial_threshold);
    throw ValidationError(std::string("spatial threshold ") + buf + " px puts " +
                          "every sample in one class");
  }
  return roc_curve(pos, neg);
}

struct ThresholdSweep {
  std::vector<double> thresholds;  // those with both classes present
  std::vector<RocCurve> curves;
  std::vector<double> skipped;     // single-class thresholds
  double mean_auc = 0.0;
};

inline ThresholdSweep faithfulness_sweep(std::span<const FaithSample> samples,
                                         std::span<const double> thresholds) {
  ThresholdSweep sweep;
  for (double t : thresholds) {
    try {
      sweep.curves.push_back(faithfulness_roc(samples, t));
      sweep.thresholds.push_back(t);
    } catch (const ValidationError&) {
      sweep.skipped.push_back(t);
    }
  }
  if (sweep.curves.empty()) {
    throw ValidationError("no spatial threshold yields two classes");
  }
  for (const auto& c : sweep.curves) sweep.mean_auc += c.auc;
  sweep.mean_auc /= static_cast<double>(sweep.curves.size());
  return sweep;
}

}  // namespace gazebench

#endif  // GAZEBENCH_FAITH_H_
