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

#ifndef GAZEBENCH_ROC_H_
#define GAZEBENCH_ROC_H_

#include <algorithm>
#include <cstdio>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gazebench/error.h"

namespace gazebench {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // score >= threshold counts as positive
};

struct RocCurve {
  std::vector<RocPoint> points;  // starts at (0, 0), ends at (1, 1)
  double auc = 0.0;
};

// ROC over every distinct score. Tied positive/negative scores are crossed
// in one diagonal step, which gives them half credit; the area is summed in
// integer counts and divided once, so it equals the Mann-Whitney estimate.
inline RocCurve roc_curve(std::span<const double> positives,
                          std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw ValidationError("ROC needs at least one positive and one negative");
  }
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Scored& a, const Scored& b) { return a.score > b.score; });

  const double p = static_cast<double>(positives.size());
  const double n = static_cast<double>(negatives.size());
  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  double tp = 0, fp = 0, twice_area = 0;
  for (std::size_t i = 0; i < all.size();) {
    const double score = all[i].score;
    double dtp = 0, dfp = 0;
    for (; i < all.size() && all[i].score == score; ++i) {
      (all[i].positive ? dtp : dfp) += 1;
    }
    twice_area += dfp * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    curve.points.push_back({fp / n, tp / p, score});
  }
  curve.auc = twice_area / (2 * p * n);
  return curve;
}

inline double roc_auc(std::span<const double> positives,
                      std::span<const double> negatives) {
  return roc_curve(positives, negatives).auc;
}

inline std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "fpr,tpr,threshold\n";
  char buf[96];
  for (const RocPoint& pt : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.17g\n", pt.fpr, pt.tpr,
                  pt.threshold);
    out += buf;
  }
  return out;
}

}  // namespace gazebench

#endif  // GAZEBENCH_ROC_H_
