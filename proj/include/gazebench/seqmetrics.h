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

#ifndef GAZEBENCH_SEQMETRICS_H_
#define GAZEBENCH_SEQMETRICS_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "gazebench/cluster.h"
#include "gazebench/core.h"
#include "gazebench/edit_distance.h"
#include "gazebench/error.h"

namespace gazebench {

// Regular grid used to turn fixations into symbol strings.
struct GridSpec {
  int cols = 16;
  int rows = 12;
  ImageSize image{kCanonicalWidth, kCanonicalHeight};

  void validate() const {
    if (cols < 1 || rows < 1) throw ValidationError("grid needs >= 1 cell");
    if (image.width <= 0 || image.height <= 0) {
      throw ValidationError("grid image size must be positive");
    }
  }

  int bin(Point p) const {
    const int c = std::clamp(
        static_cast<int>(std::floor(p.x * cols / image.width)), 0, cols - 1);
    const int r = std::clamp(
        static_cast<int>(std::floor(p.y * rows / image.height)), 0, rows - 1);
    return r * cols + c;
  }

  Point center(int bin) const {
    const double cw = static_cast<double>(image.width) / cols;
    const double ch = static_cast<double>(image.height) / rows;
    return {(bin % cols + 0.5) * cw, (bin / cols + 0.5) * ch};
  }

  std::vector<int> symbols(const ExplainedScanpath& sp) const {
    std::vector<int> out;
    out.reserve(sp.size());
    for (const auto& f : sp.fixations) out.push_back(bin(f.position()));
    return out;
  }
};

struct ScanMatchConfig {
  GridSpec grid;
  double gap_penalty = 0.0;  // added per gap; <= 0 penalizes
  // Score of aligning bin a with bin b. Empty: distance-based default,
  // 1 - d(center_a, center_b) / (largest center distance on the grid).
  std::function<double(int, int)> substitution;
  double max_substitution = 1.0;

  double substitute(int a, int b) const {
    if (substitution) return substitution(a, b);
    const Point pa = grid.center(a);
    const Point pb = grid.center(b);
    const Point first = grid.center(0);
    const Point last = grid.center(grid.rows * grid.cols - 1);
    const double max_dist = std::hypot(last.x - first.x, last.y - first.y);
    if (max_dist == 0) return max_substitution;
    return max_substitution *
           (1.0 - std::hypot(pa.x - pb.x, pa.y - pb.y) / max_dist);
  }
};

// Needleman-Wunsch score between the two bin strings, normalized by the
// best attainable score for the longer string and clipped to [0, 1].
inline double scanmatch(const std::vector<int>& a, const std::vector<int>& b,
                        const ScanMatchConfig& cfg) {
  if (a.empty() || b.empty()) throw ValidationError("scanmatch: empty scanpath");
  if (!(cfg.max_substitution > 0)) {
    throw ValidationError("scanmatch: max_substitution must be positive");
  }
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<double>> f(n + 1, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 1; i <= n; ++i) f[i][0] = f[i - 1][0] + cfg.gap_penalty;
  for (std::size_t j = 1; j <= m; ++j) f[0][j] = f[0][j - 1] + cfg.gap_penalty;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      f[i][j] = std::max({f[i - 1][j - 1] + cfg.substitute(a[i - 1], b[j - 1]),
                          f[i - 1][j] + cfg.gap_penalty,
                          f[i][j - 1] + cfg.gap_penalty});
    }
  }
  const double norm = cfg.max_substitution * static_cast<double>(std::max(n, m));
  return std::clamp(f[n][m] / norm, 0.0, 1.0);
}

inline double scanmatch(const ExplainedScanpath& a, const ExplainedScanpath& b,
                        const ScanMatchConfig& cfg = {}) {
  cfg.grid.validate();
  return scanmatch(cfg.grid.symbols(a), cfg.grid.symbols(b), cfg);
}

// Unnormalized string edit distance between bin strings.
inline double sed(const ExplainedScanpath& a, const ExplainedScanpath& b,
                  const GridSpec& grid = {}) {
  if (a.fixations.empty() || b.fixations.empty()) {
    throw ValidationError("sed: empty scanpath");
  }
  grid.validate();
  return static_cast<double>(levenshtein(grid.symbols(a), grid.symbols(b)));
}

// Five MultiMatch similarities. A dimension is empty when it is undefined
// for the input (fewer than two fixations, or missing durations).
struct MultiMatchResult {
  std::optional<double> shape;
  std::optional<double> direction;
  std::optional<double> length;
  std::optional<double> position;
  std::optional<double> duration;

  // Mean over the defined dimensions.
  std::optional<double> mean() const {
    double sum = 0.0;
    int n = 0;
    for (const auto& v : {shape, direction, length, position, duration}) {
      if (v) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
  }
};

namespace mm_detail {

struct Saccade {
  Point start;
  double dx = 0.0;
  double dy = 0.0;
  std::optional<double> start_duration;

  double length() const { return std::hypot(dx, dy); }
  double angle() const { return std::atan2(dy, dx); }
};

inline std::vector<Saccade> saccades(const ExplainedScanpath& sp) {
  std::vector<Saccade> out;
  for (std::size_t i = 0; i + 1 < sp.size(); ++i) {
    const auto& f = sp.fixations[i];
    const auto& g = sp.fixations[i + 1];
    out.push_back({f.position(), g.x - f.x, g.y - f.y, f.duration_ms});
  }
  return out;
}

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Cheapest monotone path (right, down, diagonal) through the cost matrix,
// as (row, col) pairs from (0, 0) to (n-1, m-1).
inline std::vector<std::pair<std::size_t, std::size_t>> align(
    const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size(), m = cost.front().size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> acc(n, std::vector<double>(m, inf));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double best = (i == 0 && j == 0) ? 0.0 : inf;
      if (i > 0 && j > 0) best = std::min(best, acc[i - 1][j - 1]);
      if (i > 0) best = std::min(best, acc[i - 1][j]);
      if (j > 0) best = std::min(best, acc[i][j - 1]);
      acc[i][j] = best + cost[i][j];
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> path = {{n - 1, m - 1}};
  std::size_t i = n - 1, j = m - 1;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && acc[i - 1][j - 1] <= acc[i - 1][j] &&
        acc[i - 1][j - 1] <= acc[i][j - 1]) {
      --i;
      --j;
    } else if (j == 0 || (i > 0 && acc[i - 1][j] <= acc[i][j - 1])) {
      --i;
    } else {
      --j;
    }
    path.push_back({i, j});
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace mm_detail

// Saccade vectors of the two scanpaths are aligned by the cheapest path
// through their pairwise vector-difference matrix; each dimension is the
// median difference over aligned pairs, normalized by the screen diagonal
// (shape uses twice the diagonal, direction uses pi, duration is relative).
// With a single fixation on either side only position and duration are
// defined, computed over a position-distance alignment of fixations.
inline MultiMatchResult multimatch(const ExplainedScanpath& a,
                                   const ExplainedScanpath& b,
                                   ImageSize screen = {}) {
  using namespace mm_detail;
  if (a.fixations.empty() || b.fixations.empty()) {
    throw ValidationError("multimatch: empty scanpath");
  }
  const double diag = std::hypot(screen.width, screen.height);
  MultiMatchResult r;
  std::vector<Point> pos_a, pos_b;
  std::vector<std::optional<double>> dur_a, dur_b;

  if (a.size() >= 2 && b.size() >= 2) {
    const auto sa = saccades(a);
    const auto sb = saccades(b);
    std::vector<std::vector<double>> cost(sa.size(),
                                          std::vector<double>(sb.size()));
    for (std::size_t i = 0; i < sa.size(); ++i) {
      for (std::size_t j = 0; j < sb.size(); ++j) {
        cost[i][j] = std::hypot(sa[i].dx - sb[j].dx, sa[i].dy - sb[j].dy);
      }
    }
    std::vector<double> shape, direction, length;
    for (auto [i, j] : align(cost)) {
      shape.push_back(cost[i][j]);
      double d = std::abs(sa[i].angle() - sb[j].angle());
      if (d > std::numbers::pi) d = 2 * std::numbers::pi - d;
      direction.push_back(d);
      length.push_back(std::abs(sa[i].length() - sb[j].length()));
      pos_a.push_back(sa[i].start);
      pos_b.push_back(sb[j].start);
      dur_a.push_back(sa[i].start_duration);
      dur_b.push_back(sb[j].start_duration);
    }
    r.shape = 1.0 - median(shape) / (2 * diag);
    r.direction = 1.0 - median(direction) / std::numbers::pi;
    r.length = 1.0 - median(length) / diag;
  } else {
    std::vector<std::vector<double>> cost(a.size(),
                                          std::vector<double>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        cost[i][j] = std::hypot(a.fixations[i].x - b.fixations[j].x,
                                a.fixations[i].y - b.fixations[j].y);
      }
    }
    for (auto [i, j] : align(cost)) {
      pos_a.push_back(a.fixations[i].position());
      pos_b.push_back(b.fixations[j].position());
      dur_a.push_back(a.fixations[i].duration_ms);
      dur_b.push_back(b.fixations[j].duration_ms);
    }
  }

  std::vector<double> position;
  for (std::size_t k = 0; k < pos_a.size(); ++k) {
    position.push_back(
        std::hypot(pos_a[k].x - pos_b[k].x, pos_a[k].y - pos_b[k].y));
  }
  r.position = 1.0 - median(position) / diag;

  std::vector<double> duration;
  bool have_durations = true;
  for (std::size_t k = 0; k < dur_a.size(); ++k) {
    if (!dur_a[k] || !dur_b[k]) {
      have_durations = false;
      break;
    }
    duration.push_back(std::abs(*dur_a[k] - *dur_b[k]) /
                       std::max(*dur_a[k], *dur_b[k]));
  }
  if (have_durations) r.duration = 1.0 - median(duration);
  return r;
}

// 1 - ED / max length over cluster-id strings with repeats collapsed.
inline double sequence_score(const ExplainedScanpath& a,
                             const ExplainedScanpath& b,
                             const ClusterModel& clusters) {
  if (!clusters.fitted) {
    throw ValidationError("sequence_score: cluster model is not fitted");
  }
  if (a.fixations.empty() || b.fixations.empty()) {
    throw ValidationError("sequence_score: empty scanpath");
  }
  auto symbols = [&clusters](const ExplainedScanpath& sp) {
    std::vector<std::size_t> ids;
    for (const auto& f : sp.fixations) ids.push_back(clusters.assign(f.position()));
    return collapse_repeats(ids);
  };
  return string_similarity(symbols(a), symbols(b));
}

// Sequence score over the semantic labels under each fixation.
inline double semantic_sequence_score(const ExplainedScanpath& a,
                                      const ExplainedScanpath& b,
                                      const StimulusRecord& stimulus) {
  if (!stimulus.label_map) {
    throw ValidationError("semantic_sequence_score: stimulus '" +
                          stimulus.stimulus_id + "' has no label map");
  }
  if (a.fixations.empty() || b.fixations.empty()) {
    throw ValidationError("semantic_sequence_score: empty scanpath");
  }
  auto symbols = [&stimulus](const ExplainedScanpath& sp) {
    std::vector<int> labels;
    for (const auto& f : sp.fixations) labels.push_back(stimulus.label_at(f.x, f.y));
    return collapse_repeats(labels);
  };
  return string_similarity(symbols(a), symbols(b));
}

}  // namespace gazebench

#endif  // GAZEBENCH_SEQMETRICS_H_
