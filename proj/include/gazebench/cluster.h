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

#ifndef GAZEBENCH_CLUSTER_H_
#define GAZEBENCH_CLUSTER_H_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "gazebench/core.h"
#include "gazebench/error.h"
#include "json.hpp"

namespace gazebench {

inline constexpr double kDefaultClusterBandwidthPx = 48.0;

struct MeanShiftOptions {
  double tolerance = 1e-4;  // relative to the bandwidth
  int max_iterations = 300;
};

struct ClusterModel {
  double bandwidth = 0.0;
  std::vector<Point> modes;  // lexicographic order
  bool fitted = false;

  // Nearest mode; ties go to the lowest index.
  std::size_t assign(Point p) const {
    if (!fitted || modes.empty()) {
      throw ValidationError("cluster model is not fitted");
    }
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const double d = std::hypot(p.x - modes[i].x, p.y - modes[i].y);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  std::vector<std::size_t> assign(std::span<const Point> points) const {
    std::vector<std::size_t> ids;
    ids.reserve(points.size());
    for (const Point& p : points) ids.push_back(assign(p));
    return ids;
  }
};

struct MeanShiftResult {
  ClusterModel model;
  std::vector<Point> converged;  // per input point, input order
  std::vector<int> iterations;   // per input point
};

namespace cluster_detail {

inline bool lex_less(const Point& a, const Point& b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

inline double dist(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace cluster_detail

// Flat-kernel mean shift started from every point. Converged positions
// within bandwidth / 2 of each other are merged into one mode.
inline MeanShiftResult meanshift(std::span<const Point> points,
                                 double bandwidth,
                                 const MeanShiftOptions& opts = {}) {
  using cluster_detail::dist;
  if (points.empty()) throw ValidationError("meanshift: no points");
  if (!(bandwidth > 0) || !std::isfinite(bandwidth)) {
    throw ValidationError("meanshift: bandwidth must be positive");
  }
  // Neighbour sums run over a canonical ordering so the result does not
  // depend on input order, not even in the last bit.
  std::vector<Point> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), cluster_detail::lex_less);

  MeanShiftResult result;
  result.converged.resize(points.size());
  result.iterations.resize(points.size());
  const double tol = opts.tolerance * bandwidth;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Point x = points[i];
    int moves = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
      double sx = 0.0, sy = 0.0;
      std::size_t n = 0;
      for (const Point& q : sorted) {
        if (dist(x, q) <= bandwidth) {
          sx += q.x;
          sy += q.y;
          ++n;
        }
      }
      const Point mean{sx / static_cast<double>(n), sy / static_cast<double>(n)};
      const double shift = dist(mean, x);
      x = mean;
      if (shift < tol) break;
      ++moves;
    }
    result.converged[i] = x;
    result.iterations[i] = moves;
  }

  struct Group {
    Point center;
    double weight;
  };
  std::vector<Point> ends = result.converged;
  std::sort(ends.begin(), ends.end(), cluster_detail::lex_less);
  std::vector<Group> groups;
  std::vector<bool> taken(ends.size(), false);
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (taken[i]) continue;
    double sx = 0.0, sy = 0.0, w = 0.0;
    for (std::size_t j = i; j < ends.size(); ++j) {
      if (!taken[j] && dist(ends[i], ends[j]) <= bandwidth / 2) {
        taken[j] = true;
        sx += ends[j].x;
        sy += ends[j].y;
        w += 1.0;
      }
    }
    groups.push_back({{sx / w, sy / w}, w});
  }
  // Group means can drift together; merge until modes are separated.
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t i = 0; i < groups.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < groups.size() && !merged; ++j) {
        if (dist(groups[i].center, groups[j].center) <= bandwidth / 2) {
          const double w = groups[i].weight + groups[j].weight;
          groups[i].center = {(groups[i].center.x * groups[i].weight +
                               groups[j].center.x * groups[j].weight) / w,
                              (groups[i].center.y * groups[i].weight +
                               groups[j].center.y * groups[j].weight) / w};
          groups[i].weight = w;
          groups.erase(groups.begin() + static_cast<long>(j));
          merged = true;
        }
      }
    }
  }
  result.model.bandwidth = bandwidth;
  for (const auto& g : groups) result.model.modes.push_back(g.center);
  std::sort(result.model.modes.begin(), result.model.modes.end(),
            cluster_detail::lex_less);
  result.model.fitted = true;
  return result;
}

inline ClusterModel meanshift_fit(std::span<const Point> points,
                                  double bandwidth,
                                  const MeanShiftOptions& opts = {}) {
  return meanshift(points, bandwidth, opts).model;
}

inline nlohmann::json cluster_to_json(const ClusterModel& m) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& p : m.modes) modes.push_back({p.x, p.y});
  return {{"bandwidth", m.bandwidth}, {"modes", std::move(modes)}};
}

inline ClusterModel cluster_from_json(const nlohmann::json& j) {
  try {
    ClusterModel m;
    m.bandwidth = j.at("bandwidth").get<double>();
    for (const auto& p : j.at("modes")) {
      m.modes.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    m.fitted = !m.modes.empty();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cluster model: ") + e.what());
  }
}

}  // namespace gazebench

#endif  // GAZEBENCH_CLUSTER_H_
