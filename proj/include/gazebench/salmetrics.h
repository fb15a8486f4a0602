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

#ifndef GAZEBENCH_SALMETRICS_H_
#define GAZEBENCH_SALMETRICS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gazebench/core.h"
#include "gazebench/error.h"
#include "gazebench/grid.h"
#include "gazebench/random.h"
#include "gazebench/roc.h"
#include "gazebench/simdec.h"
#include "json.hpp"

namespace gazebench {

inline constexpr double kDefaultSaliencySigmaPx = 24.0;
inline constexpr std::size_t kShuffledNegativesPerPositive = 10;

enum class Normalization { kSum, kMax, kRaw };

// Row-major W x H map of nonnegative values.
struct SaliencyMap {
  Grid<double> values;  // rows = height
  Normalization tag = Normalization::kRaw;

  int width() const { return values.cols(); }
  int height() const { return values.rows(); }
  double at(int x, int y) const { return values(y, x); }

  void validate() const {
    if (values.empty()) throw ValidationError("saliency map is empty");
    double sum = 0.0, max = 0.0;
    for (double v : values.values()) {
      if (!std::isfinite(v) || v < 0) {
        throw ValidationError("saliency map has a negative or non-finite value");
      }
      sum += v;
      max = std::max(max, v);
    }
    if (tag == Normalization::kSum && std::abs(sum - 1.0) > 1e-9) {
      throw ValidationError("sum-normalized saliency map sums to " +
                            std::to_string(sum));
    }
    if (tag == Normalization::kMax && std::abs(max - 1.0) > 1e-9) {
      throw ValidationError("max-normalized saliency map peaks at " +
                            std::to_string(max));
    }
  }
};

namespace sal_detail {

inline std::pair<int, int> pixel(Point p, int width, int height) {
  const int x = std::clamp(static_cast<int>(std::floor(p.x)), 0, width - 1);
  const int y = std::clamp(static_cast<int>(std::floor(p.y)), 0, height - 1);
  return {x, y};
}

inline std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
  }
  return k;
}

inline void check_shape(const SaliencyMap& a, const SaliencyMap& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ValidationError("saliency maps differ in shape");
  }
}

struct Moments {
  double mean = 0.0;
  double std = 0.0;  // population
};

inline Moments moments(const SaliencyMap& m) {
  const auto v = m.values.values();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  if (!(var > 0.0)) throw ValidationError("saliency map is constant");
  return {mean, std::sqrt(var)};
}

inline void require_fixations(std::span<const Point> fixations) {
  if (fixations.empty()) throw ValidationError("no fixations given");
}

}  // namespace sal_detail

// Binary fixation histogram smoothed by a Gaussian of standard deviation
// sigma_px (truncated at 4 sigma, zero padding) and scaled to sum 1.
inline SaliencyMap aggregate_saliency(std::span<const Point> fixations,
                                      ImageSize size, double sigma_px) {
  if (size.width <= 0 || size.height <= 0) {
    throw ValidationError("saliency map size must be positive");
  }
  if (!(sigma_px > 0.0) || !std::isfinite(sigma_px)) {
    throw ValidationError("smoothing sigma must be positive");
  }
  sal_detail::require_fixations(fixations);
  const int w = size.width, h = size.height;
  Grid<double> hist(h, w, 0.0);
  for (const Point& p : fixations) {
    const auto [x, y] = sal_detail::pixel(p, w, h);
    hist(y, x) = 1.0;
  }
  const std::vector<double> k = sal_detail::gaussian_kernel(sigma_px);
  const int r = static_cast<int>(k.size() / 2);
  Grid<double> tmp(h, w, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = hist(y, x);
      if (v == 0.0) continue;
      for (int dx = std::max(-r, -x); dx <= std::min(r, w - 1 - x); ++dx) {
        tmp(y, x + dx) += v * k[dx + r];
      }
    }
  }
  Grid<double> out(h, w, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int dy = std::max(-r, -y); dy <= std::min(r, h - 1 - y); ++dy) {
      const double kv = k[dy + r];
      for (int x = 0; x < w; ++x) out(y + dy, x) += tmp(y, x) * kv;
    }
  }
  double sum = 0.0;
  for (double v : out.values()) sum += v;
  for (double& v : out.values()) v /= sum;
  return {std::move(out), Normalization::kSum};
}

inline SaliencyMap aggregate_saliency(std::span<const ExplainedScanpath> paths,
                                      ImageSize size, double sigma_px) {
  std::vector<Point> pts;
  for (const auto& sp : paths) {
    for (const auto& f : sp.fixations) pts.push_back(f.position());
  }
  return aggregate_saliency(std::span<const Point>(pts), size, sigma_px);
}

inline SaliencyMap aggregate_saliency(std::span<const SampledScanpath> paths,
                                      ImageSize size, double sigma_px) {
  std::vector<Point> pts;
  for (const auto& sp : paths) {
    for (const auto& f : sp.fixations) pts.push_back({f.x, f.y});
  }
  return aggregate_saliency(std::span<const Point>(pts), size, sigma_px);
}

// Pearson correlation over pixels.
inline double cc(const SaliencyMap& p, const SaliencyMap& q) {
  sal_detail::check_shape(p, q);
  const auto mp = sal_detail::moments(p);
  const auto mq = sal_detail::moments(q);
  const auto a = p.values.values();
  const auto b = q.values.values();
  double cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - mp.mean) * (b[i] - mq.mean);
  }
  cov /= static_cast<double>(a.size());
  return std::clamp(cov / (mp.std * mq.std), -1.0, 1.0);
}

// Mean z-scored map value over the fixations.
inline double nss(const SaliencyMap& p, std::span<const Point> fixations) {
  sal_detail::require_fixations(fixations);
  const auto m = sal_detail::moments(p);
  double total = 0.0;
  for (const Point& f : fixations) {
    const auto [x, y] = sal_detail::pixel(f, p.width(), p.height());
    total += (p.at(x, y) - m.mean) / m.std;
  }
  return total / static_cast<double>(fixations.size());
}

// Positives: distinct fixated pixels. Negatives: every other pixel.
inline double auc_judd(const SaliencyMap& p, std::span<const Point> fixations) {
  sal_detail::require_fixations(fixations);
  std::set<std::pair<int, int>> fixated;
  for (const Point& f : fixations) {
    fixated.insert(sal_detail::pixel(f, p.width(), p.height()));
  }
  std::vector<double> pos, neg;
  for (int y = 0; y < p.height(); ++y) {
    for (int x = 0; x < p.width(); ++x) {
      (fixated.count({x, y}) ? pos : neg).push_back(p.at(x, y));
    }
  }
  if (neg.empty()) {
    throw ValidationError("every pixel is fixated; AUC is undefined");
  }
  return roc_auc(pos, neg);
}

// Positives: map values at the fixations. Negatives: values at fixations
// taken from other stimuli.
inline double sauc(const SaliencyMap& p, std::span<const Point> fixations,
                   std::span<const Point> negative_fixations) {
  sal_detail::require_fixations(fixations);
  if (negative_fixations.empty()) {
    throw ValidationError("shuffled AUC needs negative fixations");
  }
  auto values = [&](std::span<const Point> pts) {
    std::vector<double> v;
    v.reserve(pts.size());
    for (const Point& f : pts) {
      const auto [x, y] = sal_detail::pixel(f, p.width(), p.height());
      v.push_back(p.at(x, y));
    }
    return v;
  };
  return roc_auc(values(fixations), values(negative_fixations));
}

// Caps the other-stimulus pool at kShuffledNegativesPerPositive times the
// positive count.
inline std::vector<Point> shuffled_negatives(std::span<const Point> pool,
                                             std::size_t positive_count,
                                             std::uint64_t seed) {
  return subsample(pool, kShuffledNegativesPerPositive * positive_count, seed);
}

inline nlohmann::json saliency_to_json(const SaliencyMap& m) {
  static constexpr const char* kTags[] = {"sum-1", "max-1", "raw"};
  return {{"width", m.width()},
          {"height", m.height()},
          {"normalization", kTags[static_cast<int>(m.tag)]},
          {"values", m.values.data()}};
}

inline SaliencyMap saliency_from_json(const nlohmann::json& j) {
  try {
    const std::string tag = j.at("normalization").get<std::string>();
    SaliencyMap m;
    if (tag == "sum-1") {
      m.tag = Normalization::kSum;
    } else if (tag == "max-1") {
      m.tag = Normalization::kMax;
    } else if (tag == "raw") {
      m.tag = Normalization::kRaw;
    } else {
      throw ValidationError("unknown saliency normalization '" + tag + "'");
    }
    m.values = Grid<double>(j.at("height").get<int>(), j.at("width").get<int>(),
                            j.at("values").get<std::vector<double>>());
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("saliency map: ") + e.what());
  }
}

}  // namespace gazebench

#endif  // GAZEBENCH_SALMETRICS_H_
