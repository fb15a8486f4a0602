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

#ifndef GAZEBENCH_SIMDEC_H_
#define GAZEBENCH_SIMDEC_H_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gazebench/core.h"
#include "gazebench/random.h"
#include "gazebench/error.h"
#include "gazebench/grid.h"
#include "json.hpp"

namespace gazebench {

inline constexpr double kMapSumTolerance = 1e-9;

// Per-step output of an attention decoder: a priority map over an h x w
// feature grid, log-normal duration parameters of ln(duration in ms), and
// the probability of ending the scanpath after that step.
struct DecoderOutput {
  std::string stimulus_id;
  ImageSize image_size;
  int grid_rows = 0;
  int grid_cols = 0;
  std::vector<Grid<double>> maps;
  std::vector<double> mu;
  std::vector<double> sigma2;
  std::vector<double> end_prob;

  std::size_t steps() const { return maps.size(); }

  // Structural invariants. With require_normalized, every map must already
  // be a probability distribution.
  void validate(bool require_normalized,
                std::size_t max_steps = kDefaultMaxScanpathLength) const {
    const std::size_t k = maps.size();
    if (k == 0) throw ValidationError("decoder output has no steps");
    if (k > max_steps) {
      throw ValidationError("decoder output has " + std::to_string(k) +
                            " steps, maximum is " + std::to_string(max_steps));
    }
    if (mu.size() != k || sigma2.size() != k || end_prob.size() != k) {
      throw ValidationError(
          "decoder output: mu/sigma2/end_prob lengths differ from map count");
    }
    if (grid_rows < 1 || grid_cols < 1) {
      throw ValidationError("decoder output: grid must be at least 1x1");
    }
    if (image_size.width <= 0 || image_size.height <= 0) {
      throw ValidationError("decoder output: image size must be positive");
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (maps[i].rows() != grid_rows || maps[i].cols() != grid_cols) {
        throw ValidationError("decoder output: map " + std::to_string(i) +
                              " does not match the declared grid");
      }
      if (!(sigma2[i] > 0) || !std::isfinite(sigma2[i]) ||
          !std::isfinite(mu[i])) {
        throw ValidationError("decoder output: step " + std::to_string(i) +
                              " needs finite mu and sigma2 > 0");
      }
      if (!(end_prob[i] >= 0 && end_prob[i] <= 1)) {
        throw ValidationError("decoder output: end_prob[" + std::to_string(i) +
                              "] outside [0, 1]");
      }
      if (require_normalized) {
        double sum = 0.0;
        for (double v : maps[i].values()) {
          if (!(v >= 0) || !std::isfinite(v)) {
            throw ValidationError("decoder output: map " + std::to_string(i) +
                                  " has a negative or non-finite cell");
          }
          sum += v;
        }
        if (std::abs(sum - 1.0) > kMapSumTolerance) {
          throw ValidationError("decoder output: map " + std::to_string(i) +
                                " sums to " + std::to_string(sum));
        }
      }
    }
  }
};

struct SampledFixation {
  double x = 0.0;
  double y = 0.0;
  double duration_ms = 0.0;
  bool operator==(const SampledFixation&) const = default;
};

struct SampledScanpath {
  std::vector<SampledFixation> fixations;
  std::size_t size() const { return fixations.size(); }
  bool operator==(const SampledScanpath&) const = default;
};

// Cosine similarity between a decoder query and every column of the joint
// embedding; column r * cols + c lands in cell (r, c).
inline Grid<double> cross_attention_map(const Eigen::VectorXd& query,
                                        const Eigen::MatrixXd& embedding,
                                        int rows, int cols) {
  if (embedding.rows() != query.size()) {
    throw ValidationError("cross_attention_map: query has dimension " +
                          std::to_string(query.size()) +
                          ", embedding has " +
                          std::to_string(embedding.rows()));
  }
  if (static_cast<long>(rows) * cols != embedding.cols()) {
    throw ValidationError("cross_attention_map: embedding has " +
                          std::to_string(embedding.cols()) +
                          " columns for a " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " grid");
  }
  const double qn = query.norm();
  if (!(qn > 0)) throw ValidationError("cross_attention_map: zero query");
  Grid<double> out(rows, cols);
  for (Eigen::Index j = 0; j < embedding.cols(); ++j) {
    const double cn = embedding.col(j).norm();
    if (!(cn > 0)) {
      throw ValidationError("cross_attention_map: zero-norm embedding column " +
                            std::to_string(j));
    }
    out[static_cast<std::size_t>(j)] = query.dot(embedding.col(j)) / (qn * cn);
  }
  return out;
}

// Temperature softmax over all cells. -inf cells get probability 0.
inline Grid<double> normalize_map(const Grid<double>& map,
                                  double temperature = 1.0) {
  if (!(temperature > 0) || !std::isfinite(temperature)) {
    throw ValidationError("normalize_map: temperature must be positive");
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : map.values()) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw ValidationError("normalize_map: non-finite entry");
    }
    peak = std::max(peak, v);
  }
  if (peak == -std::numeric_limits<double>::infinity()) {
    throw ValidationError("normalize_map: every entry is -inf");
  }
  Grid<double> out(map.rows(), map.cols());
  double sum = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    out[i] = std::exp((map[i] - peak) / temperature);
    sum += out[i];
  }
  for (double& v : out.values()) v /= sum;
  return out;
}

inline DecoderOutput normalized(DecoderOutput out, double temperature = 1.0) {
  for (auto& m : out.maps) m = normalize_map(m, temperature);
  return out;
}


// Draws one scanpath: per step a cell from the priority map, a uniform
// position inside that cell, and a log-normal duration; stops after step k
// with probability end_prob[k] and always after the last step.
inline SampledScanpath sample_scanpath(const DecoderOutput& out,
                                       std::uint64_t seed) {
  out.validate(/*require_normalized=*/true);
  std::mt19937_64 rng(seed);
  const double cell_w =
      static_cast<double>(out.image_size.width) / out.grid_cols;
  const double cell_h =
      static_cast<double>(out.image_size.height) / out.grid_rows;
  SampledScanpath path;
  for (std::size_t k = 0; k < out.steps(); ++k) {
    const std::size_t cell =
        categorical(out.maps[k].values(), rng);
    const int r = static_cast<int>(cell) / out.grid_cols;
    const int c = static_cast<int>(cell) % out.grid_cols;
    SampledFixation f;
    f.x = std::min((c + uniform01(rng)) * cell_w,
                   std::nextafter(static_cast<double>(out.image_size.width), 0.0));
    f.y = std::min((r + uniform01(rng)) * cell_h,
                   std::nextafter(static_cast<double>(out.image_size.height), 0.0));
    f.duration_ms = std::exp(out.mu[k] + std::sqrt(out.sigma2[k]) *
                                             standard_normal(rng));
    path.fixations.push_back(f);
    if (uniform01(rng) < out.end_prob[k]) break;
  }
  return path;
}

// Grid cell index containing an image-space point.
inline std::size_t cell_index(const DecoderOutput& out, Point p) {
  const int c = std::clamp(
      static_cast<int>(std::floor(p.x * out.grid_cols / out.image_size.width)),
      0, out.grid_cols - 1);
  const int r = std::clamp(
      static_cast<int>(std::floor(p.y * out.grid_rows / out.image_size.height)),
      0, out.grid_rows - 1);
  return static_cast<std::size_t>(r) * out.grid_cols + c;
}

// -sum_k log m_k(cell(y_k)) - log P(stop exactly after step K').
// The forced stop at the last decoder step has probability one.
inline LikelihoodTerm position_nll(std::span<const Point> path,
                                   const DecoderOutput& out) {
  out.validate(/*require_normalized=*/true);
  if (path.empty()) throw ValidationError("position_nll: empty scanpath");
  if (path.size() > out.steps()) {
    throw ValidationError("position_nll: scanpath has " +
                          std::to_string(path.size()) +
                          " fixations, decoder has " +
                          std::to_string(out.steps()) + " steps");
  }
  LikelihoodTerm term;
  auto add = [&term](double p) {
    if (!(p > 0)) {
      term.saturated = true;
      term.value = std::numeric_limits<double>::infinity();
    } else if (!term.saturated) {
      term.value -= std::log(p);
    }
  };
  for (std::size_t k = 0; k < path.size(); ++k) {
    add(out.maps[k][cell_index(out, path[k])]);
  }
  for (std::size_t k = 0; k + 1 < path.size(); ++k) add(1.0 - out.end_prob[k]);
  if (path.size() < out.steps()) add(out.end_prob[path.size() - 1]);
  if (!term.saturated) term.value = std::max(term.value, 0.0);
  return term;
}

inline LikelihoodTerm position_nll(const SampledScanpath& path,
                                   const DecoderOutput& out) {
  std::vector<Point> pts;
  for (const auto& f : path.fixations) pts.push_back({f.x, f.y});
  return position_nll(pts, out);
}

inline LikelihoodTerm position_nll(const ExplainedScanpath& path,
                                   const DecoderOutput& out) {
  std::vector<Point> pts;
  for (const auto& f : path.fixations) pts.push_back(f.position());
  return position_nll(pts, out);
}

// -ln of the log-normal density at tau.
inline double duration_nll(double tau, double mu, double sigma2) {
  if (!(tau > 0)) throw ValidationError("duration_nll: tau must be positive");
  if (!(sigma2 > 0)) {
    throw ValidationError("duration_nll: sigma2 must be positive");
  }
  const double sigma = std::sqrt(sigma2);
  const double z = std::log(tau) - mu;
  return std::log(tau * sigma * std::sqrt(2.0 * std::numbers::pi)) +
         z * z / (2.0 * sigma2);
}

// Position term plus the summed duration terms.
inline LikelihoodTerm fixation_loss(std::span<const Point> positions,
                                    std::span<const double> durations,
                                    const DecoderOutput& out) {
  if (positions.size() != durations.size()) {
    throw ValidationError("fixation_loss: positions and durations differ");
  }
  LikelihoodTerm term = position_nll(positions, out);
  double dur = 0.0;
  for (std::size_t k = 0; k < durations.size(); ++k) {
    dur += duration_nll(durations[k], out.mu[k], out.sigma2[k]);
  }
  if (!term.saturated) term.value += dur;
  return term;
}

inline LikelihoodTerm fixation_loss(const SampledScanpath& path,
                                    const DecoderOutput& out) {
  std::vector<Point> pts;
  std::vector<double> durs;
  for (const auto& f : path.fixations) {
    pts.push_back({f.x, f.y});
    durs.push_back(f.duration_ms);
  }
  return fixation_loss(pts, durs, out);
}

inline LikelihoodTerm fixation_loss(const ExplainedScanpath& path,
                                    const DecoderOutput& out) {
  std::vector<Point> pts;
  std::vector<double> durs;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& f = path.fixations[k];
    if (!f.duration_ms) {
      throw ValidationError("fixation_loss: fixation " + std::to_string(k) +
                            " of " + path.id() + " has no duration");
    }
    pts.push_back(f.position());
    durs.push_back(*f.duration_ms);
  }
  return fixation_loss(pts, durs, out);
}

// JSON container:
// {"schema": "gazebench-decoder-v1", "stimulus_id": s, "image_size": [W, H],
//  "grid": [rows, cols], "kind": "probability" | "similarity",
//  "temperature": T, "steps": [{"map": [row-major], "mu": m,
//  "sigma2": v, "end_prob": e}, ...]}
// Similarity maps are softmax-normalized with the given temperature.
inline DecoderOutput decoder_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "gazebench-decoder-v1") {
    throw ParseError("decoder file: schema must be 'gazebench-decoder-v1'");
  }
  try {
    DecoderOutput out;
    out.stimulus_id = j.at("stimulus_id").get<std::string>();
    out.image_size = {j.at("image_size").at(0).get<int>(),
                      j.at("image_size").at(1).get<int>()};
    out.grid_rows = j.at("grid").at(0).get<int>();
    out.grid_cols = j.at("grid").at(1).get<int>();
    const std::string kind = j.value("kind", "probability");
    if (kind != "probability" && kind != "similarity") {
      throw ParseError("decoder file: unknown kind '" + kind + "'");
    }
    const double temperature = j.value("temperature", 1.0);
    for (const auto& step : j.at("steps")) {
      auto values = step.at("map").get<std::vector<double>>();
      Grid<double> map(out.grid_rows, out.grid_cols, std::move(values));
      out.maps.push_back(kind == "similarity" ? normalize_map(map, temperature)
                                              : std::move(map));
      out.mu.push_back(step.at("mu").get<double>());
      out.sigma2.push_back(step.at("sigma2").get<double>());
      out.end_prob.push_back(step.at("end_prob").get<double>());
    }
    out.validate(/*require_normalized=*/true);
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("decoder file: ") + e.what());
  }
}

inline nlohmann::json decoder_to_json(const DecoderOutput& out) {
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t k = 0; k < out.steps(); ++k) {
    steps.push_back({{"map", out.maps[k].data()},
                     {"mu", out.mu[k]},
                     {"sigma2", out.sigma2[k]},
                     {"end_prob", out.end_prob[k]}});
  }
  return {{"schema", "gazebench-decoder-v1"},
          {"stimulus_id", out.stimulus_id},
          {"image_size", {out.image_size.width, out.image_size.height}},
          {"grid", {out.grid_rows, out.grid_cols}},
          {"kind", "probability"},
          {"steps", std::move(steps)}};
}

}  // namespace gazebench

#endif  // GAZEBENCH_SIMDEC_H_
