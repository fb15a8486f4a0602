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

#ifndef GAZEBENCH_ALIGN_H_
#define GAZEBENCH_ALIGN_H_

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gazebench/error.h"
#include "json.hpp"

namespace gazebench {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Per-fixation features of one scanpath plus the projection parameters of
// the language decoder.
struct FeatureBundle {
  std::vector<Vector> visual;       // r_i: frozen local image features
  std::vector<Vector> fixated;      // g_i: fixated encoder features
  std::vector<Vector> explanation;  // e_i: explanation language features
  Vector instruction;               // t_I
  Matrix projection;                // W_d, d_text x d
  Vector visual_offset;             // v_I
  Vector text_offset;               // v_T

  std::size_t size() const { return visual.size(); }
};

struct SimilarityMatrices {
  Matrix visual;       // s^r, pseudo labels
  Matrix explanation;  // s^e
  Matrix fixation;     // s^f
  Matrix multimodal;   // s^m, row i = explanation i, column j = fixation j
};

inline double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw ValidationError("cosine: dimensions " + std::to_string(a.size()) +
                          " and " + std::to_string(b.size()) + " differ");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0) || !(nb > 0)) throw ValidationError("cosine: zero vector");
  return a.dot(b) / (na * nb);
}

// d cos(a, b) / d a = b / (|a||b|) - cos(a, b) a / |a|^2
inline Vector cosine_grad(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0) || !(nb > 0)) throw ValidationError("cosine: zero vector");
  const double c = a.dot(b) / (na * nb);
  return b / (na * nb) - c * a / (na * na);
}

namespace align_detail {

inline void check_list(const std::vector<Vector>& xs, std::size_t k,
                       const char* name) {
  if (xs.size() != k) {
    throw ValidationError(std::string("feature bundle: '") + name + "' has " +
                          std::to_string(xs.size()) + " vectors, expected " +
                          std::to_string(k));
  }
  for (const auto& x : xs) {
    if (x.size() != xs.front().size()) {
      throw ValidationError(std::string("feature bundle: '") + name +
                            "' vectors have inconsistent dimensions");
    }
    if (!x.allFinite()) {
      throw ValidationError(std::string("feature bundle: '") + name +
                            "' has non-finite entries");
    }
  }
}

inline Matrix pairwise(const std::vector<Vector>& a,
                       const std::vector<Vector>& b) {
  Matrix out(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out(i, j) = cosine(a[i], b[j]);
  }
  return out;
}

}  // namespace align_detail

inline void validate_alignment_inputs(const FeatureBundle& fb) {
  const std::size_t k = fb.visual.size();
  if (k == 0) throw ValidationError("feature bundle: no fixations");
  align_detail::check_list(fb.visual, k, "r");
  align_detail::check_list(fb.fixated, k, "g");
  align_detail::check_list(fb.explanation, k, "e_p");
  if (fb.explanation.front().size() != fb.fixated.front().size()) {
    throw ValidationError(
        "feature bundle: e_p and g dimensions differ (" +
        std::to_string(fb.explanation.front().size()) + " vs " +
        std::to_string(fb.fixated.front().size()) + ")");
  }
}

inline SimilarityMatrices similarity_matrices(const FeatureBundle& fb) {
  validate_alignment_inputs(fb);
  return {align_detail::pairwise(fb.visual, fb.visual),
          align_detail::pairwise(fb.explanation, fb.explanation),
          align_detail::pairwise(fb.fixated, fb.fixated),
          align_detail::pairwise(fb.explanation, fb.fixated)};
}

// Mean over all K'^2 index pairs (diagonal included) of the squared gaps
// between each learned similarity and the visual pseudo labels.
inline double alignment_loss(const SimilarityMatrices& sm) {
  const Eigen::Index k = sm.visual.rows();
  for (const Matrix* m : {&sm.visual, &sm.explanation, &sm.fixation,
                          &sm.multimodal}) {
    if (m->rows() != k || m->cols() != k) {
      throw ValidationError("alignment_loss: similarity matrices differ in "
                            "shape");
    }
  }
  if (k == 0) throw ValidationError("alignment_loss: empty matrices");
  const double sum = (sm.explanation - sm.visual).squaredNorm() +
                     (sm.fixation - sm.visual).squaredNorm() +
                     (sm.multimodal - sm.visual).squaredNorm();
  return sum / static_cast<double>(k * k);
}

inline double alignment_loss(const FeatureBundle& fb) {
  return alignment_loss(similarity_matrices(fb));
}

// Frobenius norms of s^e - s^r, s^f - s^r, s^m - s^r.
struct AlignmentResiduals {
  double explanation = 0.0;
  double fixation = 0.0;
  double multimodal = 0.0;
};

inline AlignmentResiduals alignment_residuals(const SimilarityMatrices& sm) {
  return {(sm.explanation - sm.visual).norm(),
          (sm.fixation - sm.visual).norm(),
          (sm.multimodal - sm.visual).norm()};
}

struct AlignmentGradient {
  std::vector<Vector> explanation;  // dL / d e_i
  std::vector<Vector> fixated;      // dL / d g_i
};

// Analytic gradient of alignment_loss w.r.t. the trainable features e_p and
// g. The visual features r are frozen and receive no gradient.
inline AlignmentGradient alignment_loss_grad(const FeatureBundle& fb) {
  const SimilarityMatrices sm = similarity_matrices(fb);
  const std::size_t k = fb.size();
  const double scale = 2.0 / static_cast<double>(k * k);
  AlignmentGradient grad;
  grad.explanation.assign(k, Vector::Zero(fb.explanation.front().size()));
  grad.fixated.assign(k, Vector::Zero(fb.fixated.front().size()));
  const auto& e = fb.explanation;
  const auto& g = fb.fixated;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double r = sm.visual(i, j);
      if (i != j) {
        // s^e_ij = cos(e_i, e_j) and s^f_ij = cos(g_i, g_j); the diagonal is
        // identically one and contributes nothing.
        const double ce = scale * (sm.explanation(i, j) - r);
        grad.explanation[i] += ce * cosine_grad(e[i], e[j]);
        grad.explanation[j] += ce * cosine_grad(e[j], e[i]);
        const double cf = scale * (sm.fixation(i, j) - r);
        grad.fixated[i] += cf * cosine_grad(g[i], g[j]);
        grad.fixated[j] += cf * cosine_grad(g[j], g[i]);
      }
      const double cm = scale * (sm.multimodal(i, j) - r);
      grad.explanation[i] += cm * cosine_grad(e[i], g[j]);
      grad.fixated[j] += cm * cosine_grad(g[j], e[i]);
    }
  }
  return grad;
}

struct ProjectedFeatures {
  Vector fixated;      // W_d g_k + v_I
  Vector instruction;  // t_I + v_T
};

inline ProjectedFeatures project_features(const Vector& fixated,
                                          const Vector& instruction,
                                          const Matrix& projection,
                                          const Vector& visual_offset,
                                          const Vector& text_offset) {
  if (projection.cols() != fixated.size()) {
    throw ValidationError("project_features: W_d has " +
                          std::to_string(projection.cols()) +
                          " columns, g_k has dimension " +
                          std::to_string(fixated.size()));
  }
  if (visual_offset.size() != projection.rows() ||
      text_offset.size() != projection.rows() ||
      instruction.size() != projection.rows()) {
    throw ValidationError(
        "project_features: v_I, v_T and t_I must have dimension d_text = " +
        std::to_string(projection.rows()));
  }
  return {projection * fixated + visual_offset, instruction + text_offset};
}

// {"r": [[...], ...], "g": [[...], ...], "e_p": [[...], ...],
//  "t_I": [...], "W_d": [[row], ...], "v_I": [...], "v_T": [...]}
// The projection fields are optional.
inline FeatureBundle feature_bundle_from_json(const nlohmann::json& j) {
  auto vec = [](const nlohmann::json& v) {
    const auto xs = v.get<std::vector<double>>();
    return Vector(Eigen::Map<const Vector>(xs.data(),
                                           static_cast<Eigen::Index>(xs.size())));
  };
  auto list = [&vec](const nlohmann::json& v) {
    std::vector<Vector> out;
    for (const auto& x : v) out.push_back(vec(x));
    return out;
  };
  try {
    FeatureBundle fb;
    fb.visual = list(j.at("r"));
    fb.fixated = list(j.at("g"));
    fb.explanation = list(j.at("e_p"));
    if (j.contains("t_I")) fb.instruction = vec(j["t_I"]);
    if (j.contains("v_I")) fb.visual_offset = vec(j["v_I"]);
    if (j.contains("v_T")) fb.text_offset = vec(j["v_T"]);
    if (j.contains("W_d")) {
      const auto rows = j["W_d"].get<std::vector<std::vector<double>>>();
      if (!rows.empty()) {
        fb.projection.resize(static_cast<Eigen::Index>(rows.size()),
                             static_cast<Eigen::Index>(rows.front().size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          if (rows[r].size() != rows.front().size()) {
            throw ValidationError("feature file: ragged W_d");
          }
          for (std::size_t c = 0; c < rows[r].size(); ++c) {
            fb.projection(r, c) = rows[r][c];
          }
        }
      }
    }
    return fb;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("feature file: ") + e.what());
  }
}

}  // namespace gazebench

#endif  // GAZEBENCH_ALIGN_H_
