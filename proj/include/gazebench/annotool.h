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

#ifndef GAZEBENCH_ANNOTOOL_H_
#define GAZEBENCH_ANNOTOOL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gazebench/cluster.h"
#include "gazebench/core.h"
#include "gazebench/embedding.h"
#include "gazebench/error.h"
#include "gazebench/hashing.h"
#include "gazebench/langmetrics.h"
#include "gazebench/parallel.h"
#include "gazebench/png_io.h"
#include "gazebench/report.h"
#include "gazebench/service.h"
#include "json.hpp"

namespace gazebench {

inline constexpr double kFoveaDiameterDeg = 5.0;
inline constexpr double kDefaultStrokePx = 4.0;
inline constexpr int kMinExplanationWords = 5;
inline constexpr int kMaxExplanationWords = 20;
inline constexpr double kDefaultClusterConsistency = 0.5;

class ViewingGeometry {
 public:
  explicit ViewingGeometry(double pixels_per_degree)
      : ppd_(pixels_per_degree) {
    if (!(std::isfinite(ppd_) && ppd_ > 0)) {
      throw ValidationError("pixels_per_degree must be finite and positive");
    }
  }
  double pixels_per_degree() const { return ppd_; }

 private:
  double ppd_;
};

struct Circle {
  Point center;
  double radius = 0.0;
};

// Fovea-sized marker around a fixation.
inline Circle circle_geometry(const Fixation& fix, const ViewingGeometry& geom) {
  return {fix.position(), 0.5 * kFoveaDiameterDeg * geom.pixels_per_degree()};
}

// Red ring on a copy of the image. Pixel coverage is evaluated at the pixel
// center: clamp(stroke/2 + 1/2 - |d - r|, 0, 1), then alpha-blended.
inline RgbImage render_circle(const RgbImage& image, Point center,
                              double radius, double stroke_px = kDefaultStrokePx) {
  if (!(radius > 0) || !(stroke_px > 0)) {
    throw ValidationError("circle radius and stroke must be positive");
  }
  RgbImage out = image;
  const double reach = radius + stroke_px / 2 + 1;
  const int x_lo = std::max(0, static_cast<int>(std::floor(center.x - reach)));
  const int x_hi = std::min(image.width - 1,
                            static_cast<int>(std::ceil(center.x + reach)));
  const int y_lo = std::max(0, static_cast<int>(std::floor(center.y - reach)));
  const int y_hi = std::min(image.height - 1,
                            static_cast<int>(std::ceil(center.y + reach)));
  bool touched = false;
  static constexpr std::uint8_t kRed[3] = {255, 0, 0};
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const double d = std::hypot(x + 0.5 - center.x, y + 0.5 - center.y);
      const double cov =
          std::clamp(stroke_px / 2 + 0.5 - std::abs(d - radius), 0.0, 1.0);
      if (cov <= 0) continue;
      touched = true;
      std::uint8_t* px = out.at(x, y);
      for (int c = 0; c < 3; ++c) {
        px[c] = static_cast<std::uint8_t>(
            std::lround(px[c] * (1 - cov) + kRed[c] * cov));
      }
    }
  }
  if (!touched) throw ValidationError("circle lies entirely outside the image");
  return out;
}

struct PromptTemplate {
  std::string version = "prompt-v1";
  std::string text =
      "Describe the image information within the circled area in one "
      "sentence.";
};

// The same instruction is used for every fixation.
inline std::string build_prompt(const PromptTemplate& tmpl = {}) {
  return tmpl.text;
}

struct AuditEntry {
  std::string request_sha256;
  int attempt = 0;
  int status = 0;  // 0 when the transport failed
  std::string response;
};

struct VlmConfig {
  RetryPolicy retry;
  std::optional<std::filesystem::path> cache_dir;
  bool offline = false;
  std::size_t max_in_flight = 4;
};

// Client for a describe-this-image service: POST {image: base64 PNG,
// prompt} -> {text}. Responses are cached under the SHA-256 of the request
// content (raw pixels, size, prompt), so replays do not depend on the PNG
// encoder. Offline mode answers from the cache only.
class VlmClient {
 public:
  VlmClient(VlmConfig config, std::shared_ptr<HttpTransport> transport)
      : config_(std::move(config)),
        transport_(std::move(transport)),
        slots_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(
            config_.max_in_flight, 1, kMaxSlots))) {
    if (config_.cache_dir) std::filesystem::create_directories(*config_.cache_dir);
    if (!config_.offline && !transport_) {
      throw ValidationError("VLM client needs an endpoint unless offline");
    }
  }

  static std::string request_key(const RgbImage& image, const std::string& prompt) {
    const std::string pixels(image.pixels.begin(), image.pixels.end());
    return sha256_hex(std::to_string(image.width) + "x" +
                      std::to_string(image.height) + "\n" + sha256_hex(pixels) +
                      "\n" + prompt);
  }

  std::string describe(const RgbImage& image, const std::string& prompt) {
    const std::string key = request_key(image, prompt);
    if (auto hit = cache_lookup(key)) return *hit;
    if (config_.offline) {
      throw ServiceError("offline and no cached response for request " + key,
                         {"offline"});
    }
    const std::vector<std::uint8_t> png = encode_png(image);
    const std::string body =
        nlohmann::json{{"image", base64_encode(png)}, {"prompt", prompt}}.dump();
    int attempt = 0;
    std::string text = with_retry(config_.retry, "VLM request", [&] {
      ++attempt;
      HttpResponse res;
      {
        slots_.acquire();
        struct Release {
          std::counting_semaphore<kMaxSlots>& s;
          ~Release() { s.release(); }
        } release{slots_};
        try {
          res = transport_->post_json(body);
        } catch (const std::exception& e) {
          audit({key, attempt, 0, e.what()});
          throw;
        }
      }
      audit({key, attempt, res.status, res.body});
      if (res.status != 200) {
        throw std::runtime_error("HTTP " + std::to_string(res.status));
      }
      std::string t;
      try {
        t = nlohmann::json::parse(res.body).at("text").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("bad response: ") + e.what());
      }
      if (t.empty()) throw std::runtime_error("empty description");
      return t;
    });
    cache_store(key, text);
    return text;
  }

  std::vector<AuditEntry> audit_log() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_;
  }

 private:
  static constexpr std::ptrdiff_t kMaxSlots = 64;

  std::optional<std::string> cache_lookup(const std::string& key) const {
    if (!config_.cache_dir) return std::nullopt;
    std::lock_guard<std::mutex> lock(mu_);
    std::ifstream in(*config_.cache_dir / (key + ".json"));
    if (!in) return std::nullopt;
    try {
      return nlohmann::json::parse(in).at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("corrupt VLM cache entry " + key + ": " + e.what());
    }
  }

  void cache_store(const std::string& key, const std::string& text) {
    if (!config_.cache_dir) return;
    std::lock_guard<std::mutex> lock(mu_);
    std::ofstream out(*config_.cache_dir / (key + ".json"));
    out << nlohmann::json{{"request_sha256", key}, {"text", text}}.dump(1)
        << "\n";
  }

  void audit(AuditEntry e) {
    std::lock_guard<std::mutex> lock(mu_);
    log_.push_back(std::move(e));
  }

  VlmConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  std::counting_semaphore<kMaxSlots> slots_;
  mutable std::mutex mu_;
  std::vector<AuditEntry> log_;
};

// Describes every fixation of a scanpath on its circled image.
inline std::vector<std::string> annotate_scanpath(
    const RgbImage& image, const ExplainedScanpath& scanpath,
    const ViewingGeometry& geom, VlmClient& client,
    const PromptTemplate& prompt = {}, double stroke_px = kDefaultStrokePx,
    std::size_t threads = 4) {
  std::vector<std::string> out(scanpath.size());
  const std::string text = build_prompt(prompt);
  parallel_for(scanpath.size(), threads, [&](std::size_t k) {
    const Circle c = circle_geometry(scanpath.fixations[k], geom);
    out[k] = client.describe(render_circle(image, c.center, c.radius, stroke_px),
                             text);
  });
  return out;
}

enum class QcRule { kLength, kCircleMention, kClusterInconsistency, kTextRecognition };

inline std::string_view qc_rule_name(QcRule r) {
  switch (r) {
    case QcRule::kLength:
      return "length";
    case QcRule::kCircleMention:
      return "circle-mention";
    case QcRule::kClusterInconsistency:
      return "cluster-inconsistency";
    case QcRule::kTextRecognition:
      return "text-recognition";
  }
  return "";
}

struct QcFinding {
  std::string scanpath_id;
  int fixation_index = 0;
  QcRule rule = QcRule::kLength;
  std::string message;
};

struct ClusterContext {
  std::vector<std::string> peers;  // other explanations in the same cluster
  EmbeddingProvider* provider = nullptr;
  double threshold = kDefaultClusterConsistency;
};

namespace qc_detail {

inline bool mentions_marker(const TokenSeq& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::string& w = t.tokens[i];
    if (w == "circled" || w == "encircled") return true;
    if (w == "red" && i + 1 < t.size() &&
        (t.tokens[i + 1] == "circle" || t.tokens[i + 1] == "circles")) {
      return true;
    }
  }
  return false;
}

// Words that suggest the description transcribes text in the image.
inline bool mentions_text(const TokenSeq& t) {
  static const std::set<std::string> kCues = {
      "sign",   "signs",   "text",  "written", "writing", "reads",
      "says",   "letters", "word",  "words",   "label",   "labeled",
      "logo",   "caption", "banner", "poster", "inscription"};
  for (const auto& w : t.tokens) {
    if (kCues.count(w)) return true;
  }
  return t.text.find('"') != std::string::npos;
}

}  // namespace qc_detail

inline std::vector<QcFinding> qc_check(const std::string& explanation,
                                       const std::optional<ClusterContext>& ctx,
                                       const std::string& scanpath_id = {},
                                       int fixation_index = 0) {
  std::vector<QcFinding> out;
  auto add = [&](QcRule r, std::string msg) {
    out.push_back({scanpath_id, fixation_index, r, std::move(msg)});
  };
  const std::size_t words = count_words(explanation);
  if (words < static_cast<std::size_t>(kMinExplanationWords) ||
      words > static_cast<std::size_t>(kMaxExplanationWords)) {
    add(QcRule::kLength, std::to_string(words) + " words, expected " +
                             std::to_string(kMinExplanationWords) + "-" +
                             std::to_string(kMaxExplanationWords));
  }
  const TokenSeq tokens = tokenize(explanation);
  if (qc_detail::mentions_marker(tokens)) {
    add(QcRule::kCircleMention, "refers to the visual marker");
  }
  if (qc_detail::mentions_text(tokens)) {
    add(QcRule::kTextRecognition, "transcribed text needs manual review");
  }
  if (ctx && !ctx->peers.empty()) {
    if (!ctx->provider) throw ValidationError("cluster context has no provider");
    const Embedding self = ctx->provider->embed(explanation);
    double sum = 0.0;
    for (const auto& p : ctx->peers) {
      sum += embedding_cosine(self, ctx->provider->embed(p));
    }
    const double mean = sum / static_cast<double>(ctx->peers.size());
    if (mean < ctx->threshold) {
      char buf[96];
      std::snprintf(buf, sizeof(buf),
                    "mean similarity %.3f to %zu cluster peers is below %.3f",
                    mean, ctx->peers.size(), ctx->threshold);
      add(QcRule::kClusterInconsistency, buf);
    }
  }
  return out;
}

struct QcOptions {
  double bandwidth_px = kDefaultClusterBandwidthPx;
  double threshold = kDefaultClusterConsistency;
  std::size_t min_peers = 2;  // smaller clusters skip the consistency rule
};

// Runs every rule over a dataset. Clusters are fitted per stimulus over all
// observers' explained fixations.
inline std::vector<QcFinding> qc_dataset(const Dataset& ds,
                                         EmbeddingProvider* provider,
                                         const QcOptions& opts = {}) {
  std::vector<QcFinding> findings;
  for (const auto& [id, stim] : ds.stimuli) {
    struct Item {
      const ExplainedScanpath* sp;
      int index;
    };
    std::vector<Item> items;
    std::vector<Point> pts;
    for (const ExplainedScanpath* sp : ds.scanpaths_for(id)) {
      for (std::size_t k = 0; k < sp->size(); ++k) {
        if (!sp->fixations[k].explanation) continue;
        items.push_back({sp, static_cast<int>(k)});
        pts.push_back(sp->fixations[k].position());
      }
    }
    if (items.empty()) continue;
    std::vector<std::size_t> cluster_of(items.size(), 0);
    if (provider) {
      cluster_of = meanshift_fit(pts, opts.bandwidth_px).assign(pts);
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& fx = items[i].sp->fixations[items[i].index];
      std::optional<ClusterContext> ctx;
      if (provider) {
        ClusterContext c{{}, provider, opts.threshold};
        for (std::size_t j = 0; j < items.size(); ++j) {
          if (j != i && cluster_of[j] == cluster_of[i]) {
            c.peers.push_back(*items[j].sp->fixations[items[j].index].explanation);
          }
        }
        if (c.peers.size() >= opts.min_peers) ctx = std::move(c);
      }
      auto f = qc_check(*fx.explanation, ctx, items[i].sp->id(), items[i].index);
      findings.insert(findings.end(), f.begin(), f.end());
    }
  }
  return findings;
}

inline std::string qc_findings_csv(std::span<const QcFinding> findings) {
  std::ostringstream out;
  out << "scanpath_id,fixation_index,rule,message\n";
  for (const auto& f : findings) {
    out << csv_field(f.scanpath_id) << ',' << f.fixation_index << ','
        << qc_rule_name(f.rule) << ',' << csv_field(f.message) << '\n';
  }
  return out.str();
}

}  // namespace gazebench

#endif  // GAZEBENCH_ANNOTOOL_H_
