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

#ifndef GAZEBENCH_EMBEDDING_H_
#define GAZEBENCH_EMBEDDING_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gazebench/error.h"
#include "gazebench/langmetrics.h"
#include "gazebench/parallel.h"
#include "gazebench/service.h"
#include "json.hpp"

namespace gazebench {

inline constexpr std::string_view kEmbeddingCacheSchema =
    "gazebench-embeddings-v1";

using Embedding = std::vector<double>;

// Sentence embedder. Implementations must be safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Embedding embed(const std::string& text) = 0;
};

// Cosine similarity; identical vectors give exactly 1.
inline double embedding_cosine(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) {
    throw ValidationError("embedding dimensions differ: " +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ValidationError("zero embedding vector");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

// Offline embedder: signed feature hashing of tok-v1 tokens. Captures word
// overlap only; meant for toy data and tests, not semantic evaluation.
class HashedBagOfWords : public EmbeddingProvider {
 public:
  explicit HashedBagOfWords(std::size_t dims = 256) : dims_(dims) {
    if (dims == 0) throw ValidationError("embedding dimension must be positive");
  }

  Embedding embed(const std::string& text) override {
    Embedding v(dims_, 0.0);
    for (const auto& tok : tokenize(text).tokens) {
      const std::uint64_t h = fnv1a(tok);
      v[h % dims_] += (h >> 63) ? -1.0 : 1.0;
    }
    return v;
  }

 private:
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }

  std::size_t dims_;
};

// Remote embedder: POST {"text": ...} -> {"embedding": [...]}.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::shared_ptr<HttpTransport> transport,
                        RetryPolicy policy = {})
      : transport_(std::move(transport)), policy_(std::move(policy)) {}

  Embedding embed(const std::string& text) override {
    const std::string body = nlohmann::json{{"text", text}}.dump();
    return with_retry(policy_, "embedding request", [&] {
      const HttpResponse res = transport_->post_json(body);
      if (res.status != 200) {
        throw std::runtime_error("HTTP " + std::to_string(res.status));
      }
      const auto j = nlohmann::json::parse(res.body);
      Embedding v = j.at("embedding").get<Embedding>();
      if (v.empty()) throw std::runtime_error("empty embedding");
      return v;
    });
  }

 private:
  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy policy_;
};

// On-disk text -> vector table in front of an optional upstream provider.
// Misses go upstream and are written through to the file; without an
// upstream a miss is a ServiceError, so cached runs never reach the network.
class CachedEmbeddingProvider : public EmbeddingProvider {
 public:
  CachedEmbeddingProvider(std::filesystem::path path,
                          std::shared_ptr<EmbeddingProvider> upstream = nullptr)
      : path_(std::move(path)), upstream_(std::move(upstream)) {
    if (std::filesystem::exists(path_)) load();
  }

  Embedding embed(const std::string& text) override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      const auto it = table_.find(text);
      if (it != table_.end()) return it->second;
    }
    if (!upstream_) {
      throw ServiceError("no cached embedding for \"" + text + "\"",
                         {"offline: cache " + path_.string()});
    }
    Embedding v = upstream_->embed(text);
    std::lock_guard<std::mutex> lock(mu_);
    table_.emplace(text, v);
    save();
    return v;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return table_.size();
  }

 private:
  void load() {
    std::ifstream in(path_);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      if (j.at("schema") != kEmbeddingCacheSchema) {
        throw ValidationError("embedding cache " + path_.string() +
                              " has an unknown schema");
      }
      table_ = j.at("vectors").get<std::map<std::string, Embedding>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("embedding cache " + path_.string() + ": " + e.what());
    }
  }

  void save() const {
    const nlohmann::json j = {{"schema", kEmbeddingCacheSchema},
                              {"vectors", table_}};
    const auto tmp = path_.string() + ".tmp";
    {
      std::ofstream out(tmp);
      out << j.dump(1) << "\n";
      if (!out) throw std::runtime_error("cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path_);
  }

  std::filesystem::path path_;
  std::shared_ptr<EmbeddingProvider> upstream_;
  mutable std::mutex mu_;
  std::map<std::string, Embedding> table_;
};

// Embeds every text with at most max_in_flight concurrent calls.
inline std::vector<Embedding> embed_all(EmbeddingProvider& provider,
                                        std::span<const std::string> texts,
                                        std::size_t max_in_flight = 4) {
  std::vector<Embedding> out(texts.size());
  parallel_for(texts.size(), max_in_flight,
               [&](std::size_t i) { out[i] = provider.embed(texts[i]); });
  return out;
}

}  // namespace gazebench

#endif  // GAZEBENCH_EMBEDDING_H_
