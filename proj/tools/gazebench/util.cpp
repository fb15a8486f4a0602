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

#include "util.h"

#include <fstream>

#include "gazebench/dataset_io.h"
#include "gazebench/error.h"
#include "gazebench/hashing.h"
#include "gazebench/service.h"

namespace gazebench::cli {

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string file_sha256(const std::filesystem::path& path) {
  return sha256_hex(read_text_file(path));
}

std::shared_ptr<EmbeddingProvider> make_embedder(
    const std::string& kind, const std::optional<std::string>& url,
    const std::optional<std::filesystem::path>& cache) {
  if (kind == "bow") return std::make_shared<HashedBagOfWords>();
  std::shared_ptr<EmbeddingProvider> http;
  if (url) {
    http = std::make_shared<HttpEmbeddingProvider>(
        std::make_shared<HttplibTransport>(*url));
  }
  if (kind == "http") {
    if (!http) throw ValidationError("--embedder http needs --embed-url");
    return http;
  }
  if (kind == "cache") {
    if (!cache) throw ValidationError("--embedder cache needs --embed-cache");
    return std::make_shared<CachedEmbeddingProvider>(*cache, http);
  }
  throw ValidationError("unknown embedder '" + kind + "' (bow, http, cache)");
}

}  // namespace gazebench::cli
