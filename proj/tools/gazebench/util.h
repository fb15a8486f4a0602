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

#ifndef GAZEBENCH_TOOLS_UTIL_H_
#define GAZEBENCH_TOOLS_UTIL_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "gazebench/embedding.h"

namespace gazebench::cli {

inline constexpr const char* kToolVersion = GAZEBENCH_VERSION;

// Creates parent directories; binary mode so output bytes match on every
// platform.
void write_file(const std::filesystem::path& path, const std::string& content);

std::string file_sha256(const std::filesystem::path& path);

// kind is "bow", "http" (needs url) or "cache" (needs cache; url optional,
// used for misses).
std::shared_ptr<EmbeddingProvider> make_embedder(
    const std::string& kind, const std::optional<std::string>& url,
    const std::optional<std::filesystem::path>& cache);

}  // namespace gazebench::cli

#endif  // GAZEBENCH_TOOLS_UTIL_H_
