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

#ifndef GAZEBENCH_RANDOM_H_
#define GAZEBENCH_RANDOM_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace gazebench {

// Uniform in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

inline std::size_t categorical(std::span<const double> probs,
                               std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double cum = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0) last_nonzero = i;
    cum += probs[i];
    if (u < cum && probs[i] > 0) return i;
  }
  return last_nonzero;
}

// Keeps at most max_count items, chosen without replacement; order of the
// kept items follows the input.
template <typename T>
std::vector<T> subsample(std::span<const T> items, std::size_t max_count,
                         std::uint64_t seed) {
  if (items.size() <= max_count) return {items.begin(), items.end()};
  std::vector<std::size_t> idx(items.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < max_count; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(uniform01(rng) * (idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(max_count);
  std::sort(idx.begin(), idx.end());
  std::vector<T> out;
  out.reserve(max_count);
  for (std::size_t i : idx) out.push_back(items[i]);
  return out;
}

// splitmix64 finalizer over (base, stream); gives each work item its own
// well-separated seed so results do not depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gazebench

#endif  // GAZEBENCH_RANDOM_H_
