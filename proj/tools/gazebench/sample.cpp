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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "commands.h"
#include "gazebench/core.h"
#include "gazebench/dataset_io.h"
#include "gazebench/error.h"
#include "gazebench/hashing.h"
#include "gazebench/random.h"
#include "gazebench/simdec.h"
#include "json.hpp"
#include "util.h"

namespace gazebench::cli {
namespace {

namespace fs = std::filesystem;

std::vector<fs::path> decoder_files(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".json") {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(in)) {
      files.push_back(in);
    } else {
      throw ParseError("no such decoder file or directory: " + in.string());
    }
  }
  if (files.empty()) throw ValidationError("no decoder files given");
  return files;
}

DecoderOutput load_decoder(const fs::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return decoder_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what(), e.subjects());
  }
}

}  // namespace

void run_sample(const SampleOptions& opts) {
  if (!opts.seed) throw ValidationError("sample is stochastic and needs --seed");
  if (opts.samples < 1) throw ValidationError("--samples must be at least 1");
  const std::vector<fs::path> files = decoder_files(opts.decoders);
  std::optional<Dataset> source;
  if (opts.stimuli) source = parse_dataset(*opts.stimuli);

  Dataset out;
  out.name = opts.name;
  out.split = Split::kTest;
  std::string digests;
  std::uint64_t stream = 0;
  for (const auto& path : files) {
    const DecoderOutput dec = load_decoder(path);
    digests += file_sha256(path) + "\n";
    if (out.stimuli.count(dec.stimulus_id)) {
      throw ValidationError("two decoder files for stimulus '" +
                                dec.stimulus_id + "'",
                            {dec.stimulus_id});
    }
    StimulusRecord rec;
    if (source) {
      rec = source->stimulus(dec.stimulus_id);
    } else {
      rec.stimulus_id = dec.stimulus_id;
      rec.width = dec.image_size.width;
      rec.height = dec.image_size.height;
      rec.task = Task::kFreeView;
    }
    const double sx = static_cast<double>(rec.width) / dec.image_size.width;
    const double sy = static_cast<double>(rec.height) / dec.image_size.height;
    out.stimuli.emplace(rec.stimulus_id, rec);
    for (int n = 0; n < opts.samples; ++n) {
      const SampledScanpath sp =
          sample_scanpath(dec, derive_seed(*opts.seed, stream++));
      ExplainedScanpath e;
      e.stimulus_id = rec.stimulus_id;
      char observer[32];
      std::snprintf(observer, sizeof(observer), "sample-%02d", n);
      e.observer_id = observer;
      for (const auto& f : sp.fixations) {
        Fixation fx;
        fx.x = std::min(f.x * sx, std::nextafter(static_cast<double>(rec.width), 0.0));
        fx.y = std::min(f.y * sy, std::nextafter(static_cast<double>(rec.height), 0.0));
        fx.duration_ms = f.duration_ms;
        e.fixations.push_back(std::move(fx));
      }
      out.scanpaths.push_back(std::move(e));
    }
  }
  out.metadata["tool"] = std::string("gazebench ") + kToolVersion;
  out.metadata["seed"] = std::to_string(*opts.seed);
  out.metadata["samples_per_stimulus"] = std::to_string(opts.samples);
  out.metadata["decoder_files"] = std::to_string(files.size());
  out.metadata["decoders_sha256"] = sha256_hex(digests);
  write_file(opts.out, serialize_dataset(out));
}

}  // namespace gazebench::cli
