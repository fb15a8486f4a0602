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

#ifndef GAZEBENCH_DATASET_IO_H_
#define GAZEBENCH_DATASET_IO_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gazebench/core.h"
#include "gazebench/error.h"
#include "gazebench/png_io.h"
#include "json.hpp"

namespace gazebench {

inline constexpr std::string_view kDatasetSchema = "gazebench-v1";

struct ParseOptions {
  // Every coordinate, box and label map is stretched to this size.
  ImageSize canonical{kCanonicalWidth, kCanonicalHeight};
  std::size_t max_length = kDefaultMaxScanpathLength;
};

namespace io_detail {

using nlohmann::json;

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text,
                                                       std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline const json& require(const json& obj, const char* key,
                           const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

inline double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

inline int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  return v.get<int>();
}

inline std::string string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError(where + ": expected a string");
  return v.get<std::string>();
}

inline std::optional<std::string> opt_string(const json& obj, const char* key,
                                             const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return string(*it, where + "." + key);
}

// Inline run-length encoding: [[label, count], ...] in row-major order.
inline Grid<int> decode_rle(const json& rle, int width, int height,
                            const std::string& where) {
  if (!rle.is_array()) throw ParseError(where + ": rle must be an array");
  std::vector<int> data;
  data.reserve(static_cast<std::size_t>(width) * height);
  for (const auto& run : rle) {
    if (!run.is_array() || run.size() != 2) {
      throw ParseError(where + ": rle runs are [label, count] pairs");
    }
    const int label = integer(run[0], where);
    const int count = integer(run[1], where);
    if (count < 0) throw ParseError(where + ": negative run length");
    data.insert(data.end(), static_cast<std::size_t>(count), label);
  }
  const std::size_t expected = static_cast<std::size_t>(width) * height;
  if (data.size() != expected) {
    throw ValidationError(where + ": rle covers " +
                          std::to_string(data.size()) + " pixels, expected " +
                          std::to_string(expected));
  }
  return Grid<int>(height, width, std::move(data));
}

inline json encode_rle(const Grid<int>& labels) {
  json runs = json::array();
  std::size_t i = 0;
  while (i < labels.size()) {
    std::size_t j = i;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    runs.push_back({labels[i], j - i});
    i = j;
  }
  return runs;
}

// Nearest-neighbour resample (label maps are categorical).
inline Grid<int> resample_labels(const Grid<int>& src, int width, int height) {
  if (src.cols() == width && src.rows() == height) return src;
  Grid<int> dst(height, width);
  for (int r = 0; r < height; ++r) {
    const int sr = std::min(
        src.rows() - 1,
        static_cast<int>((r + 0.5) * src.rows() / static_cast<double>(height)));
    for (int c = 0; c < width; ++c) {
      const int sc = std::min(
          src.cols() - 1,
          static_cast<int>((c + 0.5) * src.cols() / static_cast<double>(width)));
      dst(r, c) = src(sr, sc);
    }
  }
  return dst;
}

// Strict upper bound kept strict after floating-point scaling.
inline double scale_coord(double v, double scale, int limit) {
  const double out = v * scale;
  return out < limit ? out : std::nextafter(static_cast<double>(limit), 0.0);
}

inline StimulusRecord parse_stimulus(const json& j, std::size_t index,
                                     const std::filesystem::path& base_dir) {
  const std::string where = "stimuli[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  StimulusRecord s;
  s.stimulus_id = string(require(j, "id", where), where + ".id");
  s.width = integer(require(j, "width", where), where + ".width");
  s.height = integer(require(j, "height", where), where + ".height");
  const std::string task = string(require(j, "task", where), where + ".task");
  auto t = task_from_name(task);
  if (!t) {
    throw ParseError(where + ": unknown task '" + task +
                     "' (expected free-view, search or vqa)");
  }
  s.task = *t;
  s.target_name = opt_string(j, "target_name", where);
  s.question = opt_string(j, "question", where);
  s.observer_answer = opt_string(j, "observer_answer", where);
  s.image_path = opt_string(j, "image", where);
  if (auto it = j.find("target_box"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 4) {
      throw ParseError(where + ".target_box: expected [x0, y0, x1, y1]");
    }
    s.target_box = Box{number((*it)[0], where), number((*it)[1], where),
                       number((*it)[2], where), number((*it)[3], where)};
    if (s.target_box->x1 < s.target_box->x0 ||
        s.target_box->y1 < s.target_box->y0) {
      throw ValidationError(where + ": target_box has x1 < x0 or y1 < y0",
                            {s.stimulus_id});
    }
  }
  if (auto it = j.find("pixels_per_degree"); it != j.end() && !it->is_null()) {
    s.pixels_per_degree = number(*it, where + ".pixels_per_degree");
  }
  if (auto it = j.find("label_map"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw ParseError(where + ".label_map: expected {\"png\": path} or "
                               "{\"rle\": runs}");
    }
    if (it->contains("png")) {
      std::filesystem::path p = string((*it)["png"], where + ".label_map.png");
      if (p.is_relative()) p = base_dir / p;
      s.label_map = read_png_labels(p.string());
    } else if (it->contains("rle")) {
      s.label_map =
          decode_rle((*it)["rle"], s.width, s.height, where + ".label_map");
    } else {
      throw ParseError(where + ".label_map: needs 'png' or 'rle'");
    }
  }
  try {
    validate(s);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what(), {s.stimulus_id});
  }
  return s;
}

inline ExplainedScanpath parse_scanpath(const json& j, std::size_t index) {
  const std::string where = "scanpaths[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  ExplainedScanpath sp;
  sp.stimulus_id =
      string(require(j, "stimulus_id", where), where + ".stimulus_id");
  sp.observer_id =
      string(require(j, "observer_id", where), where + ".observer_id");
  const json& fixations = require(j, "fixations", where);
  if (!fixations.is_array()) {
    throw ParseError(where + ".fixations: expected an array");
  }
  for (std::size_t k = 0; k < fixations.size(); ++k) {
    const std::string fw = where + ".fixations[" + std::to_string(k) + "]";
    const json& f = fixations[k];
    if (!f.is_object()) throw ParseError(fw + ": expected an object");
    Fixation fx;
    fx.x = number(require(f, "x", fw), fw + ".x");
    fx.y = number(require(f, "y", fw), fw + ".y");
    if (auto it = f.find("dur_ms"); it != f.end() && !it->is_null()) {
      fx.duration_ms = number(*it, fw + ".dur_ms");
    }
    fx.explanation = opt_string(f, "exp", fw);
    sp.fixations.push_back(std::move(fx));
  }
  return sp;
}

}  // namespace io_detail

// Parses a gazebench-v1 dataset held in memory. Relative label-map sidecar
// paths resolve against base_dir. All records are checked before anything
// is returned; every invalid scanpath is listed in the thrown error.
inline Dataset parse_dataset_text(std::string_view text,
                                  const std::filesystem::path& base_dir = {},
                                  const ParseOptions& opts = {}) {
  using io_detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = io_detail::line_column(text, e.byte);
    throw ParseError("malformed JSON: " + std::string(e.what()), line, col);
  }
  if (!root.is_object()) throw ParseError("top level must be an object", 1, 1);
  const std::string schema =
      io_detail::string(io_detail::require(root, "schema", "dataset"), "schema");
  if (schema != kDatasetSchema) {
    throw ParseError("unsupported schema '" + schema + "', expected '" +
                     std::string(kDatasetSchema) + "'");
  }
  if (opts.canonical.width <= 0 || opts.canonical.height <= 0) {
    throw ValidationError("canonical size must be positive");
  }

  Dataset ds;
  ds.name = io_detail::opt_string(root, "name", "dataset").value_or("");
  const std::string split =
      io_detail::opt_string(root, "split", "dataset").value_or("test");
  if (split == "train") {
    ds.split = Split::kTrain;
  } else if (split == "val") {
    ds.split = Split::kVal;
  } else if (split == "test") {
    ds.split = Split::kTest;
  } else {
    throw ParseError("unknown split '" + split + "'");
  }
  if (auto it = root.find("meta"); it != root.end() && it->is_object()) {
    for (const auto& [k, v] : it->items()) {
      ds.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }

  const json& stimuli = io_detail::require(root, "stimuli", "dataset");
  const json& scanpaths = io_detail::require(root, "scanpaths", "dataset");
  if (!stimuli.is_array() || !scanpaths.is_array()) {
    throw ParseError("'stimuli' and 'scanpaths' must be arrays");
  }

  std::vector<std::string> problems;
  std::vector<std::string> subjects;
  for (std::size_t i = 0; i < stimuli.size(); ++i) {
    StimulusRecord s;
    try {
      s = io_detail::parse_stimulus(stimuli[i], i, base_dir);
    } catch (const ValidationError& e) {
      problems.push_back(e.what());
      subjects.insert(subjects.end(), e.subjects().begin(), e.subjects().end());
      continue;
    }
    if (ds.stimuli.contains(s.stimulus_id)) {
      problems.push_back("stimuli[" + std::to_string(i) + "]: duplicate id '" +
                         s.stimulus_id + "'");
      subjects.push_back(s.stimulus_id);
      continue;
    }
    ds.stimuli.emplace(s.stimulus_id, std::move(s));
  }

  for (std::size_t i = 0; i < scanpaths.size(); ++i) {
    ExplainedScanpath sp = io_detail::parse_scanpath(scanpaths[i], i);
    const std::string where = "scanpaths[" + std::to_string(i) + "] '" +
                              sp.id() + "'";
    auto it = ds.stimuli.find(sp.stimulus_id);
    std::vector<std::string> issues;
    if (it == ds.stimuli.end()) {
      issues.push_back("unknown stimulus '" + sp.stimulus_id + "'");
    }
    if (sp.fixations.empty() || sp.fixations.size() > opts.max_length) {
      issues.push_back("length " + std::to_string(sp.fixations.size()) +
                       " outside [1, " + std::to_string(opts.max_length) +
                       "]");
    }
    for (std::size_t k = 0; k < sp.fixations.size(); ++k) {
      const Fixation& f = sp.fixations[k];
      if (it != ds.stimuli.end()) {
        const auto& st = it->second;
        if (!(f.x >= 0 && f.x < st.width && f.y >= 0 && f.y < st.height)) {
          std::ostringstream m;
          m << "fixation " << k << " at (" << f.x << ", " << f.y
            << ") outside " << st.width << "x" << st.height;
          issues.push_back(m.str());
        }
      }
      if (f.duration_ms && !(*f.duration_ms > 0)) {
        issues.push_back("fixation " + std::to_string(k) +
                         " has non-positive duration");
      }
    }
    if (!issues.empty()) {
      for (const auto& issue : issues) problems.push_back(where + ": " + issue);
      subjects.push_back(sp.id());
      continue;
    }
    ds.scanpaths.push_back(std::move(sp));
  }

  if (!problems.empty()) {
    std::string msg = std::to_string(problems.size()) + " invalid record(s):";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg, std::move(subjects));
  }

  // Stretch to the canonical frame (aspect ratio is not preserved).
  for (auto& sp : ds.scanpaths) {
    const auto& st = ds.stimuli.at(sp.stimulus_id);
    const double sx = static_cast<double>(opts.canonical.width) / st.width;
    const double sy = static_cast<double>(opts.canonical.height) / st.height;
    for (auto& f : sp.fixations) {
      f.x = io_detail::scale_coord(f.x, sx, opts.canonical.width);
      f.y = io_detail::scale_coord(f.y, sy, opts.canonical.height);
    }
  }
  for (auto& [id, st] : ds.stimuli) {
    const double sx = static_cast<double>(opts.canonical.width) / st.width;
    const double sy = static_cast<double>(opts.canonical.height) / st.height;
    if (st.target_box) {
      st.target_box = Box{st.target_box->x0 * sx, st.target_box->y0 * sy,
                          st.target_box->x1 * sx, st.target_box->y1 * sy};
    }
    if (st.pixels_per_degree) {
      // Anisotropic stretch; keep the geometric mean of the two axes.
      st.pixels_per_degree = *st.pixels_per_degree * std::sqrt(sx * sy);
    }
    if (st.label_map) {
      st.label_map = io_detail::resample_labels(
          *st.label_map, opts.canonical.width, opts.canonical.height);
    }
    st.width = opts.canonical.width;
    st.height = opts.canonical.height;
  }
  return ds;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Dataset parse_dataset(const std::filesystem::path& path,
                             const ParseOptions& opts = {}) {
  const std::string text = read_text_file(path);
  try {
    Dataset ds = parse_dataset_text(text, path.parent_path(), opts);
    if (ds.name.empty()) ds.name = path.stem().string();
    return ds;
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what(), e.subjects());
  }
}

inline nlohmann::json dataset_to_json(const Dataset& ds) {
  using io_detail::json;
  json root;
  root["schema"] = kDatasetSchema;
  if (!ds.name.empty()) root["name"] = ds.name;
  root["split"] = ds.split == Split::kTrain ? "train"
                  : ds.split == Split::kVal ? "val"
                                            : "test";
  if (!ds.metadata.empty()) root["meta"] = ds.metadata;
  json stimuli = json::array();
  for (const auto& [id, s] : ds.stimuli) {
    json j;
    j["id"] = s.stimulus_id;
    j["width"] = s.width;
    j["height"] = s.height;
    j["task"] = task_name(s.task);
    if (s.target_name) j["target_name"] = *s.target_name;
    if (s.target_box) {
      j["target_box"] = {s.target_box->x0, s.target_box->y0, s.target_box->x1,
                         s.target_box->y1};
    }
    if (s.question) j["question"] = *s.question;
    if (s.observer_answer) j["observer_answer"] = *s.observer_answer;
    if (s.pixels_per_degree) j["pixels_per_degree"] = *s.pixels_per_degree;
    if (s.image_path) j["image"] = *s.image_path;
    if (s.label_map) j["label_map"] = {{"rle", io_detail::encode_rle(*s.label_map)}};
    stimuli.push_back(std::move(j));
  }
  json scanpaths = json::array();
  for (const auto& sp : ds.scanpaths) {
    json fixations = json::array();
    for (const auto& f : sp.fixations) {
      json fj = {{"x", f.x}, {"y", f.y}};
      if (f.duration_ms) fj["dur_ms"] = *f.duration_ms;
      if (f.explanation) fj["exp"] = *f.explanation;
      fixations.push_back(std::move(fj));
    }
    scanpaths.push_back({{"stimulus_id", sp.stimulus_id},
                         {"observer_id", sp.observer_id},
                         {"fixations", std::move(fixations)}});
  }
  root["stimuli"] = std::move(stimuli);
  root["scanpaths"] = std::move(scanpaths);
  return root;
}

inline std::string serialize_dataset(const Dataset& ds) {
  return dataset_to_json(ds).dump(1) + "\n";
}

inline void write_dataset(const std::filesystem::path& path,
                          const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_dataset(ds);
}

}  // namespace gazebench

#endif  // GAZEBENCH_DATASET_IO_H_
