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

#include "gazebench/core.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "gazebench/dataset_io.h"
#include "gazebench/png_io.h"
#include "gtest/gtest.h"

namespace gazebench {
namespace {

std::string one_stimulus(int w, int h, const std::string& fixations,
                         const std::string& extra = "") {
  return R"({"schema":"gazebench-v1","name":"t","stimuli":[{"id":"s1","width":)" +
         std::to_string(w) + R"(,"height":)" + std::to_string(h) +
         R"(,"task":"free-view")" + extra +
         R"(}],"scanpaths":[{"stimulus_id":"s1","observer_id":"o1","fixations":[)" +
         fixations + "]}]}";
}

TEST(ParseDatasetTest, RescalesProportionally) {
  const Dataset ds = parse_dataset_text(
      one_stimulus(1024, 768, R"({"x":100,"y":100,"dur_ms":250})"));
  ASSERT_EQ(ds.scanpaths.size(), 1u);
  EXPECT_DOUBLE_EQ(ds.scanpaths[0].fixations[0].x, 50.0);
  EXPECT_DOUBLE_EQ(ds.scanpaths[0].fixations[0].y, 50.0);
  EXPECT_EQ(ds.stimulus("s1").width, 512);
  EXPECT_EQ(ds.stimulus("s1").height, 384);
}

TEST(ParseDatasetTest, NativeCanonicalSizeIsIdentity) {
  const Dataset ds = parse_dataset_text(
      one_stimulus(512, 384, R"({"x":101.25,"y":7.5})"));
  EXPECT_EQ(ds.scanpaths[0].fixations[0].x, 101.25);
  EXPECT_EQ(ds.scanpaths[0].fixations[0].y, 7.5);
  EXPECT_FALSE(ds.scanpaths[0].fixations[0].duration_ms.has_value());
}

TEST(ParseDatasetTest, DefaultCanonicalSizeIsWidthFirst) {
  const ParseOptions opts;
  EXPECT_EQ(opts.canonical.width, 512);
  EXPECT_EQ(opts.canonical.height, 384);
}

TEST(ParseDatasetTest, RescalingIsScaleCovariant) {
  const std::string text =
      one_stimulus(800, 600, R"({"x":123.4,"y":567.8},{"x":0.5,"y":3})");
  ParseOptions small;
  small.canonical = {300, 200};
  ParseOptions big;
  big.canonical = {600, 400};
  const Dataset a = parse_dataset_text(text, {}, small);
  const Dataset b = parse_dataset_text(text, {}, big);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NEAR(2 * a.scanpaths[0].fixations[k].x,
                b.scanpaths[0].fixations[k].x, 1e-9);
    EXPECT_NEAR(2 * a.scanpaths[0].fixations[k].y,
                b.scanpaths[0].fixations[k].y, 1e-9);
  }
}

TEST(ParseDatasetTest, MalformedJsonReportsLocation) {
  const std::string text = "{\n  \"schema\": \"gazebench-v1\",\n  \"stimuli\": [,\n";
  try {
    parse_dataset_text(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(ParseDatasetTest, RejectsWrongSchema) {
  EXPECT_THROW(parse_dataset_text(R"({"schema":"v0","stimuli":[],"scanpaths":[]})"),
               ParseError);
}

TEST(ParseDatasetTest, OutOfRangeFixationListsScanpath) {
  try {
    parse_dataset_text(one_stimulus(100, 100, R"({"x":100,"y":5})"));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.subjects().size(), 1u);
    EXPECT_EQ(e.subjects()[0], "s1/o1");
    EXPECT_NE(std::string(e.what()).find("fixation 0"), std::string::npos);
  }
}

TEST(ParseDatasetTest, RejectsNonPositiveDurationAndOverlongPaths) {
  EXPECT_THROW(
      parse_dataset_text(one_stimulus(100, 100, R"({"x":1,"y":1,"dur_ms":0})")),
      ValidationError);
  std::string many;
  for (int i = 0; i < 17; ++i) many += std::string(i ? "," : "") + R"({"x":1,"y":1})";
  EXPECT_THROW(parse_dataset_text(one_stimulus(100, 100, many)),
               ValidationError);
  EXPECT_THROW(parse_dataset_text(one_stimulus(100, 100, "")), ValidationError);
}

TEST(ParseDatasetTest, UnknownStimulusIsRejected) {
  const std::string text =
      R"({"schema":"gazebench-v1","stimuli":[],"scanpaths":[{"stimulus_id":"nope","observer_id":"o","fixations":[{"x":1,"y":1}]}]})";
  EXPECT_THROW(parse_dataset_text(text), ValidationError);
}

TEST(ParseDatasetTest, SearchNeedsTargetAndVqaNeedsQuestion) {
  const std::string search =
      R"({"schema":"gazebench-v1","stimuli":[{"id":"a","width":10,"height":10,"task":"search"}],"scanpaths":[]})";
  const std::string vqa =
      R"({"schema":"gazebench-v1","stimuli":[{"id":"a","width":10,"height":10,"task":"vqa"}],"scanpaths":[]})";
  EXPECT_THROW(parse_dataset_text(search), ValidationError);
  EXPECT_THROW(parse_dataset_text(vqa), ValidationError);
}

TEST(ParseDatasetTest, InlineRleLabelMapIsResampled) {
  // 4x2 image: left half label 1, right half label 2.
  const std::string extra =
      R"(,"label_map":{"rle":[[1,2],[2,2],[1,2],[2,2]]})";
  ParseOptions opts;
  opts.canonical = {8, 4};
  const Dataset ds =
      parse_dataset_text(one_stimulus(4, 2, R"({"x":3.5,"y":1.5})", extra), {},
                         opts);
  const auto& st = ds.stimulus("s1");
  ASSERT_TRUE(st.label_map.has_value());
  EXPECT_EQ(st.label_map->cols(), 8);
  EXPECT_EQ(st.label_map->rows(), 4);
  EXPECT_EQ(st.label_at(0, 0), 1);
  EXPECT_EQ(st.label_at(7, 3), 2);
  EXPECT_EQ(st.label_at(ds.scanpaths[0].fixations[0].x,
                        ds.scanpaths[0].fixations[0].y),
            2);
}

TEST(ParseDatasetTest, RleWithWrongPixelCountIsRejected) {
  const std::string extra = R"(,"label_map":{"rle":[[1,3]]})";
  EXPECT_THROW(parse_dataset_text(one_stimulus(2, 2, R"({"x":1,"y":1})", extra)),
               ValidationError);
}

TEST(ParseDatasetTest, PngSidecarLabelMap) {
  const auto dir = std::filesystem::temp_directory_path() / "gazebench_core_test";
  std::filesystem::create_directories(dir);
  Grid<int> labels(3, 4);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) labels(r, c) = r * 10 + c;
  }
  write_png_labels((dir / "labels.png").string(), labels);
  const std::string text =
      one_stimulus(4, 3, R"({"x":1,"y":2})", R"(,"label_map":{"png":"labels.png"})");
  {
    std::ofstream(dir / "ds.json") << text;
  }
  ParseOptions opts;
  opts.canonical = {4, 3};
  const Dataset ds = parse_dataset(dir / "ds.json", opts);
  ASSERT_TRUE(ds.stimulus("s1").label_map.has_value());
  EXPECT_EQ(*ds.stimulus("s1").label_map, labels);
  EXPECT_EQ(ds.name, "t");
}

TEST(ParseDatasetTest, RoundTripIsIdentity) {
  const std::string text = R"({"schema":"gazebench-v1","name":"rt","split":"val",
    "meta":{"seed":"7"},
    "stimuli":[
      {"id":"a","width":1024,"height":768,"task":"search","target_name":"fork",
       "target_box":[10,20,300,400],"observer_answer":"yes","pixels_per_degree":40},
      {"id":"b","width":640,"height":480,"task":"vqa","question":"Is it red?",
       "label_map":{"rle":[[0,153600],[3,153600]]}}],
    "scanpaths":[
      {"stimulus_id":"a","observer_id":"o1","fixations":[
        {"x":511.7,"y":100.3,"dur_ms":231.5,"exp":"a silver fork on a plate"},
        {"x":1023.9,"y":767.1}]},
      {"stimulus_id":"b","observer_id":"o2","fixations":[{"x":0,"y":0,"dur_ms":90}]}]})";
  const Dataset first = parse_dataset_text(text);
  const Dataset second = parse_dataset_text(serialize_dataset(first));
  EXPECT_EQ(first, second);
  EXPECT_EQ(second.split, Split::kVal);
  EXPECT_EQ(second.metadata.at("seed"), "7");
}

StimulusRecord record(Task task) {
  StimulusRecord s;
  s.stimulus_id = "x";
  s.width = 10;
  s.height = 10;
  s.task = task;
  return s;
}

TEST(StandardizeInstructionTest, FreeView) {
  EXPECT_EQ(standardize_instruction(record(Task::kFreeView), false),
            "What do you see in the image?");
}

TEST(StandardizeInstructionTest, Search) {
  auto s = record(Task::kSearch);
  s.target_name = "fork";
  EXPECT_EQ(standardize_instruction(s, false), "Is there a fork in the image?");
  s.observer_answer = "yes";
  EXPECT_EQ(standardize_instruction(s, true),
            "Is there a fork in the image? Answer: yes");
}

TEST(StandardizeInstructionTest, VqaWithAnswer) {
  auto s = record(Task::kVqa);
  s.question = "Q";
  s.observer_answer = "yes";
  EXPECT_EQ(standardize_instruction(s, true), "Q Answer: yes");
  EXPECT_EQ(standardize_instruction(s, false), "Q");
}

TEST(StandardizeInstructionTest, SearchWithoutTargetThrows) {
  EXPECT_THROW(standardize_instruction(record(Task::kSearch), false),
               ValidationError);
}

TEST(StandardizeInstructionTest, AnswerFlagWithoutAnswerIsNoop) {
  EXPECT_EQ(standardize_instruction(record(Task::kFreeView), true),
            "What do you see in the image?");
}

Dataset stats_dataset(const std::vector<std::vector<std::string>>& paths) {
  Dataset ds;
  ds.name = "toy";
  ds.stimuli["s"] = record(Task::kFreeView);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    ExplainedScanpath sp{"s", "o" + std::to_string(i), {}};
    for (const auto& e : paths[i]) {
      sp.fixations.push_back({1, 1, std::nullopt, e});
    }
    ds.scanpaths.push_back(sp);
  }
  return ds;
}

TEST(DatasetStatsTest, LengthMeanAndPopulationStd) {
  const Dataset ds =
      stats_dataset({{"a b", "c", "d"}, {"a", "b", "c", "d", "e f g"}});
  const MetricReport r = dataset_stats(ds);
  EXPECT_DOUBLE_EQ(*r.value("toy", "Length mean"), 4.0);
  EXPECT_DOUBLE_EQ(*r.value("toy", "Length std"), 1.0);
  EXPECT_DOUBLE_EQ(*r.value("toy", "Images"), 1.0);
  EXPECT_DOUBLE_EQ(*r.value("toy", "Scanpaths"), 2.0);
  // Per scanpath: 4 and 7 words.
  EXPECT_DOUBLE_EQ(*r.value("toy", "Words/Scanpath mean"), 5.5);
  EXPECT_DOUBLE_EQ(*r.value("toy", "Words/Scanpath std"), 1.5);
}

TEST(DatasetStatsTest, WordCount) {
  EXPECT_EQ(count_words("a red car on the street"), 6u);
  const MetricReport r = dataset_stats(stats_dataset({{"a red car on the street"}}));
  EXPECT_DOUBLE_EQ(*r.value("toy", "Words/Fixation mean"), 6.0);
}

TEST(DatasetStatsTest, EmptyDatasetThrows) {
  EXPECT_THROW(dataset_stats(Dataset{}), ValidationError);
}

TEST(DatasetStatsTest, NoExplanationsLeavesWordColumnsEmpty) {
  Dataset ds = stats_dataset({{"x"}});
  ds.scanpaths[0].fixations[0].explanation.reset();
  const MetricReport r = dataset_stats(ds);
  EXPECT_FALSE(r.value("toy", "Words/Fixation mean").has_value());
  EXPECT_NE(r.to_markdown().find("| - |"), std::string::npos);
}

}  // namespace
}  // namespace gazebench
