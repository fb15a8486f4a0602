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

// Runs the gazebench executable on small inputs and checks files, exit codes
// and diagnostics.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gazebench/dataset_io.h"
#include "gazebench/seqmetrics.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "json.hpp"

namespace gazebench {
namespace {

namespace fs = std::filesystem;

const fs::path kToy = GAZEBENCH_TOY_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("gazebench_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Returns the exit code; stdout and stderr land in out() and err().
  int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" +
                            GAZEBENCH_CLI + "\" " + args + " >\"" +
                            (dir_ / "stdout").string() + "\" 2>\"" +
                            (dir_ / "stderr").string() + "\"";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }
  std::string out() const { return slurp(dir_ / "stdout"); }
  std::string err() const { return slurp(dir_ / "stderr"); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string quoted(const std::string& name) const {
    return "\"" + path(name) + "\"";
  }
  static std::string toy(const std::string& name) {
    return "\"" + (kToy / name).string() + "\"";
  }

  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

Dataset toy_truth() { return parse_dataset(kToy / "truth.json"); }

void set_explanation(Dataset& ds, const std::string& stimulus,
                     const std::string& observer, std::size_t k,
                     const std::string& text) {
  for (auto& sp : ds.scanpaths) {
    if (sp.stimulus_id == stimulus && sp.observer_id == observer) {
      sp.fixations.at(k).explanation = text;
      return;
    }
  }
  FAIL() << "no scanpath " << stimulus << "/" << observer;
}

TEST_F(CliTest, CleanToyDatasetHasNoFindings) {
  ASSERT_EQ(run("annotate-qc --dataset " + toy("truth.json") + " -o " +
                quoted("qc")), 0) << err();
  EXPECT_EQ(lines(slurp(path("qc/qc_findings.csv"))).size(), 1u);
  EXPECT_NE(out().find("total,0"), std::string::npos);
}

TEST_F(CliTest, InjectedShortExplanationGivesOneLengthFinding) {
  Dataset ds = toy_truth();
  set_explanation(ds, "fv-street", "obs-a", 1, "a white car");
  spit(path("in.json"), serialize_dataset(ds));
  ASSERT_EQ(run("annotate-qc --dataset " + quoted("in.json") + " -o " +
                quoted("qc")), 0) << err();
  const auto rows = lines(slurp(path("qc/qc_findings.csv")));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].rfind("fv-street/obs-a,1,length,", 0), 0u) << rows[1];
  EXPECT_NE(slurp(path("qc/qc_summary.csv")).find("length,1\n"),
            std::string::npos);
}

TEST_F(CliTest, InjectedRedCircleMentionGivesOneFinding) {
  Dataset ds = toy_truth();
  set_explanation(ds, "fv-street", "obs-a", 1,
                  "a white car parked beside the street inside the red circle");
  spit(path("in.json"), serialize_dataset(ds));
  ASSERT_EQ(run("annotate-qc --dataset " + quoted("in.json") + " -o " +
                quoted("qc")), 0) << err();
  const auto rows = lines(slurp(path("qc/qc_findings.csv")));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].rfind("fv-street/obs-a,1,circle-mention,", 0), 0u) << rows[1];
}

TEST_F(CliTest, TextCueGoesToReviewQueue) {
  Dataset ds = toy_truth();
  set_explanation(ds, "fv-street", "obs-a", 1,
                  "a white car with a sign that reads \"taxi\" on top");
  spit(path("in.json"), serialize_dataset(ds));
  ASSERT_EQ(run("annotate-qc --no-cluster-rule --dataset " + quoted("in.json") +
                " -o " + quoted("qc")), 0) << err();
  const auto queue = lines(slurp(path("qc/review_queue.csv")));
  ASSERT_EQ(queue.size(), 2u);
  EXPECT_EQ(queue[1],
            "fv-street/obs-a,1,\"a white car with a sign that reads \"\"taxi\"\" "
            "on top\"");
}

TEST_F(CliTest, SampleRequiresSeed) {
  EXPECT_EQ(run("sample --decoders " + toy("decoders") + " -o " + quoted("s.json")),
            2);
  EXPECT_NE(err().find("--seed"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("s.json")));
}

TEST_F(CliTest, SampleEchoesSeedAndDefaultsToTwentySamples) {
  ASSERT_EQ(run("sample --decoders " + toy("decoders") + " --seed 11 -o " +
                quoted("s.json")), 0) << err();
  const Dataset ds = parse_dataset(path("s.json"));
  EXPECT_EQ(ds.metadata.at("seed"), "11");
  EXPECT_EQ(ds.metadata.at("samples_per_stimulus"), "20");
  EXPECT_EQ(ds.scanpaths.size(), 5u * 20u);
  EXPECT_EQ(ds.metadata.at("decoders_sha256").size(), 64u);
}

TEST_F(CliTest, OneHotSingleStepDecoderGivesDeterministicCell) {
  // 2x4 grid over 400x200; all mass in row 1, column 2 -> x in [200, 300),
  // y in [100, 200) natively.
  nlohmann::json dec = {
      {"schema", "gazebench-decoder-v1"}, {"stimulus_id", "one"},
      {"image_size", {400, 200}},         {"grid", {2, 4}},
      {"steps", {{{"map", {0, 0, 0, 0, 0, 0, 1, 0}},
                  {"mu", 5.0}, {"sigma2", 0.1}, {"end_prob", 0.3}}}}};
  spit(path("dec/one.json"), dec.dump());
  ASSERT_EQ(run("sample --decoders " + quoted("dec") + " --seed 3 -n 5 -o " +
                quoted("s.json")), 0) << err();
  const Dataset ds = parse_dataset(path("s.json"));
  ASSERT_EQ(ds.scanpaths.size(), 5u);
  const StimulusRecord& s = ds.stimulus("one");
  for (const auto& sp : ds.scanpaths) {
    ASSERT_EQ(sp.size(), 1u);
    const double nx = sp.fixations[0].x * 400 / s.width;
    const double ny = sp.fixations[0].y * 200 / s.height;
    EXPECT_GE(nx, 200.0 - 1e-9);
    EXPECT_LT(nx, 300.0 + 1e-9);
    EXPECT_GE(ny, 100.0 - 1e-9);
    EXPECT_LT(ny, 200.0);
  }
}

TEST_F(CliTest, MalformedDecoderExitsTwo) {
  spit(path("dec/bad.json"), "{\"schema\": \"gazebench-decoder-v1\", ");
  EXPECT_EQ(run("sample --decoders " + quoted("dec") + " --seed 1 -o " +
                quoted("s.json")), 2);
  EXPECT_NE(err().find("bad.json"), std::string::npos);
}

TEST_F(CliTest, SampleIsByteIdenticalForOneSeed) {
  const std::string args = "sample --decoders " + toy("decoders") + " --stimuli " +
                           toy("truth.json") + " --seed 5 -o ";
  ASSERT_EQ(run(args + quoted("a.json")), 0) << err();
  ASSERT_EQ(run(args + quoted("b.json")), 0) << err();
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  ASSERT_EQ(run("sample --decoders " + toy("decoders") + " --stimuli " +
                toy("truth.json") + " --seed 6 -o " + quoted("c.json")), 0);
  EXPECT_NE(slurp(path("a.json")), slurp(path("c.json")));
}

TEST_F(CliTest, EnvironmentSuppliesSeed) {
  ASSERT_EQ(run("sample --decoders " + toy("decoders") + " -n 1 -o " +
                    quoted("s.json"),
                "GAZEBENCH_SEED=9"), 0) << err();
  EXPECT_EQ(parse_dataset(path("s.json")).metadata.at("seed"), "9");
}

TEST_F(CliTest, TomlConfigSuppliesOptions) {
  spit(path("run.toml"), "[sample]\nseed = 13\nsamples = 2\nname = \"cfg\"\n");
  ASSERT_EQ(run("--config " + quoted("run.toml") + " sample --decoders " +
                toy("decoders") + " -o " + quoted("s.json")), 0) << err();
  const Dataset ds = parse_dataset(path("s.json"));
  EXPECT_EQ(ds.metadata.at("seed"), "13");
  EXPECT_EQ(ds.name, "cfg");
  EXPECT_EQ(ds.scanpaths.size(), 10u);
}

TEST_F(CliTest, UnknownMetricExitsTwo) {
  EXPECT_EQ(run("evaluate --pred " + toy("truth.json") + " --truth " +
                toy("truth.json") + " --metrics sm,foo -o " + quoted("ev")), 2);
  EXPECT_NE(err().find("unknown metric 'foo'"), std::string::npos);
}

TEST_F(CliTest, ShuffledAucNeedsSeed) {
  EXPECT_EQ(run("evaluate --pred " + toy("truth.json") + " --truth " +
                toy("truth.json") + " --metrics sauc -o " + quoted("ev")), 2);
  EXPECT_EQ(run("evaluate --pred " + toy("truth.json") + " --truth " +
                toy("truth.json") + " --metrics cc -o " + quoted("ev")), 0)
      << err();
}

TEST_F(CliTest, MalformedDatasetReportsLocation) {
  spit(path("bad.json"), "{\n  \"schema\": \"gazebench-v1\",\n  \"stimuli\": [,]\n}\n");
  EXPECT_EQ(run("evaluate --pred " + quoted("bad.json") + " --truth " +
                toy("truth.json") + " --metrics sm -o " + quoted("ev")), 2);
  EXPECT_NE(err().find("line 3"), std::string::npos) << err();
}

TEST_F(CliTest, MissingRequiredOptionExitsTwo) {
  EXPECT_EQ(run("evaluate --truth " + toy("truth.json")), 2);
}

TEST_F(CliTest, IdentityReportGolden) {
  ASSERT_EQ(run("evaluate --pred " + toy("truth.json") + " --truth " +
                toy("truth.json") + " --best --seed 1 -o " + quoted("ev")), 0)
      << err();
  std::string csv = slurp(path("ev/report.csv"));
  // The config hash covers the input bytes; checked separately.
  const auto h = csv.find("# config_sha256=");
  ASSERT_NE(h, std::string::npos);
  csv.erase(h, csv.find('\n', h) - h + 1);
  EXPECT_EQ(csv, slurp(kToy / "golden/identity_report.csv"));
  const auto pairs = lines(slurp(path("ev/pairs.csv")));
  EXPECT_EQ(pairs[0], "stimulus_id,pred,truth,SM,MM,SED,SS,SemSS");
  // 5 stimuli x 2 predictions x 2 references.
  EXPECT_EQ(pairs.size(), 1u + 20u);
  EXPECT_EQ(pairs[1],
            "fv-kitchen,fv-kitchen/obs-a,fv-kitchen/obs-a,1.000000,1.000000,"
            "0.000000,1.000000,-");
}

TEST_F(CliTest, ConfigHashTracksSettings) {
  auto hash_of = [&](const std::string& extra) {
    EXPECT_EQ(run("evaluate --pred " + toy("truth.json") + " --truth " +
                  toy("truth.json") + " --metrics sm,cc -o " + quoted("ev") + extra),
              0);
    const std::string md = slurp(path("ev/report.md"));
    const auto p = md.find("config_sha256: ");
    return md.substr(p + 15, 64);
  };
  const std::string base = hash_of("");
  EXPECT_EQ(hash_of(""), base);
  EXPECT_NE(hash_of(" --sigma-px 10"), base);
  EXPECT_NE(hash_of(" --best"), base);
}

TEST_F(CliTest, SemanticSequenceScoreWithLabelMap) {
  Dataset ds = toy_truth();
  for (auto& [id, s] : ds.stimuli) {
    Grid<int> labels(s.height, s.width, 0);
    for (int y = 0; y < s.height; ++y) {
      for (int x = s.width / 2; x < s.width; ++x) labels(y, x) = 1;
    }
    s.label_map = labels;
  }
  spit(path("lab.json"), serialize_dataset(ds));
  ASSERT_EQ(run("evaluate --pred " + quoted("lab.json") + " --truth " +
                quoted("lab.json") + " --best --metrics sm,semss -o " +
                quoted("ev")), 0)
      << err();
  const std::string md = slurp(path("ev/report.md"));
  EXPECT_NE(md.find("| toy | 1.000 | - | - | - | 1.000 | - | - | - | - |"),
            std::string::npos)
      << md;
}

TEST_F(CliTest, LanguageColumnsDashWithoutExplanations) {
  Dataset ds = toy_truth();
  for (auto& sp : ds.scanpaths) {
    for (auto& f : sp.fixations) f.explanation.reset();
  }
  spit(path("bare.json"), serialize_dataset(ds));
  ASSERT_EQ(run("evaluate --pred " + quoted("bare.json") + " --truth " +
                toy("truth.json") + " --metrics sm,bleu4,diversity -o " +
                quoted("ev")), 0) << err();
  EXPECT_NE(slurp(path("ev/report.md")).find("| toy | - | - | - | - | - | - | - |"),
            std::string::npos);
}

TEST_F(CliTest, StatsTable) {
  ASSERT_EQ(run("stats " + toy("truth.json") + " -o " + quoted("stats.csv")), 0);
  const auto rows = lines(slurp(path("stats.csv")));
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.back().rfind("toy,5,10,", 0), 0u) << rows.back();
}

TEST_F(CliTest, AlignHandBundle) {
  spit(path("b.json"),
       R"({"r": [[0.2, 0.9, 0.4], [0.2, 0.9, 0.4]], "g": [[1, 1], [1, 1]],
           "e_p": [[1, 0], [0, 1]]})");
  ASSERT_EQ(run("align --features " + quoted("b.json")), 0) << err();
  const auto rows = lines(out());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].rfind("0,0.585786438,", 0), 0u) << rows[1];
}

TEST_F(CliTest, FaithSweepOnToy) {
  ASSERT_EQ(run("faith --dataset " + toy("truth.json") + " -o " + quoted("f") +
                " --sweep 0,25,1000"), 0) << err();
  const std::string sweep = slurp(path("f/sweep.csv"));
  EXPECT_NE(sweep.find("1000,-\n"), std::string::npos) << sweep;
  EXPECT_TRUE(fs::exists(path("f/roc_25.csv")));
  EXPECT_EQ(lines(slurp(path("f/roc_25.csv")))[0], "fpr,tpr,threshold");
}

TEST_F(CliTest, FaithSingleClassThresholdExitsTwo) {
  EXPECT_EQ(run("faith --dataset " + toy("truth.json") + " -o " + quoted("f") +
                " --threshold-px 5000"), 2);
  EXPECT_NE(err().find("5000"), std::string::npos);
}

TEST_F(CliTest, AnnotateAgainstLocalServiceThenOffline) {
  Dataset ds = toy_truth();
  std::erase_if(ds.scanpaths,
                [](const ExplainedScanpath& sp) { return sp.stimulus_id != "fv-kitchen"; });
  for (auto& [id, s] : ds.stimuli) {
    s.image_path = (kToy / *s.image_path).string();
  }
  for (auto& f : ds.scanpaths[0].fixations) f.explanation.reset();
  spit(path("in.json"), serialize_dataset(ds));

  httplib::Server server;
  int calls = 0;
  server.Post("/describe", [&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    const auto body = nlohmann::json::parse(req.body);
    EXPECT_FALSE(body.at("image").get<std::string>().empty());
    res.set_content(R"({"text": "a wooden shelf holding white plates"})",
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string url = "http://127.0.0.1:" + std::to_string(port) + "/describe";
  const int rc = run("annotate --dataset " + quoted("in.json") + " -o " +
                     quoted("out.json") + " --vlm-url " + url + " --cache-dir " +
                     quoted("cache"));
  server.stop();
  t.join();
  ASSERT_EQ(rc, 0) << err();
  EXPECT_GT(calls, 0);
  const Dataset annotated = parse_dataset(path("out.json"));
  for (const auto& sp : annotated.scanpaths) {
    for (const auto& f : sp.fixations) {
      EXPECT_EQ(f.explanation.value_or(""), "a wooden shelf holding white plates");
    }
  }
  // Replay from the cache with no service.
  ASSERT_EQ(run("annotate --dataset " + quoted("in.json") + " -o " +
                quoted("replay.json") + " --offline --cache-dir " + quoted("cache")),
            0) << err();
  EXPECT_EQ(slurp(path("out.json")), slurp(path("replay.json")));
}

TEST_F(CliTest, AnnotateServiceFailureExitsThree) {
  Dataset ds = toy_truth();
  for (auto& [id, s] : ds.stimuli) s.image_path = (kToy / *s.image_path).string();
  spit(path("in.json"), serialize_dataset(ds));
  EXPECT_EQ(run("annotate --dataset " + quoted("in.json") + " -o " +
                quoted("out.json") + " --offline --cache-dir " + quoted("empty")),
            3);
  EXPECT_NE(err().find("service error"), std::string::npos);
}

}  // namespace
}  // namespace gazebench
