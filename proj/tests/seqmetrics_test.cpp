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

#include "gazebench/seqmetrics.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"

namespace gazebench {
namespace {

ExplainedScanpath path(std::vector<Point> pts, std::vector<double> durs = {}) {
  ExplainedScanpath sp{"s", "o", {}};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Fixation f{pts[i].x, pts[i].y, std::nullopt, std::nullopt};
    if (!durs.empty()) f.duration_ms = durs[i];
    sp.fixations.push_back(f);
  }
  return sp;
}

TEST(ScanMatchTest, IdenticalScanpathsScoreOne) {
  const auto a = path({{10, 10}, {200, 300}, {500, 20}, {40, 370}});
  EXPECT_DOUBLE_EQ(scanmatch(a, a), 1.0);
}

TEST(ScanMatchTest, MaximallyDistantBinsScoreZero) {
  // Hand NW table with s(TL, BR) = 0 and gap 0: every cell is 0.
  const auto a = path({{1, 1}, {2, 2}});
  const auto b = path({{510, 380}, {511, 383}});
  EXPECT_DOUBLE_EQ(scanmatch(a, b), 0.0);
}

TEST(ScanMatchTest, SharedFirstBinHandTable) {
  // Symbols A B vs A C; identity substitution, zero gap.
  // NW table rows (A, B) x cols (A, C):
  //   F[1][1] = 1, F[1][2] = 1, F[2][1] = 1, F[2][2] = max(1+0, 1, 1) = 1.
  ScanMatchConfig cfg;
  cfg.substitution = [](int x, int y) { return x == y ? 1.0 : 0.0; };
  EXPECT_DOUBLE_EQ(scanmatch(std::vector<int>{0, 1}, std::vector<int>{0, 2}, cfg),
                   0.5);
}

TEST(ScanMatchTest, GapPenaltyAndClipping) {
  ScanMatchConfig cfg;
  cfg.substitution = [](int x, int y) { return x == y ? 1.0 : -1.0; };
  cfg.gap_penalty = -0.5;
  // A B C vs A C: best = 1 - 0.5 + 1 = 1.5, normalized by 3.
  EXPECT_DOUBLE_EQ(
      scanmatch(std::vector<int>{0, 1, 2}, std::vector<int>{0, 2}, cfg), 0.5);
  EXPECT_DOUBLE_EQ(scanmatch(std::vector<int>{0}, std::vector<int>{1}, cfg), 0.0);
}

TEST(ScanMatchTest, SymmetricAndBounded) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> ux(0, 511.9), uy(0, 383.9);
  for (int t = 0; t < 50; ++t) {
    std::vector<Point> pa, pb;
    for (int i = 0; i < 1 + t % 7; ++i) pa.push_back({ux(rng), uy(rng)});
    for (int i = 0; i < 1 + (t * 3) % 5; ++i) pb.push_back({ux(rng), uy(rng)});
    const double ab = scanmatch(path(pa), path(pb));
    EXPECT_DOUBLE_EQ(ab, scanmatch(path(pb), path(pa)));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(ScanMatchTest, EmptyScanpathThrows) {
  EXPECT_THROW(scanmatch(path({}), path({{1, 1}})), ValidationError);
}

TEST(SedTest, IdentityAndSingleInsertion) {
  const auto a = path({{10, 10}, {200, 300}, {500, 20}});
  EXPECT_EQ(sed(a, a), 0.0);
  const auto b = path({{10, 10}, {300, 100}, {200, 300}, {500, 20}});
  EXPECT_EQ(sed(a, b), 1.0);
}

TEST(SedTest, SubstitutionHandCase) {
  const GridSpec g{4, 1, {4, 1}};  // bins A=0, B=1, C=2, D=3 left to right
  const auto abc = path({{0.5, 0}, {1.5, 0}, {2.5, 0}});
  const auto adc = path({{0.5, 0}, {3.5, 0}, {2.5, 0}});
  EXPECT_EQ(sed(abc, adc, g), 1.0);
  EXPECT_EQ(oracle::edit_script_search({0, 1, 2}, {0, 3, 2}), 1);
}

TEST(SedTest, MatchesEditScriptSearch) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> len(1, 6), sym(0, 2);
  for (int t = 0; t < 60; ++t) {
    std::vector<int> a(len(rng)), b(len(rng));
    for (int& x : a) x = sym(rng);
    for (int& x : b) x = sym(rng);
    EXPECT_EQ(static_cast<int>(levenshtein(a, b)),
              oracle::edit_script_search(a, b));
  }
}

TEST(SedTest, TriangleInequality) {
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> len(1, 8), sym(0, 3);
  for (int t = 0; t < 200; ++t) {
    std::vector<int> a(len(rng)), b(len(rng)), c(len(rng));
    for (auto* v : {&a, &b, &c}) {
      for (int& x : *v) x = sym(rng);
    }
    EXPECT_LE(levenshtein(a, c), levenshtein(a, b) + levenshtein(b, c));
    EXPECT_EQ(levenshtein(a, b), levenshtein(b, a));
  }
}

TEST(CollapseRepeatsTest, Idempotent) {
  const std::vector<int> xs = {1, 1, 2, 2, 2, 1, 3, 3};
  const auto once = collapse_repeats(xs);
  EXPECT_EQ(once, (std::vector<int>{1, 2, 1, 3}));
  EXPECT_EQ(collapse_repeats(once), once);
}

ClusterModel four_modes() {
  ClusterModel m;
  m.bandwidth = 10;
  m.modes = {{0, 0}, {100, 0}, {200, 0}, {300, 0}};  // A B C D
  m.fitted = true;
  return m;
}

TEST(SequenceScoreTest, HandCases) {
  const ClusterModel m = four_modes();
  const auto abc = path({{1, 0}, {99, 1}, {201, 0}});
  const auto abd = path({{0, 1}, {101, 0}, {299, 0}});
  EXPECT_NEAR(sequence_score(abc, abd, m), 1.0 - 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(sequence_score(abc, abc, m), 1.0);
  const auto ab = path({{0, 0}, {100, 0}});
  const auto cd = path({{200, 0}, {300, 0}});
  EXPECT_DOUBLE_EQ(sequence_score(ab, cd, m), 0.0);
}

TEST(SequenceScoreTest, RepeatsCollapse) {
  const ClusterModel m = four_modes();
  const auto aab = path({{0, 0}, {2, 0}, {100, 0}});
  const auto ab = path({{0, 0}, {100, 0}});
  EXPECT_DOUBLE_EQ(sequence_score(aab, ab, m), 1.0);
}

TEST(SequenceScoreTest, UnfittedModelThrows) {
  EXPECT_THROW(sequence_score(path({{0, 0}}), path({{0, 0}}), ClusterModel{}),
               ValidationError);
}

StimulusRecord labelled() {
  StimulusRecord s;
  s.stimulus_id = "k";
  s.width = 30;
  s.height = 10;
  Grid<int> labels(10, 30);
  for (int r = 0; r < 10; ++r) {
    for (int c = 0; c < 30; ++c) labels(r, c) = 1 + c / 10;  // sink fork knife
  }
  s.label_map = labels;
  return s;
}

TEST(SemanticSequenceScoreTest, HandCases) {
  const StimulusRecord s = labelled();
  const auto sink_fork = path({{2, 2}, {15, 5}});
  const auto sink_knife = path({{3, 3}, {25, 5}});
  EXPECT_DOUBLE_EQ(semantic_sequence_score(sink_fork, sink_knife, s), 0.5);
  const auto on_sink = path({{1, 1}, {5, 5}, {9, 9}});
  const auto on_sink2 = path({{2, 8}});
  EXPECT_DOUBLE_EQ(semantic_sequence_score(on_sink, on_sink2, s), 1.0);
  const auto fork = path({{12, 1}});
  const auto knife = path({{22, 1}});
  EXPECT_DOUBLE_EQ(semantic_sequence_score(fork, knife, s), 0.0);
}

TEST(SemanticSequenceScoreTest, MissingLabelMapThrows) {
  StimulusRecord s = labelled();
  s.label_map.reset();
  EXPECT_THROW(semantic_sequence_score(path({{1, 1}}), path({{1, 1}}), s),
               ValidationError);
}

TEST(MultiMatchTest, IdenticalScanpathsScoreOne) {
  const auto a = path({{10, 10}, {200, 300}, {500, 20}, {40, 370}},
                      {120, 300, 250, 90});
  const MultiMatchResult r = multimatch(a, a);
  for (const auto& v : {r.shape, r.direction, r.length, r.position, r.duration}) {
    ASSERT_TRUE(v.has_value());
    EXPECT_DOUBLE_EQ(*v, 1.0);
  }
  EXPECT_DOUBLE_EQ(*r.mean(), 1.0);
}

TEST(MultiMatchTest, OppositeSaccadeHasZeroDirectionSimilarity) {
  const auto right = path({{100, 200}, {300, 200}});
  const auto left = path({{300, 200}, {100, 200}});
  const MultiMatchResult r = multimatch(right, left);
  EXPECT_NEAR(*r.direction, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(*r.length, 1.0);
  EXPECT_FALSE(r.duration.has_value());
}

TEST(MultiMatchTest, SingleFixationLeavesVectorDimensionsUndefined) {
  const auto one = path({{100, 100}}, {200});
  const auto three = path({{100, 100}, {120, 100}, {400, 300}}, {200, 100, 50});
  const MultiMatchResult r = multimatch(one, three);
  EXPECT_FALSE(r.shape.has_value());
  EXPECT_FALSE(r.direction.has_value());
  EXPECT_FALSE(r.length.has_value());
  ASSERT_TRUE(r.position.has_value());
  ASSERT_TRUE(r.duration.has_value());
  // Pairs: distances 0, 20, 360.5...; median 20.
  EXPECT_NEAR(*r.position, 1.0 - 20.0 / 640.0, 1e-12);
  // Relative duration differences 0, 0.5, 0.75; median 0.5.
  EXPECT_NEAR(*r.duration, 0.5, 1e-12);
}

// Reference: all monotone alignments enumerated, cheapest kept, the five
// formulas applied directly to the aligned saccade pairs.
MultiMatchResult brute_force_multimatch(const ExplainedScanpath& a,
                                        const ExplainedScanpath& b) {
  struct S {
    double x, y, dx, dy, dur;
  };
  auto sacc = [](const ExplainedScanpath& p) {
    std::vector<S> out;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      out.push_back({p.fixations[i].x, p.fixations[i].y,
                     p.fixations[i + 1].x - p.fixations[i].x,
                     p.fixations[i + 1].y - p.fixations[i].y,
                     *p.fixations[i].duration_ms});
    }
    return out;
  };
  const auto sa = sacc(a), sb = sacc(b);
  auto cost = [&](std::size_t i, std::size_t j) {
    return std::sqrt(std::pow(sa[i].dx - sb[j].dx, 2) +
                     std::pow(sa[i].dy - sb[j].dy, 2));
  };
  double best = 1e300;
  std::vector<std::pair<std::size_t, std::size_t>> best_path;
  oracle::enumerate_paths(sa.size(), sb.size(), [&](const auto& p) {
    double c = 0;
    for (auto [i, j] : p) c += cost(i, j);
    if (c < best) {
      best = c;
      best_path = p;
    }
  });
  const double diag = std::sqrt(512.0 * 512 + 384.0 * 384);
  std::vector<double> vd, ad, ld, pd, dd;
  for (auto [i, j] : best_path) {
    vd.push_back(cost(i, j));
    double ang = std::abs(std::atan2(sa[i].dy, sa[i].dx) -
                          std::atan2(sb[j].dy, sb[j].dx));
    if (ang > std::numbers::pi) ang = 2 * std::numbers::pi - ang;
    ad.push_back(ang);
    ld.push_back(std::abs(std::hypot(sa[i].dx, sa[i].dy) -
                          std::hypot(sb[j].dx, sb[j].dy)));
    pd.push_back(std::hypot(sa[i].x - sb[j].x, sa[i].y - sb[j].y));
    dd.push_back(std::abs(sa[i].dur - sb[j].dur) / std::max(sa[i].dur, sb[j].dur));
  }
  MultiMatchResult r;
  r.shape = 1 - oracle::median(vd) / (2 * diag);
  r.direction = 1 - oracle::median(ad) / std::numbers::pi;
  r.length = 1 - oracle::median(ld) / diag;
  r.position = 1 - oracle::median(pd) / diag;
  r.duration = 1 - oracle::median(dd);
  return r;
}

TEST(MultiMatchTest, MatchesBruteForceOnRandomPairs) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> ux(0, 511), uy(0, 383), ud(50, 600);
  std::uniform_int_distribution<int> len(2, 5);
  for (int t = 0; t < 40; ++t) {
    auto make = [&](int n) {
      std::vector<Point> p;
      std::vector<double> d;
      for (int i = 0; i < n; ++i) {
        p.push_back({ux(rng), uy(rng)});
        d.push_back(ud(rng));
      }
      return path(p, d);
    };
    const auto a = make(t < 20 ? 3 : len(rng));
    const auto b = make(t < 20 ? 3 : len(rng));
    const MultiMatchResult got = multimatch(a, b);
    const MultiMatchResult want = brute_force_multimatch(a, b);
    EXPECT_NEAR(*got.shape, *want.shape, 1e-12);
    EXPECT_NEAR(*got.direction, *want.direction, 1e-12);
    EXPECT_NEAR(*got.length, *want.length, 1e-12);
    EXPECT_NEAR(*got.position, *want.position, 1e-12);
    EXPECT_NEAR(*got.duration, *want.duration, 1e-12);
    const MultiMatchResult swapped = multimatch(b, a);
    EXPECT_NEAR(*swapped.shape, *got.shape, 1e-12);
    EXPECT_NEAR(*swapped.direction, *got.direction, 1e-12);
    EXPECT_NEAR(*swapped.length, *got.length, 1e-12);
  }
}

}  // namespace
}  // namespace gazebench
