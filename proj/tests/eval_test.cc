/* Copyright 2026 The PAL Refine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "pal/eval.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.h"
#include "pal/errors.h"

namespace pal {
namespace {

using testing::Block;
using testing::BruteConfusion;
using testing::BruteSignFlipP;

TEST(EvaluateMiouTest, PerfectPrediction) {
  const BinaryMask m = Block(8, 8, 2, 2, 3, 3);
  const std::vector<EvalPair> pairs = {{"a", m, m}};
  const EvalReport r = EvaluateMiou(pairs);
  EXPECT_DOUBLE_EQ(r.iou_artifact, 1.0);
  EXPECT_DOUBLE_EQ(r.miou, 1.0);
}

TEST(EvaluateMiouTest, EmptyPredictionScoresZeroArtifactIou) {
  const std::vector<EvalPair> pairs = {{"a", BinaryMask(8, 8), Block(8, 8, 0, 0, 2, 2)}};
  EXPECT_DOUBLE_EQ(EvaluateMiou(pairs).iou_artifact, 0.0);
}

TEST(EvaluateMiouTest, ShiftedBlockWorkedExample) {
  const std::vector<EvalPair> pairs = {
      {"a", Block(4, 4, 0, 0, 2, 2), Block(4, 4, 1, 0, 2, 2)}};
  const EvalReport r = EvaluateMiou(pairs);
  EXPECT_NEAR(r.iou_artifact, 2.0 / 6.0, 1e-12);
  EXPECT_NEAR(r.iou_background, 10.0 / 14.0, 1e-12);
  EXPECT_NEAR(r.miou, 11.0 / 21.0, 1e-12);
}

TEST(EvaluateMiouTest, BothEmptyCountsAsPerfect) {
  const std::vector<EvalPair> pairs = {{"a", BinaryMask(3, 3), BinaryMask(3, 3)}};
  const EvalReport r = EvaluateMiou(pairs);
  EXPECT_DOUBLE_EQ(r.iou_artifact, 1.0);
  EXPECT_DOUBLE_EQ(r.miou, 1.0);
}

TEST(EvaluateMiouTest, DatasetLevelDiffersFromImageMean) {
  // Image 1: tiny miss; image 2: large hit. Summed counts weight by area.
  const std::vector<EvalPair> pairs = {
      {"small", BinaryMask(4, 4), Block(4, 4, 0, 0, 1, 1)},
      {"large", Block(4, 4, 0, 0, 3, 3), Block(4, 4, 0, 0, 3, 3)}};
  const EvalReport r = EvaluateMiou(pairs);
  EXPECT_NEAR(r.iou_artifact, 9.0 / 10.0, 1e-12);
  EXPECT_NEAR(r.mean_image_iou_artifact, 0.5, 1e-12);
}

TEST(EvaluateMiouTest, ShapeMismatchNamesImage) {
  const std::vector<EvalPair> pairs = {{"ok", BinaryMask(2, 2), BinaryMask(2, 2)},
                                       {"bad_one", BinaryMask(2, 2), BinaryMask(3, 2)}};
  try {
    EvaluateMiou(pairs);
    FAIL();
  } catch (const InvalidInputError& e) {
    EXPECT_NE(std::string(e.what()).find("bad_one"), std::string::npos);
  }
}

TEST(EvaluateMiouTest, MatchesConcatenatedOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> count(1, 6);
    std::vector<EvalPair> pairs;
    Confusion want;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const BinaryMask gt = testing::RandomMask(rng, 16, 0.3);
      const BinaryMask pred = testing::RandomMaskOfSize(rng, gt.width(), gt.height(), 0.3);
      want += BruteConfusion(pred, gt);
      pairs.push_back({"img" + std::to_string(i), pred, gt});
    }
    const EvalReport r = EvaluateMiou(pairs);
    ASSERT_EQ(r.aggregate.tp, want.tp);
    ASSERT_EQ(r.aggregate.fp, want.fp);
    ASSERT_EQ(r.aggregate.fn, want.fn);
    ASSERT_EQ(r.aggregate.tn, want.tn);
    ASSERT_EQ(r.per_image.size(), pairs.size());
    const double art = (want.tp + want.fp + want.fn) == 0
                           ? 1.0
                           : double(want.tp) / double(want.tp + want.fp + want.fn);
    const double bg = (want.tn + want.fp + want.fn) == 0
                          ? 1.0
                          : double(want.tn) / double(want.tn + want.fp + want.fn);
    ASSERT_NEAR(r.miou, (art + bg) / 2, 1e-12);
  }
}

TEST(PermutationTestTest, AllZeroVotes) {
  EXPECT_DOUBLE_EQ(PermutationTest({"t", std::vector<int>(12, 0)}, 1000, 1), 1.0);
  EXPECT_DOUBLE_EQ(PermutationTest({"t", std::vector<int>(40, 0)}, 1000, 1), 1.0);
}

TEST(PermutationTestTest, EightPositiveVotes) {
  EXPECT_DOUBLE_EQ(PermutationTest({"t", std::vector<int>(8, 1)}, 1000, 1), 0.0078125);
}

TEST(PermutationTestTest, SingleVote) {
  EXPECT_DOUBLE_EQ(PermutationTest({"t", {1}}, 1000, 1), 1.0);
}

TEST(PermutationTestTest, InvalidInputs) {
  EXPECT_THROW(PermutationTest({"t", {}}, 10, 1), InvalidInputError);
  EXPECT_THROW(PermutationTest({"t", {2}}, 10, 1), InvalidInputError);
  EXPECT_THROW(PermutationTest({"t", {1}}, 0, 1), InvalidInputError);
}

std::vector<int> RandomVotes(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> v(-1, 1);
  std::vector<int> votes(n);
  for (int& x : votes) x = v(rng);
  return votes;
}

TEST(PermutationTestTest, ExactMatchesBruteForce) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const auto votes = RandomVotes(rng, n);
    ASSERT_NEAR(PermutationTest({"t", votes}, 1, 0), BruteSignFlipP(votes), 1e-12);
  }
}

TEST(PermutationTestTest, SampledAgreesWithExact) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 5; ++trial) {
    const auto votes = RandomVotes(rng, 12);
    ASSERT_NEAR(PermutationTestSampled(votes, 100000, 7 + trial), BruteSignFlipP(votes), 0.02);
  }
}

TEST(PermutationTestTest, SampledIsSeededAndPositive) {
  const std::vector<int> votes(30, 1);
  const double p1 = PermutationTest({"t", votes}, 2000, 5);
  EXPECT_EQ(p1, PermutationTest({"t", votes}, 2000, 5));
  EXPECT_GT(p1, 0.0);
  EXPECT_DOUBLE_EQ(p1, 1.0 / 2001.0);
}

TEST(PermutationTestTest, InvariantUnderOrderAndSignFlip) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 30)(rng);
    auto votes = RandomVotes(rng, n);
    const double p = PermutationTest({"t", votes}, 3000, 9);
    auto shuffled = votes;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto flipped = votes;
    for (int& v : flipped) v = -v;
    if (n <= 20) {
      EXPECT_DOUBLE_EQ(PermutationTest({"t", shuffled}, 3000, 9), p);
    } else {
      // The sampled statistic depends only on the multiset of |votes|.
      EXPECT_NEAR(PermutationTest({"t", shuffled}, 3000, 9), p, 0.05);
    }
    EXPECT_DOUBLE_EQ(PermutationTest({"t", flipped}, 3000, 9), p);
  }
}

TEST(HolmBonferroniTest, WorkedExamples) {
  auto r = HolmBonferroni({{"A", 0.01}, {"B", 0.04}}, 0.05);
  EXPECT_TRUE(r["A"]);
  EXPECT_TRUE(r["B"]);
  r = HolmBonferroni({{"A", 1.0}, {"B", 1.0}, {"C", 1.0}}, 0.05);
  EXPECT_FALSE(r["A"] || r["B"] || r["C"]);
  r = HolmBonferroni({{"A", 0.03}, {"B", 0.04}}, 0.05);
  EXPECT_FALSE(r["A"]);
  EXPECT_FALSE(r["B"]);
}

TEST(HolmBonferroniTest, StopsAtFirstFailure) {
  // 0.01 <= 0.05/3; 0.03 > 0.05/2 stops; 0.04 would pass alone at 0.05.
  auto r = HolmBonferroni({{"a", 0.01}, {"b", 0.03}, {"c", 0.04}}, 0.05);
  EXPECT_TRUE(r["a"]);
  EXPECT_FALSE(r["b"]);
  EXPECT_FALSE(r["c"]);
}

TEST(HolmBonferroniTest, InvalidInputs) {
  EXPECT_THROW(HolmBonferroni({{"a", 0.0}}), InvalidInputError);
  EXPECT_THROW(HolmBonferroni({{"a", 1.5}}), InvalidInputError);
  EXPECT_THROW(HolmBonferroni({{"a", 0.5}}, 0.0), InvalidInputError);
  EXPECT_THROW(HolmBonferroni({{"a", 0.5}}, 1.0), InvalidInputError);
  EXPECT_TRUE(HolmBonferroni({}).empty());
}

TEST(HolmBonferroniTest, MonotoneInAlpha) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> p(1e-6, 1.0), a(1e-4, 0.999);
  for (int trial = 0; trial < 500; ++trial) {
    std::map<std::string, double> ps;
    const int m = std::uniform_int_distribution<int>(1, 8)(rng);
    for (int i = 0; i < m; ++i) ps["t" + std::to_string(i)] = p(rng);
    double a1 = a(rng), a2 = a(rng);
    if (a1 > a2) std::swap(a1, a2);
    const auto r1 = HolmBonferroni(ps, a1);
    const auto r2 = HolmBonferroni(ps, a2);
    for (const auto& [task, rejected] : r1)
      if (rejected) ASSERT_TRUE(r2.at(task));
  }
}

}  // namespace
}  // namespace pal
