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

#include "pal/par.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.h"
#include "pal/errors.h"

namespace pal {
namespace {

ParRecord R(std::string id, double par, std::optional<std::string> task = {}) {
  return ParRecord{std::move(id), par, std::move(task), std::nullopt};
}

std::vector<std::string> Ids(const std::vector<ParRecord>& v) {
  std::vector<std::string> out;
  for (const auto& r : v) out.push_back(r.image_id);
  return out;
}

TEST(ParTest, Examples) {
  EXPECT_EQ(Par(BinaryMask(100, 100)), 0.0);
  EXPECT_EQ(Par(BinaryMask::Full(100, 100)), 1.0);
  BinaryMask m(100, 100);
  for (int i = 0; i < 25; ++i) m.set(i * 3, i);
  EXPECT_DOUBLE_EQ(Par(m), 25.0 / 10000.0);
}

TEST(ParTest, BoundedAndGrowsUnderDilation) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const BinaryMask m = testing::RandomMask(rng, 40, 0.1);
    const double p = Par(m);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    EXPECT_GE(Par(Dilate(m, 2)), p);
  }
}

TEST(RankByParTest, AscendingOrder) {
  const std::vector<ParRecord> in = {R("a", 0.3), R("b", 0.1), R("c", 0.2)};
  EXPECT_EQ(Ids(RankByPar(in)), (std::vector<std::string>{"b", "c", "a"}));
  EXPECT_EQ(in[0].image_id, "a");  // input untouched
}

TEST(RankByParTest, TiesByImageId) {
  const std::vector<ParRecord> in = {R("z", 0.5), R("m", 0.5), R("a", 0.5)};
  EXPECT_EQ(Ids(RankByPar(in)), (std::vector<std::string>{"a", "m", "z"}));
}

TEST(RankByParTest, DuplicateIdsRejected) {
  const std::vector<ParRecord> in = {R("a", 0.1), R("a", 0.2)};
  EXPECT_THROW(RankByPar(in), InvalidInputError);
}

TEST(RankByParTest, AgreesWithStableSortOracle) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> level(0, 20);  // coarse values force ties
  std::vector<ParRecord> in;
  for (int i = 0; i < 1000; ++i) {
    in.push_back(R("img" + std::to_string(i), level(rng) / 20.0));
  }
  std::shuffle(in.begin(), in.end(), rng);
  // Oracle: stable sort by id, then stable sort by par.
  std::vector<ParRecord> want = in;
  std::stable_sort(want.begin(), want.end(),
                   [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  std::stable_sort(want.begin(), want.end(),
                   [](const auto& a, const auto& b) { return a.par < b.par; });
  const auto got = RankByPar(in);
  EXPECT_EQ(got, want);
  EXPECT_EQ(RankByPar(got), got);  // idempotent
}

TEST(PercentileSamplesTest, NearestRank) {
  std::vector<ParRecord> ranked;
  for (int i = 0; i < 5; ++i) ranked.push_back(R(std::to_string(i), i / 10.0));
  const std::vector<double> mid = {50};
  EXPECT_EQ(PercentileSamples(ranked, mid)[0].image_id, "2");
  const std::vector<double> ends = {0, 100};
  const auto e = PercentileSamples(ranked, ends);
  EXPECT_EQ(e[0].image_id, "0");
  EXPECT_EQ(e[1].image_id, "4");
  ranked.pop_back();  // N = 4
  const std::vector<double> q = {25};
  EXPECT_EQ(PercentileSamples(ranked, q)[0].image_id, "1");  // round(0.75)
}

TEST(PercentileSamplesTest, Errors) {
  const std::vector<double> p = {50};
  EXPECT_THROW(PercentileSamples({}, p), InvalidInputError);
  const std::vector<ParRecord> one = {R("a", 0.0)};
  const std::vector<double> bad = {101};
  EXPECT_THROW(PercentileSamples(one, bad), InvalidInputError);
  const std::vector<double> neg = {-1};
  EXPECT_THROW(PercentileSamples(one, neg), InvalidInputError);
}

TEST(SelectBestTest, Examples) {
  const std::vector<ParRecord> c = {R("x", 0.3), R("y", 0.1), R("z", 0.2)};
  EXPECT_EQ(SelectBest(c).image_id, "y");
  const std::vector<ParRecord> single = {R("only", 0.9)};
  EXPECT_EQ(SelectBest(single).image_id, "only");
  const std::vector<ParRecord> tie = {R("q", 0.2), R("b", 0.2), R("k", 0.2)};
  EXPECT_EQ(SelectBest(tie).image_id, "b");
  EXPECT_THROW(SelectBest({}), InvalidInputError);
}

TEST(SelectBestTest, PermutationInvariant) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> level(0, 5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ParRecord> c;
    for (int i = 0; i < 8; ++i) c.push_back(R("c" + std::to_string(i), level(rng) / 5.0));
    const ParRecord want = SelectBest(c);
    std::shuffle(c.begin(), c.end(), rng);
    EXPECT_EQ(SelectBest(c), want);
  }
}

TEST(ParHeatmapTest, IdenticalMasks) {
  const BinaryMask m = testing::Block(4, 4, 1, 1, 2, 2);
  const std::vector<BinaryMask> masks = {m, m};
  const ParHeatmap h = ComputeParHeatmap(masks, 4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) EXPECT_EQ(h.at(x, y), m.at(x, y) ? 1.0 : 0.0);
  EXPECT_EQ(h.count, 2);
}

TEST(ParHeatmapTest, FullAndEmptyAverageToHalf) {
  const std::vector<BinaryMask> masks = {BinaryMask::Full(7, 3), BinaryMask(5, 9)};
  const ParHeatmap h = ComputeParHeatmap(masks, 8, 8);
  for (double v : h.values) EXPECT_EQ(v, 0.5);
}

TEST(ParHeatmapTest, CellMeanAcrossMasks) {
  BinaryMask a(2, 2), b(2, 2), c(2, 2);
  a.set(0, 0);
  b.set(0, 0);
  c.set(1, 1);
  const std::vector<BinaryMask> masks = {a, b, c};
  const ParHeatmap h = ComputeParHeatmap(masks, 2, 2);
  EXPECT_DOUBLE_EQ(h.at(0, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(h.at(1, 1), 1.0 / 3.0);
  EXPECT_EQ(h.at(1, 0), 0.0);
}

TEST(ParHeatmapTest, SingleMaskEqualsResampledMask) {
  std::mt19937_64 rng(6);
  const BinaryMask m = testing::RandomMaskOfSize(rng, 37, 23, 0.3);
  const std::vector<BinaryMask> masks = {m};
  const ParHeatmap h = ComputeParHeatmap(masks, 16, 16);
  const BinaryMask r = ResizeMaskNearest(m, 16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) EXPECT_EQ(h.at(x, y), r.at(x, y) ? 1.0 : 0.0);
}

TEST(ParHeatmapTest, EmptyListRejected) {
  EXPECT_THROW(ComputeParHeatmap({}, 4, 4), InvalidInputError);
}

LabelMap Labels(int w, int h, std::vector<int32_t> ids) {
  return LabelMap{w, h, std::move(ids)};
}

TEST(PerClassParTest, Examples) {
  const std::map<int32_t, std::string> names = {{7, "sky"}};
  const std::vector<MaskLabelPair> empty = {
      {BinaryMask(3, 3), Labels(3, 3, std::vector<int32_t>(9, 7))}};
  auto t = PerClassPar(empty, names);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].par, 0.0);
  EXPECT_EQ(t.rows[0].class_name, "sky");

  const std::vector<MaskLabelPair> full = {
      {BinaryMask::Full(3, 3), Labels(3, 3, std::vector<int32_t>(9, 7))}};
  EXPECT_EQ(PerClassPar(full, names).rows[0].par, 1.0);
}

TEST(PerClassParTest, RatioOfSumsAcrossPairs) {
  // Pair 1: class 1 on three pixels, two of them artifacts.
  BinaryMask m1(2, 2);
  m1.set(0, 0);
  m1.set(1, 0);
  // Pair 2: class 1 on one pixel, an artifact.
  BinaryMask m2(2, 2);
  m2.set(1, 1);
  const std::vector<MaskLabelPair> pairs = {
      {m1, Labels(2, 2, {1, 1, 1, 2})},
      {m2, Labels(2, 2, {3, 3, 3, 1})}};
  const auto t = PerClassPar(pairs, {});
  const auto row = std::find_if(t.rows.begin(), t.rows.end(),
                                [](const auto& r) { return r.class_id == 1; });
  ASSERT_NE(row, t.rows.end());
  EXPECT_EQ(row->artifact_pixels, 3);
  EXPECT_EQ(row->class_pixels, 4);
  EXPECT_DOUBLE_EQ(row->par, 0.75);
  EXPECT_EQ(row->class_name, "1");
  for (size_t i = 1; i < t.rows.size(); ++i) EXPECT_GE(t.rows[i - 1].par, t.rows[i].par);

  const std::vector<MaskLabelPair> swapped = {pairs[1], pairs[0]};
  const auto t2 = PerClassPar(swapped, {});
  ASSERT_EQ(t2.rows.size(), t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(t2.rows[i].class_id, t.rows[i].class_id);
    EXPECT_EQ(t2.rows[i].par, t.rows[i].par);
  }
}

TEST(PerClassParTest, ShapeMismatchNamesPair) {
  const std::vector<MaskLabelPair> pairs = {
      {BinaryMask(2, 2), Labels(2, 2, {0, 0, 0, 0})},
      {BinaryMask(2, 2), Labels(3, 1, {0, 0, 0})}};
  try {
    PerClassPar(pairs, {});
    FAIL();
  } catch (const InvalidInputError& e) {
    EXPECT_NE(std::string(e.what()).find("pair 1"), std::string::npos);
  }
}

TEST(ParHistogramTest, Examples) {
  const std::vector<ParRecord> one = {R("a", 0.1, "t"), R("b", 0.3, "t")};
  const auto h = ParHistogram(one);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h.at("t").mean_par, 0.2);
  EXPECT_EQ(h.at("t").count, 2);

  EXPECT_TRUE(ParHistogram({}).empty());

  const std::vector<ParRecord> two = {R("a", 0.0, "A"), R("b", 0.5, "A"),
                                      R("c", 0.25, "B")};
  const auto h2 = ParHistogram(two);
  EXPECT_DOUBLE_EQ(h2.at("A").mean_par, 0.25);
  EXPECT_DOUBLE_EQ(h2.at("B").mean_par, 0.25);
  EXPECT_EQ(h2.begin()->first, "A");
}

TEST(ParHistogramTest, MissingTaskRejected) {
  const std::vector<ParRecord> r = {R("a", 0.1)};
  EXPECT_THROW(ParHistogram(r), InvalidInputError);
}

}  // namespace
}  // namespace pal
