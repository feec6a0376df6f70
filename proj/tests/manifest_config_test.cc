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

#include <gtest/gtest.h>

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "pal/config.h"
#include "pal/errors.h"
#include "pal/image.h"
#include "pal/manifest.h"
#include "temp_dir.h"

namespace pal {
namespace {

using testing::TempDir;

std::string ErrorText(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

class ManifestTest : public ::testing::Test {
 protected:
  void SetUp() override {
    WriteFileAtomic(dir_ / "a.png", EncodeRgb(RgbImage(4, 4)));
    WriteFileAtomic(dir_ / "b.png", EncodeRgb(RgbImage(4, 4)));
  }
  TempDir dir_;
};

TEST_F(ManifestTest, EmptyEntriesIsValid) {
  EXPECT_TRUE(ParseManifest(R"({"entries": []})", dir_.path().string()).entries.empty());
}

TEST_F(ManifestTest, RelativePathsResolveAgainstManifestDir) {
  WriteFileAtomic(dir_ / "m.json",
                  std::string(R"({"entries": [{"image_id": "a", "image_path": "a.png",
                   "task": "gan", "domain": "ffhq", "split": "val", "group": "g1"}]})"));
  const Manifest m = LoadManifest(dir_ / "m.json");
  ASSERT_EQ(m.entries.size(), 1u);
  EXPECT_EQ(m.entries[0].image_path, dir_ / "a.png");
  EXPECT_EQ(m.entries[0].split, Split::kVal);
  EXPECT_EQ(m.entries[0].group, "g1");
  EXPECT_FALSE(m.entries[0].mask_path.has_value());
}

TEST_F(ManifestTest, DuplicateIdIsNamed) {
  const std::string text = ErrorText([&] {
    ParseManifest(R"({"entries": [
      {"image_id": "dup", "image_path": "a.png", "task": "t", "domain": "d", "split": "train"},
      {"image_id": "dup", "image_path": "b.png", "task": "t", "domain": "d", "split": "train"}]})",
                  dir_.path().string());
  });
  EXPECT_NE(text.find("dup"), std::string::npos);
}

TEST_F(ManifestTest, MissingFileIsNamed) {
  const std::string text = ErrorText([&] {
    ParseManifest(R"({"entries": [
      {"image_id": "x", "image_path": "absent.png", "task": "t", "domain": "d", "split": "test"}]})",
                  dir_.path().string());
  });
  EXPECT_NE(text.find("absent.png"), std::string::npos);
}

TEST_F(ManifestTest, EveryProblemIsListed) {
  const std::string text = ErrorText([&] {
    ParseManifest(R"({"entries": [
      {"image_id": "x", "image_path": "absent.png", "task": "t", "domain": "d", "split": "holdout"},
      {"image_path": "a.png", "task": "t", "domain": "d", "split": "train"}]})",
                  dir_.path().string());
  });
  EXPECT_NE(text.find("absent.png"), std::string::npos);
  EXPECT_NE(text.find("holdout"), std::string::npos);
  EXPECT_NE(text.find("image_id"), std::string::npos);
}

TEST_F(ManifestTest, ParseErrorReportsLine) {
  const std::string text = ErrorText([&] {
    ParseManifest("{\n\"entries\": [\n,]}", dir_.path().string(), "bad.json");
  });
  EXPECT_NE(text.find("bad.json"), std::string::npos);
  EXPECT_NE(text.find("line 3"), std::string::npos);
}

TEST_F(ManifestTest, RoundTripsThroughJson) {
  const Manifest m = ParseManifest(R"({"entries": [
      {"image_id": "a", "image_path": "a.png", "mask_path": "b.png", "task": "t",
       "domain": "d", "split": "test"}]})",
                                   dir_.path().string());
  const Manifest again = ParseManifest(ManifestToJson(m), "/");
  ASSERT_EQ(again.entries.size(), 1u);
  EXPECT_EQ(again.entries[0].mask_path, m.entries[0].mask_path);
  EXPECT_EQ(again.entries[0].split, Split::kTest);
}

TEST_F(ManifestTest, SplitsAreEightyTenTenAndSeeded) {
  Manifest m;
  for (int i = 0; i < 100; ++i)
    m.entries.push_back({"img" + std::to_string(i), dir_ / "a.png", {}, {}, {}, {}, "t", "d",
                         Split::kTrain});
  Manifest other = m;
  std::reverse(other.entries.begin(), other.entries.end());
  AssignSplits(m, 3);
  AssignSplits(other, 3);
  const auto summary = SummarizeSplits(m);
  EXPECT_EQ(summary.at(Split::kTrain).count, 80);
  EXPECT_EQ(summary.at(Split::kVal).count, 10);
  EXPECT_EQ(summary.at(Split::kTest).count, 10);
  // Assignment depends on ids, not on manifest order.
  std::map<std::string, Split> by_id;
  for (const auto& e : m.entries) by_id[e.image_id] = e.split;
  for (const auto& e : other.entries) EXPECT_EQ(by_id[e.image_id], e.split);
}

TEST(ConfigTest, DefaultsFromEmptyDocument) {
  const PipelineConfig c = ParseConfig("{}");
  EXPECT_DOUBLE_EQ(c.crop_scale, 1.5);
  EXPECT_EQ(c.parallelism, 1);
  EXPECT_EQ(c.detector.kind, DetectorSpec::Kind::kStub);
  EXPECT_EQ(c.inpainter.kind, InpainterSpec::Kind::kStub);
  EXPECT_EQ(c.dilation.RadiusFor(1000, 400), 10);
}

TEST(ConfigTest, ParsesRemoteBackends) {
  const PipelineConfig c = ParseConfig(R"({
    "detector": {"type": "remote", "endpoint": "http://models:8000/pal", "retries": 4,
                 "timeout_ms": 1500, "max_concurrency": 1},
    "inpainter": {"type": "remote", "endpoint": "https://inpaint.example", "max_side": 256},
    "dilation": {"pixels": 7}, "crop_scale": 2.0, "connectivity": "four",
    "prompt_rules": [{"domain": "cats", "prompt": "a cat"}]})");
  EXPECT_EQ(c.detector.kind, DetectorSpec::Kind::kRemote);
  EXPECT_EQ(c.detector.remote.retries, 4);
  EXPECT_EQ(c.detector.remote.timeout.count(), 1500);
  EXPECT_EQ(c.detector.remote.max_concurrency, 1);
  EXPECT_EQ(c.inpainter.max_side, 256);
  EXPECT_EQ(c.dilation.RadiusFor(10, 10), 7);
  EXPECT_EQ(c.connectivity, Connectivity::kFour);
  EXPECT_EQ(DefaultPrompt(c.prompt_rules, "cats"), "a cat");
}

TEST(ConfigTest, ReportsEveryProblem) {
  const std::string text = ErrorText([] {
    ParseConfig(R"({"crop_scale": 0.5, "parallelism": 0, "dilation": {"pixels": 2, "percent": 1},
                    "bogus": 1})");
  });
  EXPECT_NE(text.find("crop_scale"), std::string::npos);
  EXPECT_NE(text.find("parallelism"), std::string::npos);
  EXPECT_NE(text.find("dilation"), std::string::npos);
  EXPECT_NE(text.find("bogus"), std::string::npos);
}

TEST(ConfigTest, RejectsBadRemoteEndpoint) {
  EXPECT_THROW(ParseConfig(R"({"detector": {"type": "remote", "endpoint": "models:80"}})"),
               ConfigError);
  EXPECT_THROW(ParseConfig(R"({"detector": {"type": "magic"}})"), ConfigError);
  EXPECT_THROW(ParseConfig("[1, 2"), ConfigError);
}

TEST(ConfigTest, HashIgnoresParallelismAndSecrets) {
  PipelineConfig a = ParseConfig(R"({"parallelism": 1})");
  PipelineConfig b = ParseConfig(R"({"parallelism": 8})");
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  EXPECT_EQ(ConfigHash(a).size(), 16u);
  b.inpainter.remote.bearer_token = "secret";
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  EXPECT_EQ(ConfigToJson(b).find("secret"), std::string::npos);
  const PipelineConfig c = ParseConfig(R"({"feather": 3})");
  EXPECT_NE(ConfigHash(a), ConfigHash(c));
}

TEST(ConfigTest, CanonicalJsonRoundTrips) {
  const PipelineConfig a = ParseConfig(R"({"dilation": {"percent": 2.5}, "feather": 4})");
  const PipelineConfig b = ParseConfig(ConfigToJson(a));
  EXPECT_EQ(ConfigToJson(a), ConfigToJson(b));
}

TEST(ConfigTest, TokenFromEnvironment) {
  PipelineConfig c = ParseConfig("{}");
  ::setenv("PAL_TOKEN", "tok", 1);
  ApplyEnvironment(c);
  ::unsetenv("PAL_TOKEN");
  EXPECT_EQ(c.detector.remote.bearer_token, "tok");
  EXPECT_EQ(c.inpainter.remote.bearer_token, "tok");
}

TEST(ConfigTest, FileDetectorPathsResolveAgainstConfigDir) {
  TempDir dir;
  WriteFileAtomic(dir / "m.png", EncodeMask(BinaryMask::Full(2, 2)));
  WriteFileAtomic(dir / "cfg.json",
                  std::string(R"({"detector": {"type": "file", "masks": {"x": "m.png"}}})"));
  const PipelineConfig c = LoadConfig(dir / "cfg.json");
  EXPECT_EQ(c.detector.masks.at("x"), dir / "m.png");
  auto det = MakeDetector(c.detector, c.mask_threshold);
  EXPECT_EQ(det->Detect("x", RgbImage(2, 2)), BinaryMask::Full(2, 2));
}

}  // namespace
}  // namespace pal
