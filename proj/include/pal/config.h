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

#ifndef PAL_CONFIG_H_
#define PAL_CONFIG_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pal/backends.h"
#include "pal/mask.h"

namespace pal {

struct DetectorSpec {
  enum class Kind { kFile, kRemote, kStub };
  Kind kind = Kind::kStub;
  std::map<std::string, std::string> masks;  // kFile
  RemoteOptions remote;                      // kRemote
  double laplacian_threshold = 40.0;         // kStub
};

struct InpainterSpec {
  enum class Kind { kRemote, kStub };
  Kind kind = Kind::kStub;
  RemoteOptions remote;
  int max_side = 512;
  int boundary_ring = 3;
};

// Exactly one of a fixed radius or a percentage of the longest side.
struct DilationRule {
  std::optional<int> pixels;
  std::optional<double> percent = 1.0;

  int RadiusFor(int width, int height) const;
};

struct PipelineConfig {
  DetectorSpec detector;
  InpainterSpec inpainter;
  DilationRule dilation;
  double crop_scale = 1.5;
  int feather = 2;
  Connectivity connectivity = Connectivity::kEight;
  std::vector<PromptRule> prompt_rules = DefaultPromptRules();
  int parallelism = 1;
  int mask_threshold = 127;
  int heatmap_width = 512;
  int heatmap_height = 512;
  std::map<int32_t, std::string> class_names;
};

// Parses the JSON config; relative file-detector paths resolve against
// `base_dir`. Missing keys keep their defaults. Throws ConfigError listing
// every problem.
PipelineConfig ParseConfig(std::string_view json_text,
                           const std::string& base_dir = "");
PipelineConfig LoadConfig(const std::string& path);

// Canonical JSON form (sorted keys, no secrets).
std::string ConfigToJson(const PipelineConfig& config);
// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string ConfigHash(const PipelineConfig& config);

// Copies PAL_TOKEN from the environment into both remote specs.
void ApplyEnvironment(PipelineConfig& config);

std::unique_ptr<DetectorBackend> MakeDetector(const DetectorSpec& spec,
                                              int mask_threshold);
std::unique_ptr<InpainterBackend> MakeInpainter(const InpainterSpec& spec);

}  // namespace pal

#endif  // PAL_CONFIG_H_
