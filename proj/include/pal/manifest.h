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

#ifndef PAL_MANIFEST_H_
#define PAL_MANIFEST_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pal {

enum class Split { kTrain, kVal, kTest };

std::string_view SplitName(Split s);
std::optional<Split> ParseSplit(std::string_view name);

struct ManifestEntry {
  std::string image_id;
  std::string image_path;
  std::optional<std::string> mask_path;
  std::optional<std::string> gt_mask_path;
  std::optional<std::string> label_map_path;
  // Candidates sharing a group compete in `select`.
  std::optional<std::string> group;
  std::string task;
  std::string domain;
  Split split = Split::kTrain;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

// Parses a JSON manifest ({"entries": [...]}) and validates it. Relative
// paths resolve against the manifest's directory. Throws ConfigError listing
// every problem found.
Manifest LoadManifest(const std::string& path);
Manifest ParseManifest(std::string_view json_text, const std::string& base_dir,
                       const std::string& source_name = "<manifest>");

// Paths are written as stored (absolute after loading).
std::string ManifestToJson(const Manifest& manifest);

// Reassigns splits 80/10/10 using a seeded shuffle of the sorted ids.
void AssignSplits(Manifest& manifest, uint64_t seed);

struct SplitCount {
  int64_t count = 0;
  double fraction = 0.0;
};
std::map<Split, SplitCount> SummarizeSplits(const Manifest& manifest);

}  // namespace pal

#endif  // PAL_MANIFEST_H_
