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

#ifndef PAL_PAR_H_
#define PAL_PAR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pal/image.h"
#include "pal/mask.h"

namespace pal {

// Perceptual Artifacts Ratio of one image, plus optional grouping tags.
struct ParRecord {
  std::string image_id;
  double par = 0.0;
  std::optional<std::string> task;
  std::optional<std::string> domain;

  friend bool operator==(const ParRecord&, const ParRecord&) = default;
};

// Fraction of the grid marked as artifact.
double Par(const BinaryMask& mask);

// Ascending PAR (best first), ties by image_id. Throws InvalidInputError on
// duplicate ids.
std::vector<ParRecord> RankByPar(std::span<const ParRecord> records);

// Nearest-rank picks from a ranked list: index round(p/100 * (N-1)).
std::vector<ParRecord> PercentileSamples(std::span<const ParRecord> ranked,
                                         std::span<const double> percentiles);

// argmin PAR with ties broken by image_id.
ParRecord SelectBest(std::span<const ParRecord> candidates);

struct ParHeatmap {
  int grid_width = 0;
  int grid_height = 0;
  std::vector<double> values;  // row-major, each in [0, 1]
  int64_t count = 0;

  double at(int x, int y) const {
    return values[static_cast<size_t>(y) * grid_width + x];
  }
};

// Per-cell artifact frequency after nearest-neighbour resampling of every
// mask to the grid.
ParHeatmap ComputeParHeatmap(std::span<const BinaryMask> masks, int grid_width,
                             int grid_height);

// Streaming form of ComputeParHeatmap. Integer hit counts make the result
// independent of insertion order.
class HeatmapAccumulator {
 public:
  HeatmapAccumulator(int grid_width, int grid_height);
  void Add(const BinaryMask& mask);
  int64_t count() const { return count_; }
  // Throws InvalidInputError if nothing was added.
  ParHeatmap Result() const;

 private:
  int grid_width_;
  int grid_height_;
  std::vector<int64_t> hits_;
  int64_t count_ = 0;
};

struct ClassParRow {
  int32_t class_id = 0;
  std::string class_name;
  int64_t artifact_pixels = 0;
  int64_t class_pixels = 0;
  double par = 0.0;
};

struct ClassParTable {
  std::vector<ClassParRow> rows;  // descending par, then ascending class_id
};

struct MaskLabelPair {
  BinaryMask artifact_mask;
  LabelMap label_map;
};

// Streaming form of PerClassPar.
class ClassParAccumulator {
 public:
  // Throws InvalidInputError when the shapes differ.
  void Add(const BinaryMask& artifact_mask, const LabelMap& label_map);
  bool empty() const { return counts_.empty(); }
  ClassParTable Result(const std::map<int32_t, std::string>& class_names) const;

 private:
  struct Counts {
    int64_t artifact = 0;
    int64_t total = 0;
  };
  std::map<int32_t, Counts> counts_;
};

// Corpus-level ratio of sums per class. Classes missing from `class_names`
// are named by their id.
ClassParTable PerClassPar(std::span<const MaskLabelPair> pairs,
                          const std::map<int32_t, std::string>& class_names);

struct TaskParSummary {
  double mean_par = 0.0;
  int64_t count = 0;
};

// Mean PAR per task tag, keyed (and therefore ordered) by task name.
std::map<std::string, TaskParSummary> ParHistogram(
    std::span<const ParRecord> records);

}  // namespace pal

#endif  // PAL_PAR_H_
