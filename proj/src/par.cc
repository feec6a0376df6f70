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

#include <algorithm>
#include <cmath>
#include <set>

#include "pal/errors.h"

namespace pal {

namespace {

bool BetterThan(const ParRecord& a, const ParRecord& b) {
  if (a.par != b.par) return a.par < b.par;
  return a.image_id < b.image_id;
}

// Fixed-order pairwise summation so results do not depend on how a caller
// might split the work.
double PairwiseSum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const size_t half = v.size() / 2;
  return PairwiseSum(v.first(half)) + PairwiseSum(v.subspan(half));
}

}  // namespace

double Par(const BinaryMask& mask) {
  return static_cast<double>(mask.count()) / static_cast<double>(mask.size());
}

std::vector<ParRecord> RankByPar(std::span<const ParRecord> records) {
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.image_id).second) {
      throw InvalidInputError("duplicate image_id '" + r.image_id + "'");
    }
  }
  std::vector<ParRecord> out(records.begin(), records.end());
  std::sort(out.begin(), out.end(), BetterThan);
  return out;
}

std::vector<ParRecord> PercentileSamples(std::span<const ParRecord> ranked,
                                         std::span<const double> percentiles) {
  if (ranked.empty()) {
    throw InvalidInputError("percentile sampling needs a non-empty ranking");
  }
  const auto last = static_cast<long>(ranked.size() - 1);
  std::vector<ParRecord> out;
  out.reserve(percentiles.size());
  for (double p : percentiles) {
    if (!(p >= 0.0 && p <= 100.0)) {
      throw InvalidInputError("percentile " + std::to_string(p) +
                              " outside [0, 100]");
    }
    const long idx = std::clamp(std::lround(p / 100.0 * last), 0L, last);
    out.push_back(ranked[idx]);
  }
  return out;
}

ParRecord SelectBest(std::span<const ParRecord> candidates) {
  if (candidates.empty()) {
    throw InvalidInputError("select_best needs at least one candidate");
  }
  return *std::min_element(candidates.begin(), candidates.end(), BetterThan);
}

HeatmapAccumulator::HeatmapAccumulator(int grid_width, int grid_height)
    : grid_width_(grid_width), grid_height_(grid_height) {
  if (grid_width < 1 || grid_height < 1) {
    throw InvalidInputError("heatmap grid must be positive");
  }
  hits_.assign(static_cast<size_t>(grid_width) * grid_height, 0);
}

void HeatmapAccumulator::Add(const BinaryMask& mask) {
  const BinaryMask r = ResizeMaskNearest(mask, grid_width_, grid_height_);
  const auto bits = r.bits();
  for (size_t i = 0; i < hits_.size(); ++i) hits_[i] += bits[i];
  ++count_;
}

ParHeatmap HeatmapAccumulator::Result() const {
  if (count_ == 0) throw InvalidInputError("heatmap needs at least one mask");
  ParHeatmap map;
  map.grid_width = grid_width_;
  map.grid_height = grid_height_;
  map.count = count_;
  map.values.resize(hits_.size());
  for (size_t i = 0; i < hits_.size(); ++i) {
    map.values[i] = static_cast<double>(hits_[i]) / static_cast<double>(count_);
  }
  return map;
}

ParHeatmap ComputeParHeatmap(std::span<const BinaryMask> masks, int grid_width,
                             int grid_height) {
  if (masks.empty()) {
    throw InvalidInputError("heatmap needs at least one mask");
  }
  HeatmapAccumulator acc(grid_width, grid_height);
  for (const auto& m : masks) acc.Add(m);
  return acc.Result();
}

void ClassParAccumulator::Add(const BinaryMask& mask, const LabelMap& labels) {
  if (mask.width() != labels.width || mask.height() != labels.height) {
    throw InvalidInputError(
        "mask " + std::to_string(mask.width()) + "x" +
        std::to_string(mask.height()) + " vs label map " +
        std::to_string(labels.width) + "x" + std::to_string(labels.height));
  }
  const auto bits = mask.bits();
  for (size_t p = 0; p < labels.ids.size(); ++p) {
    Counts& c = counts_[labels.ids[p]];
    ++c.total;
    c.artifact += bits[p];
  }
}

ClassParTable ClassParAccumulator::Result(
    const std::map<int32_t, std::string>& class_names) const {
  ClassParTable table;
  for (const auto& [id, c] : counts_) {
    if (c.total == 0) continue;
    ClassParRow row;
    row.class_id = id;
    auto name = class_names.find(id);
    row.class_name = name != class_names.end() ? name->second : std::to_string(id);
    row.artifact_pixels = c.artifact;
    row.class_pixels = c.total;
    row.par = static_cast<double>(c.artifact) / static_cast<double>(c.total);
    table.rows.push_back(std::move(row));
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ClassParRow& a, const ClassParRow& b) {
                     return a.par > b.par;
                   });
  return table;
}

ClassParTable PerClassPar(std::span<const MaskLabelPair> pairs,
                          const std::map<int32_t, std::string>& class_names) {
  ClassParAccumulator acc;
  for (size_t i = 0; i < pairs.size(); ++i) {
    try {
      acc.Add(pairs[i].artifact_mask, pairs[i].label_map);
    } catch (const InvalidInputError& e) {
      throw InvalidInputError("pair " + std::to_string(i) + ": " + e.what());
    }
  }
  return acc.Result(class_names);
}

std::map<std::string, TaskParSummary> ParHistogram(
    std::span<const ParRecord> records) {
  std::map<std::string, std::vector<double>> by_task;
  for (const auto& r : records) {
    if (!r.task || r.task->empty()) {
      throw InvalidInputError("record '" + r.image_id + "' has no task tag");
    }
    by_task[*r.task].push_back(r.par);
  }
  std::map<std::string, TaskParSummary> out;
  for (auto& [task, pars] : by_task) {
    // Sort so the mean does not depend on input order.
    std::sort(pars.begin(), pars.end());
    out[task] = TaskParSummary{
        PairwiseSum(pars) / static_cast<double>(pars.size()),
        static_cast<int64_t>(pars.size())};
  }
  return out;
}

}  // namespace pal
