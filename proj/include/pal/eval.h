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

#ifndef PAL_EVAL_H_
#define PAL_EVAL_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pal/mask.h"

namespace pal {

struct EvalPair {
  std::string image_id;
  BinaryMask pred;
  BinaryMask gt;
};

struct ImageConfusion {
  std::string image_id;
  Confusion confusion;
};

// IoU of the artifact class; 1 when both masks are empty.
double ArtifactIou(const Confusion& c);
// IoU of the background class; 1 when both masks are full.
double BackgroundIou(const Confusion& c);

struct EvalReport {
  std::vector<ImageConfusion> per_image;
  Confusion aggregate;
  // Dataset-level: computed from the summed confusion.
  double iou_artifact = 1.0;
  double iou_background = 1.0;
  double miou = 1.0;
  // Image-level means, reported alongside for comparison.
  double mean_image_iou_artifact = 1.0;
  double mean_image_miou = 1.0;
};

// Throws InvalidInputError naming the image when a pair's shapes differ.
EvalReport EvaluateMiou(std::span<const EvalPair> pairs);

// Builds the report from already-counted images.
EvalReport SummarizeConfusions(std::vector<ImageConfusion> per_image);

struct PreferenceVotes {
  std::string task;
  std::vector<int> votes;  // each -1, 0 or +1
};

// Vote vectors up to this length are tested by full sign-flip enumeration.
inline constexpr size_t kExactPermutationLimit = 20;

// Two-sided one-sample sign-flip permutation test of mean(votes) == 0 using
// |mean| as the statistic. Exact for n <= kExactPermutationLimit; otherwise
// Monte Carlo with add-one smoothing, reproducible for a given seed.
double PermutationTest(const PreferenceVotes& votes, int64_t n_permutations,
                       uint64_t seed);

// Monte Carlo path only; exposed so it can be checked against the exact one.
double PermutationTestSampled(std::span<const int> votes,
                              int64_t n_permutations, uint64_t seed);

// Step-down Holm procedure. Ties in p are ordered by task name.
std::map<std::string, bool> HolmBonferroni(
    const std::map<std::string, double>& p_values, double alpha = 0.05);

}  // namespace pal

#endif  // PAL_EVAL_H_
