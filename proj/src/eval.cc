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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <random>
#include <utility>

#include "pal/errors.h"

namespace pal {

namespace {

double Ratio(int64_t num, int64_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

void ValidateVotes(std::span<const int> votes) {
  if (votes.empty()) throw InvalidInputError("vote list is empty");
  for (int v : votes) {
    if (v < -1 || v > 1) {
      throw InvalidInputError("vote " + std::to_string(v) +
                              " is not in {-1, 0, +1}");
    }
  }
}

// Walks all 2^n sign assignments in Gray-code order, updating the signed sum
// by one flip per step.
double ExactPermutationTest(std::span<const int> votes) {
  const size_t n = votes.size();
  int64_t observed = 0;
  for (int v : votes) observed += v;
  observed = std::llabs(observed);

  int64_t sum = 0;
  for (int v : votes) sum += v;
  std::vector<int> signs(n, 1);
  const uint64_t total = uint64_t{1} << n;
  uint64_t extreme = 0;
  for (uint64_t step = 0; step < total; ++step) {
    if (step > 0) {
      const int flip = std::countr_zero(step);
      sum -= 2 * signs[flip] * votes[flip];
      signs[flip] = -signs[flip];
    }
    if (std::llabs(sum) >= observed) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

double ArtifactIou(const Confusion& c) { return Ratio(c.tp, c.tp + c.fp + c.fn); }

double BackgroundIou(const Confusion& c) {
  return Ratio(c.tn, c.tn + c.fp + c.fn);
}

EvalReport SummarizeConfusions(std::vector<ImageConfusion> per_image) {
  EvalReport report;
  double sum_artifact = 0.0;
  double sum_miou = 0.0;
  for (const auto& item : per_image) {
    report.aggregate += item.confusion;
    const double a = ArtifactIou(item.confusion);
    sum_artifact += a;
    sum_miou += 0.5 * (a + BackgroundIou(item.confusion));
  }
  report.iou_artifact = ArtifactIou(report.aggregate);
  report.iou_background = BackgroundIou(report.aggregate);
  report.miou = 0.5 * (report.iou_artifact + report.iou_background);
  if (!per_image.empty()) {
    const auto n = static_cast<double>(per_image.size());
    report.mean_image_iou_artifact = sum_artifact / n;
    report.mean_image_miou = sum_miou / n;
  }
  report.per_image = std::move(per_image);
  return report;
}

EvalReport EvaluateMiou(std::span<const EvalPair> pairs) {
  std::vector<ImageConfusion> per_image;
  per_image.reserve(pairs.size());
  for (const auto& pair : pairs) {
    try {
      per_image.push_back({pair.image_id, ConfusionCounts(pair.pred, pair.gt)});
    } catch (const InvalidInputError& e) {
      throw InvalidInputError("image '" + pair.image_id + "': " + e.what());
    }
  }
  return SummarizeConfusions(std::move(per_image));
}

double PermutationTestSampled(std::span<const int> votes,
                              int64_t n_permutations, uint64_t seed) {
  ValidateVotes(votes);
  if (n_permutations < 1) {
    throw InvalidInputError("n_permutations must be at least 1");
  }
  int64_t observed = 0;
  for (int v : votes) observed += v;
  observed = std::llabs(observed);

  std::mt19937_64 rng(seed);
  int64_t extreme = 0;
  for (int64_t i = 0; i < n_permutations; ++i) {
    int64_t sum = 0;
    uint64_t bits = 0;
    for (size_t j = 0; j < votes.size(); ++j) {
      if (j % 64 == 0) bits = rng();
      sum += (bits & 1) ? votes[j] : -votes[j];
      bits >>= 1;
    }
    if (std::llabs(sum) >= observed) ++extreme;
  }
  return static_cast<double>(1 + extreme) /
         static_cast<double>(1 + n_permutations);
}

double PermutationTest(const PreferenceVotes& votes, int64_t n_permutations,
                       uint64_t seed) {
  ValidateVotes(votes.votes);
  if (n_permutations < 1) {
    throw InvalidInputError("n_permutations must be at least 1");
  }
  if (votes.votes.size() <= kExactPermutationLimit) {
    return ExactPermutationTest(votes.votes);
  }
  return PermutationTestSampled(votes.votes, n_permutations, seed);
}

std::map<std::string, bool> HolmBonferroni(
    const std::map<std::string, double>& p_values, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInputError("alpha must be in (0, 1), got " +
                            std::to_string(alpha));
  }
  std::vector<std::pair<double, std::string>> order;
  for (const auto& [task, p] : p_values) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw InvalidInputError("p-value for '" + task + "' must be in (0, 1], got " +
                              std::to_string(p));
    }
    order.emplace_back(p, task);
  }
  std::sort(order.begin(), order.end());
  std::map<std::string, bool> reject;
  for (const auto& [p, task] : order) reject[task] = false;
  const size_t m = order.size();
  for (size_t i = 0; i < m; ++i) {
    if (order[i].first > alpha / static_cast<double>(m - i)) break;
    reject[order[i].second] = true;
  }
  return reject;
}

}  // namespace pal
