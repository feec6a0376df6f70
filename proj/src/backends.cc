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

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "pal/backends.h"
#include "pal/errors.h"

namespace pal {

namespace {

std::string Dims(int w, int h) {
  return std::to_string(w) + "x" + std::to_string(h);
}

void RequireSameShape(const RgbImage& image, const BinaryMask& mask) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw InvalidInputError("image " + Dims(image.width(), image.height()) +
                            " and mask " + Dims(mask.width(), mask.height()) +
                            " differ in shape");
  }
}

}  // namespace

BinaryMask DetectorBackend::Detect(const std::string& image_id,
                                   const RgbImage& image) {
  BinaryMask mask = DoDetect(image_id, image);
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw ProtocolError("detector '" + name() + "' returned a " +
                        Dims(mask.width(), mask.height()) + " mask for " +
                        Dims(image.width(), image.height()) + " image '" +
                        image_id + "'");
  }
  return mask;
}

RgbImage InpainterBackend::Inpaint(const RgbImage& image,
                                   const BinaryMask& mask,
                                   const std::string& prompt) {
  RequireSameShape(image, mask);
  if (mask.empty()) return image;
  RgbImage out = DoInpaint(image, mask, prompt);
  if (out.width() != image.width() || out.height() != image.height()) {
    throw ProtocolError("inpainter '" + name() + "' returned " +
                        Dims(out.width(), out.height()) + " for a " +
                        Dims(image.width(), image.height()) + " input");
  }
  return out;
}

FileDetector::FileDetector(std::map<std::string, std::string> mask_paths,
                           int threshold)
    : mask_paths_(std::move(mask_paths)), threshold_(threshold) {}

std::vector<std::string> FileDetector::MissingFiles() const {
  std::vector<std::string> missing;
  for (const auto& [id, path] : mask_paths_) {
    if (!std::filesystem::exists(path)) missing.push_back(path);
  }
  return missing;
}

BinaryMask FileDetector::DoDetect(const std::string& image_id,
                                  const RgbImage&) {
  auto it = mask_paths_.find(image_id);
  if (it == mask_paths_.end()) {
    throw LookupError("no precomputed mask for image '" + image_id + "'");
  }
  if (!std::filesystem::exists(it->second)) {
    throw LookupError("mask file '" + it->second + "' for image '" + image_id +
                      "' does not exist");
  }
  return ReadMaskFile(it->second, threshold_);
}

StubDetector::StubDetector(double laplacian_threshold)
    : threshold_(laplacian_threshold) {}

BinaryMask StubDetector::DoDetect(const std::string&, const RgbImage& image) {
  const int w = image.width();
  const int h = image.height();
  std::vector<double> luma(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      luma[static_cast<size_t>(y) * w + x] = Luminance(image.at(x, y));
    }
  }
  // Edge-replicated 4-neighbour Laplacian.
  auto l = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return luma[static_cast<size_t>(y) * w + x];
  };
  BinaryMask response(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double lap =
          l(x - 1, y) + l(x + 1, y) + l(x, y - 1) + l(x, y + 1) - 4 * l(x, y);
      if (std::abs(lap) > threshold_) response.set(x, y);
    }
  }
  return Dilate(Erode(response, 1), 1);
}

StubInpainter::StubInpainter(int boundary_ring) : ring_(boundary_ring) {
  if (boundary_ring < 0) {
    throw InvalidInputError("boundary_ring must be non-negative");
  }
}

RgbImage StubInpainter::DoInpaint(const RgbImage& image,
                                  const BinaryMask& mask, const std::string&) {
  const BinaryMask near = Dilate(mask, ring_);
  int64_t sum_ring[3] = {0, 0, 0};
  int64_t n_ring = 0;
  int64_t sum_all[3] = {0, 0, 0};
  int64_t n_all = 0;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (mask.at(x, y)) continue;
      const Rgb p = image.at(x, y);
      for (int k = 0; k < 3; ++k) sum_all[k] += p[k];
      ++n_all;
      if (near.at(x, y)) {
        for (int k = 0; k < 3; ++k) sum_ring[k] += p[k];
        ++n_ring;
      }
    }
  }
  if (n_all == 0) return image;
  const int64_t* sum = n_ring > 0 ? sum_ring : sum_all;
  const int64_t n = n_ring > 0 ? n_ring : n_all;
  Rgb fill;
  for (int k = 0; k < 3; ++k) {
    fill[k] = static_cast<uint8_t>((sum[k] * 2 + n) / (2 * n));  // round half up
  }
  RgbImage out = image;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (mask.at(x, y)) out.set(x, y, fill);
    }
  }
  return out;
}

std::vector<PromptRule> DefaultPromptRules() {
  return {
      {"ffhq", "a person's face"},
      {"face", "a person's face"},
      {"stylegan2_face", "a person's face"},
      {"ldm_face", "a person's face"},
      {"human", "a person"},
      {"stylegan2_human", "a person"},
      {"virtual_tryon", "a person"},
      {"lsun_bedroom", "bedroom"},
      {"*", kFallbackPrompt},
  };
}

std::string DefaultPrompt(std::span<const PromptRule> rules,
                          const std::string& domain) {
  for (const auto& r : rules) {
    if (r.domain == domain) return r.prompt;
  }
  for (const auto& r : rules) {
    if (r.domain == "*") return r.prompt;
  }
  return kFallbackPrompt;
}

}  // namespace pal
