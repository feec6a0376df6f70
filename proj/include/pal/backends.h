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

#ifndef PAL_BACKENDS_H_
#define PAL_BACKENDS_H_

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pal/image.h"
#include "pal/mask.h"

namespace pal {

// Artifact detector F. Implementations override DoDetect; Detect enforces
// the shape contract on whatever they return.
class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;

  BinaryMask Detect(const std::string& image_id, const RgbImage& image);

  // 0 means any number of concurrent calls is fine.
  virtual int max_concurrency() const { return 0; }
  virtual std::string name() const = 0;

 protected:
  virtual BinaryMask DoDetect(const std::string& image_id,
                              const RgbImage& image) = 0;
};

// Inpainting model G.
class InpainterBackend {
 public:
  virtual ~InpainterBackend() = default;

  // Identity without touching the backend when `mask` is empty. Throws
  // ProtocolError if the backend returns a different shape.
  RgbImage Inpaint(const RgbImage& image, const BinaryMask& mask,
                   const std::string& prompt);

  virtual int max_concurrency() const { return 0; }
  virtual std::string name() const = 0;

 protected:
  virtual RgbImage DoInpaint(const RgbImage& image, const BinaryMask& mask,
                             const std::string& prompt) = 0;
};

// Masks precomputed on disk, looked up by image id.
class FileDetector : public DetectorBackend {
 public:
  explicit FileDetector(std::map<std::string, std::string> mask_paths,
                        int threshold = 127);

  // Paths in the map that do not exist on disk.
  std::vector<std::string> MissingFiles() const;
  std::string name() const override { return "file"; }

 protected:
  BinaryMask DoDetect(const std::string& image_id,
                      const RgbImage& image) override;

 private:
  std::map<std::string, std::string> mask_paths_;
  int threshold_;
};

// Deterministic content-sensitive detector: |discrete Laplacian of luma| >
// threshold, then a radius-1 opening to drop isolated responses.
class StubDetector : public DetectorBackend {
 public:
  explicit StubDetector(double laplacian_threshold = 40.0);
  std::string name() const override { return "stub"; }

 protected:
  BinaryMask DoDetect(const std::string& image_id,
                      const RgbImage& image) override;

 private:
  double threshold_;
};

// Fills every masked pixel with the mean colour of the unmasked pixels
// within `boundary_ring` of the mask.
class StubInpainter : public InpainterBackend {
 public:
  explicit StubInpainter(int boundary_ring = 3);
  std::string name() const override { return "stub"; }

 protected:
  RgbImage DoInpaint(const RgbImage& image, const BinaryMask& mask,
                     const std::string& prompt) override;

 private:
  int ring_;
};

struct RemoteOptions {
  std::string endpoint;  // http(s)://host[:port][/prefix]
  std::chrono::milliseconds timeout{30000};
  int retries = 2;
  std::chrono::milliseconds initial_backoff{500};
  std::optional<std::string> bearer_token;
  // 1 asks callers to serialize requests; 0 means unlimited.
  int max_concurrency = 0;

  // Empty when valid.
  std::vector<std::string> Validate() const;
};

// POST {endpoint}/segment with a PNG body; expects a PNG mask back.
class RemoteDetector : public DetectorBackend {
 public:
  explicit RemoteDetector(RemoteOptions options);
  bool Healthy() const;
  int max_concurrency() const override { return options_.max_concurrency; }
  std::string name() const override { return "remote"; }

 protected:
  BinaryMask DoDetect(const std::string& image_id,
                      const RgbImage& image) override;

 private:
  RemoteOptions options_;
};

// POST {endpoint}/inpaint as multipart (image, mask, prompt). Inputs whose
// longest side exceeds max_side are downscaled for the round trip, and the
// upscaled answer is only applied under the original mask.
class RemoteInpainter : public InpainterBackend {
 public:
  RemoteInpainter(RemoteOptions options, int max_side = 512);
  bool Healthy() const;
  int max_concurrency() const override { return options_.max_concurrency; }
  std::string name() const override { return "remote"; }

 protected:
  RgbImage DoInpaint(const RgbImage& image, const BinaryMask& mask,
                     const std::string& prompt) override;

 private:
  RemoteOptions options_;
  int max_side_;
};

struct PromptRule {
  std::string domain;  // "*" is the fallback rule
  std::string prompt;
};

inline constexpr const char* kFallbackPrompt =
    "photograph of a beautiful empty scene, highest quality settings";

// Fixed prompts per image domain used for text-guided inpainting.
std::vector<PromptRule> DefaultPromptRules();

// Exact domain match, else the "*" rule, else kFallbackPrompt.
std::string DefaultPrompt(std::span<const PromptRule> rules,
                          const std::string& domain);

}  // namespace pal

#endif  // PAL_BACKENDS_H_
