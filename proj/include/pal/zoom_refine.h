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

#ifndef PAL_ZOOM_REFINE_H_
#define PAL_ZOOM_REFINE_H_

#include <string>
#include <vector>

#include "pal/backends.h"
#include "pal/image.h"
#include "pal/mask.h"

namespace pal {

inline constexpr double kDefaultCropScale = 1.5;
inline constexpr int kDefaultFeather = 2;

struct PlannedCrop {
  int component_label = 0;
  Box box;
  // The dilated component restricted to `box`; same size as the box.
  BinaryMask region_mask;
};

struct CropPlan {
  std::vector<PlannedCrop> crops;  // ascending component_label
  int source_width = 0;
  int source_height = 0;
  double scale = kDefaultCropScale;
  int dilation_radius = 0;
};

// Dilates `mask`, labels the components of the dilated mask, and frames each
// with a square of side ceil(scale * longest bbox side) centred on the bbox.
// The square is shifted (never shrunk) to stay inside the image and clamped to
// the image when it is larger than an image side.
CropPlan PlanCrops(const BinaryMask& mask, int width, int height,
                   double scale = kDefaultCropScale, int dilation_radius = 0,
                   Connectivity connectivity = Connectivity::kEight);

// Writes `patch` into `base` at `box`, limited to `region_mask`. Inside the
// mask, alpha rises linearly from the mask edge: alpha = min(1, d/(feather+1))
// where d is the Chebyshev distance to the nearest unmasked in-image pixel.
// With feather 0 the masked pixels are copied exactly.
RgbImage CompositePatch(const RgbImage& base, const RgbImage& patch,
                        const Box& box, const BinaryMask& region_mask,
                        int feather);

struct RefineOptions {
  double scale = kDefaultCropScale;
  int dilation_radius = 1;
  int feather = kDefaultFeather;
  Connectivity connectivity = Connectivity::kEight;
  std::string prompt = kFallbackPrompt;
};

// Zoom-in refinement: one inpainter call per planned crop, composited back in
// label order. Pixels outside every crop's region mask are left untouched.
RgbImage Refine(const RgbImage& image, const BinaryMask& mask,
                InpainterBackend& inpainter, const RefineOptions& options);

// Baseline: one inpainter call on the whole image with the dilated mask.
RgbImage NaiveRefine(const RgbImage& image, const BinaryMask& mask,
                     InpainterBackend& inpainter, int dilation_radius,
                     const std::string& prompt = kFallbackPrompt);

}  // namespace pal

#endif  // PAL_ZOOM_REFINE_H_
