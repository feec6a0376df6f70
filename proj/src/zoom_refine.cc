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

#include "pal/zoom_refine.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pal/errors.h"

namespace pal {

namespace {

void RequireShape(const RgbImage& image, const BinaryMask& mask) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw InvalidInputError(
        "image " + std::to_string(image.width()) + "x" +
        std::to_string(image.height()) + " and mask " +
        std::to_string(mask.width()) + "x" + std::to_string(mask.height()) +
        " differ in shape");
  }
}

// Start and length of a window of `side` framing [lo, hi] inside [0, limit).
std::pair<int, int> FrameAxis(int lo, int hi, int side, int limit) {
  if (side >= limit) return {0, limit};
  const int extent = hi - lo + 1;
  int start = lo - (side - extent) / 2;
  start = std::clamp(start, 0, limit - side);
  return {start, side};
}

// Chebyshev distance from each box pixel to the nearest pixel that is inside
// the base image but not in the region mask. Cells one pixel outside the box
// count as unmasked when they are inside the base image.
std::vector<int> EdgeDistance(const BinaryMask& region, const Box& box,
                              int base_width, int base_height) {
  constexpr int kInf = std::numeric_limits<int>::max() / 4;
  const int pw = region.width() + 2;
  const int ph = region.height() + 2;
  std::vector<int> d(static_cast<size_t>(pw) * ph);
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) {
      const int rx = x - 1;
      const int ry = y - 1;
      int v;
      if (region.in_bounds(rx, ry)) {
        v = region.at(rx, ry) ? kInf : 0;
      } else {
        const int bx = box.x0 + rx;
        const int by = box.y0 + ry;
        const bool in_base =
            bx >= 0 && by >= 0 && bx < base_width && by < base_height;
        v = in_base ? 0 : kInf;
      }
      d[static_cast<size_t>(y) * pw + x] = v;
    }
  }
  auto at = [&](int x, int y) -> int& { return d[static_cast<size_t>(y) * pw + x]; };
  // Two-pass chessboard transform.
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) {
      int& v = at(x, y);
      if (v == 0) continue;
      if (x > 0) v = std::min(v, at(x - 1, y) + 1);
      if (y > 0) {
        v = std::min(v, at(x, y - 1) + 1);
        if (x > 0) v = std::min(v, at(x - 1, y - 1) + 1);
        if (x + 1 < pw) v = std::min(v, at(x + 1, y - 1) + 1);
      }
    }
  }
  for (int y = ph - 1; y >= 0; --y) {
    for (int x = pw - 1; x >= 0; --x) {
      int& v = at(x, y);
      if (v == 0) continue;
      if (x + 1 < pw) v = std::min(v, at(x + 1, y) + 1);
      if (y + 1 < ph) {
        v = std::min(v, at(x, y + 1) + 1);
        if (x + 1 < pw) v = std::min(v, at(x + 1, y + 1) + 1);
        if (x > 0) v = std::min(v, at(x - 1, y + 1) + 1);
      }
    }
  }
  std::vector<int> out(static_cast<size_t>(region.width()) * region.height());
  for (int y = 0; y < region.height(); ++y) {
    for (int x = 0; x < region.width(); ++x) {
      out[static_cast<size_t>(y) * region.width() + x] = at(x + 1, y + 1);
    }
  }
  return out;
}

}  // namespace

CropPlan PlanCrops(const BinaryMask& mask, int width, int height, double scale,
                   int dilation_radius, Connectivity connectivity) {
  if (mask.width() != width || mask.height() != height) {
    throw InvalidInputError("mask " + std::to_string(mask.width()) + "x" +
                            std::to_string(mask.height()) +
                            " does not match image " + std::to_string(width) +
                            "x" + std::to_string(height));
  }
  if (!(scale >= 1.0)) {
    throw InvalidInputError("crop scale must be >= 1, got " +
                            std::to_string(scale));
  }
  if (dilation_radius < 0) {
    throw InvalidInputError("dilation radius must be non-negative");
  }
  CropPlan plan;
  plan.source_width = width;
  plan.source_height = height;
  plan.scale = scale;
  plan.dilation_radius = dilation_radius;

  const BinaryMask dilated = Dilate(mask, dilation_radius);
  const ComponentSet components = ConnectedComponents(dilated, connectivity);
  for (const Component& c : components.components) {
    const int longest = std::max(c.bbox.width(), c.bbox.height());
    // The epsilon absorbs representation error such as 1.1 * 10.
    const int side = std::max(
        longest, static_cast<int>(std::ceil(scale * longest - 1e-9)));
    const auto [x0, w] = FrameAxis(c.bbox.x0, c.bbox.x1, side, width);
    const auto [y0, h] = FrameAxis(c.bbox.y0, c.bbox.y1, side, height);
    BinaryMask region(w, h);
    for (const Pixel& p : c.pixels) region.set(p.x - x0, p.y - y0);
    plan.crops.push_back(PlannedCrop{c.label, Box{x0, y0, x0 + w - 1, y0 + h - 1},
                                     std::move(region)});
  }
  return plan;
}

RgbImage CompositePatch(const RgbImage& base, const RgbImage& patch,
                        const Box& box, const BinaryMask& region_mask,
                        int feather) {
  if (box.x0 < 0 || box.y0 < 0 || box.x1 >= base.width() ||
      box.y1 >= base.height() || box.x0 > box.x1 || box.y0 > box.y1) {
    throw InvalidInputError("composite box lies outside the base image");
  }
  if (patch.width() != box.width() || patch.height() != box.height() ||
      region_mask.width() != box.width() ||
      region_mask.height() != box.height()) {
    throw InvalidInputError("patch and region mask must match the box size");
  }
  if (feather < 0) throw InvalidInputError("feather must be non-negative");

  RgbImage out = base;
  std::vector<int> dist;
  if (feather > 0) dist = EdgeDistance(region_mask, box, base.width(), base.height());
  for (int y = 0; y < box.height(); ++y) {
    for (int x = 0; x < box.width(); ++x) {
      if (!region_mask.at(x, y)) continue;
      const int bx = box.x0 + x;
      const int by = box.y0 + y;
      const Rgb p = patch.at(x, y);
      const int d = feather > 0 ? dist[static_cast<size_t>(y) * box.width() + x]
                                : 1;
      if (d >= feather + 1) {
        out.set(bx, by, p);
        continue;
      }
      const double alpha = static_cast<double>(d) / (feather + 1);
      const Rgb b = base.at(bx, by);
      Rgb v;
      for (int k = 0; k < 3; ++k) {
        v[k] = static_cast<uint8_t>(
            std::lround(alpha * p[k] + (1.0 - alpha) * b[k]));
      }
      out.set(bx, by, v);
    }
  }
  return out;
}

RgbImage Refine(const RgbImage& image, const BinaryMask& mask,
                InpainterBackend& inpainter, const RefineOptions& options) {
  RequireShape(image, mask);
  if (mask.empty()) return image;
  const CropPlan plan =
      PlanCrops(mask, image.width(), image.height(), options.scale,
                options.dilation_radius, options.connectivity);
  RgbImage out = image;
  for (const PlannedCrop& crop : plan.crops) {
    // Each crop sees the original pixels, so results do not depend on how
    // earlier crops were filled.
    const RgbImage context = image.Crop(crop.box);
    RgbImage filled = [&] {
      try {
        return inpainter.Inpaint(context, crop.region_mask, options.prompt);
      } catch (const ProtocolError& e) {
        throw ProtocolError("component " + std::to_string(crop.component_label) +
                            ": " + e.what());
      } catch (const std::exception& e) {
        throw PipelineError("inpainting component " +
                                std::to_string(crop.component_label) +
                                " failed: " + e.what(),
                            crop.component_label);
      }
    }();
    out = CompositePatch(out, filled, crop.box, crop.region_mask,
                         options.feather);
  }
  return out;
}

RgbImage NaiveRefine(const RgbImage& image, const BinaryMask& mask,
                     InpainterBackend& inpainter, int dilation_radius,
                     const std::string& prompt) {
  RequireShape(image, mask);
  const BinaryMask dilated = Dilate(mask, dilation_radius);
  if (dilated.empty()) return image;
  const RgbImage filled = inpainter.Inpaint(image, dilated, prompt);
  const Box whole{0, 0, image.width() - 1, image.height() - 1};
  return CompositePatch(image, filled, whole, dilated, /*feather=*/0);
}

}  // namespace pal
