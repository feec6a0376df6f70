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

#ifndef PAL_IMAGE_H_
#define PAL_IMAGE_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pal/mask.h"

namespace pal {

using Rgb = std::array<uint8_t, 3>;

// Row-major 8-bit RGB image.
class RgbImage {
 public:
  RgbImage(int width, int height, Rgb fill = {0, 0, 0});
  RgbImage(int width, int height, std::vector<uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }

  Rgb at(int x, int y) const {
    const size_t i = index(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }
  void set(int x, int y, Rgb v) {
    const size_t i = index(x, y);
    pixels_[i] = v[0];
    pixels_[i + 1] = v[1];
    pixels_[i + 2] = v[2];
  }

  std::span<const uint8_t> data() const { return pixels_; }

  RgbImage Crop(const Box& box) const;
  // Copies `patch` into the rectangle starting at (x0, y0).
  void Paste(const RgbImage& patch, int x0, int y0);

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  size_t index(int x, int y) const {
    return (static_cast<size_t>(y) * width_ + x) * 3;
  }

  int width_;
  int height_;
  std::vector<uint8_t> pixels_;
};

// Rec. 601 luma in [0, 255].
inline double Luminance(Rgb p) {
  return 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
}

// Per-pixel integer class ids (e.g. a semantic segmentation map).
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int32_t> ids;

  int32_t at(int x, int y) const {
    return ids[static_cast<size_t>(y) * width + x];
  }
};

RgbImage DecodeRgb(std::span<const uint8_t> png_bytes,
                   std::string_view name = "<memory>");
std::vector<uint8_t> EncodeRgb(const RgbImage& image);
RgbImage ReadRgbFile(const std::string& path);

// 8-bit single-channel PNG; pixel value is the class id.
LabelMap DecodeLabelMap(std::span<const uint8_t> png_bytes,
                        std::string_view name = "<memory>");
LabelMap ReadLabelMapFile(const std::string& path);

// 8-bit grayscale PNG from raw bytes.
std::vector<uint8_t> EncodeGray(int width, int height,
                                std::span<const uint8_t> values);

// Half-pixel-centred bilinear resampling.
RgbImage ResizeBilinear(const RgbImage& image, int width, int height);
// A destination pixel is set if the bilinear footprint touches any set
// source pixel, so small regions never vanish on downscale.
BinaryMask ResizeMaskConservative(const BinaryMask& mask, int width,
                                  int height);
BinaryMask ResizeMaskNearest(const BinaryMask& mask, int width, int height);

std::vector<uint8_t> ReadFileBytes(const std::string& path);
// Writes through a temporary sibling and renames into place.
void WriteFileAtomic(const std::string& path, std::span<const uint8_t> bytes);
void WriteFileAtomic(const std::string& path, std::string_view text);

}  // namespace pal

#endif  // PAL_IMAGE_H_
