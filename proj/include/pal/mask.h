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

#ifndef PAL_MASK_H_
#define PAL_MASK_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pal {

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel& a, const Pixel& b) {
    // Raster order: row first.
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

// Inclusive pixel rectangle.
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  bool contains(int x, int y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  bool contains(const Box& o) const {
    return o.x0 >= x0 && o.x1 <= x1 && o.y0 >= y0 && o.y1 <= y1;
  }
  friend bool operator==(const Box&, const Box&) = default;
};

// Row-major boolean grid; true marks an artifact pixel.
class BinaryMask {
 public:
  // Empty (all false) mask. Throws InvalidInputError on a zero dimension.
  BinaryMask(int width, int height);
  // Takes ownership of `bits` (non-zero = set). Size must be width*height.
  BinaryMask(int width, int height, std::vector<uint8_t> bits);

  static BinaryMask Full(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  int64_t size() const { return static_cast<int64_t>(width_) * height_; }

  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  int64_t count() const;
  bool empty() const { return count() == 0; }

  // Raw 0/1 bytes, row-major.
  std::span<const uint8_t> bits() const { return bits_; }

  // Sub-grid covered by `box`, which must lie inside this mask.
  BinaryMask Crop(const Box& box) const;

  // Every set pixel of `this` is also set in `other` (same dimensions).
  bool SubsetOf(const BinaryMask& other) const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  size_t index(int x, int y) const {
    return static_cast<size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::vector<uint8_t> bits_;
};

enum class Connectivity { kFour, kEight };

// Parses "four"/"4" or "eight"/"8".
Connectivity ParseConnectivity(std::string_view name);
std::string_view ConnectivityName(Connectivity c);

struct Component {
  int label = 0;
  int64_t area = 0;
  Box bbox;
  std::vector<Pixel> pixels;  // raster order
};

struct ComponentSet {
  std::vector<Component> components;
  Connectivity connectivity = Connectivity::kEight;

  size_t size() const { return components.size(); }
};

// Labels foreground components; label k (1-based) belongs to the component
// whose first pixel in raster order comes k-th.
ComponentSet ConnectedComponents(const BinaryMask& mask,
                                 Connectivity connectivity =
                                     Connectivity::kEight);

// Square structuring element of side 2*radius+1 (Chebyshev ball).
BinaryMask Dilate(const BinaryMask& mask, int radius);

// Dual of Dilate. Positions outside the grid are ignored, so a full mask
// stays full.
BinaryMask Erode(const BinaryMask& mask, int radius);

// Tight bounding box. Throws InvalidInputError on an empty set.
Box BoundingBox(std::span<const Pixel> pixels);

// max(1, round(percent/100 * max(width, height))).
int DefaultDilationRadius(int width, int height, double percent = 1.0);

struct Confusion {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t tn = 0;

  int64_t total() const { return tp + fp + fn + tn; }
  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Pixel counts for the artifact class. Throws InvalidInputError when the
// masks' shapes differ.
Confusion ConfusionCounts(const BinaryMask& pred, const BinaryMask& gt);

// Decodes a grayscale or RGB(A) PNG. A pixel is set iff its luminance
// (Rec. 601 for colour input) exceeds `threshold`. `name` is used in error
// messages.
BinaryMask DecodeMask(std::span<const uint8_t> png_bytes, int threshold = 127,
                      std::string_view name = "<memory>");
// 8-bit grayscale PNG with values {0, 255}.
std::vector<uint8_t> EncodeMask(const BinaryMask& mask);

BinaryMask ReadMaskFile(const std::string& path, int threshold = 127);

}  // namespace pal

#endif  // PAL_MASK_H_
