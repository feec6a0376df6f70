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

#include "pal/mask.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pal/errors.h"

namespace pal {

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error([&] {
        std::string msg;
        for (const auto& p : problems) {
          if (!msg.empty()) msg += "; ";
          msg += p;
        }
        return msg;
      }()),
      problems_(std::move(problems)) {}

namespace {

void CheckDims(int width, int height) {
  if (width < 1 || height < 1) {
    std::ostringstream os;
    os << "mask dimensions must be positive, got " << width << "x" << height;
    throw InvalidInputError(os.str());
  }
}

std::string Shape(const BinaryMask& m) {
  return std::to_string(m.width()) + "x" + std::to_string(m.height());
}

// 1-D running max (dilate) or min (erode) over a window of +-radius along
// one line of `n` samples spaced `stride` apart.
void FilterLine(const uint8_t* in, uint8_t* out, int n, size_t stride,
                int radius, bool dilate) {
  // Prefix counts of set samples make each window O(1).
  std::vector<int> prefix(n + 1, 0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (in[i * stride] != 0);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - radius);
    const int hi = std::min(n - 1, i + radius);
    const int set = prefix[hi + 1] - prefix[lo];
    out[i * stride] = dilate ? (set > 0) : (set == hi - lo + 1);
  }
}

BinaryMask SeparableFilter(const BinaryMask& mask, int radius, bool dilate) {
  if (radius < 0) throw InvalidInputError("radius must be non-negative");
  if (radius == 0) return mask;
  const int w = mask.width();
  const int h = mask.height();
  std::vector<uint8_t> tmp(mask.size());
  std::vector<uint8_t> out(mask.size());
  const uint8_t* src = mask.bits().data();
  for (int y = 0; y < h; ++y) {
    FilterLine(src + static_cast<size_t>(y) * w, tmp.data() + static_cast<size_t>(y) * w,
               w, 1, radius, dilate);
  }
  for (int x = 0; x < w; ++x) {
    FilterLine(tmp.data() + x, out.data() + x, h, w, radius, dilate);
  }
  return BinaryMask(w, h, std::move(out));
}

// Union-find over provisional labels.
class DisjointSet {
 public:
  int Make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int Find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void Union(int a, int b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    // Keep the smaller label as root so roots follow raster order.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  CheckDims(width, height);
  bits_.assign(static_cast<size_t>(width) * height, 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  CheckDims(width, height);
  if (bits_.size() != static_cast<size_t>(width) * height) {
    throw InvalidInputError("mask bit count " + std::to_string(bits_.size()) +
                            " does not match " + std::to_string(width) + "x" +
                            std::to_string(height));
  }
  for (auto& b : bits_) b = b != 0;
}

BinaryMask BinaryMask::Full(int width, int height) {
  CheckDims(width, height);
  return BinaryMask(width, height,
                    std::vector<uint8_t>(static_cast<size_t>(width) * height, 1));
}

int64_t BinaryMask::count() const {
  return std::accumulate(bits_.begin(), bits_.end(), int64_t{0});
}

BinaryMask BinaryMask::Crop(const Box& box) const {
  if (box.x0 < 0 || box.y0 < 0 || box.x1 >= width_ || box.y1 >= height_ ||
      box.x0 > box.x1 || box.y0 > box.y1) {
    throw InvalidInputError("crop box outside " + Shape(*this));
  }
  BinaryMask out(box.width(), box.height());
  for (int y = box.y0; y <= box.y1; ++y) {
    for (int x = box.x0; x <= box.x1; ++x) {
      out.set(x - box.x0, y - box.y0, at(x, y));
    }
  }
  return out;
}

bool BinaryMask::SubsetOf(const BinaryMask& other) const {
  if (other.width_ != width_ || other.height_ != height_) return false;
  for (size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

Connectivity ParseConnectivity(std::string_view name) {
  if (name == "four" || name == "4") return Connectivity::kFour;
  if (name == "eight" || name == "8") return Connectivity::kEight;
  throw InvalidInputError("unknown connectivity '" + std::string(name) + "'");
}

std::string_view ConnectivityName(Connectivity c) {
  return c == Connectivity::kFour ? "four" : "eight";
}

ComponentSet ConnectedComponents(const BinaryMask& mask,
                                 Connectivity connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> provisional(static_cast<size_t>(w) * h, -1);
  DisjointSet sets;

  // First pass: provisional labels from already-visited neighbours.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      int label = -1;
      auto visit = [&](int nx, int ny) {
        if (!mask.in_bounds(nx, ny)) return;
        const int n = provisional[static_cast<size_t>(ny) * w + nx];
        if (n < 0) return;
        if (label < 0) {
          label = n;
        } else {
          sets.Union(label, n);
        }
      };
      visit(x - 1, y);
      visit(x, y - 1);
      if (connectivity == Connectivity::kEight) {
        visit(x - 1, y - 1);
        visit(x + 1, y - 1);
      }
      if (label < 0) label = sets.Make();
      provisional[static_cast<size_t>(y) * w + x] = label;
    }
  }

  // Second pass: resolve to roots and renumber in raster order.
  ComponentSet result;
  result.connectivity = connectivity;
  std::vector<int> root_to_index;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int p = provisional[static_cast<size_t>(y) * w + x];
      if (p < 0) continue;
      const int root = sets.Find(p);
      if (root >= static_cast<int>(root_to_index.size())) {
        root_to_index.resize(root + 1, -1);
      }
      int& idx = root_to_index[root];
      if (idx < 0) {
        idx = static_cast<int>(result.components.size());
        Component c;
        c.label = idx + 1;
        c.bbox = Box{x, y, x, y};
        result.components.push_back(std::move(c));
      }
      Component& c = result.components[idx];
      c.pixels.push_back(Pixel{x, y});
      c.bbox.x0 = std::min(c.bbox.x0, x);
      c.bbox.x1 = std::max(c.bbox.x1, x);
      c.bbox.y1 = std::max(c.bbox.y1, y);
    }
  }
  for (auto& c : result.components) {
    c.area = static_cast<int64_t>(c.pixels.size());
  }
  return result;
}

BinaryMask Dilate(const BinaryMask& mask, int radius) {
  return SeparableFilter(mask, radius, /*dilate=*/true);
}

BinaryMask Erode(const BinaryMask& mask, int radius) {
  return SeparableFilter(mask, radius, /*dilate=*/false);
}

Box BoundingBox(std::span<const Pixel> pixels) {
  if (pixels.empty()) {
    throw InvalidInputError("bounding box of an empty pixel set");
  }
  Box b{pixels[0].x, pixels[0].y, pixels[0].x, pixels[0].y};
  for (const auto& p : pixels) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

int DefaultDilationRadius(int width, int height, double percent) {
  const double longest = std::max(width, height);
  return std::max(1, static_cast<int>(std::lround(percent / 100.0 * longest)));
}

Confusion ConfusionCounts(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw InvalidInputError("prediction " + Shape(pred) +
                            " and ground truth " + Shape(gt) +
                            " differ in shape");
  }
  Confusion c;
  const auto p = pred.bits();
  const auto g = gt.bits();
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i]) {
      g[i] ? ++c.tp : ++c.fp;
    } else {
      g[i] ? ++c.fn : ++c.tn;
    }
  }
  return c;
}

}  // namespace pal
