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

#include "pal/image.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "pal/errors.h"

namespace pal {

namespace {

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3
  std::vector<uint8_t> pixels;
};

// Decodes to 8-bit gray when the file has no colour, RGB otherwise.
DecodedPng DecodePng(std::span<const uint8_t> bytes, std::string_view name,
                     bool force_rgb) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw DecodeError("cannot decode image '" + std::string(name) + "': " + msg);
  }
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw InvalidInputError("image '" + std::string(name) + "' has zero area");
  }
  const bool color = force_rgb || (image.format & PNG_FORMAT_FLAG_COLOR);
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  DecodedPng out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.channels = color ? 3 : 1;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  png_color background{0, 0, 0};
  if (!png_image_finish_read(&image, &background, out.pixels.data(), 0,
                             nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw DecodeError("cannot decode image '" + std::string(name) + "': " + msg);
  }
  return out;
}

std::vector<uint8_t> EncodePng(int width, int height, int channels,
                               std::span<const uint8_t> pixels) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0,
                                 nullptr)) {
    throw Error(std::string("png encode failed: ") + image.message);
  }
  std::vector<uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(),
                                 0, nullptr)) {
    throw Error(std::string("png encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void CheckImageDims(int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidInputError("image dimensions must be positive, got " +
                            std::to_string(width) + "x" +
                            std::to_string(height));
  }
}

// Source coordinate and weight for half-pixel-centred resampling.
struct Tap {
  int i0;
  int i1;
  double t;
};

std::vector<Tap> BilinearTaps(int src, int dst) {
  std::vector<Tap> taps(dst);
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const int i1 = std::min(i0 + 1, src - 1);
    taps[i] = Tap{i0, i1, s - i0};
  }
  return taps;
}

}  // namespace

RgbImage::RgbImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  CheckImageDims(width, height);
  pixels_.resize(static_cast<size_t>(width) * height * 3);
  for (size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill[0];
    pixels_[i + 1] = fill[1];
    pixels_[i + 2] = fill[2];
  }
}

RgbImage::RgbImage(int width, int height, std::vector<uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  CheckImageDims(width, height);
  if (pixels_.size() != static_cast<size_t>(width) * height * 3) {
    throw InvalidInputError("pixel buffer size does not match " +
                            std::to_string(width) + "x" +
                            std::to_string(height) + " RGB");
  }
}

RgbImage RgbImage::Crop(const Box& box) const {
  if (box.x0 < 0 || box.y0 < 0 || box.x1 >= width_ || box.y1 >= height_ ||
      box.x0 > box.x1 || box.y0 > box.y1) {
    throw InvalidInputError("crop box outside image");
  }
  RgbImage out(box.width(), box.height());
  for (int y = 0; y < out.height_; ++y) {
    const auto src = pixels_.begin() + index(box.x0, box.y0 + y);
    std::copy(src, src + out.width_ * 3, out.pixels_.begin() + out.index(0, y));
  }
  return out;
}

void RgbImage::Paste(const RgbImage& patch, int x0, int y0) {
  if (x0 < 0 || y0 < 0 || x0 + patch.width_ > width_ ||
      y0 + patch.height_ > height_) {
    throw InvalidInputError("paste outside image");
  }
  for (int y = 0; y < patch.height_; ++y) {
    const auto src = patch.pixels_.begin() + patch.index(0, y);
    std::copy(src, src + patch.width_ * 3, pixels_.begin() + index(x0, y0 + y));
  }
}

BinaryMask DecodeMask(std::span<const uint8_t> png_bytes, int threshold,
                      std::string_view name) {
  if (threshold < 0 || threshold > 255) {
    throw InvalidInputError("mask threshold must be in [0, 255], got " +
                            std::to_string(threshold));
  }
  const DecodedPng png = DecodePng(png_bytes, name, /*force_rgb=*/false);
  std::vector<uint8_t> bits(static_cast<size_t>(png.width) * png.height);
  if (png.channels == 1) {
    for (size_t i = 0; i < bits.size(); ++i) bits[i] = png.pixels[i] > threshold;
  } else {
    // Integer Rec. 601 weights (x1000) keep the comparison exact.
    for (size_t i = 0; i < bits.size(); ++i) {
      const uint8_t* p = &png.pixels[i * 3];
      const int luma1000 = 299 * p[0] + 587 * p[1] + 114 * p[2];
      bits[i] = luma1000 > threshold * 1000;
    }
  }
  return BinaryMask(png.width, png.height, std::move(bits));
}

std::vector<uint8_t> EncodeMask(const BinaryMask& mask) {
  std::vector<uint8_t> gray(mask.bits().begin(), mask.bits().end());
  for (auto& v : gray) v = v ? 255 : 0;
  return EncodePng(mask.width(), mask.height(), 1, gray);
}

BinaryMask ReadMaskFile(const std::string& path, int threshold) {
  return DecodeMask(ReadFileBytes(path), threshold, path);
}

RgbImage DecodeRgb(std::span<const uint8_t> png_bytes, std::string_view name) {
  DecodedPng png = DecodePng(png_bytes, name, /*force_rgb=*/true);
  return RgbImage(png.width, png.height, std::move(png.pixels));
}

std::vector<uint8_t> EncodeRgb(const RgbImage& image) {
  return EncodePng(image.width(), image.height(), 3, image.data());
}

RgbImage ReadRgbFile(const std::string& path) {
  return DecodeRgb(ReadFileBytes(path), path);
}

LabelMap DecodeLabelMap(std::span<const uint8_t> png_bytes,
                        std::string_view name) {
  const DecodedPng png = DecodePng(png_bytes, name, /*force_rgb=*/false);
  if (png.channels != 1) {
    throw DecodeError("label map '" + std::string(name) +
                      "' must be single-channel");
  }
  LabelMap map;
  map.width = png.width;
  map.height = png.height;
  map.ids.assign(png.pixels.begin(), png.pixels.end());
  return map;
}

LabelMap ReadLabelMapFile(const std::string& path) {
  return DecodeLabelMap(ReadFileBytes(path), path);
}

std::vector<uint8_t> EncodeGray(int width, int height,
                                std::span<const uint8_t> values) {
  CheckImageDims(width, height);
  if (values.size() != static_cast<size_t>(width) * height) {
    throw InvalidInputError("gray buffer size does not match dimensions");
  }
  return EncodePng(width, height, 1, values);
}

RgbImage ResizeBilinear(const RgbImage& image, int width, int height) {
  if (width == image.width() && height == image.height()) return image;
  const auto xs = BilinearTaps(image.width(), width);
  const auto ys = BilinearTaps(image.height(), height);
  RgbImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const Tap& ty = ys[y];
    for (int x = 0; x < width; ++x) {
      const Tap& tx = xs[x];
      const Rgb a = image.at(tx.i0, ty.i0);
      const Rgb b = image.at(tx.i1, ty.i0);
      const Rgb c = image.at(tx.i0, ty.i1);
      const Rgb d = image.at(tx.i1, ty.i1);
      Rgb v;
      for (int k = 0; k < 3; ++k) {
        const double top = a[k] + (b[k] - a[k]) * tx.t;
        const double bottom = c[k] + (d[k] - c[k]) * tx.t;
        v[k] = static_cast<uint8_t>(
            std::clamp(std::lround(top + (bottom - top) * ty.t), 0L, 255L));
      }
      out.set(x, y, v);
    }
  }
  return out;
}

BinaryMask ResizeMaskConservative(const BinaryMask& mask, int width,
                                  int height) {
  if (width == mask.width() && height == mask.height()) return mask;
  BinaryMask out(width, height);
  const double sx = static_cast<double>(mask.width()) / width;
  const double sy = static_cast<double>(mask.height()) / height;
  for (int y = 0; y < height; ++y) {
    const int y0 = static_cast<int>(std::floor(y * sy));
    const int y1 = std::min(mask.height() - 1,
                            static_cast<int>(std::ceil((y + 1) * sy)) - 1);
    for (int x = 0; x < width; ++x) {
      const int x0 = static_cast<int>(std::floor(x * sx));
      const int x1 = std::min(mask.width() - 1,
                              static_cast<int>(std::ceil((x + 1) * sx)) - 1);
      bool any = false;
      for (int v = y0; v <= std::max(y0, y1) && !any; ++v) {
        for (int u = x0; u <= std::max(x0, x1) && !any; ++u) {
          any = mask.at(u, v);
        }
      }
      out.set(x, y, any);
    }
  }
  return out;
}

BinaryMask ResizeMaskNearest(const BinaryMask& mask, int width, int height) {
  if (width == mask.width() && height == mask.height()) return mask;
  BinaryMask out(width, height);
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(
        mask.height() - 1,
        static_cast<int>((y + 0.5) * mask.height() / height));
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(
          mask.width() - 1, static_cast<int>((x + 0.5) * mask.width() / width));
      out.set(x, y, mask.at(sx, sy));
    }
  }
  return out;
}

std::vector<uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open file '" + path + "'");
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void WriteFileAtomic(const std::string& path, std::span<const uint8_t> bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

void WriteFileAtomic(const std::string& path, std::string_view text) {
  WriteFileAtomic(path, std::span<const uint8_t>(
                            reinterpret_cast<const uint8_t*>(text.data()),
                            text.size()));
}

}  // namespace pal
