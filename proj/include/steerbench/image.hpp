// Copyright 2026 The steerbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "steerbench/tensor.hpp"

namespace steer {

/// 8-bit RGB image, row-major HWC.
struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), pixels(static_cast<std::size_t>(h) * w * 3, fill) {}

  std::uint8_t& at(int y, int x, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int y, int x, int c) const { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  bool same_size(const RgbImage& o) const { return height == o.height && width == o.width; }
};

/// Decodes PNG/JPEG/...; throws LoadError when the file is missing or undecodable.
RgbImage read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& image);

/// Area-averaging resize (bilinear when enlarging).
RgbImage resize_image(const RgbImage& image, int height, int width);

/// Bilinear resize of a single-channel float map.
std::vector<float> resize_map(const std::vector<float>& map, int height, int width, int out_height, int out_width);

/// Writes `image` scaled to [0,1] into sample `n` of an NCHW float tensor.
void store_image(const RgbImage& image, Tensor<float>& batch, int n);

/// Sample `n` of an NCHW tensor in [0,1] back to 8-bit RGB (rounded, clamped).
template <typename T>
RgbImage to_rgb(const Tensor<T>& batch, int n) {
  RgbImage img(batch.dim(2), batch.dim(3));
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c) {
        const double v = static_cast<double>(batch.at(n, c, y, x));
        img.at(y, x, c) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
      }
  return img;
}

/// Places images side by side (all must share a height).
RgbImage hstack(const std::vector<RgbImage>& panels);

}  // namespace steer
