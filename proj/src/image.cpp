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

#include "steerbench/image.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "steerbench/errors.hpp"

namespace steer {
namespace {

cv::Mat to_bgr_mat(const RgbImage& img) {
  cv::Mat rgb(img.height, img.width, CV_8UC3, const_cast<std::uint8_t*>(img.pixels.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

RgbImage from_bgr_mat(const cv::Mat& bgr) {
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  RgbImage img(rgb.rows, rgb.cols);
  for (int y = 0; y < rgb.rows; ++y)
    std::copy_n(rgb.ptr<std::uint8_t>(y), static_cast<std::size_t>(rgb.cols) * 3,
                img.pixels.data() + static_cast<std::size_t>(y) * rgb.cols * 3);
  return img;
}

}  // namespace

RgbImage read_image(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw LoadError("image not found: " + path.string());
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (m.empty()) throw LoadError("cannot decode image: " + path.string());
  return from_bgr_mat(m);
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), to_bgr_mat(image), {cv::IMWRITE_PNG_COMPRESSION, 6}))
    throw LoadError("cannot write image: " + path.string());
}

RgbImage resize_image(const RgbImage& image, int height, int width) {
  if (image.height == height && image.width == width) return image;
  const bool shrink = height <= image.height && width <= image.width;
  cv::Mat out;
  cv::resize(to_bgr_mat(image), out, cv::Size(width, height), 0, 0, shrink ? cv::INTER_AREA : cv::INTER_LINEAR);
  return from_bgr_mat(out);
}

std::vector<float> resize_map(const std::vector<float>& map, int height, int width, int out_height, int out_width) {
  if (map.size() != static_cast<std::size_t>(height) * width) throw StructuralError("resize_map: size mismatch");
  if (height == out_height && width == out_width) return map;
  cv::Mat in(height, width, CV_32F, const_cast<float*>(map.data()));
  cv::Mat out;
  cv::resize(in, out, cv::Size(out_width, out_height), 0, 0, cv::INTER_LINEAR);
  std::vector<float> r(static_cast<std::size_t>(out_height) * out_width);
  for (int y = 0; y < out_height; ++y) std::copy_n(out.ptr<float>(y), out_width, r.data() + static_cast<std::size_t>(y) * out_width);
  return r;
}

void store_image(const RgbImage& image, Tensor<float>& batch, int n) {
  if (batch.rank() != 4 || batch.dim(1) != 3 || batch.dim(2) != image.height || batch.dim(3) != image.width)
    throw StructuralError("store_image: image " + std::to_string(image.height) + "x" + std::to_string(image.width) +
                          " does not fit batch " + shape_str(batch.shape()));
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x)
      for (int c = 0; c < 3; ++c) batch.at(n, c, y, x) = static_cast<float>(image.at(y, x, c)) / 255.0f;
}

RgbImage hstack(const std::vector<RgbImage>& panels) {
  if (panels.empty()) throw StructuralError("hstack: no panels");
  int width = 0;
  for (const auto& p : panels) {
    if (p.height != panels[0].height) throw StructuralError("hstack: panel heights differ");
    width += p.width;
  }
  RgbImage out(panels[0].height, width);
  int x0 = 0;
  for (const auto& p : panels) {
    for (int y = 0; y < p.height; ++y)
      std::copy_n(p.pixels.data() + static_cast<std::size_t>(y) * p.width * 3, static_cast<std::size_t>(p.width) * 3,
                  out.pixels.data() + (static_cast<std::size_t>(y) * width + x0) * 3);
    x0 += p.width;
  }
  return out;
}

}  // namespace steer
