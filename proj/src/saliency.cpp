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

#include "steerbench/saliency.hpp"

#include <algorithm>
#include <cmath>

#include "steerbench/errors.hpp"

namespace steer {

SaliencyMap saliency_map(Model<float>& model, const Tensor<float>& image, const std::string& layer) {
  const Shape want = model.input_shape(1);
  if (image.shape() != want)
    throw StructuralError("saliency_map: expected " + shape_str(want) + ", got " + shape_str(image.shape()));
  Sequential<float>& g = *model.graph;
  std::string tap = layer;
  if (layer == "layer4" && !g.contains("layer4")) tap = model.final_stage();
  if (tap != "input" && !g.contains(tap)) throw ConfigError("saliency: unknown layer '" + layer + "'");

  g.output_shape(image.shape());
  const Tensor<float> out = g.forward(image, Mode::kEval);
  const Tensor<float> seed(out.shape(), 1.0f);
  const Tensor<float> grad = tap == "input" ? g.backward(seed) : g.backward_to(seed, tap);
  zero_grad(g);

  const int c = grad.dim(1), h = grad.dim(2), w = grad.dim(3);
  std::vector<float> raw(static_cast<std::size_t>(h) * w, 0.0f);
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        float& r = raw[static_cast<std::size_t>(y) * w + x];
        r = std::max(r, std::abs(grad.at(0, ch, y, x)));
      }

  SaliencyMap map;
  map.height = want[2];
  map.width = want[3];
  map.source_layer = tap;
  map.values = resize_map(raw, h, w, map.height, map.width);
  const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
  const float mn = *lo, mx = *hi;
  // A constant nonzero map has no contrast; it normalizes to all ones.
  for (auto& v : map.values) v = mx > mn ? (v - mn) / (mx - mn) : (mx > 0.0f ? 1.0f : 0.0f);
  return map;
}

SaliencyMap saliency_map(Model<float>& model, const RgbImage& image, const std::string& layer) {
  Tensor<float> t(model.input_shape(1));
  store_image(image, t, 0);
  return saliency_map(model, t, layer);
}

std::array<std::uint8_t, 3> colormap(float v) {
  if (!(v >= 0.0f && v <= 1.0f)) throw StructuralError("colormap: value " + std::to_string(v) + " outside [0,1]");
  const auto q = [](double x) { return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 255.0))); };
  if (v <= 0.5f) return {q(510.0 * v), 0, 0};
  return {255, q(510.0 * (v - 0.5)), 0};
}

RgbImage colorize(const SaliencyMap& map) {
  if (map.values.size() != static_cast<std::size_t>(map.height) * map.width)
    throw StructuralError("colorize: map size does not match its dimensions");
  RgbImage img(map.height, map.width);
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      const auto rgb = colormap(map.at(y, x));
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = rgb[static_cast<std::size_t>(c)];
    }
  return img;
}

RgbImage blend(const RgbImage& original, const RgbImage& colorized, double ratio, BlendOrientation orientation) {
  if (!original.same_size(colorized))
    throw StructuralError("blend: image sizes differ (" + std::to_string(original.height) + "x" +
                          std::to_string(original.width) + " vs " + std::to_string(colorized.height) + "x" +
                          std::to_string(colorized.width) + ")");
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("blend: ratio must lie in [0,1]");
  const double wc = orientation == BlendOrientation::kOverlay ? ratio : 1.0 - ratio;
  RgbImage out(original.height, original.width);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const double v = wc * colorized.pixels[i] + (1.0 - wc) * original.pixels[i];
    out.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
  }
  return out;
}

RgbImage saliency_overlay(Model<float>& model, const RgbImage& image, const std::string& layer, double ratio,
                          BlendOrientation orientation) {
  const Shape s = model.input_shape(1);
  const RgbImage sized = resize_image(image, s[2], s[3]);
  return blend(sized, colorize(saliency_map(model, sized, layer)), ratio, orientation);
}

RgbImage saliency_strip(Model<float>& baseline, Model<float>& attention, const RgbImage& image,
                        const std::string& layer, double ratio, BlendOrientation orientation) {
  const Shape s = baseline.input_shape(1);
  if (attention.input_shape(1) != s) throw StructuralError("saliency_strip: models disagree on input shape");
  return hstack({resize_image(image, s[2], s[3]), saliency_overlay(baseline, image, layer, ratio, orientation),
                 saliency_overlay(attention, image, layer, ratio, orientation)});
}

}  // namespace steer
