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

#include <string>
#include <vector>

#include "steerbench/image.hpp"
#include "steerbench/model_zoo.hpp"

namespace steer {

/// Normalized saliency at input resolution, row-major.
struct SaliencyMap {
  int height = 0;
  int width = 0;
  std::vector<float> values;  // in [0,1]
  std::string source_layer;

  float at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// |d prediction / d activations| of `layer`, max over channels, bilinearly
/// resized to the input and min-max normalized. `layer` is "input", any
/// top-level child name ("stem", "layer1", ..., "att2"), or "layer4" for the
/// final feature stage of either family. Unknown names are a ConfigError.
SaliencyMap saliency_map(Model<float>& model, const Tensor<float>& image, const std::string& layer = "layer4");
SaliencyMap saliency_map(Model<float>& model, const RgbImage& image, const std::string& layer = "layer4");

/// Piecewise-linear black (0) -> red (0.5) -> yellow (1).
std::array<std::uint8_t, 3> colormap(float v);
/// StructuralError when any value is outside [0,1].
RgbImage colorize(const SaliencyMap& map);

enum class BlendOrientation {
  kOverlay,   // ratio weights the colorized map
  kOriginal,  // ratio weights the original image
};

/// out = ratio * colorized + (1 - ratio) * original (kOverlay), rounded and clamped.
RgbImage blend(const RgbImage& original, const RgbImage& colorized, double ratio,
               BlendOrientation orientation = BlendOrientation::kOverlay);

inline constexpr double kDefaultBlendRatio = 0.75;

/// Image with its saliency overlay; the image is resized to the model input first.
RgbImage saliency_overlay(Model<float>& model, const RgbImage& image, const std::string& layer = "layer4",
                          double ratio = kDefaultBlendRatio, BlendOrientation orientation = BlendOrientation::kOverlay);

/// original | baseline overlay | attention overlay.
RgbImage saliency_strip(Model<float>& baseline, Model<float>& attention, const RgbImage& image,
                        const std::string& layer = "layer4", double ratio = kDefaultBlendRatio,
                        BlendOrientation orientation = BlendOrientation::kOverlay);

}  // namespace steer
