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

// Desk-scale recipe: synthetic band images and a narrow ResNet.

#pragma once

#include <filesystem>
#include <vector>

#include "steerbench/config.hpp"
#include "steerbench/data.hpp"
#include "steerbench/training.hpp"

namespace steer {

inline constexpr int kToyHeight = 32;
inline constexpr int kToyWidth = 64;
inline constexpr int kToySamples = 500;

struct ToySplit {
  DatasetIndex train_index, val_index;
  SampleSet train{kToyHeight, kToyWidth};
  SampleSet val{kToyHeight, kToyWidth};
};

/// Generates (or regenerates) the toy set in `dir` and splits it 80/20.
ToySplit make_toy_split(const std::filesystem::path& dir, int samples = kToySamples, std::uint64_t seed = 42);

/// Widths (8,16,32,64) on 3x32x64 input.
ModelConfig toy_resnet_config(std::vector<int> block_layers = {1, 1, 1, 1});

/// Attention variant of toy_resnet_config; single-step masks fit the small feature maps.
ModelConfig toy_attention_config(std::vector<int> block_layers = {2, 2, 2, 2}, std::vector<int> stages = {1, 2, 3});

/// 30 epochs, batch 32, Adam at 1e-3.
TrainHyper toy_hyper(std::uint64_t seed = 1);

/// Fraction of the map's total mass inside the band's column span.
double band_share(const std::vector<float>& map, int height, int width, double offset);

}  // namespace steer
