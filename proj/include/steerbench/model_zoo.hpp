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

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "steerbench/attention_module.hpp"
#include "steerbench/config.hpp"
#include "steerbench/engine.hpp"
#include "steerbench/modules.hpp"

namespace steer {

/// A built steering regressor: NCHW images in, one angle (radians) per image out.
template <typename T>
struct Model {
  ModelConfig config;
  std::unique_ptr<Sequential<T>> graph;

  std::int64_t parameter_count() const { return count_parameters(*graph); }
  int residual_units() const { return graph->residual_units(); }

  Shape input_shape(int batch) const {
    return {batch, config.input_shape[0], config.input_shape[1], config.input_shape[2]};
  }

  /// Name of the child whose output is the last feature stage ("layer4" for resnet).
  std::string final_stage() const { return config.family == Family::kResNet ? "layer4" : "stage3"; }

  Linear<T>& head() { return static_cast<Linear<T>&>(*graph->find("fc")); }
};

namespace detail {

template <typename T>
std::unique_ptr<Sequential<T>> resnet_stage(int units, int in, int out, int first_stride) {
  auto stage = std::make_unique<Sequential<T>>();
  for (int u = 0; u < units; ++u)
    stage->add(std::to_string(u), std::make_unique<ResidualUnit<T>>(u == 0 ? in : out, out, u == 0 ? first_stride : 1));
  return stage;
}

/// Parallel 1x1 | 1x1->3x3 | 1x1->5x5 | pool->1x1 branches whose widths sum to `width`.
template <typename T>
std::unique_ptr<Layer<T>> inception_block(int in, int width) {
  const int w1 = width / 4, r3 = width / 4, w3 = width / 2, r5 = std::max(1, width / 16), w5 = width / 8;
  const int wp = width - w1 - w3 - w5;
  auto block = std::make_unique<Concat<T>>();
  block->add(conv_bn_relu<T>(in, w1, 1, 1, 0));
  auto b3 = std::make_unique<Sequential<T>>();
  b3->add("reduce", conv_bn_relu<T>(in, r3, 1, 1, 0));
  b3->add("conv", conv_bn_relu<T>(r3, w3, 3, 1, 1));
  block->add(std::move(b3));
  auto b5 = std::make_unique<Sequential<T>>();
  b5->add("reduce", conv_bn_relu<T>(in, r5, 1, 1, 0));
  b5->add("conv", conv_bn_relu<T>(r5, w5, 5, 1, 2));
  block->add(std::move(b5));
  auto bp = std::make_unique<Sequential<T>>();
  bp->template emplace<MaxPool2d<T>>("pool", 3, 1, 1);
  bp->add("proj", conv_bn_relu<T>(in, wp, 1, 1, 0));
  block->add(std::move(bp));
  return block;
}

/// Stride-2 conv branch concatenated with a stride-2 max-pool branch.
template <typename T>
std::unique_ptr<Layer<T>> grid_reduction(int in, int out) {
  auto r = std::make_unique<Concat<T>>();
  r->add(conv_bn_relu<T>(in, out - in, 3, 2, 1));
  auto pool = std::make_unique<Sequential<T>>();
  pool->template emplace<MaxPool2d<T>>("pool", 3, 2, 1);
  r->add(std::move(pool));
  return r;
}

template <typename T>
std::unique_ptr<Sequential<T>> build_resnet_graph(const ModelConfig& c) {
  auto g = std::make_unique<Sequential<T>>();
  const int stem = c.effective_stem_width();
  auto s = std::make_unique<Sequential<T>>();
  s->template emplace<Conv2d<T>>("conv", c.input_shape[0], stem, 7, 2, 3);
  s->template emplace<BatchNorm2d<T>>("bn", stem);
  s->template emplace<ReLU<T>>("relu");
  s->template emplace<MaxPool2d<T>>("pool", 3, 2, 1);
  g->add("stem", std::move(s));

  int in = stem;
  for (int i = 0; i < 4; ++i) {
    const int stage = i + 1, width = c.stage_widths[static_cast<std::size_t>(i)];
    int units = c.block_layers[static_cast<std::size_t>(i)];
    const bool attend = c.attention && std::count(c.attention->stages.begin(), c.attention->stages.end(), stage);
    if (attend) units -= c.attention->trunk_units;
    g->add("layer" + std::to_string(stage), resnet_stage<T>(units, in, width, i == 0 ? 1 : 2));
    if (attend) {
      // Mask depth is capped by how often the stage's feature map halves evenly.
      const Shape f = g->output_shape({1, c.input_shape[0], c.input_shape[1], c.input_shape[2]});
      AttentionSpec spec = *c.attention;
      int steps = 0;
      while (steps < spec.downsample_steps && f[2] % (2 << steps) == 0 && f[3] % (2 << steps) == 0) ++steps;
      spec.downsample_steps = steps;
      g->add("att" + std::to_string(stage), std::make_unique<AttentionModule<T>>(width, spec));
    }
    in = width;
  }
  g->template emplace<GlobalAvgPool<T>>("pool");
  g->template emplace<Linear<T>>("fc", in, 1);
  return g;
}

template <typename T>
std::unique_ptr<Sequential<T>> build_inception_graph(const ModelConfig& c) {
  auto g = std::make_unique<Sequential<T>>();
  const int stem = c.effective_stem_width();
  auto s = std::make_unique<Sequential<T>>();
  s->add("conv1", conv_bn_relu<T>(c.input_shape[0], stem, 7, 2, 3));
  s->template emplace<MaxPool2d<T>>("pool1", 3, 2, 1);
  s->add("conv2", conv_bn_relu<T>(stem, stem, 1, 1, 0));
  s->add("conv3", conv_bn_relu<T>(stem, 3 * stem, 3, 1, 1));
  s->template emplace<MaxPool2d<T>>("pool2", 3, 2, 1);
  g->add("stem", std::move(s));

  int in = 3 * stem;
  for (int i = 0; i < 3; ++i) {
    const int width = c.stage_widths[static_cast<std::size_t>(i)];
    if (i > 0) {
      g->add("reduce" + std::to_string(i + 1), grid_reduction<T>(in, width));
      in = width;
    }
    auto stage = std::make_unique<Sequential<T>>();
    for (int b = 0; b < c.block_layers[static_cast<std::size_t>(i)]; ++b) {
      stage->add(std::to_string(b), inception_block<T>(in, width));
      in = width;
    }
    g->add("stage" + std::to_string(i + 1), std::move(stage));
  }
  g->template emplace<GlobalAvgPool<T>>("pool");
  g->template emplace<Linear<T>>("fc", in, 1);
  return g;
}

}  // namespace detail

/// Builds and initializes the graph described by `config` (seeded by config.init_seed).
template <typename T>
Model<T> build_model(const ModelConfig& config) {
  config.validate();
  Model<T> m;
  m.config = config;
  m.graph = config.family == Family::kResNet ? detail::build_resnet_graph<T>(config)
                                              : detail::build_inception_graph<T>(config);
  // Surfaces shape errors (e.g. attention resolution constraints) at build time.
  m.graph->output_shape(m.input_shape(1));
  initialize(*m.graph, config.init_seed);
  return m;
}

template <typename T>
Model<T> build_resnet(const std::vector<int>& block_layers, const std::vector<int>& stage_widths = {64, 128, 256, 512},
                      std::array<int, 3> input_shape = {3, 160, 320}, std::uint64_t seed = 0) {
  ModelConfig c = resnet_config(block_layers, stage_widths, input_shape);
  c.init_seed = seed;
  return build_model<T>(c);
}

template <typename T>
Model<T> build_inception(const std::vector<int>& block_layers, std::array<int, 3> input_shape = {3, 160, 320},
                         std::uint64_t seed = 0) {
  ModelConfig c = inception_config(block_layers, {544, 736, 928}, input_shape);
  c.init_seed = seed;
  return build_model<T>(c);
}

/// Inference-mode prediction, one angle per image of an NCHW batch.
template <typename T>
std::vector<T> predict_angle(const Model<T>& model, const Tensor<T>& images) {
  if (images.rank() != 4 || images.shape() != model.input_shape(images.dim(0)))
    throw StructuralError("predict_angle: expected " + shape_str(model.input_shape(images.rank() == 4 ? images.dim(0) : 1)) +
                          ", got " + shape_str(images.shape()));
  const Tensor<T> out = model.graph->infer(images);
  return {out.vec().begin(), out.vec().end()};
}

}  // namespace steer
