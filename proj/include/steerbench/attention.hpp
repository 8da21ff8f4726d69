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

#include <memory>
#include <vector>

#include "steerbench/attention_module.hpp"
#include "steerbench/model_zoo.hpp"

namespace steer {

/// `input_shape` is NCHW (or CHW); the spatial extent must be divisible by
/// 2^spec.downsample_steps.
template <typename T>
std::unique_ptr<AttentionModule<T>> build_attention_module(const Shape& input_shape, const AttentionSpec& spec) {
  const Shape s = input_shape.size() == 3 ? Shape{1, input_shape[0], input_shape[1], input_shape[2]} : input_shape;
  detail::require_rank4(s, "build_attention_module");
  auto m = std::make_unique<AttentionModule<T>>(s[1], spec);
  m->output_shape(s);
  return m;
}

template <typename T>
Tensor<T> apply_attention(const AttentionModule<T>& module, const Tensor<T>& features) {
  return module.infer(features);
}

template <typename T>
Tensor<T> extract_mask(const AttentionModule<T>& module, const Tensor<T>& input) {
  return module.extract_mask(input);
}

/// Attention variant of a resnet config. Each attention module takes its trunk
/// units from the stage it follows, so the residual unit count is unchanged.
inline ModelConfig attention_config(ModelConfig base, const std::vector<int>& insertion_stages,
                                    AttentionSpec spec = {}) {
  if (base.family != Family::kResNet) throw ConfigError("attention variants require a resnet base config");
  base.validate();
  if (insertion_stages.empty()) {
    base.attention.reset();
    return base;
  }
  spec.stages = insertion_stages;
  base.attention = spec;
  base.validate();
  return base;
}

template <typename T>
Model<T> build_attention_resnet(const ModelConfig& base, const std::vector<int>& insertion_stages,
                                const AttentionSpec& spec = {}) {
  return build_model<T>(attention_config(base, insertion_stages, spec));
}

template <typename T>
std::vector<AttentionModule<T>*> attention_modules(Model<T>& model) {
  std::vector<AttentionModule<T>*> out;
  for (const auto& name : model.graph->names())
    if (auto* a = dynamic_cast<AttentionModule<T>*>(model.graph->find(name))) out.push_back(a);
  return out;
}

}  // namespace steer
