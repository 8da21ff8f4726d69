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
#include <string>
#include <vector>

#include "steerbench/config.hpp"
#include "steerbench/modules.hpp"

namespace steer {

/// Trunk/mask attention module operating at a fixed channel width.
///
/// Trunk: `trunk_units` residual units, resolution preserving.
/// Mask:  k down-sampling steps (2x2 max-pool then 3x3 conv-bn-relu), then k
///        nearest 2x up-sampling steps. Each up-sampled map is fused with the
///        mirrored-resolution encoder map by elementwise addition (when skip
///        connections are on), a 1x1 conv + sigmoid selects, and the combine
///        rule amplifies the trunk output:
///          mask_times_trunk:        out = M(x) * T(x)
///          residual_one_plus_mask:  out = (1 + M(x)) * T(x)
template <typename T>
class AttentionModule final : public Layer<T> {
 public:
  AttentionModule(int channels, const AttentionSpec& spec) : channels_(channels), spec_(spec) {
    if (spec.trunk_units < 1) throw ConfigError("attention: trunk_units must be >= 1");
    if (spec.downsample_steps < 0) throw ConfigError("attention: downsample_steps must be >= 0");
    for (int i = 0; i < spec.trunk_units; ++i)
      trunk_.add(std::to_string(i), std::make_unique<ResidualUnit<T>>(channels, channels, 1));
    for (int j = 0; j < spec.downsample_steps; ++j) {
      pools_.push_back(std::make_unique<MaxPool2d<T>>(2, 2));
      downs_.push_back(conv_bn_relu<T>(channels, channels, 3, 1, 1));
      ups_.push_back(std::make_unique<Upsample<T>>(2));
    }
    head_ = std::make_unique<Conv2d<T>>(channels, channels, 1, 1, 0, true);
  }

  std::string kind() const override { return "attention_module"; }

  Shape output_shape(const Shape& in) const override {
    detail::require_rank4(in, "attention");
    if (in[1] != channels_)
      throw StructuralError("attention: expected " + std::to_string(channels_) + " channels, got " + shape_str(in));
    const int div = 1 << spec_.downsample_steps;
    if (in[2] % div != 0 || in[3] % div != 0)
      throw ConfigError("attention: spatial size " + std::to_string(in[2]) + "x" + std::to_string(in[3]) +
                        " is not divisible by 2^" + std::to_string(spec_.downsample_steps));
    return trunk_.output_shape(in);
  }

  /// Spatial resolutions visited by the mask branch, input resolution first.
  std::vector<std::pair<int, int>> mask_resolutions(const Shape& in) const {
    output_shape(in);
    std::vector<std::pair<int, int>> r{{in[2], in[3]}};
    for (int j = 0; j < spec_.downsample_steps; ++j) r.emplace_back(r.back().first / 2, r.back().second / 2);
    for (int j = spec_.downsample_steps - 1; j >= 0; --j) r.push_back(r[static_cast<std::size_t>(j)]);
    return r;
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    output_shape(x.shape());
    return combine(mask_infer(x), trunk_.infer(x));
  }

  /// M(x): same shape as the trunk output, values in (0, 1).
  Tensor<T> extract_mask(const Tensor<T>& x) const {
    output_shape(x.shape());
    return mask_infer(x);
  }

  Tensor<T> trunk_output(const Tensor<T>& x) const {
    output_shape(x.shape());
    return trunk_.infer(x);
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode) override {
    output_shape(x.shape());
    trunk_out_ = trunk_.forward(x, mode);
    const int k = spec_.downsample_steps;
    std::vector<Tensor<T>> feats{x};
    for (int j = 0; j < k; ++j) feats.push_back(downs_[j]->forward(pools_[j]->forward(feats.back(), mode), mode));
    Tensor<T> u = feats.back();
    for (int j = k - 1; j >= 0; --j) {
      u = ups_[j]->forward(u, mode);
      if (spec_.skip_connections) u += feats[static_cast<std::size_t>(j)];
    }
    mask_ = sigmoid_.forward(head_->forward(u, mode), mode);
    return combine(mask_, trunk_out_);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    Tensor<T> g_mask(g.shape()), g_trunk(g.shape());
    const bool residual = spec_.combine_rule == CombineRule::kResidualOnePlusMask;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g_mask[i] = g[i] * trunk_out_[i];
      g_trunk[i] = g[i] * (residual ? T(1) + mask_[i] : mask_[i]);
    }
    Tensor<T> dx = trunk_.backward(g_trunk);

    const int k = spec_.downsample_steps;
    Tensor<T> gu = head_->backward(sigmoid_.backward(g_mask));
    std::vector<Tensor<T>> g_feats(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j < k; ++j) {
      if (spec_.skip_connections) accumulate(g_feats[static_cast<std::size_t>(j)], gu);
      gu = ups_[j]->backward(gu);
    }
    accumulate(g_feats[static_cast<std::size_t>(k)], gu);
    for (int j = k; j >= 1; --j) {
      Tensor<T> gp = pools_[j - 1]->backward(downs_[j - 1]->backward(g_feats[static_cast<std::size_t>(j)]));
      accumulate(g_feats[static_cast<std::size_t>(j - 1)], gp);
    }
    dx += g_feats[0];
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) override {
    trunk_.collect(join_name(prefix, "trunk"), out);
    for (std::size_t j = 0; j < downs_.size(); ++j)
      downs_[j]->collect(join_name(prefix, "mask.down" + std::to_string(j)), out);
    head_->collect(join_name(prefix, "mask.head"), out);
  }

  int residual_units() const override { return trunk_.residual_units(); }

  const AttentionSpec& spec() const { return spec_; }
  int channels() const { return channels_; }
  Conv2d<T>& mask_head() { return *head_; }

 private:
  Tensor<T> mask_infer(const Tensor<T>& x) const {
    const int k = spec_.downsample_steps;
    std::vector<Tensor<T>> feats{x};
    for (int j = 0; j < k; ++j) feats.push_back(downs_[j]->infer(pools_[j]->infer(feats.back())));
    Tensor<T> u = feats.back();
    for (int j = k - 1; j >= 0; --j) {
      u = ups_[j]->infer(u);
      if (spec_.skip_connections) u += feats[static_cast<std::size_t>(j)];
    }
    return sigmoid_.infer(head_->infer(u));
  }

  Tensor<T> combine(const Tensor<T>& mask, const Tensor<T>& trunk) const {
    mask.require_same(trunk, "attention combine");
    Tensor<T> out(trunk.shape());
    const bool residual = spec_.combine_rule == CombineRule::kResidualOnePlusMask;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (residual ? T(1) + mask[i] : mask[i]) * trunk[i];
    return out;
  }

  static void accumulate(Tensor<T>& acc, const Tensor<T>& v) {
    if (acc.empty())
      acc = v;
    else
      acc += v;
  }

  int channels_;
  AttentionSpec spec_;
  Sequential<T> trunk_;
  std::vector<std::unique_ptr<MaxPool2d<T>>> pools_;
  std::vector<std::unique_ptr<Sequential<T>>> downs_;
  std::vector<std::unique_ptr<Upsample<T>>> ups_;
  std::unique_ptr<Conv2d<T>> head_;
  Sigmoid<T> sigmoid_;
  Tensor<T> trunk_out_, mask_;
};

}  // namespace steer
