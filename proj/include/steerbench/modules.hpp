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
#include <utility>
#include <vector>

#include "steerbench/layers.hpp"

namespace steer {

/// Named chain of layers. Child names become parameter-name prefixes and
/// double as tap points for intermediate gradients.
template <typename T>
class Sequential final : public Layer<T> {
 public:
  Sequential() = default;

  Sequential& add(std::string name, LayerPtr<T> layer) {
    for (const auto& [n, _] : children_)
      if (n == name) throw ConfigError("sequential: duplicate child name '" + name + "'");
    children_.emplace_back(std::move(name), std::move(layer));
    return *this;
  }

  template <typename L, typename... Args>
  L& emplace(std::string name, Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    add(std::move(name), std::move(layer));
    return ref;
  }

  std::string kind() const override { return "sequential"; }

  Shape output_shape(const Shape& in) const override {
    Shape s = in;
    for (const auto& [_, l] : children_) s = l->output_shape(s);
    return s;
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    Tensor<T> h = x;
    for (const auto& [_, l] : children_) h = l->infer(h);
    return h;
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode) override {
    Tensor<T> h = x;
    for (auto& [_, l] : children_) h = l->forward(h, mode);
    return h;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    Tensor<T> d = g;
    for (auto it = children_.rbegin(); it != children_.rend(); ++it) d = it->second->backward(d);
    return d;
  }

  /// Backpropagates from the output down to the output of child `tap` and
  /// returns the gradient with respect to that child's activations.
  Tensor<T> backward_to(const Tensor<T>& g, const std::string& tap) {
    if (!contains(tap)) throw ConfigError("sequential: unknown layer '" + tap + "'");
    Tensor<T> d = g;
    for (auto it = children_.rbegin(); it != children_.rend(); ++it) {
      if (it->first == tap) return d;
      d = it->second->backward(d);
    }
    return d;
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) override {
    for (auto& [n, l] : children_) l->collect(join_name(prefix, n), out);
  }

  int residual_units() const override {
    int n = 0;
    for (const auto& [_, l] : children_) n += l->residual_units();
    return n;
  }

  bool contains(const std::string& name) const {
    for (const auto& [n, _] : children_)
      if (n == name) return true;
    return false;
  }

  Layer<T>* find(const std::string& name) {
    for (auto& [n, l] : children_)
      if (n == name) return l.get();
    return nullptr;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [n, _] : children_) out.push_back(n);
    return out;
  }

  std::size_t size() const { return children_.size(); }

 private:
  std::vector<std::pair<std::string, LayerPtr<T>>> children_;
};

/// Runs every branch on the same input and concatenates along channels.
template <typename T>
class Concat final : public Layer<T> {
 public:
  Concat& add(LayerPtr<T> branch) {
    branches_.push_back(std::move(branch));
    return *this;
  }

  std::string kind() const override { return "concat"; }

  Shape output_shape(const Shape& in) const override {
    if (branches_.empty()) throw StructuralError("concat: no branches");
    Shape out;
    for (const auto& b : branches_) {
      const Shape s = b->output_shape(in);
      detail::require_rank4(s, "concat");
      if (out.empty()) {
        out = s;
        continue;
      }
      if (s[0] != out[0] || s[2] != out[2] || s[3] != out[3])
        throw StructuralError("concat: branch shapes " + shape_str(out) + " and " + shape_str(s));
      out[1] += s[1];
    }
    return out;
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    std::vector<Tensor<T>> parts;
    for (const auto& b : branches_) parts.push_back(b->infer(x));
    return join(parts);
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode) override {
    std::vector<Tensor<T>> parts;
    channels_.clear();
    for (auto& b : branches_) {
      parts.push_back(b->forward(x, mode));
      channels_.push_back(parts.back().dim(1));
    }
    return join(parts);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    const int n = g.dim(0), total = g.dim(1);
    const std::size_t plane = static_cast<std::size_t>(g.dim(2)) * g.dim(3);
    Tensor<T> dx;
    int offset = 0;
    for (std::size_t b = 0; b < branches_.size(); ++b) {
      const int c = channels_[b];
      Tensor<T> part({n, c, g.dim(2), g.dim(3)});
      for (int i = 0; i < n; ++i)
        std::copy_n(g.data() + (static_cast<std::size_t>(i) * total + offset) * plane, c * plane,
                    part.data() + static_cast<std::size_t>(i) * c * plane);
      Tensor<T> d = branches_[b]->backward(part);
      if (b == 0)
        dx = std::move(d);
      else
        dx += d;
      offset += c;
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) override {
    for (std::size_t b = 0; b < branches_.size(); ++b)
      branches_[b]->collect(join_name(prefix, "branch" + std::to_string(b)), out);
  }

  int residual_units() const override {
    int n = 0;
    for (const auto& b : branches_) n += b->residual_units();
    return n;
  }

 private:
  static Tensor<T> join(const std::vector<Tensor<T>>& parts) {
    const int n = parts[0].dim(0), h = parts[0].dim(2), w = parts[0].dim(3);
    int total = 0;
    for (const auto& p : parts) total += p.dim(1);
    Tensor<T> y({n, total, h, w});
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    int offset = 0;
    for (const auto& p : parts) {
      const int c = p.dim(1);
      for (int i = 0; i < n; ++i)
        std::copy_n(p.data() + static_cast<std::size_t>(i) * c * plane, c * plane,
                    y.data() + (static_cast<std::size_t>(i) * total + offset) * plane);
      offset += c;
    }
    return y;
  }

  std::vector<LayerPtr<T>> branches_;
  std::vector<int> channels_;
};

template <typename T>
std::unique_ptr<Sequential<T>> conv_bn_relu(int in, int out, int kernel, int stride, int pad) {
  auto s = std::make_unique<Sequential<T>>();
  s->template emplace<Conv2d<T>>("conv", in, out, kernel, stride, pad);
  s->template emplace<BatchNorm2d<T>>("bn", out);
  s->template emplace<ReLU<T>>("relu");
  return s;
}

/// Basic two-convolution residual unit: relu(bn(conv(relu(bn(conv(x))))) + shortcut(x)).
/// The shortcut is a 1x1 projection when stride or width changes, identity otherwise.
template <typename T>
class ResidualUnit final : public Layer<T> {
 public:
  ResidualUnit(int in, int out, int stride) {
    main_.template emplace<Conv2d<T>>("conv1", in, out, 3, stride, 1);
    main_.template emplace<BatchNorm2d<T>>("bn1", out);
    main_.template emplace<ReLU<T>>("relu");
    main_.template emplace<Conv2d<T>>("conv2", out, out, 3, 1, 1);
    main_.template emplace<BatchNorm2d<T>>("bn2", out);
    if (stride != 1 || in != out) {
      shortcut_ = std::make_unique<Sequential<T>>();
      shortcut_->template emplace<Conv2d<T>>("conv", in, out, 1, stride, 0);
      shortcut_->template emplace<BatchNorm2d<T>>("bn", out);
    }
  }

  std::string kind() const override { return "residual_unit"; }
  Shape output_shape(const Shape& in) const override {
    const Shape s = main_.output_shape(in);
    const Shape sc = shortcut_ ? shortcut_->output_shape(in) : in;
    if (s != sc) throw StructuralError("residual_unit: branch shapes differ " + shape_str(s) + " vs " + shape_str(sc));
    return s;
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    Tensor<T> h = main_.infer(x);
    h += shortcut_ ? shortcut_->infer(x) : x;
    return relu_.infer(h);
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode) override {
    Tensor<T> h = main_.forward(x, mode);
    h += shortcut_ ? shortcut_->forward(x, mode) : x;
    return relu_.forward(h, mode);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    const Tensor<T> d = relu_.backward(g);
    Tensor<T> dx = main_.backward(d);
    dx += shortcut_ ? shortcut_->backward(d) : d;
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) override {
    main_.collect(prefix, out);
    if (shortcut_) shortcut_->collect(join_name(prefix, "shortcut"), out);
  }

  int residual_units() const override { return 1; }

 private:
  Sequential<T> main_;
  std::unique_ptr<Sequential<T>> shortcut_;
  ReLU<T> relu_;
};

}  // namespace steer
