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

// Primitive layers. Every layer has two evaluation paths:
//   infer()    - const, uses running statistics, caches nothing;
//   forward()  - records what backward() needs for the most recent input.
// backward() returns dL/dinput and accumulates dL/dparam into Param::grad.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "steerbench/tensor.hpp"

namespace steer {

/// kTrainFrozen normalizes with batch statistics but leaves running statistics untouched.
enum class Mode { kTrain, kTrainFrozen, kEval };

enum class ParamInit { kFanIn, kZero, kOne };

template <typename T>
struct Param {
  Tensor<T> value;
  Tensor<T> grad;
  bool trainable = true;
  ParamInit init = ParamInit::kZero;
  int fan_in = 0;

  static Param make(Shape shape, ParamInit init, int fan_in = 0, bool trainable = true) {
    Param p;
    p.value = Tensor<T>(shape);
    p.grad = Tensor<T>(shape);
    p.trainable = trainable;
    p.init = init;
    p.fan_in = fan_in;
    if (init == ParamInit::kOne) p.value.fill(T(1));
    return p;
  }
};

template <typename T>
struct NamedParam {
  std::string name;
  Param<T>* param;
};

inline std::string join_name(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string kind() const = 0;
  virtual Shape output_shape(const Shape& in) const = 0;
  virtual Tensor<T> infer(const Tensor<T>& x) const = 0;
  virtual Tensor<T> forward(const Tensor<T>& x, Mode mode) = 0;
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
  virtual void collect(const std::string& /*prefix*/, std::vector<NamedParam<T>>& /*out*/) {}
  virtual int residual_units() const { return 0; }
};

template <typename T>
using LayerPtr = std::unique_ptr<Layer<T>>;

namespace detail {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

inline void require_rank4(const Shape& s, const std::string& who) {
  if (s.size() != 4) throw StructuralError(who + ": expected NCHW input, got " + shape_str(s));
}

inline int pooled_extent(int in, int k, int stride, int pad) { return (in + 2 * pad - k) / stride + 1; }

// col is (C*k*k) x (Ho*Wo), row-major.
template <typename T>
void im2col(const T* x, int channels, int height, int width, int k, int stride, int pad, int out_h,
            int out_w, T* col) {
  const int plane = out_h * out_w;
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        T* row = col + static_cast<std::size_t>((c * k + ky) * k + kx) * plane;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - pad + ky;
          T* dst = row + oy * out_w;
          if (iy < 0 || iy >= height) {
            std::fill(dst, dst + out_w, T(0));
            continue;
          }
          const T* src = x + (static_cast<std::size_t>(c) * height + iy) * width;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - pad + kx;
            dst[ox] = (ix < 0 || ix >= width) ? T(0) : src[ix];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, int channels, int height, int width, int k, int stride, int pad,
                int out_h, int out_w, T* x) {
  const int plane = out_h * out_w;
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T* row = col + static_cast<std::size_t>((c * k + ky) * k + kx) * plane;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= height) continue;
          T* dst = x + (static_cast<std::size_t>(c) * height + iy) * width;
          const T* src = row + oy * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < width) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

template <typename T>
T stable_sigmoid(T v) {
  if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
  const T e = std::exp(v);
  return e / (T(1) + e);
}

}  // namespace detail

template <typename T>
class Identity final : public Layer<T> {
 public:
  std::string kind() const override { return "identity"; }
  Shape output_shape(const Shape& in) const override { return in; }
  Tensor<T> infer(const Tensor<T>& x) const override { return x; }
  Tensor<T> forward(const Tensor<T>& x, Mode) override { return x; }
  Tensor<T> backward(const Tensor<T>& g) override { return g; }
};

/// 2D convolution via im2col + GEMM. Weight layout is (out, in, k, k).
template <typename T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(int in_channels, int out_channels, int kernel, int stride = 1, int pad = 0, bool bias = false)
      : in_(in_channels), out_(out_channels), k_(kernel), stride_(stride), pad_(pad), has_bias_(bias) {
    if (in_ < 1 || out_ < 1 || k_ < 1 || stride_ < 1 || pad_ < 0)
      throw ConfigError("conv2d: invalid geometry");
    const int fan_in = in_ * k_ * k_;
    weight_ = Param<T>::make({out_, in_, k_, k_}, ParamInit::kFanIn, fan_in);
    if (has_bias_) bias_ = Param<T>::make({out_}, ParamInit::kZero);
  }

  std::string kind() const override { return "conv2d"; }

  Shape output_shape(const Shape& in) const override {
    detail::require_rank4(in, "conv2d");
    if (in[1] != in_)
      throw StructuralError("conv2d: expected " + std::to_string(in_) + " channels, got " +
                            shape_str(in));
    const int oh = detail::pooled_extent(in[2], k_, stride_, pad_);
    const int ow = detail::pooled_extent(in[3], k_, stride_, pad_);
    if (oh < 1 || ow < 1) throw StructuralError("conv2d: input too small " + shape_str(in));
    return {in[0], out_, oh, ow};
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    const Shape os = output_shape(x.shape());
    Tensor<T> y(os);
    const int h = x.dim(2), w = x.dim(3), oh = os[2], ow = os[3];
    const int rows = in_ * k_ * k_, plane = oh * ow;
    std::vector<T> col;
    detail::ConstMatMap<T> wm(weight_.value.data(), out_, rows);
    for (int n = 0; n < x.dim(0); ++n) {
      const T* xn = x.data() + static_cast<std::size_t>(n) * in_ * h * w;
      detail::MatMap<T> yn(y.data() + static_cast<std::size_t>(n) * out_ * plane, out_, plane);
      if (pointwise()) {
        yn.noalias() = wm * detail::ConstMatMap<T>(xn, in_, plane);
      } else {
        col.resize(static_cast<std::size_t>(rows) * plane);
        detail::im2col(xn, in_, h, w, k_, stride_, pad_, oh, ow, col.data());
        yn.noalias() = wm * detail::ConstMatMap<T>(col.data(), rows, plane);
      }
      if (has_bias_)
        for (int o = 0; o < out_; ++o) yn.row(o).array() += bias_.value[o];
    }
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x, Mode) override {
    input_ = x;
    return infer(x);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    const Shape os = output_shape(input_.shape());
    if (g.shape() != os) throw StructuralError("conv2d.backward: gradient shape " + shape_str(g.shape()));
    Tensor<T> dx(input_.shape());
    const int h = input_.dim(2), w = input_.dim(3), oh = os[2], ow = os[3];
    const int rows = in_ * k_ * k_, plane = oh * ow;
    detail::ConstMatMap<T> wm(weight_.value.data(), out_, rows);
    detail::MatMap<T> dw(weight_.grad.data(), out_, rows);
    std::vector<T> col, dcol(static_cast<std::size_t>(rows) * plane);
    for (int n = 0; n < input_.dim(0); ++n) {
      const T* xn = input_.data() + static_cast<std::size_t>(n) * in_ * h * w;
      T* dxn = dx.data() + static_cast<std::size_t>(n) * in_ * h * w;
      detail::ConstMatMap<T> gn(g.data() + static_cast<std::size_t>(n) * out_ * plane, out_, plane);
      if (pointwise()) {
        dw.noalias() += gn * detail::ConstMatMap<T>(xn, in_, plane).transpose();
        detail::MatMap<T>(dxn, in_, plane).noalias() = wm.transpose() * gn;
      } else {
        col.resize(static_cast<std::size_t>(rows) * plane);
        detail::im2col(xn, in_, h, w, k_, stride_, pad_, oh, ow, col.data());
        dw.noalias() += gn * detail::ConstMatMap<T>(col.data(), rows, plane).transpose();
        detail::MatMap<T>(dcol.data(), rows, plane).noalias() = wm.transpose() * gn;
        detail::col2im_add(dcol.data(), in_, h, w, k_, stride_, pad_, oh, ow, dxn);
      }
      if (has_bias_)
        for (int o = 0; o < out_; ++o) bias_.grad[o] += gn.row(o).sum();
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) override {
    out.push_back({join_name(prefix, "weight"), &weight_});
    if (has_bias_) out.push_back({join_name(prefix, "bias"), &bias_});
  }

  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  bool pointwise() const { return k_ == 1 && stride_ == 1 && pad_ == 0; }

  int in_, out_, k_, stride_, pad_;
  bool has_bias_;
  Param<T> weight_, bias_;
  Tensor<T> input_;
};

template <typename T>
class MaxPool2d final : public Layer<T> {
 public:
  MaxPool2d(int kernel, int stride, int pad = 0) : k_(kernel), stride_(stride), pad_(pad) {
    if (k_ < 1 || stride_ < 1 || pad_ < 0 || pad_ >= k_) throw ConfigError("maxpool2d: invalid geometry");
  }

  std::string kind() const override { return "maxpool2d"; }

  Shape output_shape(const Shape& in) const override {
    detail::require_rank4(in, "maxpool2d");
    const int oh = detail::pooled_extent(in[2], k_, stride_, pad_);
    const int ow = detail::pooled_extent(in[3], k_, stride_, pad_);
    if (oh < 1 || ow < 1) throw StructuralError("maxpool2d: input too small " + shape_str(in));
    return {in[0], in[1], oh, ow};
  }

  Tensor<T> infer(const Tensor<T>& x) const override { return run(x, nullptr); }

  Tensor<T> forward(const Tensor<T>& x, Mode) override {
    in_shape_ = x.shape();
    return run(x, &argmax_);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    Tensor<T> dx(in_shape_);
    for (std::size_t i = 0; i < g.size(); ++i) dx[argmax_[i]] += g[i];
    return dx;
  }

 private:
  Tensor<T> run(const Tensor<T>& x, std::vector<std::size_t>* argmax) const {
    const Shape os = output_shape(x.shape());
    Tensor<T> y(os);
    if (argmax) argmax->assign(y.size(), 0);
    const int h = x.dim(2), w = x.dim(3);
    std::size_t o = 0;
    for (int nc = 0; nc < os[0] * os[1]; ++nc) {
      const std::size_t base = static_cast<std::size_t>(nc) * h * w;
      for (int oy = 0; oy < os[2]; ++oy) {
        for (int ox = 0; ox < os[3]; ++ox, ++o) {
          T best = -std::numeric_limits<T>::infinity();
          std::size_t best_i = base;
          for (int ky = 0; ky < k_; ++ky) {
            const int iy = oy * stride_ - pad_ + ky;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < k_; ++kx) {
              const int ix = ox * stride_ - pad_ + kx;
              if (ix < 0 || ix >= w) continue;
              const std::size_t i = base + static_cast<std::size_t>(iy) * w + ix;
              if (x[i] > best) {
                best = x[i];
                best_i = i;
              }
            }
          }
          y[o] = best;
          if (argmax) (*argmax)[o] = best_i;
        }
      }
    }
    return y;
  }

  int k_, stride_, pad_;
  Shape in_shape_;
  std::vector<std::size_t> argmax_;
};

/// Average pooling; padded cells count toward the k*k divisor.
template <typename T>
class AvgPool2d final : public Layer<T> {
 public:
  AvgPool2d(int kernel, int stride, int pad = 0) : k_(kernel), stride_(stride), pad_(pad) {
    if (k_ < 1 || stride_ < 1 || pad_ < 0 || pad_ >= k_) throw ConfigError("avgpool2d: invalid geometry");
  }

  std::string kind() const override { return "avgpool2d"; }

  Shape output_shape(const Shape& in) const override {
    detail::require_rank4(in, "avgpool2d");
    const int oh = detail::pooled_extent(in[2], k_, stride_, pad_);
    const int ow = detail::pooled_extent(in[3], k_, stride_, pad_);
    if (oh < 1 || ow < 1) throw StructuralError("avgpool2d: input too small " + shape_str(in));
    return {in[0], in[1], oh, ow};
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    const Shape os = output_shape(x.shape());
    Tensor<T> y(os);
    const T scale = T(1) / static_cast<T>(k_ * k_);
    visit(x.shape(), os, [&](std::size_t o, std::size_t i) { y[o] += x[i] * scale; });
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x, Mode) override {
    in_shape_ = x.shape();
    return infer(x);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    Tensor<T> dx(in_shape_);
    const T scale = T(1) / static_cast<T>(k_ * k_);
    visit(in_shape_, output_shape(in_shape_), [&](std::size_t o, std::size_t i) { dx[i] += g[o] * scale; });
    return dx;
  }

 private:
  template <typename F>
  void visit(const Shape& is, const Shape& os, F&& f) const {
    const int h = is[2], w = is[3];
    std::size_t o = 0;
    for (int nc = 0; nc < os[0] * os[1]; ++nc) {
      const std::size_t base = static_cast<std::size_t>(nc) * h * w;
      for (int oy = 0; oy < os[2]; ++oy)
        for (int ox = 0; ox < os[3]; ++ox, ++o)
          for (int ky = 0; ky < k_; ++ky) {
            const int iy = oy * stride_ - pad_ + ky;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < k_; ++kx) {
              const int ix = ox * stride_ - pad_ + kx;
              if (ix >= 0 && ix < w) f(o, base + static_cast<std::size_t>(iy) * w + ix);
            }
          }
    }
  }

  int k_, stride_, pad_;
  Shape in_shape_;
};

/// NCHW -> NC.
template <typename T>
class GlobalAvgPool final : public Layer<T> {
 public:
  std::string kind() const override { return "global_avgpool"; }

  Shape output_shape(const Shape& in) const override {
    detail::require_rank4(in, "global_avgpool");
    return {in[0], in[1]};
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    Tensor<T> y(output_shape(x.shape()));
    const std::size_t plane = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
    for (std::size_t i = 0; i < y.size(); ++i) {
      T s = 0;
      for (std::size_t j = 0; j < plane; ++j) s += x[i * plane + j];
      y[i] = s / static_cast<T>(plane);
    }
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x, Mode) override {
    in_shape_ = x.shape();
    return infer(x);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    Tensor<T> dx(in_shape_);
    const std::size_t plane = static_cast<std::size_t>(in_shape_[2]) * in_shape_[3];
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < plane; ++j) dx[i * plane + j] = g[i] / static_cast<T>(plane);
    return dx;
  }

 private:
  Shape in_shape_;
};

/// Per-channel normalization. Train mode normalizes with batch statistics and
/// updates the running estimates; eval mode uses the running estimates.
template <typename T>
class BatchNorm2d final : public Layer<T> {
 public:
  explicit BatchNorm2d(int channels, double momentum = 0.1, double eps = 1e-5)
      : c_(channels), momentum_(static_cast<T>(momentum)), eps_(static_cast<T>(eps)) {
    gamma_ = Param<T>::make({c_}, ParamInit::kOne);
    beta_ = Param<T>::make({c_}, ParamInit::kZero);
    running_mean_ = Param<T>::make({c_}, ParamInit::kZero, 0, false);
    running_var_ = Param<T>::make({c_}, ParamInit::kOne, 0, false);
  }

  std::string kind() const override { return "batchnorm2d"; }

  Shape output_shape(const Shape& in) const override {
    detail::require_rank4(in, "batchnorm2d");
    if (in[1] != c_) throw StructuralError("batchnorm2d: channel mismatch " + shape_str(in));
    return in;
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    output_shape(x.shape());
    Tensor<T> y(x.shape());
    for_each_channel(x.shape(), [&](int c, std::size_t i) {
      const T inv = T(1) / std::sqrt(running_var_.value[c] + eps_);
      y[i] = gamma_.value[c] * (x[i] - running_mean_.value[c]) * inv + beta_.value[c];
    });
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode) override {
    output_shape(x.shape());
    mode_ = mode;
    in_shape_ = x.shape();
    inv_std_.assign(c_, T(0));
    if (mode == Mode::kEval) {
      xhat_ = Tensor<T>(x.shape());
      for (int c = 0; c < c_; ++c) inv_std_[c] = T(1) / std::sqrt(running_var_.value[c] + eps_);
      for_each_channel(x.shape(), [&](int c, std::size_t i) {
        xhat_[i] = (x[i] - running_mean_.value[c]) * inv_std_[c];
      });
    } else {
      const std::size_t m = count_per_channel(x.shape());
      std::vector<T> mean(c_, T(0)), var(c_, T(0));
      for_each_channel(x.shape(), [&](int c, std::size_t i) { mean[c] += x[i]; });
      for (auto& v : mean) v /= static_cast<T>(m);
      for_each_channel(x.shape(), [&](int c, std::size_t i) {
        const T d = x[i] - mean[c];
        var[c] += d * d;
      });
      for (int c = 0; c < c_; ++c) {
        var[c] /= static_cast<T>(m);
        inv_std_[c] = T(1) / std::sqrt(var[c] + eps_);
        if (mode == Mode::kTrainFrozen) continue;
        const T unbiased = m > 1 ? var[c] * static_cast<T>(m) / static_cast<T>(m - 1) : var[c];
        running_mean_.value[c] = (T(1) - momentum_) * running_mean_.value[c] + momentum_ * mean[c];
        running_var_.value[c] = (T(1) - momentum_) * running_var_.value[c] + momentum_ * unbiased;
      }
      xhat_ = Tensor<T>(x.shape());
      for_each_channel(x.shape(), [&](int c, std::size_t i) { xhat_[i] = (x[i] - mean[c]) * inv_std_[c]; });
    }
    Tensor<T> y(x.shape());
    for_each_channel(x.shape(), [&](int c, std::size_t i) {
      y[i] = gamma_.value[c] * xhat_[i] + beta_.value[c];
    });
    return y;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    std::vector<T> sum_g(c_, T(0)), sum_gx(c_, T(0));
    for_each_channel(in_shape_, [&](int c, std::size_t i) {
      sum_g[c] += g[i];
      sum_gx[c] += g[i] * xhat_[i];
    });
    for (int c = 0; c < c_; ++c) {
      beta_.grad[c] += sum_g[c];
      gamma_.grad[c] += sum_gx[c];
    }
    Tensor<T> dx(in_shape_);
    if (mode_ == Mode::kEval) {
      for_each_channel(in_shape_, [&](int c, std::size_t i) { dx[i] = g[i] * gamma_.value[c] * inv_std_[c]; });
    } else {
      const T m = static_cast<T>(count_per_channel(in_shape_));
      for_each_channel(in_shape_, [&](int c, std::size_t i) {
        dx[i] = gamma_.value[c] * inv_std_[c] / m * (m * g[i] - sum_g[c] - xhat_[i] * sum_gx[c]);
      });
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) override {
    out.push_back({join_name(prefix, "gamma"), &gamma_});
    out.push_back({join_name(prefix, "beta"), &beta_});
    out.push_back({join_name(prefix, "running_mean"), &running_mean_});
    out.push_back({join_name(prefix, "running_var"), &running_var_});
  }

 private:
  static std::size_t count_per_channel(const Shape& s) {
    return static_cast<std::size_t>(s[0]) * s[2] * s[3];
  }

  template <typename F>
  void for_each_channel(const Shape& s, F&& f) const {
    const std::size_t plane = static_cast<std::size_t>(s[2]) * s[3];
    std::size_t i = 0;
    for (int n = 0; n < s[0]; ++n)
      for (int c = 0; c < s[1]; ++c)
        for (std::size_t j = 0; j < plane; ++j, ++i) f(c, i);
  }

  int c_;
  T momentum_, eps_;
  Param<T> gamma_, beta_, running_mean_, running_var_;
  Mode mode_ = Mode::kEval;
  Shape in_shape_;
  Tensor<T> xhat_;
  std::vector<T> inv_std_;
};

template <typename T>
class ReLU final : public Layer<T> {
 public:
  std::string kind() const override { return "relu"; }
  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<T> infer(const Tensor<T>& x) const override {
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x, Mode) override {
    input_ = x;
    return infer(x);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    Tensor<T> dx(g.shape());
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] = input_[i] > T(0) ? g[i] : T(0);
    return dx;
  }

 private:
  Tensor<T> input_;
};

template <typename T>
class Sigmoid final : public Layer<T> {
 public:
  std::string kind() const override { return "sigmoid"; }
  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<T> infer(const Tensor<T>& x) const override {
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = detail::stable_sigmoid(x[i]);
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x, Mode) override {
    output_ = infer(x);
    return output_;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    Tensor<T> dx(g.shape());
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] = g[i] * output_[i] * (T(1) - output_[i]);
    return dx;
  }

 private:
  Tensor<T> output_;
};

/// Fully-connected layer on NF input. Weight layout is (out, in).
template <typename T>
class Linear final : public Layer<T> {
 public:
  Linear(int in_features, int out_features, bool bias = true)
      : in_(in_features), out_(out_features), has_bias_(bias) {
    if (in_ < 1 || out_ < 1) throw ConfigError("linear: invalid size");
    weight_ = Param<T>::make({out_, in_}, ParamInit::kFanIn, in_);
    if (has_bias_) bias_ = Param<T>::make({out_}, ParamInit::kZero);
  }

  std::string kind() const override { return "linear"; }

  Shape output_shape(const Shape& in) const override {
    if (in.size() != 2 || in[1] != in_)
      throw StructuralError("linear: expected [N," + std::to_string(in_) + "], got " + shape_str(in));
    return {in[0], out_};
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    Tensor<T> y(output_shape(x.shape()));
    const int n = x.dim(0);
    detail::MatMap<T> ym(y.data(), n, out_);
    ym.noalias() = detail::ConstMatMap<T>(x.data(), n, in_) *
                   detail::ConstMatMap<T>(weight_.value.data(), out_, in_).transpose();
    if (has_bias_)
      for (int r = 0; r < n; ++r)
        for (int o = 0; o < out_; ++o) ym(r, o) += bias_.value[o];
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x, Mode) override {
    input_ = x;
    return infer(x);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    const int n = input_.dim(0);
    detail::ConstMatMap<T> gm(g.data(), n, out_);
    detail::MatMap<T>(weight_.grad.data(), out_, in_).noalias() +=
        gm.transpose() * detail::ConstMatMap<T>(input_.data(), n, in_);
    if (has_bias_)
      for (int r = 0; r < n; ++r)
        for (int o = 0; o < out_; ++o) bias_.grad[o] += gm(r, o);
    Tensor<T> dx(input_.shape());
    detail::MatMap<T>(dx.data(), n, in_).noalias() =
        gm * detail::ConstMatMap<T>(weight_.value.data(), out_, in_);
    return dx;
  }

  void collect(const std::string& prefix, std::vector<NamedParam<T>>& out) override {
    out.push_back({join_name(prefix, "weight"), &weight_});
    if (has_bias_) out.push_back({join_name(prefix, "bias"), &bias_});
  }

  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  int in_, out_;
  bool has_bias_;
  Param<T> weight_, bias_;
  Tensor<T> input_;
};

/// Nearest-neighbour up-sampling by an integer factor.
template <typename T>
class Upsample final : public Layer<T> {
 public:
  explicit Upsample(int factor) : f_(factor) {
    if (f_ < 1) throw ConfigError("upsample: factor must be >= 1");
  }

  std::string kind() const override { return "upsample_nearest"; }

  Shape output_shape(const Shape& in) const override {
    detail::require_rank4(in, "upsample");
    return {in[0], in[1], in[2] * f_, in[3] * f_};
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    Tensor<T> y(output_shape(x.shape()));
    const int h = x.dim(2), w = x.dim(3), oh = h * f_, ow = w * f_;
    for (int nc = 0; nc < x.dim(0) * x.dim(1); ++nc)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox)
          y[(static_cast<std::size_t>(nc) * oh + oy) * ow + ox] =
              x[(static_cast<std::size_t>(nc) * h + oy / f_) * w + ox / f_];
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x, Mode) override {
    in_shape_ = x.shape();
    return infer(x);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    Tensor<T> dx(in_shape_);
    const int h = in_shape_[2], w = in_shape_[3], oh = h * f_, ow = w * f_;
    for (int nc = 0; nc < in_shape_[0] * in_shape_[1]; ++nc)
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox)
          dx[(static_cast<std::size_t>(nc) * h + oy / f_) * w + ox / f_] +=
              g[(static_cast<std::size_t>(nc) * oh + oy) * ow + ox];
    return dx;
  }

 private:
  int f_;
  Shape in_shape_;
};

}  // namespace steer
