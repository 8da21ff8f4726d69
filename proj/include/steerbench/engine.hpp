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

// Graph-level operations over any Layer: parameter bookkeeping, evaluation,
// reverse-mode gradients and the central-difference gradient check.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "steerbench/layers.hpp"
#include "steerbench/rng.hpp"

namespace steer {

template <typename T>
std::vector<NamedParam<T>> parameters(Layer<T>& graph) {
  std::vector<NamedParam<T>> out;
  graph.collect("", out);
  return out;
}

/// Number of trainable scalars. Running statistics are not counted.
template <typename T>
std::int64_t count_parameters(Layer<T>& graph) {
  std::int64_t n = 0;
  for (const auto& p : parameters(graph))
    if (p.param->trainable) n += static_cast<std::int64_t>(p.param->value.size());
  return n;
}

template <typename T>
void zero_grad(Layer<T>& graph) {
  for (auto& p : parameters(graph)) p.param->grad.fill(T(0));
}

/// Fan-in scaled uniform weights, zero biases, unit scales; parameters are
/// visited in collection order so one seed always yields one model.
template <typename T>
void initialize(Layer<T>& graph, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& np : parameters(graph)) {
    Param<T>& p = *np.param;
    switch (p.init) {
      case ParamInit::kZero: p.value.fill(T(0)); break;
      case ParamInit::kOne: p.value.fill(T(1)); break;
      case ParamInit::kFanIn: {
        const double bound = std::sqrt(6.0 / static_cast<double>(p.fan_in));
        for (auto& v : p.value.values()) v = static_cast<T>(rng.uniform(-bound, bound));
        break;
      }
    }
    p.grad.fill(T(0));
  }
}

template <typename T>
Tensor<T> forward(Layer<T>& graph, const Tensor<T>& input, Mode mode = Mode::kEval) {
  graph.output_shape(input.shape());
  return mode == Mode::kEval ? graph.infer(input) : graph.forward(input, mode);
}

/// Scalar objective of the graph output. Writes d(objective)/d(output) into
/// `grad` (already shaped like the output) and returns the objective value.
template <typename T>
using Objective = std::function<T(const Tensor<T>& output, Tensor<T>& grad)>;

template <typename T>
Objective<T> weighted_sum_objective(Tensor<T> weights) {
  return [w = std::move(weights)](const Tensor<T>& out, Tensor<T>& grad) {
    out.require_same(w, "weighted_sum_objective");
    T s = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      s += w[i] * out[i];
      grad[i] = w[i];
    }
    return s;
  };
}

struct GradientRequest {
  bool input = true;
  bool parameters = true;
  /// Restrict parameter gradients to these names; empty means all trainable.
  std::vector<std::string> names;
};

template <typename T>
struct GradientMap {
  T objective = T(0);
  std::optional<Tensor<T>> input;
  std::map<std::string, Tensor<T>> parameters;
};

/// Reverse-mode gradients of `objective(graph(input))`. Parameter gradients
/// already accumulated on the graph are discarded.
template <typename T>
GradientMap<T> gradients(Layer<T>& graph, const Tensor<T>& input, const Objective<T>& objective,
                         const GradientRequest& request = {}, Mode mode = Mode::kEval) {
  auto params = parameters(graph);
  std::set<std::string> wanted(request.names.begin(), request.names.end());
  for (const auto& name : wanted) {
    bool found = false;
    for (const auto& p : params) found = found || (p.name == name && p.param->trainable);
    if (!found) throw StructuralError("gradients: '" + name + "' is not a trainable tensor of this graph");
  }

  zero_grad(graph);
  graph.output_shape(input.shape());
  const Tensor<T> out = graph.forward(input, mode);
  Tensor<T> g(out.shape());
  GradientMap<T> result;
  result.objective = objective(out, g);
  Tensor<T> dx = graph.backward(g);
  if (request.input) result.input = std::move(dx);
  if (request.parameters)
    for (const auto& p : params)
      if (p.param->trainable && (wanted.empty() || wanted.count(p.name)))
        result.parameters.emplace(p.name, p.param->grad);
  return result;
}

struct FdOptions {
  bool check_input = true;
  bool check_parameters = true;
  /// Coordinates sampled per tensor; tensors at or below this size are checked exhaustively.
  std::size_t samples_per_tensor = 24;
  std::uint64_t seed = 1;
  Mode mode = Mode::kEval;
};

struct FdReport {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  std::string worst;
};

/// Compares reverse-mode gradients with central differences
/// (f(x+h) - f(x-h)) / 2h, where 2h is the step actually realized in floating
/// point. Relative error uses max(|a|, |b|, 1e-8) as denominator.
template <typename T>
FdReport finite_difference_check(Layer<T>& graph, const Tensor<T>& point, const Objective<T>& objective,
                                 T h, const FdOptions& opt = {}) {
  if (!(h > T(0))) throw ConfigError("finite_difference_check: h must be positive");
  GradientMap<T> analytic = gradients(graph, point, objective, {opt.check_input, opt.check_parameters, {}}, opt.mode);

  auto eval = [&](const Tensor<T>& x) {
    const Tensor<T> out = graph.forward(x, opt.mode);
    Tensor<T> scratch(out.shape());
    return objective(out, scratch);
  };

  FdReport report;
  Rng rng(opt.seed);
  auto pick = [&](std::size_t n) {
    std::vector<std::size_t> idx;
    if (n <= opt.samples_per_tensor) {
      for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    } else {
      for (std::size_t i = 0; i < opt.samples_per_tensor; ++i) idx.push_back(rng.below(n));
    }
    return idx;
  };
  auto record = [&](double a, double b, const std::string& where) {
    const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
    const double err = std::abs(a - b) / denom;
    ++report.coordinates;
    if (err > report.max_relative_error) {
      report.max_relative_error = err;
      report.worst = where;
    }
  };

  if (opt.check_input) {
    Tensor<T> x = point;
    for (std::size_t i : pick(x.size())) {
      const T orig = x[i];
      x[i] = orig + h;
      const T fp = eval(x);
      const T up = x[i];
      x[i] = orig - h;
      const T fm = eval(x);
      const T step = up - x[i];
      x[i] = orig;
      record(static_cast<double>((*analytic.input)[i]), static_cast<double>((fp - fm) / step),
             "input[" + std::to_string(i) + "]");
    }
  }
  if (opt.check_parameters) {
    for (auto& np : parameters(graph)) {
      if (!np.param->trainable) continue;
      Tensor<T>& v = np.param->value;
      const Tensor<T>& a = analytic.parameters.at(np.name);
      for (std::size_t i : pick(v.size())) {
        const T orig = v[i];
        v[i] = orig + h;
        const T fp = eval(point);
        const T up = v[i];
        v[i] = orig - h;
        const T fm = eval(point);
        const T step = up - v[i];
        v[i] = orig;
        record(static_cast<double>(a[i]), static_cast<double>((fp - fm) / step),
               np.name + "[" + std::to_string(i) + "]");
      }
    }
  }
  return report;
}

}  // namespace steer
