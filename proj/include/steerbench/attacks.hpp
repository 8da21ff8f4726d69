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

// FGSM and PGD against a regression model under the batch MSE loss. Epsilon
// and step size are in [0,1] pixel units.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "steerbench/data.hpp"
#include "steerbench/engine.hpp"
#include "steerbench/model_zoo.hpp"

namespace steer {

enum class AttackMethod { kFgsm, kPgd };
AttackMethod parse_attack_method(const std::string& s);
std::string to_string(AttackMethod m);

struct AttackConfig {
  AttackMethod method = AttackMethod::kFgsm;
  double epsilon = 0.0;
  int steps = 10;
  std::optional<double> step_size;  // pgd; defaults to epsilon / 4
  bool random_start = true;         // pgd
  double lower = 0.0, upper = 1.0;
  std::uint64_t seed = 0;

  double alpha() const { return step_size.value_or(epsilon / 4.0); }
  void validate() const;
};

AttackConfig fgsm_config(double epsilon);
AttackConfig pgd_config(double epsilon, int steps = 10, std::optional<double> step_size = std::nullopt,
                        bool random_start = true, std::uint64_t seed = 0);

/// Gradient of the batch MSE (1/n) sum (f(x_i) - r_i)^2 with respect to the input, eval mode.
template <typename T>
Tensor<T> mse_input_gradient(Layer<T>& graph, const Tensor<T>& x, const std::vector<T>& targets) {
  auto objective = [&targets](const Tensor<T>& out, Tensor<T>& grad) {
    if (out.size() != targets.size())
      throw StructuralError("attack: " + std::to_string(out.size()) + " outputs vs " +
                            std::to_string(targets.size()) + " targets");
    const T n = static_cast<T>(out.size());
    T s = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const T d = out[i] - targets[i];
      s += d * d / n;
      grad[i] = T(2) * d / n;
    }
    return s;
  };
  return *gradients<T>(graph, x, objective, {true, false, {}}, Mode::kEval).input;
}

namespace detail {

template <typename T>
T sign(T v) {
  return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0));
}

inline void check_bounds(double lower, double upper) {
  if (!(lower < upper)) throw ConfigError("attack bounds must satisfy lower < upper");
}

}  // namespace detail

/// x' = clip(x + eps * sign(grad), bounds), sign(0) = 0.
template <typename T>
Tensor<T> fgsm(Layer<T>& graph, const Tensor<T>& x, const std::vector<T>& targets, double epsilon,
               double lower = 0.0, double upper = 1.0) {
  if (!(epsilon >= 0.0)) throw ConfigError("fgsm: epsilon must be >= 0");
  detail::check_bounds(lower, upper);
  if (epsilon == 0.0) return x;
  const Tensor<T> g = mse_input_gradient(graph, x, targets);
  Tensor<T> adv(x.shape());
  const T eps = static_cast<T>(epsilon), lo = static_cast<T>(lower), hi = static_cast<T>(upper);
  for (std::size_t i = 0; i < x.size(); ++i) adv[i] = std::clamp(x[i] + eps * detail::sign(g[i]), lo, hi);
  return adv;
}

/// Iterated sign steps projected onto the eps-ball around x intersected with the
/// bounds. `observe` (optional) sees every iterate, the start point included.
template <typename T>
Tensor<T> pgd(Layer<T>& graph, const Tensor<T>& x, const std::vector<T>& targets, const AttackConfig& config,
              const std::function<void(const Tensor<T>&)>& observe = {}) {
  config.validate();
  if (config.epsilon == 0.0) return x;
  const T eps = static_cast<T>(config.epsilon), alpha = static_cast<T>(config.alpha());
  const T lo = static_cast<T>(config.lower), hi = static_cast<T>(config.upper);
  auto project = [&](Tensor<T>& a) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::clamp(std::clamp(a[i], x[i] - eps, x[i] + eps), lo, hi);
  };
  Tensor<T> adv = x;
  if (config.random_start) {
    Rng rng(config.seed);
    for (auto& v : adv.values()) v += static_cast<T>(rng.uniform(-config.epsilon, config.epsilon));
    project(adv);
  }
  if (observe) observe(adv);
  for (int s = 0; s < config.steps; ++s) {
    const Tensor<T> g = mse_input_gradient(graph, adv, targets);
    for (std::size_t i = 0; i < adv.size(); ++i) adv[i] += alpha * detail::sign(g[i]);
    project(adv);
    if (observe) observe(adv);
  }
  return adv;
}

template <typename T>
Tensor<T> attack(Layer<T>& graph, const Tensor<T>& x, const std::vector<T>& targets, const AttackConfig& config) {
  config.validate();
  return config.method == AttackMethod::kFgsm ? fgsm(graph, x, targets, config.epsilon, config.lower, config.upper)
                                              : pgd(graph, x, targets, config);
}

/// MSE of `graph` on `data` after attacking each batch against the same graph.
double robustness_eval(Layer<float>& graph, const SampleSet& data, const AttackConfig& config, int batch_size = 64);
double robustness_eval(Model<float>& model, const SampleSet& data, const AttackConfig& config, int batch_size = 64);

/// 100 (without - with) / without; DomainError unless without > 0.
double robustness_change(double mse_without_attention, double mse_with_attention);

struct RobustnessRow {
  std::string model;
  std::string attack;
  double epsilon = 0.0;
  double clean_mse = 0.0;
  double attacked_mse = 0.0;
};

struct RobustnessReport {
  std::vector<RobustnessRow> rows;

  /// model,attack,eps,clean_mse,attacked_mse
  void write_csv(const std::filesystem::path& path) const;
  static RobustnessReport read_csv(const std::filesystem::path& path);
};

}  // namespace steer
