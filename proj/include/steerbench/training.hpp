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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "steerbench/config.hpp"
#include "steerbench/data.hpp"
#include "steerbench/model_zoo.hpp"

namespace steer {

/// Mean squared error (1/n) sum (r_i - rhat_i)^2, accumulated in double.
double mse_loss(std::span<const float> predicted, std::span<const float> actual);
double mse_loss(std::span<const double> predicted, std::span<const double> actual);

/// d mse / d predicted = 2 (rhat - r) / n.
std::vector<double> mse_gradient(std::span<const double> predicted, std::span<const double> actual);

/// 100 (baseline - variant) / baseline; DomainError unless baseline > 0.
double improvement_percent(double baseline_mse, double variant_mse);

enum class OptimizerKind { kAdam, kSgdMomentum };
OptimizerKind parse_optimizer(const std::string& s);
std::string to_string(OptimizerKind k);

struct TrainHyper {
  int epochs = 100;
  int batch_size = 32;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 1e-4;
  double momentum = 0.9;  // sgd
  double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  std::uint64_t seed = 0;

  /// ConfigError on invalid values; warns when batch_size is outside [16, 128].
  void validate() const;
  KeyValueDoc to_doc(const std::string& prefix = "train") const;
  static TrainHyper from_doc(const KeyValueDoc& doc, const std::string& prefix = "train");
};

struct CurvePoint {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainingCurve {
  std::vector<CurvePoint> points;

  bool empty() const { return points.empty(); }
  const CurvePoint& back() const { return points.back(); }
  /// epoch,train_mse,val_mse with 17 significant digits.
  void write_csv(const std::filesystem::path& path) const;
  static TrainingCurve read_csv(const std::filesystem::path& path);
};

/// Full-set MSE of inference-mode predictions, independent of batch_size.
double evaluate(const Model<float>& model, const SampleSet& data, int batch_size = 64);
std::vector<float> predict_all(const Model<float>& model, const SampleSet& data, int batch_size = 64);

/// Copy of every tensor of the model, running statistics included.
using ModelState = std::vector<std::pair<std::string, Tensor<float>>>;
ModelState snapshot(Model<float>& model);
void restore(Model<float>& model, const ModelState& state);

struct TrainResult {
  TrainingCurve curve;
  int best_epoch = 0;
  double best_val_mse = 0.0;
  ModelState best_state;
};

struct TrainOptions {
  /// Called after every epoch (e.g. to stream metrics).
  std::function<void(const CurvePoint&)> on_epoch;
  /// Leave the model at its best-validation weights when training ends.
  bool restore_best = true;
};

/// One optimizer pass per epoch over `train_data` (shuffled by hyper.seed and
/// epoch), then validation. With a zero learning rate nothing is updated,
/// normalization running statistics included. Throws NumericError naming epoch and batch when the
/// loss becomes non-finite.
TrainResult train(Model<float>& model, const SampleSet& train_data, const SampleSet& val_data,
                  const TrainHyper& hyper, const TrainOptions& options = {});

}  // namespace steer
