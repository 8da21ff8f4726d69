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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "steerbench/attacks.hpp"
#include "steerbench/config.hpp"
#include "steerbench/data.hpp"
#include "steerbench/training.hpp"

namespace steer {

/// Resolved experiment description. Built from a KeyValueDoc:
///
///   seed = 1                         (required)
///   out_dir = runs/toy
///   model.*                          ModelConfig keys
///   data.format = toy | kaggle_sap | udacity_sim
///   data.manifest = path
///   data.angle_unit = radians | degrees | normalized
///   data.val_fraction = 0.2
///   data.split_seed = 42
///   data.side_cameras = true
///   data.camera_correction = 0.2
///   train.*                          TrainHyper keys
///   attack.list = fgsm:0.01,pgd:0.01
///   attack.steps = 10
///   attack.step_size = (eps/4)
///   attack.random_start = true
struct ExperimentConfig {
  KeyValueDoc doc;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;

  static ExperimentConfig from_doc(const KeyValueDoc& doc);

  ModelConfig model() const;
  TrainHyper hyper() const;
  std::vector<AttackConfig> attacks() const;

  SourceFormat format() const;
  std::filesystem::path manifest() const;
  LoadOptions load_options() const;
  double val_fraction() const;
  std::uint64_t split_seed() const;
  Preprocess preprocess(const ModelConfig& model, bool training) const;
};

struct SplitData {
  SampleSet train, val;
};

/// Loads the manifest, splits it and decodes both parts at the model's input size.
SplitData load_split(const ExperimentConfig& cfg, const ModelConfig& model);

/// "fgsm:0.01,pgd:3" -> configs sharing the pgd settings.
std::vector<AttackConfig> parse_attack_list(const std::string& text, int steps, std::optional<double> step_size,
                                            bool random_start, std::uint64_t seed);

/// Toy-scale copy of a table tuple: widths divided by `width_divisor`.
ModelConfig sweep_config(Family family, const std::vector<int>& block_layers, int width_divisor,
                         std::array<int, 3> input_shape, std::uint64_t init_seed);

/// Entry point of the steerbench tool. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace steer
