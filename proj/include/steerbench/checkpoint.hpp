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

// Binary model checkpoints; layout in docs/checkpoint_format.md.

#pragma once

#include <filesystem>

#include "steerbench/config.hpp"
#include "steerbench/model_zoo.hpp"

namespace steer {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes model config (under "model.") plus `extra` keys and every tensor.
/// The file is written to a temporary name and renamed into place.
void save_checkpoint(const std::filesystem::path& path, Model<float>& model, const KeyValueDoc& extra = {});

struct LoadedCheckpoint {
  Model<float> model;
  KeyValueDoc doc;
};

/// LoadError on a missing, truncated or foreign file, or a tensor mismatch.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace steer
