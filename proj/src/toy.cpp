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

#include "steerbench/toy.hpp"

#include "steerbench/attention.hpp"
#include "steerbench/errors.hpp"

namespace steer {

ToySplit make_toy_split(const std::filesystem::path& dir, int samples, std::uint64_t seed) {
  std::filesystem::remove_all(dir);
  const DatasetIndex all = generate_toy_dataset(samples, kToyHeight, kToyWidth, seed, dir);
  ToySplit s;
  std::tie(s.train_index, s.val_index) = split(all, 0.2, seed);
  const Preprocess pre{kToyHeight, kToyWidth, false, 0.0};
  s.train = load_samples(s.train_index, pre);
  s.val = load_samples(s.val_index, pre);
  return s;
}

ModelConfig toy_resnet_config(std::vector<int> block_layers) {
  ModelConfig c = resnet_config(std::move(block_layers), {8, 16, 32, 64}, {3, kToyHeight, kToyWidth});
  c.init_seed = 1;
  return c;
}

ModelConfig toy_attention_config(std::vector<int> block_layers, std::vector<int> stages) {
  AttentionSpec spec;
  spec.downsample_steps = 1;
  return attention_config(toy_resnet_config(std::move(block_layers)), stages, spec);
}

TrainHyper toy_hyper(std::uint64_t seed) {
  TrainHyper h;
  h.epochs = 30;
  h.batch_size = 32;
  h.learning_rate = 1e-3;
  h.seed = seed;
  return h;
}

double band_share(const std::vector<float>& map, int height, int width, double offset) {
  if (map.size() != static_cast<std::size_t>(height) * width) throw StructuralError("band_share: size mismatch");
  const ToyBand band = toy_band(offset, width);
  double in = 0.0, all = 0.0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double v = map[static_cast<std::size_t>(y) * width + x];
      all += v;
      if (x + 0.5 >= band.left && x + 0.5 < band.right) in += v;
    }
  return all > 0.0 ? in / all : 0.0;
}

}  // namespace steer
