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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace steer {

/// Flat `dotted.key = value` document. Lines starting with '#' are comments.
/// Keys serialize in sorted order so identical content yields identical bytes.
class KeyValueDoc {
 public:
  static KeyValueDoc parse(const std::string& text);
  static KeyValueDoc load(const std::filesystem::path& path);

  std::string str() const;
  void save(const std::filesystem::path& path) const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void merge(const KeyValueDoc& overrides);

  std::string get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::vector<int> parse_int_list(const std::string& text);
std::string format_int_list(const std::vector<int>& v);

enum class Family { kResNet, kInception };
enum class CombineRule { kMaskTimesTrunk, kResidualOnePlusMask };

std::string to_string(Family f);
std::string to_string(CombineRule r);
Family parse_family(const std::string& s);
CombineRule parse_combine_rule(const std::string& s);

struct AttentionSpec {
  std::vector<int> stages{1, 2, 3};
  CombineRule combine_rule = CombineRule::kMaskTimesTrunk;
  int downsample_steps = 2;
  int trunk_units = 1;
  bool skip_connections = true;
};

/// Architecture description. `input_shape` is {channels, height, width}.
struct ModelConfig {
  std::string name;
  Family family = Family::kResNet;
  std::vector<int> block_layers;
  std::vector<int> stage_widths;
  int stem_width = 0;  // 0: family default
  std::array<int, 3> input_shape{3, 160, 320};
  std::string head = "gap_linear";
  std::optional<AttentionSpec> attention;
  std::uint64_t init_seed = 0;

  /// Throws ConfigError when the description cannot be built.
  void validate() const;
  int effective_stem_width() const;

  KeyValueDoc to_doc(const std::string& prefix = "") const;
  static ModelConfig from_doc(const KeyValueDoc& doc, const std::string& prefix = "");
};

ModelConfig resnet_config(std::vector<int> block_layers, std::vector<int> stage_widths = {64, 128, 256, 512},
                          std::array<int, 3> input_shape = {3, 160, 320});
ModelConfig inception_config(std::vector<int> block_layers, std::vector<int> stage_widths = {544, 736, 928},
                             std::array<int, 3> input_shape = {3, 160, 320});

struct NamedTuple {
  std::string name;
  std::vector<int> block_layers;
  double reported_millions;
};

/// The eight ResNet variants and seven InceptionNet variants in table order.
const std::vector<NamedTuple>& resnet_table();
const std::vector<NamedTuple>& inception_table();

}  // namespace steer
