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

#include "steerbench/config.hpp"

#include <fstream>
#include <sstream>

#include "steerbench/errors.hpp"

namespace steer {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string key(const std::string& prefix, const std::string& k) { return prefix.empty() ? k : prefix + "." + k; }

}  // namespace

KeyValueDoc KeyValueDoc::parse(const std::string& text) {
  KeyValueDoc doc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string k = trim(t.substr(0, eq));
    if (k.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    doc.values_[k] = trim(t.substr(eq + 1));
  }
  return doc;
}

KeyValueDoc KeyValueDoc::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw LoadError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string KeyValueDoc::str() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
  return os.str();
}

void KeyValueDoc::save(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw LoadError("cannot write config file " + path.string());
  f << str();
}

void KeyValueDoc::merge(const KeyValueDoc& overrides) {
  for (const auto& [k, v] : overrides.values_) values_[k] = v;
}

std::string KeyValueDoc::get(const std::string& k) const {
  auto it = values_.find(k);
  if (it == values_.end()) throw ConfigError("missing config key '" + k + "'");
  return it->second;
}

std::string KeyValueDoc::get(const std::string& k, const std::string& fallback) const {
  auto it = values_.find(k);
  return it == values_.end() ? fallback : it->second;
}

long long KeyValueDoc::get_int(const std::string& k) const {
  const std::string v = get(k);
  try {
    std::size_t used = 0;
    const long long r = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + k + "': expected integer, got '" + v + "'");
  }
}

long long KeyValueDoc::get_int(const std::string& k, long long fallback) const {
  return has(k) ? get_int(k) : fallback;
}

double KeyValueDoc::get_double(const std::string& k) const {
  const std::string v = get(k);
  try {
    std::size_t used = 0;
    const double r = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + k + "': expected number, got '" + v + "'");
  }
}

double KeyValueDoc::get_double(const std::string& k, double fallback) const {
  return has(k) ? get_double(k) : fallback;
}

bool KeyValueDoc::get_bool(const std::string& k, bool fallback) const {
  if (!has(k)) return fallback;
  const std::string v = get(k);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + k + "': expected boolean, got '" + v + "'");
}

std::vector<int> KeyValueDoc::get_int_list(const std::string& k) const {
  try {
    return parse_int_list(get(k));
  } catch (const ConfigError& e) {
    throw ConfigError("config key '" + k + "': " + e.what());
  }
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::string t = text;
  for (char& c : t)
    if (c == '(' || c == ')' || c == '[' || c == ']') c = ' ';
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string v = trim(item);
    if (v.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(v, &used));
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw ConfigError("expected integer list, got '" + text + "'");
    }
  }
  return out;
}

std::string format_int_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string to_string(Family f) { return f == Family::kResNet ? "resnet" : "inception"; }

std::string to_string(CombineRule r) {
  return r == CombineRule::kMaskTimesTrunk ? "mask_times_trunk" : "residual_one_plus_mask";
}

Family parse_family(const std::string& s) {
  if (s == "resnet") return Family::kResNet;
  if (s == "inception") return Family::kInception;
  throw ConfigError("unknown model family '" + s + "' (expected resnet|inception)");
}

CombineRule parse_combine_rule(const std::string& s) {
  if (s == "mask_times_trunk") return CombineRule::kMaskTimesTrunk;
  if (s == "residual_one_plus_mask") return CombineRule::kResidualOnePlusMask;
  throw ConfigError("unknown combine rule '" + s + "'");
}

int ModelConfig::effective_stem_width() const {
  if (stem_width > 0) return stem_width;
  if (family == Family::kResNet) return stage_widths.empty() ? 64 : stage_widths.front();
  return 64;
}

void ModelConfig::validate() const {
  const std::size_t stages = family == Family::kResNet ? 4 : 3;
  const std::string fam = to_string(family);
  if (block_layers.size() != stages)
    throw ConfigError(fam + ": block_layers must have " + std::to_string(stages) + " entries, got (" +
                      format_int_list(block_layers) + ")");
  for (int b : block_layers)
    if (b < 1) throw ConfigError(fam + ": block counts must be >= 1, got (" + format_int_list(block_layers) + ")");
  if (stage_widths.size() != stages)
    throw ConfigError(fam + ": stage_widths must have " + std::to_string(stages) + " entries");
  for (int w : stage_widths)
    if (w < 1) throw ConfigError(fam + ": stage widths must be positive");
  if (family == Family::kInception) {
    for (int w : stage_widths)
      if (w < 8) throw ConfigError("inception: stage widths must be >= 8");
    for (std::size_t i = 1; i < stage_widths.size(); ++i)
      if (stage_widths[i] <= stage_widths[i - 1])
        throw ConfigError("inception: stage widths must increase across grid reductions");
  }
  if (input_shape[0] != 3 || input_shape[1] < 1 || input_shape[2] < 1)
    throw ConfigError("input_shape must be 3,H,W with positive H and W");
  if (head != "gap_linear") throw ConfigError("unsupported head '" + head + "' (expected gap_linear)");
  if (attention) {
    if (family != Family::kResNet) throw ConfigError("attention modules are only defined for resnet models");
    if (attention->downsample_steps < 0) throw ConfigError("attention.downsample_steps must be >= 0");
    if (attention->trunk_units < 1) throw ConfigError("attention.trunk_units must be >= 1");
    for (int s : attention->stages) {
      if (s < 1 || s > 4) throw ConfigError("attention stage index " + std::to_string(s) + " out of range 1..4");
      if (block_layers[static_cast<std::size_t>(s - 1)] - attention->trunk_units < 1)
        throw ConfigError("attention after stage " + std::to_string(s) + " needs more than " +
                          std::to_string(attention->trunk_units) + " residual unit(s) in that stage");
    }
    for (std::size_t i = 1; i < attention->stages.size(); ++i)
      if (attention->stages[i] <= attention->stages[i - 1])
        throw ConfigError("attention stages must be strictly increasing");
  }
}

KeyValueDoc ModelConfig::to_doc(const std::string& prefix) const {
  KeyValueDoc d;
  if (!name.empty()) d.set(key(prefix, "name"), name);
  d.set(key(prefix, "family"), to_string(family));
  d.set(key(prefix, "block_layers"), format_int_list(block_layers));
  d.set(key(prefix, "stage_widths"), format_int_list(stage_widths));
  if (stem_width > 0) d.set(key(prefix, "stem_width"), std::to_string(stem_width));
  d.set(key(prefix, "input_shape"), format_int_list({input_shape[0], input_shape[1], input_shape[2]}));
  d.set(key(prefix, "head"), head);
  d.set(key(prefix, "init_seed"), std::to_string(init_seed));
  if (attention) {
    d.set(key(prefix, "attention.stages"), format_int_list(attention->stages));
    d.set(key(prefix, "attention.combine_rule"), to_string(attention->combine_rule));
    d.set(key(prefix, "attention.downsample_steps"), std::to_string(attention->downsample_steps));
    d.set(key(prefix, "attention.trunk_units"), std::to_string(attention->trunk_units));
    d.set(key(prefix, "attention.skip_connections"), attention->skip_connections ? "true" : "false");
  }
  return d;
}

ModelConfig ModelConfig::from_doc(const KeyValueDoc& d, const std::string& prefix) {
  ModelConfig c;
  c.name = d.get(key(prefix, "name"), "");
  c.family = parse_family(d.get(key(prefix, "family")));
  c.block_layers = d.get_int_list(key(prefix, "block_layers"));
  if (d.has(key(prefix, "stage_widths")))
    c.stage_widths = d.get_int_list(key(prefix, "stage_widths"));
  else
    c.stage_widths = c.family == Family::kResNet ? std::vector<int>{64, 128, 256, 512} : std::vector<int>{544, 736, 928};
  c.stem_width = static_cast<int>(d.get_int(key(prefix, "stem_width"), 0));
  if (d.has(key(prefix, "input_shape"))) {
    const auto s = d.get_int_list(key(prefix, "input_shape"));
    if (s.size() != 3) throw ConfigError("input_shape must be C,H,W");
    c.input_shape = {s[0], s[1], s[2]};
  }
  c.head = d.get(key(prefix, "head"), "gap_linear");
  c.init_seed = static_cast<std::uint64_t>(d.get_int(key(prefix, "init_seed"), 0));
  if (d.has(key(prefix, "attention.stages"))) {
    AttentionSpec a;
    a.stages = d.get_int_list(key(prefix, "attention.stages"));
    a.combine_rule = parse_combine_rule(d.get(key(prefix, "attention.combine_rule"), "mask_times_trunk"));
    a.downsample_steps = static_cast<int>(d.get_int(key(prefix, "attention.downsample_steps"), 2));
    a.trunk_units = static_cast<int>(d.get_int(key(prefix, "attention.trunk_units"), 1));
    a.skip_connections = d.get_bool(key(prefix, "attention.skip_connections"), true);
    c.attention = a;
  }
  c.validate();
  return c;
}

ModelConfig resnet_config(std::vector<int> block_layers, std::vector<int> stage_widths,
                          std::array<int, 3> input_shape) {
  ModelConfig c;
  c.family = Family::kResNet;
  c.block_layers = std::move(block_layers);
  c.stage_widths = std::move(stage_widths);
  c.input_shape = input_shape;
  return c;
}

ModelConfig inception_config(std::vector<int> block_layers, std::vector<int> stage_widths,
                             std::array<int, 3> input_shape) {
  ModelConfig c;
  c.family = Family::kInception;
  c.block_layers = std::move(block_layers);
  c.stage_widths = std::move(stage_widths);
  c.input_shape = input_shape;
  return c;
}

const std::vector<NamedTuple>& resnet_table() {
  static const std::vector<NamedTuple> t = {
      {"ResNet20", {2, 2, 3, 2}, 12.8}, {"ResNet22", {2, 3, 3, 2}, 13.1}, {"ResNet24", {2, 3, 4, 2}, 14.3},
      {"ResNet26", {3, 3, 3, 3}, 17.9}, {"ResNet28", {3, 3, 4, 3}, 19.1}, {"ResNet30", {3, 4, 4, 3}, 19.4},
      {"ResNet32", {3, 4, 5, 3}, 20.6}, {"ResNet34", {3, 4, 6, 3}, 21.7},
  };
  return t;
}

const std::vector<NamedTuple>& inception_table() {
  static const std::vector<NamedTuple> t = {
      {"InceptionNet", {2, 5, 2}, 13.0},   {"InceptionNet-a", {5, 5, 2}, 14.5}, {"InceptionNet-b", {2, 8, 2}, 15.5},
      {"InceptionNet-c", {5, 8, 2}, 17.0}, {"InceptionNet-d", {2, 5, 5}, 17.6}, {"InceptionNet-e", {2, 8, 5}, 20.2},
      {"InceptionNet-f", {5, 8, 5}, 21.7},
  };
  return t;
}

}  // namespace steer
