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

#include "steerbench/attacks.hpp"

#include <fstream>
#include <sstream>

#include "steerbench/errors.hpp"
#include "steerbench/training.hpp"

namespace steer {

AttackMethod parse_attack_method(const std::string& s) {
  if (s == "fgsm") return AttackMethod::kFgsm;
  if (s == "pgd") return AttackMethod::kPgd;
  throw ConfigError("unknown attack '" + s + "' (expected fgsm|pgd)");
}

std::string to_string(AttackMethod m) { return m == AttackMethod::kFgsm ? "fgsm" : "pgd"; }

void AttackConfig::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("attack epsilon must be >= 0");
  detail::check_bounds(lower, upper);
  if (method == AttackMethod::kPgd) {
    if (steps < 1) throw ConfigError("pgd steps must be >= 1");
    if (step_size && !(*step_size > 0.0)) throw ConfigError("pgd step_size must be > 0");
  }
}

AttackConfig fgsm_config(double epsilon) {
  AttackConfig c;
  c.method = AttackMethod::kFgsm;
  c.epsilon = epsilon;
  return c;
}

AttackConfig pgd_config(double epsilon, int steps, std::optional<double> step_size, bool random_start,
                        std::uint64_t seed) {
  AttackConfig c;
  c.method = AttackMethod::kPgd;
  c.epsilon = epsilon;
  c.steps = steps;
  c.step_size = step_size;
  c.random_start = random_start;
  c.seed = seed;
  return c;
}

double robustness_eval(Layer<float>& graph, const SampleSet& data, const AttackConfig& config, int batch_size) {
  config.validate();
  if (data.size() == 0) throw StructuralError("robustness_eval: empty dataset");
  double sum = 0.0;
  std::uint64_t batch_no = 0;
  for (const auto& ids : batch_plan(data.size(), batch_size, std::nullopt)) {
    const Batch b = data.gather(ids);
    AttackConfig c = config;
    c.seed = config.seed * 1000003ULL + batch_no++;
    const Tensor<float> adv = attack(graph, b.images, b.targets, c);
    graph.output_shape(adv.shape());
    const Tensor<float> out = graph.infer(adv);
    for (std::size_t i = 0; i < b.targets.size(); ++i) {
      const double d = static_cast<double>(out[i]) - b.targets[i];
      sum += d * d;
    }
  }
  return sum / static_cast<double>(data.size());
}

double robustness_eval(Model<float>& model, const SampleSet& data, const AttackConfig& config, int batch_size) {
  return robustness_eval(*model.graph, data, config, batch_size);
}

double robustness_change(double mse_without_attention, double mse_with_attention) {
  if (!(mse_without_attention > 0.0))
    throw DomainError("robustness_change: MSE without attention must be positive");
  return 100.0 * (mse_without_attention - mse_with_attention) / mse_without_attention;
}

void RobustnessReport::write_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "model,attack,eps,clean_mse,attacked_mse\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.model << ',' << r.attack;
    for (double v : {r.epsilon, r.clean_mse, r.attacked_mse}) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

RobustnessReport RobustnessReport::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open report " + path.string());
  RobustnessReport rep;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || (row == 1 && line.rfind("model,", 0) == 0)) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 5) throw LoadError(path.string() + ":" + std::to_string(row) + ": expected 5 columns");
    try {
      rep.rows.push_back({f[0], f[1], std::stod(f[2]), std::stod(f[3]), std::stod(f[4])});
    } catch (const std::exception&) {
      throw LoadError(path.string() + ":" + std::to_string(row) + ": malformed number");
    }
  }
  return rep;
}

}  // namespace steer
