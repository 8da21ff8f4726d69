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

// Runs the ten release acceptance checks and prints one PASS/FAIL line each.
// Usage: steerbench_acceptance [artifact_dir]

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "steerbench/attacks.hpp"
#include "steerbench/attention.hpp"
#include "steerbench/cli.hpp"
#include "steerbench/engine.hpp"
#include "steerbench/log.hpp"
#include "steerbench/model_zoo.hpp"
#include "steerbench/reporting.hpp"
#include "steerbench/rng.hpp"
#include "steerbench/saliency.hpp"
#include "steerbench/toy.hpp"
#include "steerbench/training.hpp"

namespace fs = std::filesystem;
using namespace steer;

namespace {

struct Failure {
  std::string what;
};

/// Collects the first few failed expectations of a criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::ostringstream s;
    s << checks_ << " checks";
    if (failed_) {
      s << ", " << failed_ << " failed:";
      for (const auto& f : failures_) s << " [" << f << "]";
    }
    return s.str();
  }

 private:
  int checks_ = 0, failed_ = 0;
  std::vector<std::string> failures_;
};

std::string num(double v, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

template <typename T>
Tensor<T> random_tensor(const Shape& shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  Tensor<T> t(shape);
  for (auto& v : t.values()) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// 1
std::string percentage_reproduction(Checker& c) {
  struct Cell {
    double without, with, published;
  };
  const std::vector<Cell> cells{{0.214, 0.200, 6.54},  {0.336, 0.291, 13.39}, {4.763, 2.581, 45.81},
                                {5.853, 2.695, 53.95}, {0.253, 0.183, 27.66}, {0.574, 0.252, 56.09},
                                {9.464, 5.558, 41.27}, {9.636, 5.616, 41.71}};
  double worst = 0.0;
  for (const auto& cell : cells) {
    const double got = robustness_change(cell.without, cell.with);
    worst = std::max(worst, std::abs(got - cell.published));
    c.expect(std::abs(got - cell.published) <= 0.01, num(got) + " vs " + num(cell.published));
  }
  return "8 cells, max deviation " + num(worst, 3) + " pp";
}

// 2
std::string improvement_reproduction(Checker& c) {
  const double a = improvement_percent(5.1648843e-2, 4.8118659e-2);
  const double b = improvement_percent(4.2653428e-2, 4.0053548e-2);
  c.expect(std::abs(a - 6.83) <= 0.01, "ResNet32 " + num(a));
  c.expect(std::abs(b - 6.09) <= 0.01, "ResNet26 " + num(b));
  return num(a, 4) + "% and " + num(b, 4) + "%";
}

// 3
std::string parameter_fidelity(Checker& c) {
  std::int64_t prev = 0;
  double worst = 0.0;
  for (const auto& t : resnet_table()) {
    const auto m = build_resnet<float>(t.block_layers);
    const double millions = static_cast<double>(m.parameter_count()) / 1e6;
    const double rel = std::abs(millions - t.reported_millions) / t.reported_millions;
    worst = std::max(worst, rel);
    c.expect(rel <= 0.05, t.name + " " + num(millions, 4) + "M vs " + num(t.reported_millions, 4) + "M");
    c.expect(m.parameter_count() > prev, t.name + " not increasing");
    prev = m.parameter_count();
  }
  prev = 0;
  for (const auto& t : inception_table()) {
    const auto m = build_inception<float>(t.block_layers);
    c.expect(m.parameter_count() > prev, t.name + " not increasing");
    prev = m.parameter_count();
  }
  return "ResNet max relative deviation " + num(100.0 * worst, 3) + "%, InceptionNet increasing";
}

// 4
std::string gradient_correctness(Checker& c) {
  struct Case {
    std::string name;
    std::function<LayerPtr<double>()> make;
    Shape input;
    Mode mode = Mode::kEval;
  };
  const std::vector<Case> cases{
      {"conv", [] { return std::make_unique<Conv2d<double>>(3, 4, 3, 2, 1, true); }, {2, 3, 7, 7}},
      {"conv_pointwise", [] { return std::make_unique<Conv2d<double>>(3, 5, 1, 1, 0, true); }, {2, 3, 4, 4}},
      {"maxpool", [] { return std::make_unique<MaxPool2d<double>>(3, 2, 1); }, {2, 2, 7, 7}},
      {"avgpool", [] { return std::make_unique<AvgPool2d<double>>(3, 2, 1); }, {2, 2, 7, 7}},
      {"global_avgpool", [] { return std::make_unique<GlobalAvgPool<double>>(); }, {2, 3, 4, 5}},
      {"batchnorm_train", [] { return std::make_unique<BatchNorm2d<double>>(3); }, {4, 3, 3, 3}, Mode::kTrain},
      {"batchnorm_eval", [] { return std::make_unique<BatchNorm2d<double>>(3); }, {4, 3, 3, 3}},
      {"relu", [] { return std::make_unique<ReLU<double>>(); }, {2, 3, 4, 4}},
      {"sigmoid", [] { return std::make_unique<Sigmoid<double>>(); }, {2, 3, 4, 4}},
      {"linear", [] { return std::make_unique<Linear<double>>(7, 3); }, {3, 7}},
      {"upsample", [] { return std::make_unique<Upsample<double>>(2); }, {2, 2, 3, 4}},
      {"concat",
       [] {
         auto k = std::make_unique<Concat<double>>();
         k->add(conv_bn_relu<double>(3, 2, 1, 1, 0));
         k->add(conv_bn_relu<double>(3, 3, 3, 1, 1));
         return k;
       },
       {2, 3, 5, 5}},
      {"residual_unit", [] { return std::make_unique<ResidualUnit<double>>(3, 6, 2); }, {2, 3, 6, 6}, Mode::kTrain},
      {"inception_block", [] { return detail::inception_block<double>(8, 16); }, {2, 8, 5, 5}},
      {"grid_reduction", [] { return detail::grid_reduction<double>(4, 10); }, {2, 4, 6, 6}},
      {"attention_module",
       [] {
         AttentionSpec spec;
         spec.downsample_steps = 1;
         return build_attention_module<double>({1, 4, 8, 8}, spec);
       },
       {2, 4, 8, 8}},
  };
  double worst = 0.0;
  std::size_t coords = 0;
  for (const auto& k : cases) {
    auto layer = k.make();
    initialize(*layer, 3);
    const auto x = random_tensor<double>(k.input, 4);
    const auto w = random_tensor<double>(layer->output_shape(k.input), 5);
    FdOptions opt;
    opt.mode = k.mode;
    opt.samples_per_tensor = 40;
    const auto r = finite_difference_check(*layer, x, weighted_sum_objective(w), 1e-5, opt);
    worst = std::max(worst, r.max_relative_error);
    coords += r.coordinates;
    c.expect(r.coordinates > 0 && r.max_relative_error < 1e-6, k.name + " " + num(r.max_relative_error) + " at " + r.worst);
  }
  AttentionSpec spec;
  spec.downsample_steps = 1;
  ModelConfig cfg = attention_config(resnet_config({2, 2, 2, 1}, {4, 8, 8, 8}, {3, 32, 32}), {1, 2, 3}, spec);
  cfg.init_seed = 3;
  auto m = build_model<double>(cfg);
  FdOptions opt;
  opt.samples_per_tensor = 6;
  const auto r = finite_difference_check(*m.graph, random_tensor<double>(m.input_shape(2), 13, 0.0, 1.0),
                                         weighted_sum_objective(Tensor<double>({2, 1}, 1.0)), 1e-5, opt);
  worst = std::max(worst, r.max_relative_error);
  coords += r.coordinates;
  c.expect(r.max_relative_error < 1e-6, "attention resnet " + num(r.max_relative_error) + " at " + r.worst);
  return std::to_string(cases.size()) + " layer types + attention ResNet, " + std::to_string(coords) +
         " coordinates, max rel err " + num(worst, 3);
}

// 5
std::string attack_invariants(Checker& c) {
  Rng rng(2024);
  int budget_checked = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    Sequential<float> g;
    g.emplace<Conv2d<float>>("conv", 3, 4, 3, 1, 1, true);
    g.emplace<ReLU<float>>("relu");
    g.emplace<GlobalAvgPool<float>>("pool");
    g.emplace<Linear<float>>("fc", 4, 1);
    initialize(g, 1000 + static_cast<std::uint64_t>(trial));
    const int n = 1 + static_cast<int>(rng.below(3));
    const bool dyadic = trial % 4 == 0;
    Tensor<float> x({n, 3, 5, 5});
    for (auto& v : x.values())
      v = dyadic ? static_cast<float>(rng.below(257)) / 256.0f : static_cast<float>(rng.uniform());
    std::vector<float> targets(static_cast<std::size_t>(n));
    for (auto& t : targets) t = static_cast<float>(rng.uniform(-0.5, 0.5));
    const double eps = dyadic ? static_cast<double>(1 + rng.below(16)) / 64.0 : rng.uniform(0.0, 0.3);
    const float feps = static_cast<float>(eps);
    const std::string tag = "trial " + std::to_string(trial);

    const auto grad = mse_input_gradient(g, x, targets);
    const auto adv = fgsm(g, x, targets, eps);
    bool budget_ok = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (grad[i] == 0.0f) {
        budget_ok &= adv[i] == x[i];
        continue;
      }
      const float s = grad[i] > 0 ? 1.0f : -1.0f;
      const double unclipped = static_cast<double>(x[i]) + s * static_cast<double>(feps);
      if (unclipped < 0.0 || unclipped > 1.0) continue;
      const double moved = std::abs(static_cast<double>(adv[i]) - static_cast<double>(x[i]));
      const double half_ulp = 0.5 * (std::nextafter(std::abs(adv[i]), 2.0f) - std::abs(adv[i]));
      budget_ok &= dyadic ? moved == static_cast<double>(feps) : std::abs(moved - static_cast<double>(feps)) <= half_ulp;
      budget_ok &= (adv[i] - x[i] > 0 ? 1.0f : -1.0f) == s;
      ++budget_checked;
    }
    c.expect(budget_ok, tag + ": fgsm budget");

    c.expect(pgd(g, x, targets, pgd_config(eps, 1, eps, false)).vec() == adv.vec(), tag + ": pgd(1) != fgsm");

    if (eps > 0.0) {
      const auto cfg = pgd_config(eps, 1 + static_cast<int>(rng.below(4)), std::nullopt, trial % 2 == 0,
                                  static_cast<std::uint64_t>(trial));
      bool inside = true;
      pgd<float>(g, x, targets, cfg, [&](const Tensor<float>& it) {
        for (std::size_t i = 0; i < x.size(); ++i)
          inside &= std::abs(static_cast<double>(it[i]) - x[i]) <= eps + 1e-6 && it[i] >= 0.0f && it[i] <= 1.0f;
      });
      c.expect(inside, tag + ": pgd iterate outside ball or bounds");
    }
    c.expect(fgsm(g, x, targets, 0.0).vec() == x.vec(), tag + ": fgsm eps=0");
    c.expect(pgd(g, x, targets, pgd_config(0.0, 3)).vec() == x.vec(), tag + ": pgd eps=0");
  }
  c.expect(budget_checked > 10000, "too few budget coordinates");
  return std::to_string(trials) + " random cases, " + std::to_string(budget_checked) + " budget coordinates";
}

// 6
std::string attention_invariants(Checker& c) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    AttentionSpec spec;
    spec.downsample_steps = static_cast<int>(seed % 3);
    spec.skip_connections = seed % 2 == 0;
    spec.combine_rule = seed % 4 < 2 ? CombineRule::kMaskTimesTrunk : CombineRule::kResidualOnePlusMask;
    auto m = build_attention_module<double>({1, 3, 8, 16}, spec);
    initialize(*m, seed);
    const auto x = random_tensor<double>({2, 3, 8, 16}, seed + 100, -3.0, 3.0);
    const auto mask = m->extract_mask(x);
    bool in_range = true;
    for (double v : mask.values()) in_range &= v > 0.0 && v < 1.0;
    c.expect(in_range, "mask outside (0,1), seed " + std::to_string(seed));
    c.expect(m->infer(x).shape() == x.shape(), "shape not preserved, seed " + std::to_string(seed));
  }
  for (const auto& [blocks, units] : std::vector<std::pair<std::vector<int>, int>>{{{3, 4, 5, 3}, 15}, {{3, 3, 3, 3}, 12}}) {
    const auto base = build_resnet<float>(blocks);
    const auto att = build_attention_resnet<float>(resnet_config(blocks), {1, 2, 3});
    c.expect(base.residual_units() == units && att.residual_units() == units,
             "parity " + std::to_string(base.residual_units()) + "/" + std::to_string(att.residual_units()) + " vs " +
                 std::to_string(units));
  }
  const auto x = random_tensor<double>({2, 4, 8, 8}, 7);
  AttentionSpec spec;
  auto ones = build_attention_module<double>({1, 4, 8, 8}, spec);
  initialize(*ones, 1);
  ones->mask_head().weight().value.fill(0.0);
  ones->mask_head().bias().value.fill(100.0);
  c.expect(ones->infer(x).vec() == ones->trunk_output(x).vec(), "mask=1 is not the trunk");
  spec.combine_rule = CombineRule::kResidualOnePlusMask;
  auto zeros = build_attention_module<double>({1, 4, 8, 8}, spec);
  initialize(*zeros, 1);
  zeros->mask_head().weight().value.fill(0.0);
  zeros->mask_head().bias().value.fill(-1000.0);
  c.expect(zeros->infer(x).vec() == zeros->trunk_output(x).vec(), "(1+0)*trunk is not the trunk");
  return "20 mask configurations, parity 15/12, forced masks";
}

// 7
std::string toy_convergence(Checker& c, const ToySplit& toy) {
  Model<float> model = build_model<float>(toy_resnet_config());
  const TrainResult r = train(model, toy.train, toy.val, toy_hyper());
  c.expect(r.curve.points.size() == 30, "expected 30 epochs");
  c.expect(r.best_val_mse < 0.01, "best val MSE " + num(r.best_val_mse));

  Model<float> frozen = build_model<float>(toy_resnet_config());
  TrainHyper zero = toy_hyper();
  zero.learning_rate = 0.0;
  const TrainResult z = train(frozen, toy.train, toy.val, zero);
  bool flat = true;
  for (const auto& p : z.curve.points) flat &= p.val_mse == z.curve.points[0].val_mse;
  c.expect(flat, "zero-LR validation curve is not flat");
  return "best val MSE " + num(r.best_val_mse, 4) + " rad^2 at epoch " + std::to_string(r.best_epoch) +
         "; zero-LR val MSE constant at " + num(z.curve.points[0].val_mse, 4);
}

// 8
std::string attention_smoke(Checker& c, const ToySplit& toy, const fs::path& dir) {
  fs::create_directories(dir);
  Model<float> base = build_model<float>(toy_resnet_config({2, 2, 2, 2}));
  Model<float> att = build_model<float>(toy_attention_config({2, 2, 2, 2}));
  const TrainResult rb = train(base, toy.train, toy.val, toy_hyper());
  const TrainResult ra = train(att, toy.train, toy.val, toy_hyper());
  rb.curve.write_csv(dir / "baseline_curve.csv");
  ra.curve.write_csv(dir / "attention_curve.csv");
  plot_curves({{"ToyResNet", dir / "baseline_curve.csv"}, {"ToyResNet w attention", dir / "attention_curve.csv"}},
              dir / "attention_comparison.svg", "Validation MSE, toy set");
  const std::string svg = slurp(dir / "attention_comparison.svg");
  int legend = 0;
  for (auto p = svg.find("legend-entry"); p != std::string::npos; p = svg.find("legend-entry", p + 1)) ++legend;
  c.expect(rb.curve.points.size() == 30 && ra.curve.points.size() == 30, "curves incomplete");
  c.expect(legend == 2, "plot legend entries " + std::to_string(legend));
  c.expect(std::isfinite(rb.best_val_mse) && std::isfinite(ra.best_val_mse), "non-finite MSE");
  const double fb = rb.curve.points.back().val_mse, fa = ra.curve.points.back().val_mse;
  std::ofstream(dir / "attention_comparison.txt") << "baseline_final_val_mse " << num(fb, 10) << "\n"
                                                  << "attention_final_val_mse " << num(fa, 10) << "\n"
                                                  << "baseline_best_val_mse " << num(rb.best_val_mse, 10) << "\n"
                                                  << "attention_best_val_mse " << num(ra.best_val_mse, 10) << "\n";
  return "final val MSE baseline " + num(fb, 4) + ", attention " + num(fa, 4) + " (best " + num(rb.best_val_mse, 4) +
         " vs " + num(ra.best_val_mse, 4) + ", improvement " + num(improvement_percent(rb.best_val_mse, ra.best_val_mse), 3) +
         "%)";
}

// 9
std::string saliency_contract(Checker& c) {
  Model<float> base = build_model<float>(toy_resnet_config());
  Model<float> att = build_model<float>(toy_attention_config());
  int maps = 0;
  for (int i = 0; i < 4; ++i) {
    const RgbImage img = render_toy_image(-0.75 + 0.5 * i, kToyHeight, kToyWidth, 17 + static_cast<std::uint64_t>(i));
    for (const char* layer : {"input", "stem", "layer1", "layer2", "layer3", "layer4"}) {
      const SaliencyMap m = saliency_map(base, img, layer);
      float lo = 1.0f, hi = 0.0f;
      for (float v : m.values) lo = std::min(lo, v), hi = std::max(hi, v);
      c.expect(lo >= 0.0f && hi == 1.0f, std::string(layer) + " range [" + num(lo) + ", " + num(hi) + "]");
      c.expect(m.height == kToyHeight && m.width == kToyWidth, "map size");
      ++maps;
    }
    const RgbImage strip = saliency_strip(base, att, img, "input");
    c.expect(strip.width == 3 * kToyWidth && strip.height == kToyHeight, "strip is not 3 panels");
  }
  using Px = std::array<std::uint8_t, 3>;
  c.expect(colormap(0.0f) == Px{0, 0, 0}, "colormap(0) not black");
  c.expect(colormap(0.5f) == Px{255, 0, 0}, "colormap(0.5) not red");
  c.expect(colormap(1.0f) == Px{255, 255, 0}, "colormap(1) not yellow");

  Rng rng(9);
  RgbImage a(8, 8), b(8, 8);
  for (auto& p : a.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  for (auto& p : b.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  const RgbImage blended = blend(a, b, kDefaultBlendRatio);
  bool convex = true;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double want = 0.75 * b.pixels[i] + 0.25 * a.pixels[i];
    convex &= std::abs(blended.pixels[i] - want) <= 0.5 + 1e-9;
    convex &= blended.pixels[i] >= std::min(a.pixels[i], b.pixels[i]) && blended.pixels[i] <= std::max(a.pixels[i], b.pixels[i]);
  }
  c.expect(convex, "blend at 0.75 is not the convex combination");
  return std::to_string(maps) + " maps, colormap endpoints, blend 0.75, 4 strips";
}

// 10
std::string determinism(Checker& c, const fs::path& dir, const fs::path& toy_manifest) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "base.conf") << "seed = 5\nmodel.family = resnet\nmodel.block_layers = 1,1,1,1\n"
                                      "model.stage_widths = 8,16,32,64\nmodel.input_shape = 3,32,64\n"
                                      "data.format = toy\ndata.manifest = "
                                   << toy_manifest.string()
                                   << "\ntrain.epochs = 5\ntrain.learning_rate = 0.001\n"
                                      "attack.list = fgsm:0.01,fgsm:0.03,pgd:0.01,pgd:0.03\n";
  std::ofstream(dir / "att.conf") << slurp(dir / "base.conf")
                                  << "model.block_layers = 2,2,2,2\nmodel.attention.stages = 1,2,3\n"
                                     "model.attention.downsample_steps = 1\n";
  auto run = [&](std::vector<std::string> args) {
    std::ostringstream out, err;
    args.insert(args.begin(), "--quiet");
    const int s = run_cli(args, out, err);
    c.expect(s == 0, "steerbench " + args[1] + ": " + err.str());
  };
  for (const char* r : {"train1", "train2"})
    run({"train", "--config", (dir / "base.conf").string(), "--out-dir", (dir / r).string()});
  run({"train", "--config", (dir / "att.conf").string(), "--out-dir", (dir / "att").string()});
  const std::string curve = slurp(dir / "train1" / "curve.csv");
  c.expect(!curve.empty() && curve == slurp(dir / "train2" / "curve.csv"), "train curve CSVs differ");
  for (const char* r : {"attack1", "attack2"})
    run({"attack", "--config", (dir / "base.conf").string(), "--out-dir", (dir / r).string(), "--checkpoint",
         (dir / "train1" / "model.ckpt").string(), "--checkpoint", (dir / "att" / "model.ckpt").string()});
  const std::string report = slurp(dir / "attack1" / "robustness.csv");
  c.expect(!report.empty() && report == slurp(dir / "attack2" / "robustness.csv"), "attack report CSVs differ");
  return "curve.csv " + std::to_string(curve.size()) + " bytes and robustness.csv " + std::to_string(report.size()) +
         " bytes identical across reruns";
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path artifacts = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "steerbench_acceptance";
  fs::create_directories(artifacts);
  set_quiet(true);

  std::optional<ToySplit> toy;
  auto toy_data = [&]() -> const ToySplit& {
    if (!toy) toy = make_toy_split(artifacts / "toy");
    return *toy;
  };

  const std::vector<std::pair<std::string, std::function<std::string(Checker&)>>> criteria{
      {"percentage reproduction", percentage_reproduction},
      {"improvement reproduction", improvement_reproduction},
      {"parameter-count fidelity", parameter_fidelity},
      {"gradient correctness", gradient_correctness},
      {"attack invariants", attack_invariants},
      {"attention invariants", attention_invariants},
      {"toy-scale convergence", [&](Checker& c) { return toy_convergence(c, toy_data()); }},
      {"attention comparison smoke run",
       [&](Checker& c) { return attention_smoke(c, toy_data(), artifacts / "attention_smoke"); }},
      {"saliency contract", saliency_contract},
      {"determinism",
       [&](Checker& c) {
         toy_data();
         return determinism(c, artifacts / "determinism", artifacts / "toy" / "manifest.csv");
       }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker c;
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      detail = criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!c.ok()) ++failed;
    std::cout << (c.ok() ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << " - " << detail << " ("
              << c.summary() << ", " << num(secs, 3) << " s)" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
