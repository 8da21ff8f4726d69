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

#include "steerbench/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "steerbench/checkpoint.hpp"
#include "steerbench/errors.hpp"
#include "steerbench/image.hpp"
#include "steerbench/log.hpp"
#include "steerbench/model_zoo.hpp"
#include "steerbench/reporting.hpp"
#include "steerbench/saliency.hpp"
#include "steerbench/toy.hpp"

namespace steer {
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_doc(const KeyValueDoc& doc) {
  ExperimentConfig c;
  c.doc = doc;
  if (!doc.has("seed")) throw ConfigError("missing required key 'seed' (set it in the config or pass --seed)");
  c.seed = static_cast<std::uint64_t>(doc.get_int("seed"));
  c.out_dir = doc.get("out_dir", "runs");
  return c;
}

ModelConfig ExperimentConfig::model() const {
  ModelConfig m = ModelConfig::from_doc(doc, "model");
  if (!doc.has("model.init_seed")) m.init_seed = seed;
  return m;
}

TrainHyper ExperimentConfig::hyper() const {
  KeyValueDoc d = doc;
  if (!d.has("train.seed")) d.set("train.seed", std::to_string(seed));
  TrainHyper h = TrainHyper::from_doc(d, "train");
  h.validate();
  return h;
}

std::vector<AttackConfig> ExperimentConfig::attacks() const {
  std::optional<double> step;
  if (doc.has("attack.step_size")) step = doc.get_double("attack.step_size");
  return parse_attack_list(doc.get("attack.list", "fgsm:0.01,pgd:0.01"),
                           static_cast<int>(doc.get_int("attack.steps", 10)), step,
                           doc.get_bool("attack.random_start", true), seed);
}

SourceFormat ExperimentConfig::format() const { return parse_source_format(doc.get("data.format", "toy")); }

fs::path ExperimentConfig::manifest() const {
  if (!doc.has("data.manifest")) throw ConfigError("missing required key 'data.manifest' (or pass --data)");
  return doc.get("data.manifest");
}

LoadOptions ExperimentConfig::load_options() const {
  LoadOptions o;
  o.angle_unit = parse_angle_unit(doc.get("data.angle_unit", "radians"));
  o.max_angle_rad = doc.get_double("data.max_angle_rad", kDefaultMaxAngleRad);
  return o;
}

double ExperimentConfig::val_fraction() const { return doc.get_double("data.val_fraction", 0.2); }

std::uint64_t ExperimentConfig::split_seed() const {
  return static_cast<std::uint64_t>(doc.get_int("data.split_seed", 42));
}

Preprocess ExperimentConfig::preprocess(const ModelConfig& model, bool training) const {
  Preprocess p;
  p.height = model.input_shape[1];
  p.width = model.input_shape[2];
  p.side_cameras = training && doc.get_bool("data.side_cameras", true);
  p.camera_correction = doc.get_double("data.camera_correction", kDefaultCameraCorrection);
  return p;
}

SplitData load_split(const ExperimentConfig& cfg, const ModelConfig& model) {
  const DatasetIndex index = load_manifest(cfg.manifest(), cfg.format(), cfg.load_options());
  for (const auto& w : index.warnings) log_warning(w);
  const auto [train_index, val_index] = split(index, cfg.val_fraction(), cfg.split_seed());
  return {load_samples(train_index, cfg.preprocess(model, true)), load_samples(val_index, cfg.preprocess(model, false))};
}

std::vector<AttackConfig> parse_attack_list(const std::string& text, int steps, std::optional<double> step_size,
                                            bool random_start, std::uint64_t seed) {
  std::vector<AttackConfig> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("attack entry '" + item + "' must be method:epsilon");
    const AttackMethod m = parse_attack_method(trim(item.substr(0, colon)));
    double eps = 0.0;
    try {
      std::size_t used = 0;
      const std::string e = trim(item.substr(colon + 1));
      eps = std::stod(e, &used);
      if (used != e.size()) throw std::invalid_argument(e);
    } catch (const std::exception&) {
      throw ConfigError("attack entry '" + item + "' has a malformed epsilon");
    }
    AttackConfig c = m == AttackMethod::kFgsm ? fgsm_config(eps) : pgd_config(eps, steps, step_size, random_start, seed);
    c.seed = seed;
    c.validate();
    out.push_back(c);
  }
  if (out.empty()) throw ConfigError("attack list is empty");
  return out;
}

ModelConfig sweep_config(Family family, const std::vector<int>& block_layers, int width_divisor,
                         std::array<int, 3> input_shape, std::uint64_t init_seed) {
  if (width_divisor < 1) throw ConfigError("sweep width divisor must be >= 1");
  ModelConfig c = family == Family::kResNet ? resnet_config(block_layers, {64, 128, 256, 512}, input_shape)
                                            : inception_config(block_layers, {544, 736, 928}, input_shape);
  for (int& w : c.stage_widths) w = std::max(1, w / width_divisor);
  c.stem_width = std::max(1, c.effective_stem_width() / width_divisor);
  c.init_seed = init_seed;
  c.validate();
  return c;
}

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> checkpoints;
  std::vector<std::string> sets;
  std::string data;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Key-value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Seed (overrides the config)");
  cmd->add_option("--out-dir", c.out_dir, "Output directory (overrides the config)");
  cmd->add_option("--checkpoint", c.checkpoints, "Checkpoint path(s)");
  cmd->add_option("--set", c.sets, "Config override key=value (repeatable)");
  cmd->add_option("--data", c.data, "Dataset manifest (overrides data.manifest)");
}

KeyValueDoc resolve_doc(const Common& c) {
  KeyValueDoc doc = c.config.empty() ? KeyValueDoc{} : KeyValueDoc::load(c.config);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    doc.set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  if (c.seed) doc.set("seed", std::to_string(*c.seed));
  if (!c.out_dir.empty()) doc.set("out_dir", c.out_dir);
  if (!c.data.empty()) doc.set("data.manifest", c.data);
  return doc;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw LoadError("cannot write " + p.string());
  return f;
}

std::string model_label(const ModelConfig& m, const std::string& fallback) { return m.name.empty() ? fallback : m.name; }

PlotSpec curve_spec(const TrainingCurve& curve, const std::string& title) {
  PlotSpec spec{title, "Epoch", "MSE", {{"train", {}, {}}, {"validation", {}, {}}}, false};
  for (const auto& p : curve.points) {
    spec.series[0].x.push_back(p.epoch);
    spec.series[0].y.push_back(p.train_mse);
    spec.series[1].x.push_back(p.epoch);
    spec.series[1].y.push_back(p.val_mse);
  }
  return spec;
}

int cmd_train(const Common& c, std::ostream& out) {
  const ExperimentConfig cfg = ExperimentConfig::from_doc(resolve_doc(c));
  const ModelConfig mc = cfg.model();
  const TrainHyper hyper = cfg.hyper();
  if (c.checkpoints.size() > 1) throw ConfigError("train takes at most one --checkpoint");
  const SplitData data = load_split(cfg, mc);
  Model<float> model = build_model<float>(mc);

  fs::create_directories(cfg.out_dir);
  const fs::path ckpt = c.checkpoints.empty() ? cfg.out_dir / "model.ckpt" : fs::path(c.checkpoints[0]);
  std::ofstream metrics = open_out(cfg.out_dir / "metrics.jsonl");
  TrainOptions opts;
  opts.on_epoch = [&](const CurvePoint& p) {
    metrics << nlohmann::json{{"epoch", p.epoch}, {"train_mse", p.train_mse}, {"val_mse", p.val_mse}}.dump() << '\n';
  };
  const TrainResult r = train(model, data.train, data.val, hyper, opts);
  metrics << nlohmann::json{{"event", "best"}, {"epoch", r.best_epoch}, {"val_mse", r.best_val_mse},
                            {"params", model.parameter_count()}, {"train_samples", data.train.size()},
                            {"val_samples", data.val.size()}}
                 .dump()
          << '\n';
  metrics.close();

  r.curve.write_csv(cfg.out_dir / "curve.csv");
  write_svg(curve_spec(r.curve, model_label(mc, to_string(mc.family)) + " MSE"), cfg.out_dir / "curve.svg");
  KeyValueDoc extra = hyper.to_doc("train");
  extra.set("result.best_epoch", std::to_string(r.best_epoch));
  extra.set("result.best_val_mse", fmt(r.best_val_mse));
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  save_checkpoint(ckpt, model, extra);
  out << "best val MSE " << fmt(r.best_val_mse) << " at epoch " << r.best_epoch << "; checkpoint " << ckpt.string()
      << '\n';
  return 0;
}

const NamedTuple* find_tuple(const std::string& name, Family& family) {
  for (const auto& t : resnet_table())
    if (t.name == name) return family = Family::kResNet, &t;
  for (const auto& t : inception_table())
    if (t.name == name) return family = Family::kInception, &t;
  return nullptr;
}

int cmd_sweep(const Common& c, const std::string& family_name, const std::string& model_name, std::ostream& out) {
  const KeyValueDoc doc = resolve_doc(c);
  const ExperimentConfig cfg = ExperimentConfig::from_doc(doc);
  std::array<int, 3> shape{3, kToyHeight, kToyWidth};
  if (doc.has("model.input_shape")) {
    const auto s = doc.get_int_list("model.input_shape");
    if (s.size() != 3) throw ConfigError("model.input_shape must be C,H,W");
    shape = {s[0], s[1], s[2]};
  }
  const int resnet_div = static_cast<int>(doc.get_int("sweep.resnet_width_divisor", 8));
  const int inception_div = static_cast<int>(doc.get_int("sweep.inception_width_divisor", 16));

  struct Job {
    Family family;
    NamedTuple tuple;
  };
  std::vector<Job> jobs;
  if (!model_name.empty()) {
    Family f{};
    const NamedTuple* t = find_tuple(model_name, f);
    if (!t) throw ConfigError("unknown model '" + model_name + "'");
    jobs.push_back({f, *t});
  } else {
    if (family_name != "resnet" && family_name != "inception" && family_name != "both")
      throw ConfigError("--family must be resnet, inception or both");
    if (family_name != "inception")
      for (const auto& t : resnet_table()) jobs.push_back({Family::kResNet, t});
    if (family_name != "resnet")
      for (const auto& t : inception_table()) jobs.push_back({Family::kInception, t});
  }

  ModelConfig probe = sweep_config(jobs[0].family, jobs[0].tuple.block_layers, resnet_div, shape, cfg.seed);
  const SplitData data = load_split(cfg, probe);
  const TrainHyper hyper = cfg.hyper();

  std::vector<SweepRow> rows;
  std::vector<std::pair<std::string, std::vector<SweepRow>>> families;
  for (const auto& job : jobs) {
    ModelConfig mc = sweep_config(job.family, job.tuple.block_layers,
                                  job.family == Family::kResNet ? resnet_div : inception_div, shape, cfg.seed);
    mc.name = job.tuple.name;
    Model<float> model = build_model<float>(mc);
    const TrainResult r = train(model, data.train, data.val, hyper);
    const SweepRow row{mc.name, model.parameter_count(), r.best_val_mse};
    rows.push_back(row);
    const std::string fam = job.family == Family::kResNet ? "ResNet" : "InceptionNet";
    if (families.empty() || families.back().first != fam) families.push_back({fam, {}});
    families.back().second.push_back(row);
    out << row.model << " params=" << row.params << " val_mse=" << fmt(row.val_mse) << '\n';
  }
  fs::create_directories(cfg.out_dir);
  write_sweep_csv(rows, cfg.out_dir / "sweep.csv");
  write_svg(sweep_plot(families), cfg.out_dir / "sweep.svg");
  return 0;
}

Model<float> load_model(const std::string& path) {
  if (!fs::exists(path)) throw LoadError("checkpoint not found: " + path);
  return std::move(load_checkpoint(path).model);
}

int cmd_eval(const Common& c, const std::string& which, std::ostream& out) {
  if (c.checkpoints.size() != 1) throw ConfigError("eval takes exactly one --checkpoint");
  KeyValueDoc doc = resolve_doc(c);
  if (!doc.has("seed")) doc.set("seed", "0");
  const ExperimentConfig cfg = ExperimentConfig::from_doc(doc);
  Model<float> model = load_model(c.checkpoints[0]);
  double mse = 0.0;
  std::size_t n = 0;
  if (which == "all") {
    const DatasetIndex index = load_manifest(cfg.manifest(), cfg.format(), cfg.load_options());
    const SampleSet s = load_samples(index, cfg.preprocess(model.config, false));
    mse = evaluate(model, s);
    n = s.size();
  } else if (which == "val") {
    const SplitData d = load_split(cfg, model.config);
    mse = evaluate(model, d.val);
    n = d.val.size();
  } else {
    throw ConfigError("--split must be val or all");
  }
  out << which << "_mse " << fmt(mse) << " over " << n << " samples\n";
  if (doc.has("out_dir")) {
    fs::create_directories(cfg.out_dir);
    open_out(cfg.out_dir / "eval.json")
        << nlohmann::json{{"split", which}, {"mse", mse}, {"samples", n}}.dump() << '\n';
  }
  return 0;
}

int cmd_attack(const Common& c, std::ostream& out) {
  if (c.checkpoints.size() != 2) throw ConfigError("attack takes two --checkpoint paths: baseline then attention");
  const ExperimentConfig cfg = ExperimentConfig::from_doc(resolve_doc(c));
  const auto attacks = cfg.attacks();
  Model<float> models[2] = {load_model(c.checkpoints[0]), load_model(c.checkpoints[1])};
  if (models[0].config.input_shape != models[1].config.input_shape)
    throw ConfigError("attack: checkpoints have different input shapes");
  const SplitData data = load_split(cfg, models[0].config);
  const char* names[2] = {"baseline", "attention"};
  RobustnessReport report;
  for (int m = 0; m < 2; ++m) {
    const double clean = evaluate(models[m], data.val);
    for (const auto& a : attacks)
      report.rows.push_back({names[m], to_string(a.method), a.epsilon, clean, robustness_eval(models[m], data.val, a)});
  }
  fs::create_directories(cfg.out_dir);
  report.write_csv(cfg.out_dir / "robustness.csv");
  const std::string table = render_table(report, names[0], names[1]);
  open_out(cfg.out_dir / "robustness_table.txt") << table;
  out << table;
  return 0;
}

int cmd_saliency(const Common& c, std::vector<std::string> images, const std::string& list, const std::string& layer,
                 double ratio, std::ostream& out) {
  if (!list.empty()) {
    std::ifstream in(list);
    if (!in) throw LoadError("cannot open image list " + list);
    std::string line;
    while (std::getline(in, line))
      if (!trim(line).empty()) images.push_back(trim(line));
  }
  if (images.empty()) throw ConfigError("saliency: no images given");
  if (c.checkpoints.size() != 2) throw ConfigError("saliency takes two --checkpoint paths: baseline then attention");
  const KeyValueDoc doc = resolve_doc(c);
  const fs::path out_dir = doc.get("out_dir", "runs");
  Model<float> base = load_model(c.checkpoints[0]);
  Model<float> att = load_model(c.checkpoints[1]);
  fs::create_directories(out_dir);
  int written = 0, skipped = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    RgbImage img;
    try {
      img = read_image(images[i]);
    } catch (const LoadError& e) {
      log_warning(std::string("skipping image: ") + e.what());
      ++skipped;
      continue;
    }
    char prefix[32];
    std::snprintf(prefix, sizeof(prefix), "saliency_%03zu_", i);
    const fs::path dst = out_dir / (prefix + fs::path(images[i]).stem().string() + ".png");
    write_png(dst, saliency_strip(base, att, img, layer, ratio));
    ++written;
  }
  out << "wrote " << written << " strips, skipped " << skipped << '\n';
  if (written == 0) throw LoadError("saliency: no readable images");
  return 0;
}

int cmd_toygen(const std::string& out_dir, int samples, int height, int width, std::uint64_t seed, std::ostream& out) {
  if (out_dir.empty()) throw ConfigError("toygen requires --out-dir");
  if (samples < 2 || height < 1 || width < 1) throw ConfigError("toygen: need samples >= 2 and a positive size");
  const DatasetIndex index = generate_toy_dataset(samples, height, width, seed, out_dir);
  out << "wrote " << index.size() << " samples to " << (fs::path(out_dir) / "manifest.csv").string() << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"steerbench: steering-angle regression benchmarks with attention and adversarial attacks"};
  app.require_subcommand(1);
  bool quiet_flag = false;
  app.add_flag("-q,--quiet", quiet_flag, "Suppress warnings and progress");

  Common train_c, sweep_c, eval_c, attack_c, sal_c;
  auto* train_cmd = app.add_subcommand("train", "Train one model; writes checkpoint, curve CSV, metrics and plot");
  add_common(train_cmd, train_c);

  auto* sweep_cmd = app.add_subcommand("sweep", "Train every table configuration at toy scale");
  add_common(sweep_cmd, sweep_c);
  std::string family = "resnet", sweep_model;
  sweep_cmd->add_option("--family", family, "resnet, inception or both");
  sweep_cmd->add_option("--model", sweep_model, "Single configuration by name (e.g. ResNet32)");

  auto* eval_cmd = app.add_subcommand("eval", "MSE of a checkpoint on a dataset");
  add_common(eval_cmd, eval_c);
  std::string which = "val";
  eval_cmd->add_option("--split", which, "val or all");

  auto* attack_cmd = app.add_subcommand("attack", "FGSM/PGD robustness of a baseline and an attention checkpoint");
  add_common(attack_cmd, attack_c);

  auto* sal_cmd = app.add_subcommand("saliency", "Original | baseline | attention saliency strips");
  add_common(sal_cmd, sal_c);
  std::vector<std::string> images;
  std::string image_list, layer = "layer4";
  double ratio = kDefaultBlendRatio;
  sal_cmd->add_option("--image", images, "Input image (repeatable)");
  sal_cmd->add_option("--image-list", image_list, "File with one image path per line");
  sal_cmd->add_option("--layer", layer, "input, stem, layer1..layer4 or attN");
  sal_cmd->add_option("--ratio", ratio, "Overlay weight of the saliency colors");

  auto* toy_cmd = app.add_subcommand("toygen", "Generate the synthetic road-band dataset");
  std::string toy_out;
  int samples = kToySamples, height = kToyHeight, width = kToyWidth;
  std::uint64_t toy_seed = 42;
  toy_cmd->add_option("--out-dir", toy_out, "Output directory")->required();
  toy_cmd->add_option("--samples", samples, "Number of images");
  toy_cmd->add_option("--height", height, "Image height");
  toy_cmd->add_option("--width", width, "Image width");
  toy_cmd->add_option("--seed", toy_seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  const bool was_quiet = quiet();
  if (quiet_flag) set_quiet(true);
  int status = 1;
  try {
    if (*train_cmd) status = cmd_train(train_c, out);
    else if (*sweep_cmd) status = cmd_sweep(sweep_c, family, sweep_model, out);
    else if (*eval_cmd) status = cmd_eval(eval_c, which, out);
    else if (*attack_cmd) status = cmd_attack(attack_c, out);
    else if (*sal_cmd) status = cmd_saliency(sal_c, images, image_list, layer, ratio, out);
    else if (*toy_cmd) status = cmd_toygen(toy_out, samples, height, width, toy_seed, out);
  } catch (const std::exception& e) {
    err << "steerbench: error: " << e.what() << '\n';
    status = 1;
  }
  set_quiet(was_quiet);
  return status;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"steerbench"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace steer
