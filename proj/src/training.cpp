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

#include "steerbench/training.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "steerbench/errors.hpp"
#include "steerbench/log.hpp"

namespace steer {
namespace {

template <typename T>
double mse_impl(std::span<const T> predicted, std::span<const T> actual) {
  if (predicted.size() != actual.size())
    throw StructuralError("mse_loss: " + std::to_string(predicted.size()) + " predictions vs " +
                          std::to_string(actual.size()) + " targets");
  if (predicted.empty()) throw StructuralError("mse_loss: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = static_cast<double>(actual[i]) - static_cast<double>(predicted[i]);
    s += d * d;
  }
  return s / static_cast<double>(predicted.size());
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::uint64_t epoch_seed(std::uint64_t seed, int epoch) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(epoch) * 0xD1B54A32D192ED03ULL + 1;
}

class Optimizer {
 public:
  Optimizer(std::vector<NamedParam<float>> params, const TrainHyper& h) : h_(h) {
    for (auto& p : params)
      if (p.param->trainable) {
        params_.push_back(p.param);
        m_.emplace_back(p.param->value.size(), 0.0f);
        v_.emplace_back(h.optimizer == OptimizerKind::kAdam ? p.param->value.size() : 0, 0.0f);
      }
  }

  void step() {
    ++t_;
    const float lr = static_cast<float>(h_.learning_rate);
    if (h_.optimizer == OptimizerKind::kSgdMomentum) {
      const float mu = static_cast<float>(h_.momentum);
      for (std::size_t k = 0; k < params_.size(); ++k) {
        auto& w = params_[k]->value;
        const auto& g = params_[k]->grad;
        auto& m = m_[k];
        for (std::size_t i = 0; i < w.size(); ++i) {
          m[i] = mu * m[i] + g[i];
          w[i] -= lr * m[i];
        }
      }
      return;
    }
    const double b1 = h_.beta1, b2 = h_.beta2;
    const double c1 = 1.0 - std::pow(b1, t_), c2 = 1.0 - std::pow(b2, t_);
    const float step = static_cast<float>(h_.learning_rate * std::sqrt(c2) / c1);
    const float eps = static_cast<float>(h_.adam_eps * std::sqrt(c2));
    const float fb1 = static_cast<float>(b1), fb2 = static_cast<float>(b2);
    for (std::size_t k = 0; k < params_.size(); ++k) {
      auto& w = params_[k]->value;
      const auto& g = params_[k]->grad;
      auto& m = m_[k];
      auto& v = v_[k];
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = fb1 * m[i] + (1.0f - fb1) * g[i];
        v[i] = fb2 * v[i] + (1.0f - fb2) * g[i] * g[i];
        w[i] -= step * m[i] / (std::sqrt(v[i]) + eps);
      }
    }
  }

 private:
  TrainHyper h_;
  std::vector<Param<float>*> params_;
  std::vector<std::vector<float>> m_, v_;
  int t_ = 0;
};

}  // namespace

double mse_loss(std::span<const float> predicted, std::span<const float> actual) {
  return mse_impl(predicted, actual);
}
double mse_loss(std::span<const double> predicted, std::span<const double> actual) {
  return mse_impl(predicted, actual);
}

std::vector<double> mse_gradient(std::span<const double> predicted, std::span<const double> actual) {
  mse_impl(predicted, actual);
  std::vector<double> g(predicted.size());
  const double n = static_cast<double>(predicted.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * (predicted[i] - actual[i]) / n;
  return g;
}

double improvement_percent(double baseline_mse, double variant_mse) {
  if (!(baseline_mse > 0.0)) throw DomainError("improvement_percent: baseline MSE must be positive");
  return 100.0 * (baseline_mse - variant_mse) / baseline_mse;
}

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "adam") return OptimizerKind::kAdam;
  if (s == "sgd" || s == "sgd_momentum") return OptimizerKind::kSgdMomentum;
  throw ConfigError("unknown optimizer '" + s + "' (expected adam|sgd)");
}

std::string to_string(OptimizerKind k) { return k == OptimizerKind::kAdam ? "adam" : "sgd"; }

void TrainHyper::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("train.learning_rate must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train.momentum must lie in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("train.beta1/beta2 must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("train.adam_eps must be positive");
  if (batch_size < 16 || batch_size > 128)
    log_warning("batch_size " + std::to_string(batch_size) + " is outside the usual 16..128 range");
}

KeyValueDoc TrainHyper::to_doc(const std::string& prefix) const {
  KeyValueDoc d;
  const std::string p = prefix.empty() ? "" : prefix + ".";
  d.set(p + "epochs", std::to_string(epochs));
  d.set(p + "batch_size", std::to_string(batch_size));
  d.set(p + "optimizer", to_string(optimizer));
  d.set(p + "learning_rate", shortest(learning_rate));
  d.set(p + "momentum", shortest(momentum));
  d.set(p + "seed", std::to_string(seed));
  return d;
}

TrainHyper TrainHyper::from_doc(const KeyValueDoc& doc, const std::string& prefix) {
  const std::string p = prefix.empty() ? "" : prefix + ".";
  TrainHyper h;
  h.epochs = static_cast<int>(doc.get_int(p + "epochs", h.epochs));
  h.batch_size = static_cast<int>(doc.get_int(p + "batch_size", h.batch_size));
  h.optimizer = parse_optimizer(doc.get(p + "optimizer", to_string(h.optimizer)));
  h.learning_rate = doc.get_double(p + "learning_rate", h.learning_rate);
  h.momentum = doc.get_double(p + "momentum", h.momentum);
  h.seed = static_cast<std::uint64_t>(doc.get_int(p + "seed", static_cast<long long>(h.seed)));
  return h;
}

void TrainingCurve::write_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "epoch,train_mse,val_mse\n";
  char buf[64];
  for (const auto& p : points) {
    out << p.epoch;
    for (double v : {p.train_mse, p.val_mse}) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

TrainingCurve TrainingCurve::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open curve " + path.string());
  TrainingCurve c;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || (row == 1 && line.rfind("epoch", 0) == 0)) continue;
    std::stringstream ss(line);
    std::string e, t, v;
    std::getline(ss, e, ',');
    std::getline(ss, t, ',');
    std::getline(ss, v, ',');
    try {
      c.points.push_back({std::stoi(e), std::stod(t), std::stod(v)});
    } catch (const std::exception&) {
      throw LoadError(path.string() + ":" + std::to_string(row) + ": malformed curve row");
    }
  }
  return c;
}

std::vector<float> predict_all(const Model<float>& model, const SampleSet& data, int batch_size) {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  std::vector<float> out;
  out.reserve(data.size());
  for (const auto& ids : batch_plan(data.size(), batch_size, std::nullopt)) {
    const auto p = predict_angle(model, data.gather(ids).images);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

double evaluate(const Model<float>& model, const SampleSet& data, int batch_size) {
  if (data.size() == 0) throw StructuralError("evaluate: empty dataset");
  const auto p = predict_all(model, data, batch_size);
  return mse_loss(std::span<const float>(p), std::span<const float>(data.targets()));
}

ModelState snapshot(Model<float>& model) {
  ModelState s;
  for (const auto& p : parameters(*model.graph)) s.emplace_back(p.name, p.param->value);
  return s;
}

void restore(Model<float>& model, const ModelState& state) {
  auto params = parameters(*model.graph);
  if (params.size() != state.size()) throw StructuralError("restore: tensor count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name != state[i].first) throw StructuralError("restore: expected tensor " + params[i].name);
    params[i].param->value.require_same(state[i].second, "restore");
    params[i].param->value = state[i].second;
  }
}

TrainResult train(Model<float>& model, const SampleSet& train_data, const SampleSet& val_data,
                  const TrainHyper& hyper, const TrainOptions& options) {
  hyper.validate();
  if (train_data.size() == 0 || val_data.size() == 0) throw StructuralError("train: empty train or validation set");
  const Shape want = model.input_shape(1);
  for (const SampleSet* s : {&train_data, &val_data})
    if (s->height() != want[2] || s->width() != want[3])
      throw StructuralError("train: samples are " + std::to_string(s->height()) + "x" + std::to_string(s->width()) +
                            ", model expects " + shape_str(want));

  Optimizer opt(parameters(*model.graph), hyper);
  const Mode mode = hyper.learning_rate == 0.0 ? Mode::kTrainFrozen : Mode::kTrain;
  TrainResult result;
  result.best_val_mse = std::numeric_limits<double>::infinity();
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    double sum = 0.0;
    int batch_no = 0;
    for (const auto& ids : batch_plan(train_data.size(), hyper.batch_size, epoch_seed(hyper.seed, epoch))) {
      ++batch_no;
      const Batch b = train_data.gather(ids);
      zero_grad(*model.graph);
      const Tensor<float> out = model.graph->forward(b.images, mode);
      Tensor<float> g(out.shape());
      double loss = 0.0;
      for (int i = 0; i < b.n; ++i) {
        const double d = static_cast<double>(out[static_cast<std::size_t>(i)]) - b.targets[static_cast<std::size_t>(i)];
        loss += d * d;
        g[static_cast<std::size_t>(i)] = static_cast<float>(2.0 * d / b.n);
      }
      if (!std::isfinite(loss))
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_no));
      sum += loss;
      model.graph->backward(g);
      opt.step();
    }
    CurvePoint pt{epoch, sum / static_cast<double>(train_data.size()), evaluate(model, val_data)};
    if (!std::isfinite(pt.val_mse))
      throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
    result.curve.points.push_back(pt);
    if (pt.val_mse < result.best_val_mse) {
      result.best_val_mse = pt.val_mse;
      result.best_epoch = epoch;
      result.best_state = snapshot(model);
    }
    if (options.on_epoch) options.on_epoch(pt);
  }
  if (options.restore_best) restore(model, result.best_state);
  return result;
}

}  // namespace steer
