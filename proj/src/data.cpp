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

#include "steerbench/data.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "steerbench/errors.hpp"
#include "steerbench/log.hpp"
#include "steerbench/rng.hpp"

namespace fs = std::filesystem;

namespace steer {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split_fields(const std::string& line, bool allow_whitespace) {
  std::vector<std::string> out;
  if (line.find(',') != std::string::npos || !allow_whitespace) {
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(trim(f));
    if (!line.empty() && line.back() == ',') out.emplace_back();
  } else {
    std::istringstream ss(line);
    std::string f;
    while (ss >> f) out.push_back(f);
  }
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Simulator logs often carry absolute paths from the recording machine; fall
// back to <manifest dir>/IMG/<file name> when the literal path is absent.
std::optional<fs::path> resolve_image(const std::string& raw, const fs::path& root) {
  if (raw.empty()) return std::nullopt;
  fs::path p(raw);
  fs::path candidate = p.is_absolute() ? p : root / p;
  if (fs::is_regular_file(candidate)) return candidate;
  const auto slash = raw.find_last_of("/\\");
  const std::string name = slash == std::string::npos ? raw : raw.substr(slash + 1);
  for (const fs::path& alt : {root / "IMG" / name, root / name})
    if (fs::is_regular_file(alt)) return alt;
  return candidate;
}

double to_radians(double v, AngleUnit unit, double max_angle) {
  switch (unit) {
    case AngleUnit::kRadians: return v;
    case AngleUnit::kDegrees: return v * std::numbers::pi / 180.0;
    case AngleUnit::kNormalized: return v * max_angle;
  }
  return v;
}

}  // namespace

SourceFormat parse_source_format(const std::string& s) {
  if (s == "kaggle_sap" || s == "kaggle") return SourceFormat::kKaggleSap;
  if (s == "udacity_sim" || s == "udacity") return SourceFormat::kUdacitySim;
  if (s == "toy") return SourceFormat::kToy;
  throw ConfigError("unknown dataset format '" + s + "' (expected kaggle_sap|udacity_sim|toy)");
}

AngleUnit parse_angle_unit(const std::string& s) {
  if (s == "radians") return AngleUnit::kRadians;
  if (s == "degrees") return AngleUnit::kDegrees;
  if (s == "normalized") return AngleUnit::kNormalized;
  throw ConfigError("unknown angle unit '" + s + "' (expected radians|degrees|normalized)");
}

std::string to_string(SourceFormat f) {
  switch (f) {
    case SourceFormat::kKaggleSap: return "kaggle_sap";
    case SourceFormat::kUdacitySim: return "udacity_sim";
    case SourceFormat::kToy: return "toy";
  }
  return "toy";
}

DatasetIndex load_manifest(const fs::path& path, SourceFormat format, const LoadOptions& options) {
  std::ifstream in(path);
  if (!fs::is_regular_file(path) || !in) throw LoadError("cannot open manifest " + path.string());

  DatasetIndex index;
  index.format = format;
  index.root = path.has_parent_path() ? path.parent_path() : fs::path(".");

  auto skip = [&](int lineno, const std::string& why) {
    ++index.skipped_rows;
    std::string msg = path.filename().string() + ":" + std::to_string(lineno) + ": " + why;
    log_warning(msg);
    index.warnings.push_back(std::move(msg));
  };

  const bool udacity = format == SourceFormat::kUdacitySim;
  const AngleUnit unit = udacity ? AngleUnit::kNormalized
                                 : (format == SourceFormat::kToy ? AngleUnit::kRadians : options.angle_unit);
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line, !udacity);
    const std::size_t want = udacity ? 7 : 2;
    const std::size_t angle_col = udacity ? 3 : 1;
    const bool header_like = fields.size() > angle_col && !parse_number(fields[angle_col]);
    if (first && header_like) {
      first = false;
      continue;
    }
    first = false;
    if (fields.size() != want) {
      skip(lineno, "expected " + std::to_string(want) + " columns, got " + std::to_string(fields.size()));
      continue;
    }
    const auto raw_angle = parse_number(fields[angle_col]);
    if (!raw_angle) {
      skip(lineno, "steering value '" + fields[angle_col] + "' is not a number");
      continue;
    }
    const double steering = to_radians(*raw_angle, unit, options.max_angle_rad);
    if (!std::isfinite(steering) || std::abs(steering) > std::numbers::pi) {
      skip(lineno, "steering outside [-pi, pi]");
      continue;
    }

    SampleRecord rec;
    rec.steering = steering;
    const auto center = resolve_image(fields[0], index.root);
    if (!center || !fs::is_regular_file(*center)) {
      skip(lineno, "missing image '" + fields[0] + "'");
      continue;
    }
    rec.center = *center;
    bool ok = true;
    if (udacity) {
      for (auto [col, slot] : {std::pair{1, &rec.left}, std::pair{2, &rec.right}}) {
        const auto side = resolve_image(fields[static_cast<std::size_t>(col)], index.root);
        if (!side) continue;
        if (!fs::is_regular_file(*side)) {
          skip(lineno, "missing image '" + fields[static_cast<std::size_t>(col)] + "'");
          ok = false;
          break;
        }
        *slot = *side;
      }
    }
    if (ok) index.records.push_back(std::move(rec));
  }
  if (index.records.empty())
    throw EmptyDatasetError("manifest " + path.string() + " has no valid rows (" + std::to_string(index.skipped_rows) +
                            " skipped)");
  return index;
}

std::vector<CameraSample> expand_cameras(const SampleRecord& record, double correction) {
  std::vector<CameraSample> out{{record.center, record.steering}};
  if (record.left) out.push_back({*record.left, record.steering + correction});
  if (record.right) out.push_back({*record.right, record.steering - correction});
  return out;
}

std::pair<DatasetIndex, DatasetIndex> split(const DatasetIndex& index, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw ConfigError("split: val_fraction must lie in (0, 1), got " + std::to_string(val_fraction));
  const std::size_t n = index.records.size();
  if (n < 2) throw ConfigError("split: need at least 2 records");
  const auto want = static_cast<std::size_t>(std::llround(static_cast<double>(n) * val_fraction));
  const std::size_t n_val = std::clamp<std::size_t>(want, 1, n - 1);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<bool> is_val(n, false);
  for (std::size_t i = 0; i < n_val; ++i) is_val[order[i]] = true;

  DatasetIndex train, val;
  for (DatasetIndex* d : {&train, &val}) {
    d->format = index.format;
    d->root = index.root;
  }
  for (std::size_t i = 0; i < n; ++i) (is_val[i] ? val : train).records.push_back(index.records[i]);
  return {std::move(train), std::move(val)};
}

std::vector<std::vector<std::size_t>> batch_plan(std::size_t count, int batch_size,
                                                 std::optional<std::uint64_t> shuffle_seed) {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    rng.shuffle(order);
  }
  std::vector<std::vector<std::size_t>> plan;
  for (std::size_t i = 0; i < count; i += static_cast<std::size_t>(batch_size))
    plan.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                      order.begin() + static_cast<std::ptrdiff_t>(std::min(count, i + static_cast<std::size_t>(batch_size))));
  return plan;
}

BatchStream::BatchStream(std::vector<CameraSample> items, int batch_size, std::optional<std::uint64_t> shuffle_seed,
                         Preprocess preprocess)
    : items_(std::move(items)), plan_(batch_plan(items_.size(), batch_size, shuffle_seed)), pre_(preprocess) {}

std::optional<Batch> BatchStream::next() {
  while (cursor_ < plan_.size()) {
    const auto& ids = plan_[cursor_++];
    std::vector<RgbImage> images;
    std::vector<float> targets;
    for (std::size_t id : ids) {
      try {
        images.push_back(resize_image(read_image(items_[id].image), pre_.height, pre_.width));
        targets.push_back(static_cast<float>(items_[id].steering));
      } catch (const LoadError& e) {
        ++skipped_;
        log_warning(std::string(e.what()) + " (skipped)");
      }
    }
    if (images.empty()) continue;
    Batch b;
    b.n = static_cast<int>(images.size());
    b.images = Tensor<float>({b.n, 3, pre_.height, pre_.width});
    for (int i = 0; i < b.n; ++i) store_image(images[static_cast<std::size_t>(i)], b.images, i);
    b.targets = std::move(targets);
    return b;
  }
  return std::nullopt;
}

std::vector<CameraSample> camera_samples(const DatasetIndex& index, const Preprocess& preprocess) {
  std::vector<CameraSample> items;
  for (const auto& r : index.records) {
    if (preprocess.side_cameras) {
      for (auto& s : expand_cameras(r, preprocess.camera_correction)) items.push_back(std::move(s));
    } else {
      items.push_back({r.center, r.steering});
    }
  }
  return items;
}

BatchStream make_batches(const DatasetIndex& index, int batch_size, std::optional<std::uint64_t> shuffle_seed,
                         const Preprocess& preprocess) {
  return BatchStream(camera_samples(index, preprocess), batch_size, shuffle_seed, preprocess);
}

void SampleSet::add(const RgbImage& image, float target) {
  if (image.height != height_ || image.width != width_) throw StructuralError("SampleSet::add: image size mismatch");
  const std::size_t plane = static_cast<std::size_t>(height_) * width_;
  const std::size_t base = pixels_.size();
  pixels_.resize(base + 3 * plane);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      for (int c = 0; c < 3; ++c)
        pixels_[base + c * plane + static_cast<std::size_t>(y) * width_ + x] =
            static_cast<float>(image.at(y, x, c)) / 255.0f;
  targets_.push_back(target);
}

Batch SampleSet::gather(const std::vector<std::size_t>& indices) const {
  Batch b;
  b.n = static_cast<int>(indices.size());
  b.images = Tensor<float>({b.n, 3, height_, width_});
  const std::size_t stride = 3 * static_cast<std::size_t>(height_) * width_;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= size()) throw StructuralError("SampleSet::gather: index out of range");
    std::copy_n(pixels_.data() + indices[i] * stride, stride, b.images.data() + i * stride);
    b.targets.push_back(targets_[indices[i]]);
  }
  return b;
}

RgbImage SampleSet::image(std::size_t i) const { return to_rgb(gather({i}).images, 0); }

SampleSet load_samples(const DatasetIndex& index, const Preprocess& preprocess) {
  SampleSet set(preprocess.height, preprocess.width);
  for (const auto& item : camera_samples(index, preprocess)) {
    try {
      set.add(resize_image(read_image(item.image), preprocess.height, preprocess.width),
              static_cast<float>(item.steering));
    } catch (const LoadError& e) {
      set.note_skipped();
      log_warning(std::string(e.what()) + " (skipped)");
    }
  }
  return set;
}

ToyBand toy_band(double offset, int width) {
  const double half = width / 10.0;
  const double center = width / 2.0 + offset * (width / 2.0 - half);
  return {center - half, center + half};
}

double toy_target(double offset) { return kToySteeringGain * offset; }

RgbImage render_toy_image(double offset, int height, int width, std::uint64_t noise_seed) {
  constexpr double kBackground = 45.0, kBand = 215.0, kNoise = 8.0;
  const ToyBand band = toy_band(offset, width);
  Rng rng(noise_seed);
  RgbImage img(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      // Fraction of the pixel [x, x+1) covered by the band, so the image varies
      // smoothly with the offset.
      const double cover = std::clamp(std::min<double>(x + 1, band.right) - std::max<double>(x, band.left), 0.0, 1.0);
      const double base = kBackground + cover * (kBand - kBackground);
      for (int c = 0; c < 3; ++c) {
        const double v = base + rng.uniform(-kNoise, kNoise);
        img.at(y, x, c) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  return img;
}

DatasetIndex generate_toy_dataset(int n, int height, int width, std::uint64_t seed, const fs::path& out_dir) {
  if (n < 1) throw ConfigError("toy dataset size must be >= 1");
  if (height < 4 || width < 10) throw ConfigError("toy images must be at least 4x10");
  fs::create_directories(out_dir / "images");
  Rng rng(seed);
  DatasetIndex index;
  index.format = SourceFormat::kToy;
  index.root = out_dir;
  std::ofstream manifest(out_dir / "manifest.csv", std::ios::binary);
  if (!manifest) throw LoadError("cannot write " + (out_dir / "manifest.csv").string());
  manifest << "image_path,angle\n";
  for (int i = 0; i < n; ++i) {
    const double offset = rng.uniform(-1.0, 1.0);
    const std::uint64_t noise_seed = seed * 1000003ULL + static_cast<std::uint64_t>(i);
    std::ostringstream name;
    name << "images/toy_" << std::setw(6) << std::setfill('0') << i << ".png";
    write_png(out_dir / name.str(), render_toy_image(offset, height, width, noise_seed));
    const double target = toy_target(offset);
    std::ostringstream row;
    row << std::setprecision(17) << target;
    manifest << name.str() << ',' << row.str() << '\n';
    index.records.push_back({out_dir / name.str(), std::nullopt, std::nullopt, target});
  }
  return index;
}

}  // namespace steer
