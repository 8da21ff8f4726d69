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

// Driving-log ingestion. All steering targets are radians internally.
//
// Manifest formats:
//   udacity_sim  center,left,right,steering,throttle,brake,speed
//                steering normalized to [-1,1]; multiplied by max_angle_rad.
//                Header row is auto-detected. Empty left/right fields are allowed.
//   kaggle_sap   image_path,angle   (comma or whitespace separated)
//                angle unit given by LoadOptions::angle_unit.
//   toy          kaggle_sap layout with radians, as written by generate_toy_dataset.
// Relative paths resolve against the manifest's directory.

#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "steerbench/image.hpp"
#include "steerbench/tensor.hpp"

namespace steer {

enum class SourceFormat { kKaggleSap, kUdacitySim, kToy };
enum class AngleUnit { kRadians, kDegrees, kNormalized };

SourceFormat parse_source_format(const std::string& s);
AngleUnit parse_angle_unit(const std::string& s);
std::string to_string(SourceFormat f);

/// 25 degrees, the simulator's full steering lock.
inline constexpr double kDefaultMaxAngleRad = 25.0 * std::numbers::pi / 180.0;
inline constexpr double kDefaultCameraCorrection = 0.2;

struct LoadOptions {
  AngleUnit angle_unit = AngleUnit::kRadians;  // kaggle_sap only
  double max_angle_rad = kDefaultMaxAngleRad;  // normalized -> radians
};

struct SampleRecord {
  std::filesystem::path center;
  std::optional<std::filesystem::path> left;
  std::optional<std::filesystem::path> right;
  double steering = 0.0;  // radians
};

struct DatasetIndex {
  std::vector<SampleRecord> records;
  SourceFormat format = SourceFormat::kToy;
  std::filesystem::path root;
  std::size_t skipped_rows = 0;
  std::vector<std::string> warnings;

  std::size_t size() const { return records.size(); }
};

/// Parses a manifest. Rows referencing missing images, malformed rows and
/// angles outside [-pi, pi] are skipped and counted in `skipped_rows`.
/// Throws LoadError for a missing manifest, EmptyDatasetError for zero valid rows.
DatasetIndex load_manifest(const std::filesystem::path& path, SourceFormat format, const LoadOptions& options = {});

struct CameraSample {
  std::filesystem::path image;
  double steering = 0.0;
};

/// center -> steering; left -> steering + correction; right -> steering - correction.
std::vector<CameraSample> expand_cameras(const SampleRecord& record, double correction);

/// Deterministic disjoint partition; the validation part has round(n * val_fraction)
/// records, kept within [1, n-1].
std::pair<DatasetIndex, DatasetIndex> split(const DatasetIndex& index, double val_fraction, std::uint64_t seed);

struct Preprocess {
  int height = 160;
  int width = 320;
  bool side_cameras = true;
  double camera_correction = kDefaultCameraCorrection;
};

struct Batch {
  Tensor<float> images;  // N x 3 x H x W in [0,1]
  std::vector<float> targets;
  int n = 0;
};

/// Record order for one epoch split into consecutive batches; the last one may
/// be short. No seed means index order.
std::vector<std::vector<std::size_t>> batch_plan(std::size_t count, int batch_size,
                                                 std::optional<std::uint64_t> shuffle_seed);

/// Lazily decodes one batch at a time from disk.
class BatchStream {
 public:
  BatchStream(std::vector<CameraSample> items, int batch_size, std::optional<std::uint64_t> shuffle_seed,
              Preprocess preprocess);

  std::optional<Batch> next();
  std::size_t skipped() const { return skipped_; }
  std::size_t item_count() const { return items_.size(); }

 private:
  std::vector<CameraSample> items_;
  std::vector<std::vector<std::size_t>> plan_;
  std::size_t cursor_ = 0;
  Preprocess pre_;
  std::size_t skipped_ = 0;
};

std::vector<CameraSample> camera_samples(const DatasetIndex& index, const Preprocess& preprocess);

BatchStream make_batches(const DatasetIndex& index, int batch_size, std::optional<std::uint64_t> shuffle_seed,
                         const Preprocess& preprocess);

/// Fully decoded samples held in memory (desk-scale datasets).
class SampleSet {
 public:
  SampleSet(int height, int width) : height_(height), width_(width) {}

  void add(const RgbImage& image, float target);
  std::size_t size() const { return targets_.size(); }
  int height() const { return height_; }
  int width() const { return width_; }
  const std::vector<float>& targets() const { return targets_; }
  std::size_t skipped() const { return skipped_; }
  void note_skipped() { ++skipped_; }

  Batch gather(const std::vector<std::size_t>& indices) const;
  RgbImage image(std::size_t i) const;

 private:
  int height_, width_;
  std::vector<float> pixels_;  // CHW per sample
  std::vector<float> targets_;
  std::size_t skipped_ = 0;
};

/// Decodes every camera sample of `index`; undecodable images are skipped with a warning.
SampleSet load_samples(const DatasetIndex& index, const Preprocess& preprocess);

// Synthetic road-band images. A bright vertical band of half-width w/10 sits at
// horizontal offset d in [-1,1] (d=0 centered, d=+1 touching the right edge),
// over a dark noisy background. The steering target is kToySteeringGain * d.
inline constexpr double kToySteeringGain = 0.5;

struct ToyBand {
  double left = 0.0;   // column coordinate of the band's left edge
  double right = 0.0;  // exclusive right edge
};

ToyBand toy_band(double offset, int width);
double toy_target(double offset);
RgbImage render_toy_image(double offset, int height, int width, std::uint64_t noise_seed);

/// Writes n PNGs plus `manifest.csv` (image_path,angle in radians) into out_dir.
/// Offsets are drawn uniformly from [-1,1].
DatasetIndex generate_toy_dataset(int n, int height, int width, std::uint64_t seed,
                                  const std::filesystem::path& out_dir);

}  // namespace steer
