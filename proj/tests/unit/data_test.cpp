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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "steerbench/data.hpp"
#include "steerbench/errors.hpp"
#include "steerbench/log.hpp"
#include "test_util.hpp"

namespace steer {
namespace {

namespace fs = std::filesystem;

void touch_png(const fs::path& p, int h = 8, int w = 12) { write_png(p, RgbImage(h, w, 100)); }

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

class DataTest : public ::testing::Test {
 protected:
  void SetUp() override { set_quiet(true); }
  void TearDown() override { set_quiet(false); }
};

TEST_F(DataTest, UdacityRowConvertsToRadians) {
  const auto dir = testing::scratch_dir("udacity_row");
  for (const char* n : {"c.png", "l.png", "r.png"}) touch_png(dir / "IMG" / n);
  write_text(dir / "driving_log.csv",
             "center,left,right,steering,throttle,brake,speed\n"
             "/home/someone/run/IMG/c.png, IMG/l.png, IMG/r.png, 0.5, 0.9, 0, 30.1\n");
  const auto idx = load_manifest(dir / "driving_log.csv", SourceFormat::kUdacitySim);
  ASSERT_EQ(idx.size(), 1u);
  const auto& r = idx.records[0];
  EXPECT_NEAR(r.steering, 0.5 * 25.0 * std::numbers::pi / 180.0, 1e-12);
  EXPECT_EQ(r.center, dir / "IMG" / "c.png");
  ASSERT_TRUE(r.left && r.right);
  EXPECT_EQ(*r.left, dir / "IMG" / "l.png");
  EXPECT_EQ(*r.right, dir / "IMG" / "r.png");
  EXPECT_EQ(idx.skipped_rows, 0u);
}

TEST_F(DataTest, EmptyManifestIsAnError) {
  const auto dir = testing::scratch_dir("empty");
  write_text(dir / "m.csv", "");
  EXPECT_THROW(load_manifest(dir / "m.csv", SourceFormat::kKaggleSap), EmptyDatasetError);
  write_text(dir / "h.csv", "image_path,angle\n");
  EXPECT_THROW(load_manifest(dir / "h.csv", SourceFormat::kKaggleSap), EmptyDatasetError);
}

TEST_F(DataTest, MissingManifestIsLoadError) {
  EXPECT_THROW(load_manifest("/nonexistent/steerbench.csv", SourceFormat::kToy), LoadError);
}

TEST_F(DataTest, RowWithMissingImageIsSkipped) {
  const auto dir = testing::scratch_dir("missing");
  touch_png(dir / "a.png");
  touch_png(dir / "b.png");
  write_text(dir / "m.csv", "a.png,0.1\nghost.png,0.2\nb.png,-0.3\n");
  const auto idx = load_manifest(dir / "m.csv", SourceFormat::kKaggleSap);
  EXPECT_EQ(idx.size(), 2u);
  EXPECT_EQ(idx.skipped_rows, 1u);
  EXPECT_DOUBLE_EQ(idx.records[1].steering, -0.3);
}

TEST_F(DataTest, AngleUnitsAndRangeFilter) {
  const auto dir = testing::scratch_dir("units");
  touch_png(dir / "a.png");
  write_text(dir / "m.txt", "a.png 90\na.png 200\n");
  LoadOptions opt;
  opt.angle_unit = AngleUnit::kDegrees;
  const auto idx = load_manifest(dir / "m.txt", SourceFormat::kKaggleSap, opt);
  ASSERT_EQ(idx.size(), 1u);
  EXPECT_NEAR(idx.records[0].steering, std::numbers::pi / 2, 1e-12);
  EXPECT_EQ(idx.skipped_rows, 1u);
}

TEST_F(DataTest, ExpandCameras) {
  SampleRecord center_only{"c.png", std::nullopt, std::nullopt, 0.1};
  auto one = expand_cameras(center_only, 0.2);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].image, "c.png");
  EXPECT_EQ(one[0].steering, 0.1);

  SampleRecord all{"c.png", fs::path("l.png"), fs::path("r.png"), 0.0};
  auto three = expand_cameras(all, 0.2);
  ASSERT_EQ(three.size(), 3u);
  EXPECT_EQ(three[0].steering, 0.0);
  EXPECT_EQ(three[1].image, "l.png");
  EXPECT_DOUBLE_EQ(three[1].steering, 0.2);
  EXPECT_EQ(three[2].image, "r.png");
  EXPECT_DOUBLE_EQ(three[2].steering, -0.2);

  all.steering = 0.1;
  for (const auto& s : expand_cameras(all, 0.0)) EXPECT_EQ(s.steering, 0.1);
}

DatasetIndex synthetic_index(int n) {
  DatasetIndex idx;
  for (int i = 0; i < n; ++i)
    idx.records.push_back({"img" + std::to_string(i) + ".png", std::nullopt, std::nullopt, 0.01 * i});
  return idx;
}

std::set<std::string> names(const DatasetIndex& d) {
  std::set<std::string> s;
  for (const auto& r : d.records) s.insert(r.center.string());
  return s;
}

TEST_F(DataTest, SplitCountsDisjointAndDeterministic) {
  const auto idx = synthetic_index(10);
  auto [train, val] = split(idx, 0.2, 7);
  EXPECT_EQ(train.size(), 8u);
  EXPECT_EQ(val.size(), 2u);
  auto a = names(train), b = names(val);
  std::set<std::string> both = a;
  both.insert(b.begin(), b.end());
  EXPECT_EQ(both.size(), 10u);

  auto [train2, val2] = split(idx, 0.2, 7);
  EXPECT_EQ(names(train2), a);
  EXPECT_EQ(names(val2), b);

  auto [t1, v1] = split(synthetic_index(2), 0.5, 3);
  EXPECT_EQ(t1.size(), 1u);
  EXPECT_EQ(v1.size(), 1u);
}

TEST_F(DataTest, SplitPropertyUnionIsInput) {
  for (int n = 2; n < 40; n += 3)
    for (double f : {0.05, 0.3, 0.9}) {
      const auto idx = synthetic_index(n);
      auto [t, v] = split(idx, f, static_cast<std::uint64_t>(n));
      ASSERT_EQ(t.size() + v.size(), static_cast<std::size_t>(n));
      auto a = names(t);
      for (const auto& s : names(v)) EXPECT_EQ(a.count(s), 0u);
      EXPECT_GE(v.size(), 1u);
      EXPECT_GE(t.size(), 1u);
    }
  EXPECT_THROW(split(synthetic_index(5), 0.0, 1), ConfigError);
}

TEST_F(DataTest, BatchPlanSizes) {
  auto sizes = [](const std::vector<std::vector<std::size_t>>& plan) {
    std::vector<std::size_t> s;
    for (const auto& b : plan) s.push_back(b.size());
    return s;
  };
  EXPECT_EQ(sizes(batch_plan(100, 32, std::nullopt)), (std::vector<std::size_t>{32, 32, 32, 4}));
  EXPECT_EQ(batch_plan(100, 1, 5).size(), 100u);
  EXPECT_EQ(sizes(batch_plan(100, 128, 5)), std::vector<std::size_t>{100});
  auto plan = batch_plan(100, 32, 9);
  std::set<std::size_t> seen;
  for (const auto& b : plan) seen.insert(b.begin(), b.end());
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_EQ(batch_plan(100, 32, 9), plan);
  EXPECT_THROW(batch_plan(10, 0, std::nullopt), ConfigError);
}

TEST_F(DataTest, ToyTargets) {
  EXPECT_EQ(toy_target(0.0), 0.0);
  EXPECT_DOUBLE_EQ(toy_target(1.0), 0.5);
  const auto band = toy_band(0.0, 100);
  EXPECT_DOUBLE_EQ(band.left, 40.0);
  EXPECT_DOUBLE_EQ(band.right, 60.0);
  const auto right = toy_band(1.0, 100);
  EXPECT_DOUBLE_EQ(right.right, 100.0);
}

TEST_F(DataTest, ToyBandIsBright) {
  const auto img = render_toy_image(0.5, 16, 40, 3);
  const auto band = toy_band(0.5, 40);
  const int inside = static_cast<int>((band.left + band.right) / 2);
  EXPECT_GT(img.at(8, inside, 0), 150);
  EXPECT_LT(img.at(8, 0, 0), 100);
}

TEST_F(DataTest, ToyDatasetDeterministicAndLoadable) {
  const auto d1 = testing::scratch_dir("toy1");
  const auto d2 = testing::scratch_dir("toy2");
  const auto a = generate_toy_dataset(12, 16, 32, 42, d1);
  const auto b = generate_toy_dataset(12, 16, 32, 42, d2);
  ASSERT_EQ(a.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.records[i].steering, b.records[i].steering);
    EXPECT_EQ(read_image(a.records[i].center).pixels, read_image(b.records[i].center).pixels);
    EXPECT_LE(std::abs(a.records[i].steering), 0.5);
  }
  const auto loaded = load_manifest(d1 / "manifest.csv", SourceFormat::kToy);
  ASSERT_EQ(loaded.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(loaded.records[i].steering, a.records[i].steering);
}

TEST_F(DataTest, StreamAndSampleSetEmitUnitRangePixels) {
  const auto dir = testing::scratch_dir("stream");
  const auto idx = generate_toy_dataset(10, 16, 32, 1, dir);
  Preprocess pre{8, 16, true, 0.2};
  auto stream = make_batches(idx, 4, 11, pre);
  std::size_t total = 0;
  while (auto b = stream.next()) {
    ASSERT_EQ(b->images.shape(), (Shape{b->n, 3, 8, 16}));
    ASSERT_EQ(b->targets.size(), static_cast<std::size_t>(b->n));
    for (float v : b->images.values()) ASSERT_TRUE(v >= 0.0f && v <= 1.0f);
    total += static_cast<std::size_t>(b->n);
  }
  EXPECT_EQ(total, 10u);

  const auto set = load_samples(idx, pre);
  EXPECT_EQ(set.size(), 10u);
  const auto b = set.gather({3, 1});
  EXPECT_EQ(b.n, 2);
  EXPECT_FLOAT_EQ(b.targets[0], static_cast<float>(idx.records[3].steering));
}

TEST_F(DataTest, StreamSkipsUndecodableImage) {
  const auto dir = testing::scratch_dir("bad_image");
  touch_png(dir / "ok.png");
  write_text(dir / "bad.png", "not an image");
  std::vector<CameraSample> items{{dir / "ok.png", 0.1}, {dir / "bad.png", 0.2}};
  BatchStream stream(items, 8, std::nullopt, Preprocess{8, 12, false, 0.0});
  auto b = stream.next();
  ASSERT_TRUE(b);
  EXPECT_EQ(b->n, 1);
  EXPECT_EQ(stream.skipped(), 1u);
  EXPECT_FALSE(stream.next());
}

}  // namespace
}  // namespace steer
