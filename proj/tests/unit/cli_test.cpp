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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "steerbench/cli.hpp"
#include "steerbench/errors.hpp"
#include "steerbench/image.hpp"
#include "steerbench/reporting.hpp"

namespace steer {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct CliRun {
  int status;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.insert(args.begin(), "--quiet");
  const int s = run_cli(args, out, err);
  return {s, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / ("steerbench_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    ASSERT_EQ(cli({"toygen", "--out-dir", (root_ / "toy").string(), "--samples", "60"}).status, 0);
    std::ofstream(root_ / "base.conf") << "seed = 3\n"
                                          "model.family = resnet\n"
                                          "model.block_layers = 1,1,1,1\n"
                                          "model.stage_widths = 4,4,8,8\n"
                                          "model.input_shape = 3,32,64\n"
                                          "data.format = toy\n"
                                          "data.manifest = "
                                       << (root_ / "toy" / "manifest.csv").string()
                                       << "\n"
                                          "train.epochs = 2\n"
                                          "train.batch_size = 16\n"
                                          "train.learning_rate = 0.001\n"
                                          "attack.list = fgsm:0.01,fgsm:0.03,pgd:0.01,pgd:0.03\n"
                                          "attack.steps = 3\n";
    std::ofstream(root_ / "att.conf") << slurp(root_ / "base.conf") << "model.block_layers = 2,2,2,2\n"
                                      << "model.attention.stages = 1,2,3\n"
                                      << "model.attention.downsample_steps = 1\n";
  }

  static fs::path conf(const char* name) { return root_ / name; }
  static fs::path root_;
};

fs::path CliTest::root_;

TEST_F(CliTest, TrainWritesArtifacts) {
  const fs::path out = root_ / "train";
  const CliRun r = cli({"train", "--config", conf("base.conf").string(), "--out-dir", out.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  for (const char* f : {"model.ckpt", "curve.csv", "metrics.jsonl", "curve.svg"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_EQ(TrainingCurve::read_csv(out / "curve.csv").points.size(), 2u);
  std::istringstream metrics(slurp(out / "metrics.jsonl"));
  std::string line;
  int lines = 0;
  while (std::getline(metrics, line)) ++lines;
  EXPECT_EQ(lines, 3);
}

TEST_F(CliTest, TrainRerunIsByteIdentical) {
  for (const char* d : {"det_a", "det_b"})
    ASSERT_EQ(cli({"train", "--config", conf("base.conf").string(), "--out-dir", (root_ / d).string()}).status, 0);
  EXPECT_EQ(slurp(root_ / "det_a" / "curve.csv"), slurp(root_ / "det_b" / "curve.csv"));
  EXPECT_EQ(slurp(root_ / "det_a" / "curve.svg"), slurp(root_ / "det_b" / "curve.svg"));
  EXPECT_EQ(slurp(root_ / "det_a" / "model.ckpt"), slurp(root_ / "det_b" / "model.ckpt"));
}

TEST_F(CliTest, SeedFlagOverridesConfig) {
  ASSERT_EQ(cli({"train", "--config", conf("base.conf").string(), "--out-dir", (root_ / "s9").string(), "--seed", "9"})
                .status,
            0);
  ASSERT_EQ(cli({"train", "--config", conf("base.conf").string(), "--out-dir", (root_ / "s3").string()}).status, 0);
  EXPECT_NE(slurp(root_ / "s9" / "curve.csv"), slurp(root_ / "s3" / "curve.csv"));
}

TEST_F(CliTest, MissingDatasetFailsWithoutCheckpoint) {
  const fs::path out = root_ / "missing";
  const CliRun r = cli({"train", "--config", conf("base.conf").string(), "--out-dir", out.string(), "--data",
                     (root_ / "nowhere" / "manifest.csv").string()});
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
  EXPECT_NE(r.err.find("manifest"), std::string::npos);
  EXPECT_FALSE(fs::exists(out / "model.ckpt"));
}

TEST_F(CliTest, SeedIsRequired) {
  std::ofstream(root_ / "noseed.conf") << "model.family = resnet\nmodel.block_layers = 1,1,1,1\n";
  const CliRun r = cli({"train", "--config", conf("noseed.conf").string()});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("seed"), std::string::npos);
}

TEST_F(CliTest, UnknownSubcommandFails) { EXPECT_NE(cli({"bogus"}).status, 0); }

TEST_F(CliTest, SweepRowCounts) {
  const auto sweep = [&](std::vector<std::string> extra, const char* dir) {
    std::vector<std::string> args{"sweep", "--config", conf("base.conf").string(), "--set", "train.epochs=1",
                                  "--out-dir", (root_ / dir).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    const CliRun r = cli(args);
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(fs::exists(root_ / dir / "sweep.svg"));
    return read_sweep_csv(root_ / dir / "sweep.csv");
  };
  const auto resnet = sweep({"--family", "resnet"}, "sweep_r");
  ASSERT_EQ(resnet.size(), 8u);
  for (std::size_t i = 1; i < resnet.size(); ++i) EXPECT_GT(resnet[i].params, resnet[i - 1].params);
  EXPECT_EQ(resnet.front().model, "ResNet20");
  EXPECT_EQ(sweep({"--model", "ResNet32"}, "sweep_one").size(), 1u);
  const auto both = sweep({"--family", "both"}, "sweep_both");
  ASSERT_EQ(both.size(), 15u);
  for (std::size_t i = 9; i < both.size(); ++i) EXPECT_GT(both[i].params, both[i - 1].params);
  EXPECT_NE(cli({"sweep", "--config", conf("base.conf").string(), "--model", "ResNet99"}).status, 0);
}

class CliCheckpointTest : public CliTest {
 protected:
  static void SetUpTestSuite() {
    CliTest::SetUpTestSuite();
    ASSERT_EQ(cli({"train", "--config", conf("base.conf").string(), "--out-dir", (root_ / "b").string()}).status, 0);
    ASSERT_EQ(cli({"train", "--config", conf("att.conf").string(), "--out-dir", (root_ / "a").string()}).status, 0);
  }
  static std::string base_ckpt() { return (root_ / "b" / "model.ckpt").string(); }
  static std::string att_ckpt() { return (root_ / "a" / "model.ckpt").string(); }
};

TEST_F(CliCheckpointTest, EvalMatchesTrainingBest) {
  const CliRun r = cli({"eval", "--config", conf("base.conf").string(), "--checkpoint", base_ckpt()});
  ASSERT_EQ(r.status, 0) << r.err;
  const std::string metrics = slurp(root_ / "b" / "metrics.jsonl");
  const std::string last = metrics.substr(metrics.rfind("\"val_mse\":") + 10);
  const std::string reported = r.out.substr(std::string("val_mse ").size());
  EXPECT_DOUBLE_EQ(std::stod(reported), std::stod(last));
}

TEST_F(CliCheckpointTest, AttackReportAndDeterminism) {
  for (const char* d : {"atk1", "atk2"}) {
    const CliRun r = cli({"attack", "--config", conf("base.conf").string(), "--out-dir", (root_ / d).string(),
                       "--checkpoint", base_ckpt(), "--checkpoint", att_ckpt()});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("w/o attention"), std::string::npos);
  }
  EXPECT_EQ(slurp(root_ / "atk1" / "robustness.csv"), slurp(root_ / "atk2" / "robustness.csv"));
  const auto report = RobustnessReport::read_csv(root_ / "atk1" / "robustness.csv");
  EXPECT_EQ(report.rows.size(), 8u);
  EXPECT_EQ(comparison_table(report, "baseline", "attention").columns.size(), 4u);
}

TEST_F(CliCheckpointTest, AttackZeroEpsilonRepeatsClean) {
  const CliRun r = cli({"attack", "--config", conf("base.conf").string(), "--out-dir", (root_ / "atk0").string(),
                     "--set", "attack.list=fgsm:0", "--checkpoint", base_ckpt(), "--checkpoint", att_ckpt()});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto report = RobustnessReport::read_csv(root_ / "atk0" / "robustness.csv");
  ASSERT_EQ(report.rows.size(), 2u);
  for (const auto& row : report.rows) EXPECT_NEAR(row.attacked_mse, row.clean_mse, 1e-12 + 1e-9 * row.clean_mse);
}

TEST_F(CliCheckpointTest, AttackMissingCheckpointFails) {
  EXPECT_NE(cli({"attack", "--config", conf("base.conf").string(), "--checkpoint", base_ckpt(), "--checkpoint",
                 (root_ / "none.ckpt").string()})
                .status,
            0);
  EXPECT_NE(cli({"attack", "--config", conf("base.conf").string(), "--checkpoint", base_ckpt()}).status, 0);
}

TEST_F(CliCheckpointTest, SaliencyStrips) {
  const fs::path out = root_ / "sal";
  std::vector<std::string> args{"saliency", "--out-dir", out.string(), "--checkpoint", base_ckpt(), "--checkpoint",
                                att_ckpt(), "--layer", "input"};
  for (int i = 0; i < 4; ++i) {
    args.push_back("--image");
    args.push_back((root_ / "toy" / "images" / ("toy_00000" + std::to_string(i) + ".png")).string());
  }
  args.push_back("--image");
  args.push_back((root_ / "missing.png").string());
  const CliRun r = cli(args);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("wrote 4 strips, skipped 1"), std::string::npos) << r.out;
  int strips = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    const RgbImage img = read_image(e.path());
    EXPECT_EQ(img.width, 3 * 64);
    EXPECT_EQ(img.height, 32);
    ++strips;
  }
  EXPECT_EQ(strips, 4);
  const std::string first = slurp(out / "saliency_000_toy_000000.png");
  ASSERT_EQ(cli(args).status, 0);
  EXPECT_EQ(slurp(out / "saliency_000_toy_000000.png"), first);
}

TEST_F(CliCheckpointTest, SaliencyEmptyListFails) {
  const CliRun r = cli({"saliency", "--checkpoint", base_ckpt(), "--checkpoint", att_ckpt()});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("no images"), std::string::npos);
}

TEST(AttackList, Parsing) {
  const auto list = parse_attack_list("fgsm:0.5, pgd:0.7", 7, std::nullopt, false, 4);
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0].method, AttackMethod::kFgsm);
  EXPECT_EQ(list[1].method, AttackMethod::kPgd);
  EXPECT_EQ(list[1].steps, 7);
  EXPECT_DOUBLE_EQ(list[1].epsilon, 0.7);
  EXPECT_FALSE(list[1].random_start);
  EXPECT_THROW(parse_attack_list("", 1, std::nullopt, true, 0), ConfigError);
  EXPECT_THROW(parse_attack_list("fgsm", 1, std::nullopt, true, 0), ConfigError);
  EXPECT_THROW(parse_attack_list("fgsm:abc", 1, std::nullopt, true, 0), ConfigError);
  EXPECT_THROW(parse_attack_list("cw:0.1", 1, std::nullopt, true, 0), ConfigError);
}

TEST(SweepConfig, WidthDivisor) {
  const ModelConfig c = sweep_config(Family::kResNet, {3, 4, 5, 3}, 8, {3, 32, 64}, 1);
  EXPECT_EQ(c.stage_widths, (std::vector<int>{8, 16, 32, 64}));
  EXPECT_THROW(sweep_config(Family::kResNet, {3, 4, 5, 3}, 0, {3, 32, 64}, 1), ConfigError);
}

}  // namespace
}  // namespace steer
