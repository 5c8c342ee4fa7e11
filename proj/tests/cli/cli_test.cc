// Copyright 2026 The treemix Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            (std::string("treemix_cli_") +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  // Runs the CLI inside dir; stderr is captured to dir/stderr.txt.
  int run(const fs::path& dir, const std::string& args) {
    fs::create_directories(dir);
    const std::string command = "cd '" + dir.string() + "' && '" + TREEMIX_CLI + "' " + args +
                                " > stdout.txt 2> stderr.txt";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  }

  // Relative path -> contents of every file under dir.
  static std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (entry.is_regular_file()) {
        files[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
      }
    }
    return files;
  }

  // generate, train both GBDTs, extract, train GLMix, evaluate.
  void run_default_pipeline(const fs::path& dir) {
    ASSERT_EQ(run(dir, "generate --output data --workers 1"), 0);
    ASSERT_EQ(run(dir, "train-gbdt --input data/train.jsonl --output l1.json --workers 1"), 0);
    ASSERT_EQ(run(dir, "train-gbdt --input data/train.jsonl --output l2.json --num-trees 20 "
                       "--workers 1"),
              0);
    ASSERT_EQ(run(dir, "extract --input data/train.jsonl --l1-model l1.json --l2-model l2.json "
                       "--output train_all.jsonl --workers 1"),
              0);
    ASSERT_EQ(run(dir, "train-glmix --input train_all.jsonl --output store --workers 1"), 0);
    ASSERT_EQ(run(dir, "eval --input data/test.jsonl --model store --l1-model l1.json "
                       "--l2-model l2.json --output report.txt --workers 1"),
              0);
    ASSERT_EQ(run(dir, "rank --input data/test.jsonl --model store --l1-model l1.json "
                       "--l2-model l2.json --output rankings.jsonl --workers 1"),
              0);
  }

  fs::path root_;
};

TEST_F(CliTest, DefaultPipelineCompletesWithinFiveMinutes) {
  const auto start = std::chrono::steady_clock::now();
  run_default_pipeline(root_ / "run");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(seconds, 300.0);
  const std::string report = slurp(root_ / "run" / "report.txt");
  EXPECT_NE(report.find("two-level"), std::string::npos);
  EXPECT_NE(report.find("lift"), std::string::npos);
  EXPECT_TRUE(fs::exists(root_ / "run" / "store" / "manifest.json"));
  EXPECT_TRUE(fs::exists(root_ / "run" / "store" / "config.toml"));
  EXPECT_TRUE(fs::exists(root_ / "run" / "l1.json.config.toml"));
}

TEST_F(CliTest, PipelineIsByteReproducible) {
  run_default_pipeline(root_ / "a");
  run_default_pipeline(root_ / "b");
  const auto a = snapshot(root_ / "a");
  const auto b = snapshot(root_ / "b");
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
}

TEST_F(CliTest, InputsAreNotModified) {
  const fs::path dir = root_ / "run";
  ASSERT_EQ(run(dir, "generate --output data"), 0);
  const auto before = snapshot(dir / "data");
  ASSERT_EQ(run(dir, "train-gbdt --input data/train.jsonl --output l1.json --num-trees 5"), 0);
  ASSERT_EQ(run(dir, "extract --input data/train.jsonl --l1-model l1.json --output all.jsonl"),
            0);
  EXPECT_EQ(snapshot(dir / "data"), before);
}

TEST_F(CliTest, RankRejectsK2AboveK1) {
  const fs::path dir = root_ / "run";
  ASSERT_EQ(run(dir, "generate --output data --num-recruiters 3"), 0);
  ASSERT_EQ(run(dir, "train-gbdt --input data/train.jsonl --output l1.json --num-trees 3"), 0);
  ASSERT_EQ(run(dir, "extract --input data/train.jsonl --l1-model l1.json --output all.jsonl"),
            0);
  ASSERT_EQ(run(dir, "train-glmix --input all.jsonl --output store"), 0);
  EXPECT_EQ(run(dir, "rank --input data/test.jsonl --model store --l1-model l1.json --k1 5 "
                     "--k2 10"),
            2);
  const std::string err = slurp(dir / "stderr.txt");
  EXPECT_NE(err.find("k2"), std::string::npos);
  EXPECT_NE(err.find("k1"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  const fs::path dir = root_ / "run";
  EXPECT_EQ(run(dir, "no-such-command"), 2);
  EXPECT_EQ(run(dir, "train-gbdt --input x.jsonl"), 2);  // missing --output
  EXPECT_EQ(run(dir, "generate --output data --num-recruiters 0"), 2);
  EXPECT_EQ(run(dir, "train-gbdt --input missing.jsonl --output m.json"), 5);
  {
    std::ofstream bad(dir / "bad.jsonl");
    bad << "{\"request_id\": \n";
  }
  EXPECT_EQ(run(dir, "train-gbdt --input bad.jsonl --output m.json"), 3);
  EXPECT_NE(slurp(dir / "stderr.txt").find("line 1"), std::string::npos);
  {
    std::ofstream empty(dir / "empty.jsonl");
  }
  EXPECT_EQ(run(dir, "train-gbdt --input empty.jsonl --output m.json"), 4);
  EXPECT_EQ(run(dir, "train-gbdt --input empty.jsonl --output m.json --split-mode fuzzy"), 2);
  EXPECT_EQ(run(dir, "--help"), 0);
}

TEST_F(CliTest, ConfigFileIsOverriddenByFlags) {
  const fs::path dir = root_ / "run";
  ASSERT_EQ(run(dir, "generate --output data --num-recruiters 3"), 0);
  ASSERT_EQ(run(dir, "train-gbdt --input data/train.jsonl --output a.json --num-trees 4"), 0);
  // Reuse the persisted config, overriding the tree count and output.
  ASSERT_EQ(run(dir, "train-gbdt --config a.json.config.toml --num-trees 2 --output b.json"), 0);
  const std::string resolved = slurp(dir / "b.json.config.toml");
  EXPECT_NE(resolved.find("train-gbdt.num-trees=2"), std::string::npos);
  EXPECT_NE(resolved.find("train-gbdt.input=\"data/train.jsonl\""), std::string::npos);
}

TEST_F(CliTest, DailyPipelineAndBenchmark) {
  const fs::path dir = root_ / "run";
  ASSERT_EQ(run(dir, "generate --output days --days 5 --num-recruiters 4 "
                     "--queries-per-recruiter 5"),
            0);
  ASSERT_EQ(run(dir, "train-gbdt --input days/day-000.jsonl --output l1.json --num-trees 5"), 0);
  ASSERT_EQ(run(dir, "pipeline --input days --output pipe --l1-model l1.json --window-days 3 "
                     "--format csv"),
            0);
  const std::string metrics = slurp(dir / "pipe" / "metrics.csv");
  EXPECT_NE(metrics.find("day-3,"), std::string::npos);
  EXPECT_NE(metrics.find("day-4,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "pipe" / "day-4" / "manifest.json"));

  ASSERT_EQ(run(dir, "generate --output data --num-recruiters 6 --queries-per-recruiter 6"), 0);
  ASSERT_EQ(run(dir, "benchmark --input data --output bench --num-trees 10 --l2-num-trees 5 "
                     "--grid 10"),
            0);
  const std::string csv = slurp(dir / "bench" / "benchmark.csv");
  EXPECT_EQ(csv.rfind("variant,lift@1,lift@5,lift@25\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
  EXPECT_TRUE(fs::exists(dir / "bench" / "benchmark.txt"));
}

}  // namespace
