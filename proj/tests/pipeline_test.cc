// Copyright 2026 The mtkit Authors
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

#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "mtkit/error.h"
#include "mtkit/pipeline.h"
#include "mtkit/toy_data.h"
#include "test_util.h"

namespace mtkit::pipeline {
namespace {

namespace fs = std::filesystem;
using testing_util::slurp;
using testing_util::spit;
using testing_util::TempDir;

// Writes a modified copy of the toy config and returns its path.
fs::path edit_config(const fs::path& config, const std::function<void(nlohmann::json&)>& fn) {
  auto j = nlohmann::json::parse(slurp(config));
  fn(j);
  const fs::path out = config.parent_path() / "edited.json";
  spit(out, j.dump(2));
  return out;
}

bool has_issue(const std::vector<ConfigIssue>& issues, const std::string& field,
               const std::string& needle) {
  for (const auto& i : issues) {
    if (i.field == field && i.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    data_ = new toy::ToyDataset(toy::write_toy_dataset(dir_->path() / "data", {.scale = 0.15}));
  }
  static void TearDownTestSuite() {
    delete data_;
    delete dir_;
  }
  static TempDir* dir_;
  static toy::ToyDataset* data_;
};

TempDir* PipelineTest::dir_ = nullptr;
toy::ToyDataset* PipelineTest::data_ = nullptr;

TEST_F(PipelineTest, ToyConfigIsValid) {
  EXPECT_TRUE(validate_config(data_->config).empty());
  const auto cfg = PipelineConfig::load(data_->config);
  EXPECT_EQ(cfg.corpora.size(), 8u);
  EXPECT_EQ(cfg.pivots.size(), 2u);
  EXPECT_EQ(cfg.tests.size(), 24u);
  EXPECT_EQ(PipelineConfig::from_json(cfg.to_json(), cfg.base_dir).to_json(), cfg.to_json());
}

TEST_F(PipelineTest, OverlappingLanguageSetsAreReported) {
  const auto path = edit_config(data_->config, [](nlohmann::json& j) {
    j["vocab"]["lrl"].push_back("xho");
  });
  EXPECT_TRUE(has_issue(validate_config(path), "vocab", "xho"));
}

TEST_F(PipelineTest, UnknownLanguageAndMissingFiles) {
  auto path = edit_config(data_->config, [](nlohmann::json& j) { j["vocab"]["hrl"][0] = "fra"; });
  auto issues = validate_config(path);
  ASSERT_FALSE(issues.empty());
  EXPECT_EQ(issues[0].field.rfind("vocab.hrl", 0), 0u) << issues[0].field;

  path = edit_config(data_->config, [](nlohmann::json& j) { j["corpora"][2] = "corpora/nope.json"; });
  EXPECT_TRUE(has_issue(validate_config(path), "corpora[2]", "nope.json"));

  path = edit_config(data_->config, [](nlohmann::json& j) { j["pivots"][0]["corpus"] = "eng-fra"; });
  EXPECT_TRUE(has_issue(validate_config(path), "pivots[0].corpus", "eng-fra"));

  path = edit_config(data_->config, [](nlohmann::json& j) { j["vocab"]["hrl"].erase(1); });
  EXPECT_TRUE(has_issue(validate_config(path), "vocab", "xho"));

  path = edit_config(data_->config, [](nlohmann::json& j) { j["stage1"]["seed"] = "eleven"; });
  issues = validate_config(path);
  ASSERT_FALSE(issues.empty());
  EXPECT_EQ(issues[0].field, "stage1.seed");

  spit(dir_->path() / "broken.json", "{\n  \"corpora\": [\n");
  issues = validate_config(dir_->path() / "broken.json");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_NE(issues[0].message.find("line"), std::string::npos);
  EXPECT_FALSE(validate_config(dir_->path() / "absent.json").empty());
}

TEST_F(PipelineTest, RunProducesReportsAndIsReproducible) {
  const auto cfg = PipelineConfig::load(data_->config);
  const auto a = run_pipeline(cfg, {.threads = 2, .output_root = dir_->path() / "run-a"});
  EXPECT_EQ(a.before.rows.size(), 24u);
  EXPECT_EQ(a.after.rows.size(), 24u);
  EXPECT_EQ(a.new_directions.size(), 8u);
  EXPECT_GT(a.new_bleu_after, a.new_bleu_before);
  for (const char* f : {"14-summary/summary.json", "run_log.json", "02-vocab-obpe/obpe.json",
                        "13-eval-final/report.json", "10-pivot-synthesis"}) {
    EXPECT_TRUE(fs::exists(a.run_dir / f)) << f;
  }
  const auto log = nlohmann::json::parse(slurp(a.run_dir / "run_log.json"));
  for (const auto& step : log["steps"]) EXPECT_EQ(step["status"], "ok") << step["step"];

  const auto b = run_pipeline(cfg, {.threads = 1, .output_root = dir_->path() / "run-b"});
  EXPECT_EQ(testing_util::tree(a.run_dir), testing_util::tree(b.run_dir));
}

TEST_F(PipelineTest, UncoveredPlanEntryFailsInBalanceStep) {
  auto plan = nlohmann::json::parse(slurp(data_->plan));
  plan.push_back({{"new", "xho-ssw"}, {"old", {"xho-eng", "eng-ssw"}}});
  const fs::path plan_path = data_->plan.parent_path() / "plan-extra.json";
  spit(plan_path, plan.dump(2));
  const auto path = edit_config(data_->config, [](nlohmann::json& j) {
    j["stage2"]["plan"] = "plan-extra.json";
  });
  EXPECT_TRUE(validate_config(path).empty());
  try {
    run_pipeline(PipelineConfig::load(path), {.output_root = dir_->path() / "run-bad"});
    FAIL() << "expected a step failure";
  } catch (const StepError& e) {
    EXPECT_EQ(e.step(), "stage2-balance");
  }
  const auto log = nlohmann::json::parse(slurp(dir_->path() / "run-bad" / "run_log.json"));
  EXPECT_EQ(log["steps"].back()["status"], "failed");
  EXPECT_EQ(log["steps"].back()["step"], "stage2-balance");
}

}  // namespace
}  // namespace mtkit::pipeline
