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

#ifndef MTKIT_PIPELINE_H_
#define MTKIT_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtkit/eval.h"
#include "mtkit/language.h"
#include "mtkit/vocab.h"

namespace mtkit::pipeline {

enum class BacktranslationMode {
  kSupplement,  // real and back-translated data side by side
  kReplace,     // back-translated data only
};

struct PivotSpec {
  std::string corpus;  // name of an English-centric corpus
  LanguageCode to;
};

// All relative paths are resolved against base_dir, the directory holding
// the config file.
struct PipelineConfig {
  std::filesystem::path base_dir;
  std::vector<std::string> corpora;
  std::vector<std::string> new_corpora;
  std::size_t validation_size = 3000;
  vocab::VocabConfig vocab = vocab::VocabConfig::defaults();
  std::uint64_t stage1_seed = 0;
  std::size_t bilingual_iterations = 10;
  std::size_t multilingual_iterations = 5;
  std::vector<std::string> dev;
  BacktranslationMode backtranslation_mode = BacktranslationMode::kSupplement;
  // "src-tgt" -> model spec, replacing the selected model for that direction.
  std::map<std::string, std::string> backtranslation_models;
  std::vector<PivotSpec> pivots;
  std::string plan;
  std::uint64_t stage2_seed = 0;
  std::size_t stage2_iterations = 10;
  std::optional<std::size_t> default_cap;
  std::vector<std::string> tests;
  std::size_t batch_size = 64;
  std::string output_root = "run";

  std::filesystem::path resolve(const std::string& path) const;

  // Throws kConfig on schema errors; does not check paths.
  static PipelineConfig from_json(std::string_view json, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& path);
  // Every field except output_root.
  std::string to_json() const;
};

struct ConfigIssue {
  std::string field;
  std::string message;
};

// Parse, schema, path-existence and language checks. No side effects.
std::vector<ConfigIssue> validate_config(const std::filesystem::path& path);

// A failed step. step() names the stage, e.g. "stage2-balance".
class StepError : public std::runtime_error {
 public:
  StepError(std::string step, const std::string& cause)
      : std::runtime_error(step + ": " + cause), step_(std::move(step)) {}
  const std::string& step() const { return step_; }

 private:
  std::string step_;
};

struct RunOptions {
  unsigned threads = 1;
  // Overrides the config's output_root.
  std::optional<std::filesystem::path> output_root;
};

struct RunResult {
  std::filesystem::path run_dir;
  std::vector<Direction> new_directions;
  double new_bleu_before = 0.0;
  double new_bleu_after = 0.0;
  eval::EvalReport before;
  eval::EvalReport after;
};

// Runs the two-stage recipe. Outputs of completed steps and run_log.json are
// kept when a step fails. Throws StepError.
RunResult run_pipeline(const PipelineConfig& config, const RunOptions& options = {});

}  // namespace mtkit::pipeline

#endif  // MTKIT_PIPELINE_H_
