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

#ifndef MTKIT_DATASET_BUILDER_H_
#define MTKIT_DATASET_BUILDER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtkit/corpus.h"
#include "mtkit/vocab.h"

namespace mtkit::dataset {

enum class DirectionRole { kOld, kNew };

struct DirectionSpec {
  LanguageCode src;
  LanguageCode tgt;
  DirectionRole role = DirectionRole::kOld;
  std::optional<std::size_t> cap;

  Direction direction() const { return {src, tgt}; }
  std::string key() const { return direction().key(); }
};

struct TaggedExample {
  std::vector<vocab::TokenId> src_tokens;  // starts with the source tag
  std::vector<vocab::TokenId> tgt_tokens;  // starts with the target tag
  DirectionSpec direction;
  bool synthetic = false;
};

// `pair` is in the order (pair_langs.src, pair_langs.tgt); it is flipped when
// `dir` runs the other way. Throws kMissingTagToken, kLanguageMismatch.
TaggedExample tag_direction(const corpus::SentencePair& pair,
                            const Direction& pair_langs,
                            const DirectionSpec& dir,
                            const vocab::Vocabulary& vocab,
                            bool synthetic = false);

enum class SampleMode {
  kUniform,  // seeded uniform sample without replacement
  kPrefix,   // first n
};

// Sorted, duplicate-free indices into a corpus of `size` pairs.
std::vector<std::size_t> downsample_indices(std::size_t size, std::size_t n,
                                            std::uint64_t seed,
                                            SampleMode mode = SampleMode::kUniform);

// Returns the corpus unchanged when n >= size.
corpus::BitextCorpus downsample(const corpus::BitextCorpus& corpus,
                                std::size_t n, std::uint64_t seed,
                                SampleMode mode = SampleMode::kUniform);

enum class Stage { kStage1, kStage2 };

struct MixtureSlice {
  std::string corpus_name;
  DirectionSpec direction;
  std::vector<std::size_t> indices;  // into the corpus, sorted
  std::size_t count = 0;
  bool synthetic = false;
};

using CorpusRef = std::shared_ptr<const corpus::BitextCorpus>;

struct TrainingMixture {
  Stage stage = Stage::kStage1;
  std::vector<MixtureSlice> slices;
  std::uint64_t seed = 0;
  std::map<std::string, CorpusRef> corpora;  // by name

  std::size_t total() const;
  // Per-direction example counts keyed "src-tgt".
  std::map<std::string, std::size_t> direction_counts() const;
  void validate() const;
};

// Both directions of every corpus, no downsampling. A corpus whose source
// side is synthetic and target side real only feeds source->target.
TrainingMixture build_stage1_mixture(const std::vector<CorpusRef>& eng_corpora,
                                     const vocab::Vocabulary* vocab = nullptr,
                                     std::uint64_t seed = 0);

struct PlanEntry {
  Direction new_direction;
  std::vector<Direction> old_directions;  // X->eng and eng->Y
  std::optional<std::size_t> n;
};

struct BalancePlan {
  std::vector<PlanEntry> entries;

  // xho->zul, zul->sna, sna->afr, afr->ssw, ssw->tsn, tsn->tso, tso->nso,
  // nso->xho, each matched with X->eng and eng->Y.
  static BalancePlan default_plan();
  static BalancePlan from_json(std::string_view json);
  static BalancePlan load(const std::filesystem::path& path);
  std::string to_json() const;
  // Throws kPlanCoverage when an entry does not list exactly its two
  // matched old directions.
  void validate() const;
};

struct Stage2Options {
  std::uint64_t seed = 0;
  // Cap for old directions no plan entry matches; defaults to the median
  // new-direction size.
  std::optional<std::size_t> default_cap;
  SampleMode mode = SampleMode::kUniform;
};

// Old directions named by a plan entry of size N get min(N, |old|) pairs;
// new corpora are taken whole. Throws kPlanCoverage, kMissingCorpus.
TrainingMixture build_stage2_mixture(const std::vector<CorpusRef>& old_corpora,
                                     const std::vector<CorpusRef>& new_corpora,
                                     const BalancePlan& plan,
                                     const Stage2Options& options,
                                     const vocab::Vocabulary* vocab = nullptr);

struct ExportResult {
  std::filesystem::path src_file;
  std::filesystem::path tgt_file;
  std::filesystem::path sidecar;
};

// Writes train.src / train.tgt with "<src:xx> text" / "<tgt:yy> text" lines
// in a seeded global shuffle, plus mixture.json with per-direction counts.
ExportResult export_mixture(const TrainingMixture& mix,
                            const std::filesystem::path& out_dir,
                            unsigned threads = 1);

struct ExportedExample {
  Direction direction;
  std::string src;
  std::string tgt;
};

// Reads back an exported mixture directory.
std::vector<ExportedExample> read_exported_mixture(
    const std::filesystem::path& dir);

}  // namespace mtkit::dataset

#endif  // MTKIT_DATASET_BUILDER_H_
