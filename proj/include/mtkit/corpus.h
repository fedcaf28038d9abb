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

#ifndef MTKIT_CORPUS_H_
#define MTKIT_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mtkit/language.h"

namespace mtkit::corpus {

struct SentencePair {
  std::string src;
  std::string tgt;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

enum class ProvenanceKind { kReal, kSynthetic };

// generator_id is present iff kind == kSynthetic.
struct Provenance {
  ProvenanceKind kind = ProvenanceKind::kReal;
  std::optional<std::string> generator_id;

  static Provenance real() { return {}; }
  static Provenance synthetic(std::string generator_id) {
    return {ProvenanceKind::kSynthetic, std::move(generator_id)};
  }

  bool is_synthetic() const { return kind == ProvenanceKind::kSynthetic; }
  void validate() const;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Aligned sentence pairs. Pair order is significant: the validation split
// takes a prefix.
struct BitextCorpus {
  std::string name;
  LanguageCode src_lang;
  LanguageCode tgt_lang;
  std::vector<SentencePair> pairs;
  Provenance src_provenance;
  Provenance tgt_provenance;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  bool has_language(const LanguageCode& lang) const {
    return src_lang == lang || tgt_lang == lang;
  }
  bool is_synthetic() const {
    return src_provenance.is_synthetic() || tgt_provenance.is_synthetic();
  }
  Direction direction() const { return {src_lang, tgt_lang}; }

  std::vector<std::string> src_side() const;
  std::vector<std::string> tgt_side() const;

  // Throws on any invariant violation (languages, provenance, empty or
  // multi-line sentences).
  void validate() const;

  friend bool operator==(const BitextCorpus&, const BitextCorpus&) = default;
};

// Checks one side of a pair; `line` is 1-based and used in messages.
void validate_sentence(const std::string& s, std::size_t line,
                       const char* side);

// Reads a JSON manifest and its two aligned text files. Lines are NFC
// normalised. Checksums and pair_count are verified when present.
BitextCorpus load_bitext(const std::filesystem::path& manifest_path);

// Writes `<name>.<src>`, `<name>.<tgt>` and `<name>.json` into `dir` and
// returns the manifest path.
std::filesystem::path write_bitext(const BitextCorpus& corpus,
                                   const std::filesystem::path& dir);

// Builds a manifest for two existing text files (the `corpus import` path).
std::filesystem::path import_bitext(const std::filesystem::path& src_file,
                                    const std::filesystem::path& tgt_file,
                                    const LanguageCode& src_lang,
                                    const LanguageCode& tgt_lang,
                                    const std::string& name,
                                    const std::filesystem::path& out_dir);

struct ValidationSplit {
  BitextCorpus valid;
  BitextCorpus train;
};

inline constexpr std::size_t kDefaultValidationSize = 3000;

// valid = first min(n, size) pairs, train = the rest. Both keep order.
ValidationSplit split_validation(const BitextCorpus& corpus,
                                 std::size_t n = kDefaultValidationSize);

struct CorpusStats {
  std::size_t pair_count = 0;
  std::size_t src_chars = 0;  // code points
  std::size_t tgt_chars = 0;
  std::size_t src_tokens = 0;  // white-space separated
  std::size_t tgt_tokens = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

CorpusStats corpus_stats(const BitextCorpus& corpus);

// Swaps the sides, keeping provenance attached to its text.
BitextCorpus reversed(const BitextCorpus& corpus);

// Returns the corpus oriented as `direction`, reversing it if needed.
// Throws kLanguageMismatch if the corpus does not hold both languages.
BitextCorpus oriented(const BitextCorpus& corpus, const Direction& direction);

struct CleanOptions {
  double max_length_ratio = 3.0;  // on white-space token counts
  bool dedup = true;
};

struct CleanResult {
  BitextCorpus corpus;
  std::size_t removed = 0;
};

// Optional filter: drops exact duplicate pairs and pairs whose token-length
// ratio exceeds the limit. Not applied anywhere by default.
CleanResult clean(const BitextCorpus& corpus, const CleanOptions& options = {});

}  // namespace mtkit::corpus

#endif  // MTKIT_CORPUS_H_
