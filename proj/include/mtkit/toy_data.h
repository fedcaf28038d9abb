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

#ifndef MTKIT_TOY_DATA_H_
#define MTKIT_TOY_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mtkit/corpus.h"
#include "mtkit/hashing.h"
#include "mtkit/language.h"

namespace mtkit::toy {

// One slot of a base sentence. Noun phrases carry an optional determiner and
// adjective; every other slot is a single word.
struct ToyItem {
  enum class Kind { kNounPhrase, kVerb, kPreposition, kAdverb, kConjunction };
  Kind kind = Kind::kVerb;
  std::string det;   // noun phrases only, may be empty
  std::string adj;   // noun phrases only, may be empty
  std::string word;  // the noun for noun phrases
};

using ToySentence = std::vector<ToyItem>;

// Nine invented languages derived from a small English-like grammar.
// Related languages share a letter cipher and differ by sound shifts;
// the Bantu-like ones drop articles, put adjectives after the noun and glue
// class prefixes onto nouns and verbs.
class ToyWorld {
 public:
  explicit ToyWorld(std::uint64_t seed);

  ToySentence sample(Rng& rng) const;
  std::string render(const ToySentence& sentence, const LanguageCode& lang) const;

  // Surface form of a base word; the base word itself for eng.
  const std::string& word(const LanguageCode& lang, const std::string& base) const;
  // True for the languages that drop articles and reorder modifiers.
  static bool is_bantu(const LanguageCode& lang);

 private:
  std::map<LanguageCode, std::map<std::string, std::string>> lexicon_;
};

// Pair counts at one thousandth of the real corpora.
const std::vector<std::pair<std::string, std::size_t>>& toy_old_sizes();
const std::vector<std::pair<std::string, std::size_t>>& toy_new_sizes();

corpus::BitextCorpus make_toy_corpus(const ToyWorld& world, const LanguageCode& src,
                                     const LanguageCode& tgt, std::size_t n,
                                     std::uint64_t seed, const std::string& name);

struct ToyOptions {
  std::uint64_t seed = 2023;
  double scale = 1.0;  // multiplies every corpus size
  std::size_t dev_size = 100;
  std::size_t test_size = 100;
  std::size_t validation_size = 3;
  std::size_t vocab_size = 1000;
};

struct ToyDataset {
  std::filesystem::path config;
  std::filesystem::path plan;
  std::vector<std::filesystem::path> old_corpora;
  std::vector<std::filesystem::path> new_corpora;
  std::vector<std::filesystem::path> dev;
  std::vector<std::filesystem::path> tests;
};

// Writes every corpus, a balance plan and a pipeline config (with paths
// relative to `dir`) into `dir`.
ToyDataset write_toy_dataset(const std::filesystem::path& dir, const ToyOptions& options = {});

}  // namespace mtkit::toy

#endif  // MTKIT_TOY_DATA_H_
