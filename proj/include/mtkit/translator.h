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

#ifndef MTKIT_TRANSLATOR_H_
#define MTKIT_TRANSLATOR_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mtkit/corpus.h"
#include "mtkit/language.h"

namespace mtkit::translator {

// Anything that maps sentences in one language to sentences in another.
// Implementations must be safe to call concurrently.
class TranslatorModel {
 public:
  virtual ~TranslatorModel() = default;

  virtual std::string id() const = 0;
  virtual bool supports(const Direction& direction) const = 0;

  // Throws kUnsupportedDirection; the result always has the input's length
  // and order.
  std::vector<std::string> translate_batch(std::span<const std::string> sentences,
                                           const LanguageCode& src,
                                           const LanguageCode& tgt) const;

 protected:
  virtual std::vector<std::string> do_translate(std::span<const std::string> sentences,
                                                const Direction& direction) const = 0;
};

// Returns every sentence unchanged. With no directions given it accepts any.
class IdentityTranslator : public TranslatorModel {
 public:
  explicit IdentityTranslator(std::set<Direction> directions = {})
      : directions_(std::move(directions)) {}

  std::string id() const override { return "identity"; }
  bool supports(const Direction& d) const override {
    return d.src != d.tgt && (directions_.empty() || directions_.count(d) != 0);
  }

 protected:
  std::vector<std::string> do_translate(std::span<const std::string> sentences,
                                        const Direction&) const override {
    return {sentences.begin(), sentences.end()};
  }

 private:
  std::set<Direction> directions_;
};

// Word translation table t(f | e) learned by EM. Source index 0 is the null
// word. Rows are sparse and sorted by target index.
class Lexicon {
 public:
  struct Entry {
    int tgt = 0;
    double prob = 0.0;
  };

  static constexpr std::string_view kNullWord = "<null>";

  Lexicon(Direction direction, std::vector<std::string> src_words,
          std::vector<std::string> tgt_words, std::vector<std::vector<Entry>> rows,
          std::vector<double> log_likelihood = {});

  const Direction& direction() const { return direction_; }
  // src_words()[0] is the null word.
  const std::vector<std::string>& src_words() const { return src_words_; }
  const std::vector<std::string>& tgt_words() const { return tgt_words_; }
  const std::vector<std::vector<Entry>>& rows() const { return rows_; }
  // Corpus log-likelihood before the first and after every iteration.
  const std::vector<double>& log_likelihood() const { return log_likelihood_; }

  double prob(std::string_view tgt_word, std::string_view src_word) const;
  // argmax_f t(f | e), smallest f on ties; nullopt for unknown e.
  std::optional<std::string> best_translation(std::string_view src_word) const;

  // Max |sum_f t(f|e) - 1| over rows.
  double max_row_error() const;

  std::string to_json() const;
  // Rows are renormalised after reading.
  static Lexicon from_json(std::string_view json);
  void save(const std::filesystem::path& path) const;
  static Lexicon load(const std::filesystem::path& path);

 private:
  std::optional<int> src_index(std::string_view word) const;

  Direction direction_;
  std::vector<std::string> src_words_;
  std::vector<std::string> tgt_words_;
  std::vector<std::vector<Entry>> rows_;
  std::vector<double> log_likelihood_;
  std::unordered_map<std::string, int> src_index_;
  std::vector<int> best_;
};

struct LexiconOptions {
  unsigned threads = 1;
  // Continue from an existing table: the start point mixes it evenly with
  // the uniform table.
  const Lexicon* warm_start = nullptr;
};

// EM for lexical translation probabilities with a uniform alignment prior over
// the source words plus null. Throws kEmptyCorpus, kInvalidArgument.
Lexicon train_lexicon(const corpus::BitextCorpus& corpus, std::size_t iterations,
                      const LexiconOptions& options = {});

// Word-by-word argmax; unknown words are copied; order is kept.
std::string lexicon_translate(const Lexicon& lexicon, std::string_view sentence);

class LexiconTranslator : public TranslatorModel {
 public:
  explicit LexiconTranslator(std::shared_ptr<const Lexicon> lexicon, std::string id = "lexicon");

  std::string id() const override { return id_; }
  bool supports(const Direction& d) const override { return d == lexicon_->direction(); }
  const Lexicon& lexicon() const { return *lexicon_; }

 protected:
  std::vector<std::string> do_translate(std::span<const std::string> sentences,
                                        const Direction& direction) const override;

 private:
  std::shared_ptr<const Lexicon> lexicon_;
  std::string id_;
};

// One lexicon per trained direction inside a single model. Directions between
// known languages without a lexicon are zero-shot: the input is copied.
class MultilingualLexiconModel : public TranslatorModel {
 public:
  MultilingualLexiconModel(std::string id, std::set<LanguageCode> languages,
                           std::map<Direction, std::shared_ptr<const Lexicon>> lexicons);

  std::string id() const override { return id_; }
  bool supports(const Direction& d) const override;
  bool has_lexicon(const Direction& d) const { return lexicons_.count(d) != 0; }
  const std::map<Direction, std::shared_ptr<const Lexicon>>& lexicons() const {
    return lexicons_;
  }
  const std::set<LanguageCode>& languages() const { return languages_; }

  std::string to_json() const;
  static MultilingualLexiconModel from_json(std::string_view json);
  void save(const std::filesystem::path& path) const;

 protected:
  std::vector<std::string> do_translate(std::span<const std::string> sentences,
                                        const Direction& direction) const override;

 private:
  std::string id_;
  std::set<LanguageCode> languages_;
  std::map<Direction, std::shared_ptr<const Lexicon>> lexicons_;
};

// Trains one lexicon per direction found in `examples`.
struct DirectionalExamples {
  Direction direction;
  std::vector<corpus::SentencePair> pairs;
};
MultilingualLexiconModel train_multilingual(const std::string& id,
                                            const std::vector<DirectionalExamples>& data,
                                            std::size_t iterations,
                                            const MultilingualLexiconModel* warm_start = nullptr,
                                            unsigned threads = 1);

// Runs `command` through /bin/sh with the batch on stdin (one sentence per
// line) and expects the same number of lines back. MTKIT_SRC and MTKIT_TGT
// are set to the language codes.
class ExecTranslator : public TranslatorModel {
 public:
  explicit ExecTranslator(std::string command, std::set<Direction> directions = {});

  std::string id() const override { return "exec:" + command_; }
  bool supports(const Direction& d) const override {
    return d.src != d.tgt && (directions_.empty() || directions_.count(d) != 0);
  }

 protected:
  std::vector<std::string> do_translate(std::span<const std::string> sentences,
                                        const Direction& direction) const override;

 private:
  std::string command_;
  std::set<Direction> directions_;
};

// "exec:<command>" or a path to a lexicon / multilingual model JSON file.
std::unique_ptr<TranslatorModel> load_model(std::string_view spec);

}  // namespace mtkit::translator

#endif  // MTKIT_TRANSLATOR_H_
