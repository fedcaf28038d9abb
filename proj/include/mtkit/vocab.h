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

#ifndef MTKIT_VOCAB_H_
#define MTKIT_VOCAB_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mtkit/corpus.h"
#include "mtkit/language.h"

namespace mtkit::vocab {

using TokenId = std::int32_t;

enum class Mode { kBpe, kObpe };

std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view name);

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";

std::string source_tag(const LanguageCode& lang);  // "<src:xxx>"
std::string target_tag(const LanguageCode& lang);  // "<tgt:xxx>"

// pad, unk, bos, eos, then a source and a target tag for every registered
// language.
std::vector<std::string> default_special_tokens();

struct VocabConfig {
  // Includes special and language-tag tokens.
  std::size_t vocab_size = 40000;
  std::set<LanguageCode> hrl_langs;
  std::set<LanguageCode> lrl_langs;
  // Exponent of the power mean used by OBPE. 1 reproduces BPE.
  double mean_exponent_p = -2.0;
  std::vector<std::string> special_tokens = default_special_tokens();
  std::string end_of_word_marker = "</w>";

  // HRL {eng, xho, tsn, sna}, LRL {afr, zul, ssw, nso, tso}.
  static VocabConfig defaults();

  // Checks everything that does not depend on the data.
  void validate() const;

  friend bool operator==(const VocabConfig&, const VocabConfig&) = default;
};

// Monolingual sentence streams keyed by language.
struct LangCorpusSet {
  std::map<LanguageCode, std::vector<std::string>> sentences;

  void add(const LanguageCode& lang, std::string sentence) {
    sentences[lang].push_back(std::move(sentence));
  }
  bool empty() const;

  // Both sides of every corpus, appended in corpus order.
  static LangCorpusSet from_corpora(
      const std::vector<corpus::BitextCorpus>& corpora);
};

// A pretokenized word: symbols with the end-of-word marker glued to the last
// one, e.g. "now" -> {"n", "o", "w</w>"}.
using Word = std::vector<std::string>;

std::vector<Word> pretokenize(std::string_view text,
                              std::string_view marker = "</w>");

struct Merge {
  std::string left;
  std::string right;

  friend bool operator==(const Merge&, const Merge&) = default;
  friend auto operator<=>(const Merge&, const Merge&) = default;
};

// Immutable trained vocabulary. Token table layout: special tokens, then base
// symbols, then merge outputs in merge order (duplicates collapse).
class Vocabulary {
 public:
  // Validates the reachability invariant; throws kBadVocabFile.
  Vocabulary(Mode mode, VocabConfig config, std::vector<std::string> tokens,
             std::vector<Merge> merges);

  Mode mode() const { return mode_; }
  const VocabConfig& config() const { return config_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<Merge>& merges() const { return merges_; }
  std::size_t size() const { return tokens_.size(); }

  const std::string& token(TokenId id) const;
  bool is_special(TokenId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < num_special_;
  }
  std::size_t num_special() const { return num_special_; }
  std::optional<TokenId> special_id(std::string_view surface) const;
  std::optional<TokenId> piece_id(std::string_view piece) const;
  TokenId unk_id() const { return unk_id_; }

  // Applies the merges in training order inside each pretokenized word.
  // Characters outside the base alphabet become unk.
  std::vector<TokenId> encode(std::string_view text) const;
  // Segmentation as strings (unk shows as the unk surface).
  std::vector<std::string> encode_pieces(std::string_view text) const;
  std::size_t count_tokens(std::string_view text) const;

  // Throws kUnknownId for ids outside the table. Special tokens other than
  // unk are dropped from the output.
  std::string decode(std::span<const TokenId> ids) const;

  std::string to_json() const;
  static Vocabulary from_json(std::string_view json);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.mode_ == b.mode_ && a.config_ == b.config_ &&
           a.tokens_ == b.tokens_ && a.merges_ == b.merges_;
  }

 private:
  void encode_word(const Word& word, std::vector<TokenId>& out) const;

  Mode mode_;
  VocabConfig config_;
  std::vector<std::string> tokens_;
  std::vector<Merge> merges_;
  std::size_t num_special_ = 0;
  TokenId unk_id_ = -1;
  std::unordered_map<std::string, TokenId> special_ids_;
  std::unordered_map<std::string, TokenId> piece_ids_;
  // (left id, right id) -> ranks at which that pair is merged, ascending,
  // paired with the output id.
  std::unordered_map<std::uint64_t, std::vector<std::pair<int, TokenId>>>
      merge_ranks_;
};

struct TrainOptions {
  // Worker threads for corpus counting. Output does not depend on it.
  unsigned threads = 1;
};

// Greedy BPE over pooled pair counts. Ties go to the lexicographically
// smaller (left, right). Stops at vocab_size or when no pair occurs twice.
Vocabulary train_bpe(const LangCorpusSet& data, const VocabConfig& config,
                     const TrainOptions& options = {});

// Overlap-aware BPE: candidates (pooled count >= 2) are ranked by the
// weighted power mean, with exponent p, of their per-language relative
// frequencies; weights are proportional to each language's adjacent-pair
// total.
Vocabulary train_obpe(const LangCorpusSet& data, const VocabConfig& config,
                      const TrainOptions& options = {});

Vocabulary train(Mode mode, const LangCorpusSet& data,
                 const VocabConfig& config, const TrainOptions& options = {});

struct TrainResult {
  Vocabulary vocab;
  // Every training word type (without marker) and its segmentation after the
  // last merge.
  std::map<std::string, std::vector<std::string>> final_segmentation;
};

TrainResult train_detailed(Mode mode, const LangCorpusSet& data,
                           const VocabConfig& config,
                           const TrainOptions& options = {});

// Exposed for tests: the merge score for one candidate given per-language
// pair counts and per-language adjacent-pair totals (same order).
double obpe_score(std::span<const std::int64_t> pair_counts,
                  std::span<const std::int64_t> pair_totals, double p);

}  // namespace mtkit::vocab

#endif  // MTKIT_VOCAB_H_
