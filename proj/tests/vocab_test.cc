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
#include <vector>

#include <gtest/gtest.h>

#include "mtkit/error.h"
#include "mtkit/text.h"
#include "mtkit/vocab.h"
#include "random_text.h"
#include "test_util.h"

namespace mtkit::vocab {
namespace {

using testing_util::error_of;
using testing_util::TempDir;

VocabConfig small_config(std::size_t extra) {
  VocabConfig c = VocabConfig::defaults();
  c.vocab_size = c.special_tokens.size() + extra;
  return c;
}

LangCorpusSet english(const std::vector<std::string>& lines) {
  LangCorpusSet s;
  for (const auto& l : lines) s.add(LanguageCode("eng"), l);
  return s;
}

TEST(Pretokenize, MarksWordEnds) {
  const auto words = pretokenize("low  lower\tê");
  ASSERT_EQ(words.size(), 3u);
  EXPECT_EQ(words[0], (Word{"l", "o", "w</w>"}));
  EXPECT_EQ(words[1], (Word{"l", "o", "w", "e", "r</w>"}));
  EXPECT_EQ(words[2], (Word{"ê</w>"}));
  EXPECT_TRUE(pretokenize("   ").empty());
  EXPECT_EQ(pretokenize("ab", "_")[0], (Word{"a", "b_"}));
}

TEST(Config, OverlapNamesTheLanguage) {
  VocabConfig c = VocabConfig::defaults();
  c.lrl_langs.insert(LanguageCode("xho"));
  try {
    c.validate();
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_NE(std::string(e.what()).find("xho"), std::string::npos);
  }
}

TEST(Config, SpecialTokensMustContainUnk) {
  VocabConfig c = VocabConfig::defaults();
  c.special_tokens = {"<pad>"};
  EXPECT_EQ(error_of([&] { c.validate(); }), ErrorCode::kInvalidArgument);
}

TEST(Train, SizeTooSmall) {
  // Base alphabet for "ab" is {a, a</w>, b, b</w>}.
  EXPECT_EQ(error_of([] { train_bpe(english({"ab"}), small_config(4)); }),
            ErrorCode::kVocabSizeTooSmall);
}

TEST(Train, EmptyInput) {
  EXPECT_EQ(error_of([] { train_bpe(LangCorpusSet{}, small_config(100)); }),
            ErrorCode::kEmptyCorpus);
}

TEST(Train, MostFrequentPairFirst) {
  std::vector<std::string> lines(5, "ab");
  lines.push_back("ac");
  lines.push_back("ac");
  const auto one = train_bpe(english(lines), small_config(7));
  ASSERT_EQ(one.merges().size(), 1u);
  EXPECT_EQ(one.merges()[0], (Merge{"a", "b</w>"}));
  EXPECT_EQ(one.size(), one.num_special() + 7);

  const auto all = train_bpe(english(lines), small_config(50));
  ASSERT_EQ(all.merges().size(), 2u);
  EXPECT_EQ(all.merges()[1], (Merge{"a", "c</w>"}));
  EXPECT_EQ(all.encode_pieces("ab ac"), (std::vector<std::string>{"ab</w>", "ac</w>"}));
}

TEST(Train, SingletonPairsAreNeverMerged) {
  const auto v = train_bpe(english({"abc def"}), small_config(100));
  EXPECT_TRUE(v.merges().empty());
}

TEST(Train, TiesGoToTheSmallestPair) {
  const auto v = train_bpe(english({"xy ab", "xy ab"}), small_config(9));
  ASSERT_EQ(v.merges().size(), 1u);
  EXPECT_EQ(v.merges()[0], (Merge{"a", "b</w>"}));
}

TEST(Encode, RoundTripsTrainingText) {
  const auto data = testing_util::random_sentences(5, 3, 40);
  const auto v = train_bpe(testing_util::to_corpus_set(data), small_config(120));
  for (const auto& [lang, lines] : data) {
    for (const auto& line : lines) {
      const auto ids = v.encode(line);
      EXPECT_EQ(v.decode(ids), text::nfc(line)) << line;
      EXPECT_LE(ids.size(), text::code_point_count(line));
    }
  }
}

TEST(Encode, UnknownCharactersBecomeUnk) {
  const auto v = train_bpe(english({"ab ab"}), small_config(10));
  const auto ids = v.encode("az");
  ASSERT_EQ(ids.size(), 2u);
  EXPECT_EQ(ids[1], v.unk_id());
  EXPECT_EQ(v.decode(ids), "a<unk>");
  EXPECT_TRUE(v.encode("").empty());
}

TEST(Encode, MatchesTrainingSegmentation) {
  const auto data = testing_util::random_sentences(9, 3, 30);
  const auto set = testing_util::to_corpus_set(data);
  for (Mode mode : {Mode::kBpe, Mode::kObpe}) {
    const auto r = train_detailed(mode, set, small_config(90));
    for (const auto& [word, pieces] : r.final_segmentation) {
      EXPECT_EQ(r.vocab.encode_pieces(word), pieces) << word;
    }
  }
}

TEST(Decode, UnknownIdAndDroppedSpecials) {
  const auto v = train_bpe(english({"ab ab"}), small_config(10));
  const std::vector<TokenId> bad = {static_cast<TokenId>(v.size())};
  EXPECT_EQ(error_of([&] { v.decode(bad); }), ErrorCode::kUnknownId);
  const std::vector<TokenId> neg = {-1};
  EXPECT_EQ(error_of([&] { v.decode(neg); }), ErrorCode::kUnknownId);
  auto ids = v.encode("ab");
  ids.insert(ids.begin(), *v.special_id("<s>"));
  ids.push_back(*v.special_id(target_tag(LanguageCode("zul"))));
  EXPECT_EQ(v.decode(ids), "ab");
}

TEST(Serialization, JsonRoundTrip) {
  TempDir dir;
  const auto data = testing_util::to_corpus_set(testing_util::random_sentences(3));
  const auto v = train_obpe(data, small_config(80));
  v.save(dir / "v.json");
  const auto w = Vocabulary::load(dir / "v.json");
  EXPECT_EQ(v, w);
  EXPECT_EQ(w.to_json(), v.to_json());
  EXPECT_EQ(w.mode(), Mode::kObpe);
}

TEST(Serialization, UnreachableMergeIsRejected) {
  const auto v = train_bpe(english({"ab ab"}), small_config(10));
  auto tokens = v.tokens();
  auto merges = v.merges();
  merges.push_back({"ab</w>", "a"});
  EXPECT_EQ(error_of([&] { Vocabulary(Mode::kBpe, v.config(), tokens, merges); }),
            ErrorCode::kBadVocabFile);
  tokens.push_back("zz");
  EXPECT_EQ(error_of([&] { Vocabulary(Mode::kBpe, v.config(), tokens, v.merges()); }),
            ErrorCode::kBadVocabFile);
  EXPECT_EQ(error_of([] { Vocabulary::from_json("{\"mode\": \"bpe\"}"); }),
            ErrorCode::kBadVocabFile);
  EXPECT_EQ(error_of([] { Vocabulary::from_json("not json"); }), ErrorCode::kBadVocabFile);
}

TEST(Mode, NamesRoundTrip) {
  EXPECT_EQ(parse_mode(mode_name(Mode::kObpe)), Mode::kObpe);
  EXPECT_EQ(error_of([] { parse_mode("wordpiece"); }), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace mtkit::vocab
