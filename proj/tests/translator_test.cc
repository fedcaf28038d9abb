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

#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mtkit/error.h"
#include "mtkit/translator.h"
#include "oracles/cipher.h"
#include "test_util.h"

namespace mtkit::translator {
namespace {

using testing_util::error_of;
using testing_util::make_corpus;
using testing_util::TempDir;

double recovery(const Lexicon& lex, const std::map<std::string, std::string>& truth) {
  std::size_t ok = 0;
  for (const auto& [e, f] : truth) {
    if (lex.best_translation(e) == f) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(truth.size());
}

TEST(Lexicon, RecoversCipher) {
  const auto c = oracle::make_cipher_corpus(1000, 50, 42, LanguageCode("eng"),
                                            LanguageCode("xho"));
  const auto lex = train_lexicon(c.corpus, 20, {.threads = 4});
  EXPECT_GE(recovery(lex, c.mapping), 0.95);
  ASSERT_EQ(lex.log_likelihood().size(), 21u);
  for (std::size_t i = 1; i < lex.log_likelihood().size(); ++i) {
    EXPECT_GE(lex.log_likelihood()[i], lex.log_likelihood()[i - 1] - 1e-9) << i;
  }
  EXPECT_LE(lex.max_row_error(), 1e-9);
  EXPECT_EQ(lexicon_translate(lex, "s3 s7 unseen"),
            c.mapping.at("s3") + " " + c.mapping.at("s7") + " unseen");
}

TEST(Lexicon, ThreadCountDoesNotChangeTable) {
  const auto c = oracle::make_cipher_corpus(300, 20, 7, LanguageCode("eng"),
                                            LanguageCode("zul"));
  const auto one = train_lexicon(c.corpus, 5, {.threads = 1});
  const auto many = train_lexicon(c.corpus, 5, {.threads = 8});
  EXPECT_EQ(one.to_json(), many.to_json());
}

TEST(Lexicon, JsonRoundTrip) {
  TempDir dir;
  const auto c = oracle::make_cipher_corpus(200, 15, 3, LanguageCode("eng"),
                                            LanguageCode("afr"));
  const auto lex = train_lexicon(c.corpus, 6);
  lex.save(dir / "lex.json");
  const auto back = Lexicon::load(dir / "lex.json");
  EXPECT_EQ(back.direction(), lex.direction());
  EXPECT_LE(back.max_row_error(), 1e-9);
  for (const auto& [e, f] : c.mapping) {
    EXPECT_EQ(back.best_translation(e), lex.best_translation(e));
    EXPECT_NEAR(back.prob(f, e), lex.prob(f, e), 1e-10);
  }
  EXPECT_EQ(back.to_json(), Lexicon::from_json(back.to_json()).to_json());
  EXPECT_EQ(error_of([] { Lexicon::from_json("[1, 2]"); }), ErrorCode::kBadModel);
}

TEST(Lexicon, WarmStartKeepsLikelihoodClimbing) {
  const auto c = oracle::make_cipher_corpus(400, 30, 11, LanguageCode("eng"),
                                            LanguageCode("tsn"));
  const auto first = train_lexicon(c.corpus, 3);
  const auto warm = train_lexicon(c.corpus, 3, {.warm_start = &first});
  EXPECT_GE(warm.log_likelihood().back(), first.log_likelihood().front());
  EXPECT_GE(recovery(warm, c.mapping), recovery(first, c.mapping) - 1e-12);
}

TEST(Lexicon, RejectsBadInput) {
  const auto empty = make_corpus("e", "eng", "xho", {});
  EXPECT_EQ(error_of([&] { train_lexicon(empty, 3); }), ErrorCode::kEmptyCorpus);
  const auto one = make_corpus("o", "eng", "xho", {{"a", "b"}});
  EXPECT_EQ(error_of([&] { train_lexicon(one, 0); }), ErrorCode::kInvalidArgument);
}

TEST(Identity, CopiesAndChecksDirection) {
  const IdentityTranslator any;
  const std::vector<std::string> in = {"a", "b c"};
  EXPECT_EQ(any.translate_batch(in, english(), LanguageCode("xho")), in);
  EXPECT_EQ(error_of([&] { any.translate_batch(in, english(), english()); }),
            ErrorCode::kUnsupportedDirection);
  const IdentityTranslator only({Direction::parse("eng-zul")});
  EXPECT_EQ(error_of([&] { only.translate_batch(in, english(), LanguageCode("xho")); }),
            ErrorCode::kUnsupportedDirection);
}

TEST(Multilingual, TrainsDirectionsAndCopiesZeroShot) {
  const auto a = oracle::make_cipher_corpus(300, 10, 1, LanguageCode("eng"), LanguageCode("xho"));
  const auto b = oracle::make_cipher_corpus(300, 10, 2, LanguageCode("eng"), LanguageCode("zul"));
  std::vector<DirectionalExamples> data = {{Direction::parse("eng-xho"), a.corpus.pairs},
                                           {Direction::parse("eng-zul"), b.corpus.pairs}};
  const auto model = train_multilingual("m", data, 10, nullptr, 2);
  EXPECT_TRUE(model.has_lexicon(Direction::parse("eng-xho")));
  EXPECT_TRUE(model.supports(Direction::parse("xho-zul")));
  EXPECT_FALSE(model.supports(Direction::parse("xho-tsn")));
  const std::vector<std::string> in = {"s1 s2"};
  EXPECT_EQ(model.translate_batch(in, english(), LanguageCode("xho"))[0],
            a.mapping.at("s1") + " " + a.mapping.at("s2"));
  EXPECT_EQ(model.translate_batch(in, LanguageCode("xho"), LanguageCode("zul")), in);

  TempDir dir;
  model.save(dir / "m.json");
  const auto loaded = load_model((dir / "m.json").string());
  EXPECT_EQ(loaded->id(), "m");
  EXPECT_EQ(loaded->translate_batch(in, english(), LanguageCode("zul"))[0],
            b.mapping.at("s1") + " " + b.mapping.at("s2"));

  // Warm start keeps directions it was not given data for.
  const auto more = train_multilingual("m2", {data[0]}, 2, &model);
  EXPECT_TRUE(more.has_lexicon(Direction::parse("eng-zul")));
  EXPECT_EQ(error_of([] { train_multilingual("x", {}, 2); }), ErrorCode::kEmptyInput);
}

TEST(Exec, RunsShellCommand) {
  const ExecTranslator upper("tr a-z A-Z");
  const std::vector<std::string> in = {"hello there", "x"};
  EXPECT_EQ(upper.translate_batch(in, english(), LanguageCode("xho")),
            (std::vector<std::string>{"HELLO THERE", "X"}));
  const ExecTranslator env("sed \"s/^/$MTKIT_SRC>$MTKIT_TGT /\"");
  EXPECT_EQ(env.translate_batch(in, english(), LanguageCode("zul"))[1], "eng>zul x");
}

TEST(Exec, LineCountMismatchAndFailure) {
  const std::vector<std::string> in = {"a", "b", "c"};
  const ExecTranslator short_output("head -n 1");
  EXPECT_EQ(error_of([&] { short_output.translate_batch(in, english(), LanguageCode("xho")); }),
            ErrorCode::kBadModel);
  const ExecTranslator failing("cat >/dev/null; exit 3");
  EXPECT_EQ(error_of([&] { failing.translate_batch(in, english(), LanguageCode("xho")); }),
            ErrorCode::kBadModel);
}

TEST(LoadModel, Specs) {
  EXPECT_EQ(load_model("identity")->id(), "identity");
  EXPECT_EQ(load_model("exec:cat")->id(), "exec:cat");
  TempDir dir;
  const auto c = oracle::make_cipher_corpus(100, 8, 5, LanguageCode("eng"), LanguageCode("afr"));
  train_lexicon(c.corpus, 4).save(dir / "eng-afr.json");
  const auto m = load_model((dir / "eng-afr.json").string());
  EXPECT_EQ(m->id(), "lexicon:eng-afr");
  EXPECT_TRUE(m->supports(Direction::parse("eng-afr")));
  EXPECT_FALSE(m->supports(Direction::parse("afr-eng")));
  testing_util::spit(dir / "x.json", R"({"kind": "neural"})");
  EXPECT_EQ(error_of([&] { load_model((dir / "x.json").string()); }), ErrorCode::kBadModel);
  EXPECT_EQ(error_of([&] { load_model((dir / "missing.json").string()); }), ErrorCode::kIo);
}

}  // namespace
}  // namespace mtkit::translator
