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

#include <cctype>
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mtkit/corpus.h"
#include "mtkit/error.h"
#include "mtkit/synthesis.h"
#include "mtkit/text.h"
#include "mtkit/translator.h"
#include "oracles/cipher.h"
#include "test_util.h"

namespace mtkit::synthesis {
namespace {

using corpus::BitextCorpus;
using testing_util::error_of;
using testing_util::make_corpus;
using translator::ExecTranslator;
using translator::IdentityTranslator;

BitextCorpus eng_xho() {
  return make_corpus("ex", "eng", "xho",
                     {{"the dog", "inja"}, {"a cat", "ikati"}, {"birds", "iintaka"}});
}

TEST(Backtranslate, KeepsRealTargetAndMarksSource) {
  const auto c = eng_xho();
  const ExecTranslator upper("tr a-z A-Z");
  const auto bt = backtranslate(c, upper);
  EXPECT_EQ(bt.name, "ex.bt");
  EXPECT_EQ(bt.direction(), c.direction());
  ASSERT_EQ(bt.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(bt.pairs[i].tgt, c.pairs[i].tgt);
    std::string upper = c.pairs[i].tgt;
    for (char& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    EXPECT_EQ(bt.pairs[i].src, upper);
  }
  EXPECT_EQ(bt.pairs[0].src, "INJA");
  EXPECT_TRUE(bt.src_provenance.is_synthetic());
  EXPECT_EQ(bt.src_provenance.generator_id, "exec:tr a-z A-Z");
  EXPECT_FALSE(bt.tgt_provenance.is_synthetic());
  bt.validate();
}

TEST(Backtranslate, IdentityModelReproducesFedSide) {
  const auto c = eng_xho();
  const auto bt = backtranslate(c, IdentityTranslator{});
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(bt.pairs[i].src, c.pairs[i].tgt);
}

TEST(Backtranslate, UnsupportedDirection) {
  const IdentityTranslator only({Direction::parse("eng-xho")});
  EXPECT_EQ(error_of([&] { backtranslate(eng_xho(), only); }), ErrorCode::kUnsupportedDirection);
}

TEST(Backtranslate, RecoversCipherSource) {
  const auto c = oracle::make_cipher_corpus(1000, 50, 9, english(), LanguageCode("zul"));
  const auto rev = translator::train_lexicon(corpus::reversed(c.corpus), 20, {.threads = 2});
  const translator::LexiconTranslator model(std::make_shared<const translator::Lexicon>(rev));
  const auto bt = backtranslate(c.corpus, model, {.batch_size = 37, .threads = 3});
  std::size_t ok = 0, total = 0;
  for (std::size_t i = 0; i < c.corpus.size(); ++i) {
    const auto want = text::split_whitespace(c.corpus.pairs[i].src);
    const auto got = text::split_whitespace(bt.pairs[i].src);
    ASSERT_EQ(want.size(), got.size());
    for (std::size_t k = 0; k < want.size(); ++k) ok += want[k] == got[k] ? 1 : 0;
    total += want.size();
  }
  EXPECT_GE(static_cast<double>(ok) / static_cast<double>(total), 0.95);
}

TEST(Pivot, ReplacesEnglishSide) {
  const auto c = make_corpus("ea", "eng", "afr", {{"the dog", "die hond"}, {"a cat", "'n kat"}});
  const ExecTranslator tag("sed 's/^/sna:/'");
  const auto p = pivot_synthesize(c, tag, LanguageCode("sna"));
  EXPECT_EQ(p.name, "ea.pivot-sna");
  EXPECT_EQ(p.direction(), Direction::parse("sna-afr"));
  EXPECT_EQ(p.pairs[1].src, "sna:a cat");
  EXPECT_EQ(p.pairs[1].tgt, "'n kat");
  EXPECT_TRUE(p.src_provenance.is_synthetic());
  EXPECT_FALSE(p.tgt_provenance.is_synthetic());

  // English on the target side: the result still lists the synthetic side first.
  const auto r = pivot_synthesize(corpus::reversed(c), tag, LanguageCode("sna"));
  EXPECT_EQ(r, p);
}

TEST(Pivot, RejectsBadTargets) {
  const auto c = eng_xho();
  const IdentityTranslator id;
  EXPECT_EQ(error_of([&] { pivot_synthesize(c, id, LanguageCode("xho")); }), ErrorCode::kBadPivot);
  EXPECT_EQ(error_of([&] { pivot_synthesize(c, id, english()); }), ErrorCode::kBadPivot);
  const auto nonenglish = make_corpus("xz", "xho", "zul", {{"a", "b"}});
  EXPECT_EQ(error_of([&] { pivot_synthesize(nonenglish, id, LanguageCode("sna")); }),
            ErrorCode::kBadPivot);
}

TEST(Job, LanguageChecks) {
  const auto c = eng_xho();
  const IdentityTranslator id;
  SynthesisJob job{&c, TranslateSide::kTgt, &id, english(), LanguageCode("zul"),
                   SynthesisKind::kBackTranslation};
  EXPECT_EQ(error_of([&] { run_synthesis(job); }), ErrorCode::kLanguageMismatch);
  job.out_tgt_lang = LanguageCode("xho");
  job.out_src_lang = LanguageCode("tsn");
  EXPECT_EQ(error_of([&] { run_synthesis(job); }), ErrorCode::kLanguageMismatch);
  job.model = nullptr;
  EXPECT_EQ(error_of([&] { run_synthesis(job); }), ErrorCode::kInvalidArgument);
}

TEST(Batches, OutputDoesNotDependOnBatchingOrThreads) {
  const auto c = oracle::make_cipher_corpus(203, 12, 4, english(), LanguageCode("xho")).corpus;
  const ExecTranslator rev("rev");
  const auto ref = backtranslate(c, rev, {.batch_size = 1000, .threads = 1});
  for (std::size_t bs : {1u, 7u, 64u}) {
    for (unsigned t : {1u, 4u}) {
      EXPECT_EQ(backtranslate(c, rev, {.batch_size = bs, .threads = t}), ref)
          << bs << "/" << t;
    }
  }
}

TEST(Batches, EmptyInputAndBadOutput) {
  const auto empty = make_corpus("e", "eng", "xho", {});
  EXPECT_TRUE(backtranslate(empty, IdentityTranslator{}).empty());
  const ExecTranslator blank("sed 's/.*/ /'");
  EXPECT_EQ(error_of([&] { backtranslate(eng_xho(), blank); }), ErrorCode::kBadModel);
  EXPECT_EQ(error_of([&] { backtranslate(eng_xho(), IdentityTranslator{}, {.batch_size = 0}); }),
            ErrorCode::kInvalidArgument);
}

TEST(Batches, OutputIsNfc) {
  const auto c = make_corpus("c", "eng", "afr", {{"x", "y"}});
  const ExecTranslator decomposed("printf 'cafe\\314\\201\\n'");
  EXPECT_EQ(backtranslate(c, decomposed).pairs[0].src, "caf\xC3\xA9");
}

TEST(Mix, ConcatenatesSamePairOnly) {
  const auto real = eng_xho();
  const auto bt = backtranslate(real, IdentityTranslator{});
  const auto mixed = mix_real_synthetic({real}, {bt});
  ASSERT_EQ(mixed.size(), 2u);
  EXPECT_FALSE(mixed[0].is_synthetic());
  EXPECT_TRUE(mixed[1].is_synthetic());
  EXPECT_EQ(mix_real_synthetic({real}, {corpus::reversed(bt)}).size(), 2u);
  const auto other = make_corpus("z", "eng", "zul", {{"a", "b"}});
  EXPECT_EQ(error_of([&] { mix_real_synthetic({real}, {other}); }), ErrorCode::kLanguageMismatch);
  EXPECT_EQ(error_of([&] { mix_real_synthetic({bt}, {}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(error_of([] { mix_real_synthetic({}, {}); }), ErrorCode::kEmptyInput);
}

}  // namespace
}  // namespace mtkit::synthesis
