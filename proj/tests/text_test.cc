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

#include <atomic>
#include <stdexcept>

#include <gtest/gtest.h>

#include "mtkit/error.h"
#include "mtkit/hashing.h"
#include "mtkit/language.h"
#include "mtkit/parallel.h"
#include "mtkit/text.h"
#include "test_util.h"

namespace mtkit {
namespace {

using testing_util::error_of;

TEST(LanguageCode, AcceptsRegisteredCodes) {
  EXPECT_EQ(LanguageCode("xho").str(), "xho");
  EXPECT_TRUE(english().is_english());
  EXPECT_EQ(LanguageRegistry::defaults().size(), 9u);
}

TEST(LanguageCode, RejectsMalformedAndUnknown) {
  EXPECT_EQ(error_of([] { LanguageCode("XH"); }), ErrorCode::kInvalidLanguage);
  EXPECT_EQ(error_of([] { LanguageCode("xh1"); }), ErrorCode::kInvalidLanguage);
  EXPECT_EQ(error_of([] { LanguageCode("qqq"); }), ErrorCode::kInvalidLanguage);
}

TEST(LanguageCode, RegistryAddsCodes) {
  LanguageRegistry::add("vev");
  EXPECT_TRUE(LanguageRegistry::contains("vev"));
  EXPECT_EQ(LanguageCode("vev").str(), "vev");
}

TEST(Direction, ParseKeyReverse) {
  const auto d = Direction::parse("xho-zul");
  EXPECT_EQ(d.src.str(), "xho");
  EXPECT_EQ(d.key(), "xho-zul");
  EXPECT_EQ(d.reversed().key(), "zul-xho");
  EXPECT_EQ(error_of([] { Direction::parse("xhozul"); }), ErrorCode::kInvalidLanguage);
}

TEST(Text, NfcComposes) {
  EXPECT_EQ(text::nfc("e\xCC\x81"), "\xC3\xA9");
  EXPECT_TRUE(text::is_nfc("plain"));
  EXPECT_FALSE(text::is_nfc("e\xCC\x81"));
}

TEST(Text, RejectsBadUtf8) {
  EXPECT_EQ(error_of([] { text::check_utf8("\xC3"); }), ErrorCode::kBadEncoding);
}

TEST(Text, SplitsOnUnicodeWhitespace) {
  const auto w = text::split_whitespace("  a\tb\xC2\xA0" "c  d ");
  ASSERT_EQ(w.size(), 4u);
  EXPECT_EQ(w[2], "c");
  EXPECT_TRUE(text::split_whitespace("").empty());
  EXPECT_TRUE(text::is_blank(" \t"));
}

TEST(Text, CodePoints) {
  EXPECT_EQ(text::code_point_count("t\xC3\xAA" "e"), 3u);
  EXPECT_EQ(text::code_points("t\xC3\xAA")[1], "\xC3\xAA");
  EXPECT_EQ(text::trim_trailing("ab \t"), "ab");
}

TEST(Hashing, KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Hashing, DerivedSeedsDifferByLabel) {
  EXPECT_EQ(derive_seed(7, "x"), derive_seed(7, "x"));
  EXPECT_NE(derive_seed(7, "x"), derive_seed(7, "y"));
  EXPECT_NE(derive_seed(7, "x"), derive_seed(8, "x"));
}

TEST(Rng, BelowStaysInRangeAndRepeats) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto v = a.below(7);
    EXPECT_LT(v, 7u);
    EXPECT_EQ(v, b.below(7));
  }
  const double u = a.uniform();
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (unsigned threads : {1u, 2u, 8u}) {
    std::vector<int> seen(1000, 0);
    parallel_for(seen.size(), threads, [&](std::size_t i) { seen[i] += 1; });
    for (int v : seen) EXPECT_EQ(v, 1);
  }
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}

TEST(Error, MessageCarriesCodeName) {
  const Error e(ErrorCode::kMisalignedFiles, "x");
  EXPECT_EQ(std::string(e.what()), "MisalignedFiles: x");
  EXPECT_EQ(e.code(), ErrorCode::kMisalignedFiles);
}

}  // namespace
}  // namespace mtkit
