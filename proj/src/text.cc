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

#include "mtkit/text.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "mtkit/error.h"

namespace mtkit::text {
namespace {

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || norm == nullptr) {
    throw Error(ErrorCode::kBadEncoding, "ICU NFC normalizer unavailable");
  }
  return *norm;
}

// Calls fn(begin, end, code_point) for every code point.
template <typename Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t begin = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) {
      throw Error(ErrorCode::kBadEncoding,
                  "invalid UTF-8 at byte " + std::to_string(begin));
    }
    fn(static_cast<std::size_t>(begin), static_cast<std::size_t>(i), c);
  }
}

}  // namespace

void check_utf8(std::string_view s) {
  for_each_code_point(s, [](std::size_t, std::size_t, UChar32) {});
}

std::string nfc(std::string_view s) {
  check_utf8(s);
  bool ascii = true;
  for (char c : s) {
    if (static_cast<unsigned char>(c) >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) return std::string(s);
  UErrorCode status = U_ZERO_ERROR;
  const auto input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  const auto normalized = nfc_instance().normalize(input, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kBadEncoding, "NFC normalization failed");
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

bool is_nfc(std::string_view s) { return nfc(s) == s; }

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> words;
  std::size_t word_begin = std::string_view::npos;
  for_each_code_point(s, [&](std::size_t begin, std::size_t, UChar32 c) {
    if (u_isUWhiteSpace(c)) {
      if (word_begin != std::string_view::npos) {
        words.emplace_back(s.substr(word_begin, begin - word_begin));
        word_begin = std::string_view::npos;
      }
    } else if (word_begin == std::string_view::npos) {
      word_begin = begin;
    }
  });
  if (word_begin != std::string_view::npos) {
    words.emplace_back(s.substr(word_begin));
  }
  return words;
}

std::vector<std::string> code_points(std::string_view s) {
  std::vector<std::string> out;
  for_each_code_point(s, [&](std::size_t begin, std::size_t end, UChar32) {
    out.emplace_back(s.substr(begin, end - begin));
  });
  return out;
}

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for_each_code_point(s, [&](std::size_t, std::size_t, UChar32) { ++n; });
  return n;
}

bool is_blank(std::string_view s) {
  bool blank = true;
  for_each_code_point(s, [&](std::size_t, std::size_t, UChar32 c) {
    if (!u_isUWhiteSpace(c)) blank = false;
  });
  return blank;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::string_view trim_trailing(std::string_view s) {
  std::size_t keep = 0;
  for_each_code_point(s, [&](std::size_t, std::size_t end, UChar32 c) {
    if (!u_isUWhiteSpace(c)) keep = end;
  });
  return s.substr(0, keep);
}

}  // namespace mtkit::text
