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

#ifndef MTKIT_LANGUAGE_H_
#define MTKIT_LANGUAGE_H_

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtkit {

// Process-wide set of accepted language codes. Ships with the nine languages
// of the reference setup; callers may register more before loading data.
class LanguageRegistry {
 public:
  static bool contains(std::string_view code);
  // Throws kInvalidLanguage if `code` is not three lowercase ASCII letters.
  static void add(std::string_view code);
  // Sorted.
  static std::vector<std::string> codes();
  static const std::vector<std::string>& defaults();
};

// A registered three-letter lowercase language identifier.
class LanguageCode {
 public:
  // Throws kInvalidLanguage on malformed or unregistered codes.
  explicit LanguageCode(std::string_view code);

  const std::string& str() const noexcept { return code_; }
  bool is_english() const noexcept { return code_ == "eng"; }

  friend auto operator<=>(const LanguageCode&, const LanguageCode&) = default;
  friend bool operator==(const LanguageCode&, const LanguageCode&) = default;

 private:
  std::string code_;
};

inline std::ostream& operator<<(std::ostream& os, const LanguageCode& lang) {
  return os << lang.str();
}

inline const LanguageCode& english() {
  static const LanguageCode eng("eng");
  return eng;
}

bool is_well_formed_language_code(std::string_view code);

// An ordered translation direction.
struct Direction {
  LanguageCode src;
  LanguageCode tgt;

  // "src-tgt", e.g. "xho-zul".
  std::string key() const { return src.str() + "-" + tgt.str(); }
  Direction reversed() const { return {tgt, src}; }

  // Parses "src-tgt"; throws kInvalidLanguage.
  static Direction parse(std::string_view key);

  friend auto operator<=>(const Direction&, const Direction&) = default;
  friend bool operator==(const Direction&, const Direction&) = default;
};

}  // namespace mtkit

template <>
struct std::hash<mtkit::LanguageCode> {
  std::size_t operator()(const mtkit::LanguageCode& lang) const noexcept {
    return std::hash<std::string>{}(lang.str());
  }
};

#endif  // MTKIT_LANGUAGE_H_
