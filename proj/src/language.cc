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

#include "mtkit/language.h"

#include <algorithm>
#include <mutex>
#include <set>
#include <shared_mutex>

#include "mtkit/error.h"

namespace mtkit {
namespace {

struct RegistryState {
  std::shared_mutex mu;
  std::set<std::string, std::less<>> codes;
};

RegistryState& state() {
  static RegistryState* s = [] {
    auto* r = new RegistryState;
    for (const auto& code : LanguageRegistry::defaults()) r->codes.insert(code);
    return r;
  }();
  return *s;
}

}  // namespace

bool is_well_formed_language_code(std::string_view code) {
  return code.size() == 3 && std::all_of(code.begin(), code.end(), [](char c) {
           return c >= 'a' && c <= 'z';
         });
}

const std::vector<std::string>& LanguageRegistry::defaults() {
  static const std::vector<std::string> kDefaults = {
      "afr", "eng", "nso", "sna", "ssw", "tsn", "tso", "xho", "zul"};
  return kDefaults;
}

bool LanguageRegistry::contains(std::string_view code) {
  auto& s = state();
  std::shared_lock lock(s.mu);
  return s.codes.find(code) != s.codes.end();
}

void LanguageRegistry::add(std::string_view code) {
  if (!is_well_formed_language_code(code)) {
    throw Error(ErrorCode::kInvalidLanguage,
                "language code must be three lowercase ASCII letters: '" +
                    std::string(code) + "'");
  }
  auto& s = state();
  std::unique_lock lock(s.mu);
  s.codes.emplace(code);
}

std::vector<std::string> LanguageRegistry::codes() {
  auto& s = state();
  std::shared_lock lock(s.mu);
  return {s.codes.begin(), s.codes.end()};
}

LanguageCode::LanguageCode(std::string_view code) : code_(code) {
  if (!is_well_formed_language_code(code)) {
    throw Error(ErrorCode::kInvalidLanguage,
                "language code must be three lowercase ASCII letters: '" +
                    code_ + "'");
  }
  if (!LanguageRegistry::contains(code)) {
    throw Error(ErrorCode::kInvalidLanguage,
                "language '" + code_ + "' is not registered");
  }
}

Direction Direction::parse(std::string_view key) {
  const auto dash = key.find('-');
  if (dash == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidLanguage,
                "direction must look like 'src-tgt': '" + std::string(key) +
                    "'");
  }
  return {LanguageCode(key.substr(0, dash)), LanguageCode(key.substr(dash + 1))};
}

}  // namespace mtkit
