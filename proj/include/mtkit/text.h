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

#ifndef MTKIT_TEXT_H_
#define MTKIT_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mtkit::text {

// Throws kBadEncoding on malformed UTF-8.
void check_utf8(std::string_view s);

std::string nfc(std::string_view s);
bool is_nfc(std::string_view s);

// Splits on Unicode white space; runs of separators collapse.
std::vector<std::string> split_whitespace(std::string_view s);

// One string per code point.
std::vector<std::string> code_points(std::string_view s);
std::size_t code_point_count(std::string_view s);

// Returns true when `s` is empty or contains only Unicode white space.
bool is_blank(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Right-strips Unicode white space.
std::string_view trim_trailing(std::string_view s);

}  // namespace mtkit::text

#endif  // MTKIT_TEXT_H_
