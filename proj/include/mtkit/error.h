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

#ifndef MTKIT_ERROR_H_
#define MTKIT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mtkit {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kBadEncoding,
  kBadManifest,
  kMisalignedFiles,
  kEmptyLine,
  kInvalidLanguage,
  kVocabSizeTooSmall,
  kBadVocabFile,
  kUnknownId,
  kEmptyLanguage,
  kEmptyCorpus,
  kMissingTagToken,
  kNonEnglishCorpus,
  kPlanCoverage,
  kMissingCorpus,
  kUnsupportedDirection,
  kBadPivot,
  kLanguageMismatch,
  kLengthMismatch,
  kEmptyInput,
  kBadModel,
  kConfig,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported as mtkit::Error with a stable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mtkit

#endif  // MTKIT_ERROR_H_
