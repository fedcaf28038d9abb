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

#include "mtkit/error.h"

namespace mtkit {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kBadEncoding: return "BadEncoding";
    case ErrorCode::kBadManifest: return "BadManifest";
    case ErrorCode::kMisalignedFiles: return "MisalignedFiles";
    case ErrorCode::kEmptyLine: return "EmptyLine";
    case ErrorCode::kInvalidLanguage: return "InvalidLanguage";
    case ErrorCode::kVocabSizeTooSmall: return "VocabSizeTooSmall";
    case ErrorCode::kBadVocabFile: return "BadVocabFile";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kEmptyLanguage: return "EmptyLanguage";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kMissingTagToken: return "MissingTagToken";
    case ErrorCode::kNonEnglishCorpus: return "NonEnglishCorpus";
    case ErrorCode::kPlanCoverage: return "PlanCoverage";
    case ErrorCode::kMissingCorpus: return "MissingCorpus";
    case ErrorCode::kUnsupportedDirection: return "UnsupportedDirection";
    case ErrorCode::kBadPivot: return "BadPivot";
    case ErrorCode::kLanguageMismatch: return "LanguageMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kBadModel: return "BadModel";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

}  // namespace mtkit
