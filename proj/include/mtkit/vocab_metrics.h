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

#ifndef MTKIT_VOCAB_METRICS_H_
#define MTKIT_VOCAB_METRICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mtkit/corpus.h"
#include "mtkit/vocab.h"

namespace mtkit::vocab_metrics {

// Total encoded length of `sentences` (language tags never counted).
std::int64_t total_tokens(const vocab::Vocabulary& vocab,
                          const std::vector<std::string>& sentences,
                          unsigned threads = 1);

struct LanguageRepresentation {
  LanguageCode lang;
  std::int64_t tokens_a = 0;  // baseline vocabulary (BPE in the usual setup)
  std::int64_t tokens_b = 0;
  // 100 * (tokens_b - tokens_a) / tokens_a. Negative: b represents the
  // language with fewer tokens.
  double change_pct = 0.0;
};

struct RepresentationReport {
  std::vector<LanguageRepresentation> rows;  // sorted by language
};

// Throws kEmptyLanguage when a language encodes to zero tokens under `a`.
RepresentationReport representation_change(const vocab::LangCorpusSet& data,
                                           const vocab::Vocabulary& a,
                                           const vocab::Vocabulary& b,
                                           unsigned threads = 1);

struct SpeedRow {
  LanguageCode lang;  // the non-English side
  std::int64_t tok_l = 0;
  std::int64_t tok_eng = 0;
  std::int64_t n_pairs = 0;
  double avg_tokens = 0.0;  // (tok_l + tok_eng) / n_pairs
};

// Both sides encoded with the same vocabulary. Throws kEmptyCorpus and
// kNonEnglishCorpus.
SpeedRow avg_tokens_per_pair(const corpus::BitextCorpus& corpus,
                             const vocab::Vocabulary& vocab,
                             unsigned threads = 1);

struct SpeedComparison {
  SpeedRow a;
  SpeedRow b;
};

struct VocabReport {
  RepresentationReport representation;
  std::vector<SpeedComparison> speed;  // one per English-centric corpus

  std::string to_json() const;
  // Aligned per-language tables.
  std::string to_table() const;
};

VocabReport vocab_report(const std::vector<corpus::BitextCorpus>& corpora,
                         const vocab::Vocabulary& a, const vocab::Vocabulary& b,
                         unsigned threads = 1);

}  // namespace mtkit::vocab_metrics

#endif  // MTKIT_VOCAB_METRICS_H_
