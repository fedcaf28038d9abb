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

#ifndef MTKIT_EVAL_H_
#define MTKIT_EVAL_H_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mtkit/corpus.h"
#include "mtkit/language.h"
#include "mtkit/translator.h"
#include "mtkit/vocab.h"

namespace mtkit::eval {

enum class Smoothing { kNone, kFloor };

struct BleuConfig {
  std::size_t max_ngram = 4;
  Smoothing smoothing = Smoothing::kNone;
  // Added to a zero match count under kFloor.
  double floor_epsilon = 0.1;
  // Tokenise with this vocabulary instead of on white space.
  const vocab::Vocabulary* subword = nullptr;

  void validate() const;
};

struct ChrfConfig {
  std::size_t char_n = 6;
  std::size_t word_n = 2;
  double beta = 2.0;

  void validate() const;
};

// Corpus BLEU in [0, 100]. An order that neither side has any n-grams of is
// left out of the geometric mean. Throws kLengthMismatch, kEmptyInput.
double bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
            const BleuConfig& config = {});

// BLEU over subword ids from `vocab`. Not comparable with scores computed
// under other segmentation models.
double spbleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
              const vocab::Vocabulary& vocab);

// chrF++ in [0, 100], macro-averaged over segments.
double chrf(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
            const ChrfConfig& config = {});

struct DirectionScore {
  Direction direction;
  std::size_t pairs = 0;
  double bleu = 0.0;
  double spbleu = 0.0;
  double chrf = 0.0;
};

struct EvalReport {
  std::string model_id;
  std::vector<DirectionScore> rows;  // in test-set order

  const DirectionScore* find(const Direction& direction) const;
  // Mean BLEU over the listed directions; throws kInvalidArgument if one is
  // missing.
  double average_bleu(const std::vector<Direction>& directions) const;

  std::string to_json() const;
  std::string to_table() const;
};

// Each test corpus is scored in its own direction (src -> tgt).
EvalReport evaluate_directions(const translator::TranslatorModel& model,
                               const std::vector<corpus::BitextCorpus>& testsets,
                               const vocab::Vocabulary& vocab, unsigned threads = 1);

struct Candidate {
  const translator::TranslatorModel* model = nullptr;
  std::string name;
};

struct Selection {
  std::size_t index = 0;
  std::string name;
  std::vector<double> scores;  // dev BLEU per candidate, -1 if unsupported
};

// Highest dev BLEU in `direction`; ties go to the earlier candidate.
// Candidates that cannot translate the direction are passed over. Throws
// kEmptyInput, kUnsupportedDirection when no candidate qualifies.
Selection select_best(const std::vector<Candidate>& candidates,
                      const corpus::BitextCorpus& devset, const Direction& direction);

}  // namespace mtkit::eval

#endif  // MTKIT_EVAL_H_
