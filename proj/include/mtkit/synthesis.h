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

#ifndef MTKIT_SYNTHESIS_H_
#define MTKIT_SYNTHESIS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "mtkit/corpus.h"
#include "mtkit/language.h"
#include "mtkit/translator.h"

namespace mtkit::synthesis {

enum class TranslateSide { kSrc, kTgt };
enum class SynthesisKind { kBackTranslation, kPivot };

struct SynthesisOptions {
  std::size_t batch_size = 64;
  unsigned threads = 1;
};

// Which side of `source` is fed to `model` and what the output pair
// languages are. Back-translation keeps the fed side and regenerates the
// other one; pivot synthesis replaces the fed side.
struct SynthesisJob {
  const corpus::BitextCorpus* source = nullptr;
  TranslateSide translate_side = TranslateSide::kTgt;
  const translator::TranslatorModel* model = nullptr;
  LanguageCode out_src_lang = english();
  LanguageCode out_tgt_lang = english();
  SynthesisKind kind = SynthesisKind::kBackTranslation;
};

// Translates in batches of `batch_size`; batches may run concurrently and the
// result keeps input order. Outputs are NFC normalised. Throws kBadModel on an
// empty or multi-line output sentence.
std::vector<std::string> translate_in_batches(const translator::TranslatorModel& model,
                                              const std::vector<std::string>& sentences,
                                              const Direction& direction,
                                              const SynthesisOptions& options = {});

corpus::BitextCorpus run_synthesis(const SynthesisJob& job, const SynthesisOptions& options = {});

// corpus (A, B), model B->A  ->  (model(B), B). The source side is marked
// synthetic with the model id.
corpus::BitextCorpus backtranslate(const corpus::BitextCorpus& corpus,
                                   const translator::TranslatorModel& model,
                                   const SynthesisOptions& options = {});

// corpus (eng, L) in either orientation, model eng->X  ->  (model(eng), L).
// Throws kBadPivot when the corpus has no English side or X is eng or L.
corpus::BitextCorpus pivot_synthesize(const corpus::BitextCorpus& eng_corpus,
                                      const translator::TranslatorModel& model,
                                      const LanguageCode& pivot_to,
                                      const SynthesisOptions& options = {});

// Concatenates real then synthetic corpora after checking that all of them
// cover the same language pair. Throws kLanguageMismatch, kEmptyInput,
// kInvalidArgument (a "real" corpus carrying synthetic text).
std::vector<corpus::BitextCorpus> mix_real_synthetic(
    const std::vector<corpus::BitextCorpus>& real,
    const std::vector<corpus::BitextCorpus>& synth);

}  // namespace mtkit::synthesis

#endif  // MTKIT_SYNTHESIS_H_
