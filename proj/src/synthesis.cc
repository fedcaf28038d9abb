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

#include "mtkit/synthesis.h"

#include <algorithm>

#include "mtkit/error.h"
#include "mtkit/parallel.h"
#include "mtkit/text.h"

namespace mtkit::synthesis {
namespace {

using corpus::BitextCorpus;
using corpus::Provenance;

const LanguageCode& lang_of(const BitextCorpus& c, TranslateSide side) {
  return side == TranslateSide::kSrc ? c.src_lang : c.tgt_lang;
}

TranslateSide other(TranslateSide side) {
  return side == TranslateSide::kSrc ? TranslateSide::kTgt : TranslateSide::kSrc;
}

bool same_pair(const BitextCorpus& a, const BitextCorpus& b) {
  return (a.src_lang == b.src_lang && a.tgt_lang == b.tgt_lang) ||
         (a.src_lang == b.tgt_lang && a.tgt_lang == b.src_lang);
}

}  // namespace

std::vector<std::string> translate_in_batches(const translator::TranslatorModel& model,
                                              const std::vector<std::string>& sentences,
                                              const Direction& direction,
                                              const SynthesisOptions& options) {
  if (options.batch_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch_size must be positive");
  }
  if (!model.supports(direction)) {
    throw Error(ErrorCode::kUnsupportedDirection,
                "model '" + model.id() + "' does not translate " + direction.key());
  }
  std::vector<std::string> out(sentences.size());
  const std::size_t batches = (sentences.size() + options.batch_size - 1) / options.batch_size;
  parallel_for(batches, options.threads, [&](std::size_t b) {
    const std::size_t begin = b * options.batch_size;
    const std::size_t end = std::min(sentences.size(), begin + options.batch_size);
    std::span<const std::string> batch(sentences.data() + begin, end - begin);
    auto translated = model.translate_batch(batch, direction.src, direction.tgt);
    for (std::size_t i = 0; i < translated.size(); ++i) {
      std::string s = text::nfc(translated[i]);
      if (text::is_blank(s) || s.find('\n') != std::string::npos) {
        throw Error(ErrorCode::kBadModel, "model '" + model.id() +
                                              "' produced an unusable sentence for line " +
                                              std::to_string(begin + i + 1));
      }
      out[begin + i] = std::move(s);
    }
  });
  return out;
}

BitextCorpus run_synthesis(const SynthesisJob& job, const SynthesisOptions& options) {
  if (job.source == nullptr || job.model == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "synthesis job needs a corpus and a model");
  }
  const BitextCorpus& in = *job.source;
  const TranslateSide produced =
      job.kind == SynthesisKind::kBackTranslation ? other(job.translate_side) : job.translate_side;
  const TranslateSide kept = other(produced);
  const LanguageCode& out_produced =
      produced == TranslateSide::kSrc ? job.out_src_lang : job.out_tgt_lang;
  const LanguageCode& out_kept = kept == TranslateSide::kSrc ? job.out_src_lang : job.out_tgt_lang;

  if (out_kept != lang_of(in, kept)) {
    throw Error(ErrorCode::kLanguageMismatch, "kept side of " + in.name + " is " +
                                                  lang_of(in, kept).str() + ", not " +
                                                  out_kept.str());
  }
  if (job.kind == SynthesisKind::kBackTranslation && out_produced != lang_of(in, produced)) {
    throw Error(ErrorCode::kLanguageMismatch,
                "back-translation must regenerate " + lang_of(in, produced).str());
  }
  if (job.kind == SynthesisKind::kPivot &&
      (out_produced == in.src_lang || out_produced == in.tgt_lang)) {
    throw Error(ErrorCode::kBadPivot,
                "pivot target " + out_produced.str() + " already appears in " + in.name);
  }

  const Direction model_dir{lang_of(in, job.translate_side), out_produced};
  const auto inputs = job.translate_side == TranslateSide::kSrc ? in.src_side() : in.tgt_side();
  auto outputs = translate_in_batches(*job.model, inputs, model_dir, options);

  BitextCorpus out{{}, job.out_src_lang, job.out_tgt_lang, {}, {}, {}};
  out.name = job.kind == SynthesisKind::kBackTranslation
                 ? in.name + ".bt"
                 : in.name + ".pivot-" + out_produced.str();
  const Provenance synth = Provenance::synthetic(job.model->id());
  const Provenance& kept_prov = kept == TranslateSide::kSrc ? in.src_provenance : in.tgt_provenance;
  out.src_provenance = produced == TranslateSide::kSrc ? synth : kept_prov;
  out.tgt_provenance = produced == TranslateSide::kTgt ? synth : kept_prov;
  out.pairs.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::string& kept_text = kept == TranslateSide::kSrc ? in.pairs[i].src : in.pairs[i].tgt;
    if (produced == TranslateSide::kSrc) {
      out.pairs.push_back({std::move(outputs[i]), kept_text});
    } else {
      out.pairs.push_back({kept_text, std::move(outputs[i])});
    }
  }
  return out;
}

BitextCorpus backtranslate(const BitextCorpus& corpus, const translator::TranslatorModel& model,
                           const SynthesisOptions& options) {
  SynthesisJob job;
  job.source = &corpus;
  job.translate_side = TranslateSide::kTgt;
  job.model = &model;
  job.out_src_lang = corpus.src_lang;
  job.out_tgt_lang = corpus.tgt_lang;
  job.kind = SynthesisKind::kBackTranslation;
  return run_synthesis(job, options);
}

BitextCorpus pivot_synthesize(const BitextCorpus& eng_corpus,
                              const translator::TranslatorModel& model,
                              const LanguageCode& pivot_to, const SynthesisOptions& options) {
  if (!eng_corpus.has_language(english())) {
    throw Error(ErrorCode::kBadPivot, eng_corpus.name + " has no English side");
  }
  const bool eng_src = eng_corpus.src_lang.is_english();
  const LanguageCode& other_lang = eng_src ? eng_corpus.tgt_lang : eng_corpus.src_lang;
  if (pivot_to.is_english() || pivot_to == other_lang) {
    throw Error(ErrorCode::kBadPivot, "cannot pivot " + eng_corpus.name + " to " + pivot_to.str());
  }
  SynthesisJob job;
  job.source = &eng_corpus;
  job.translate_side = eng_src ? TranslateSide::kSrc : TranslateSide::kTgt;
  job.model = &model;
  job.kind = SynthesisKind::kPivot;
  job.out_src_lang = eng_src ? pivot_to : other_lang;
  job.out_tgt_lang = eng_src ? other_lang : pivot_to;
  auto out = run_synthesis(job, options);
  return eng_src ? out : corpus::reversed(out);
}

std::vector<BitextCorpus> mix_real_synthetic(const std::vector<BitextCorpus>& real,
                                             const std::vector<BitextCorpus>& synth) {
  if (real.empty() && synth.empty()) {
    throw Error(ErrorCode::kEmptyInput, "nothing to mix");
  }
  for (const auto& c : real) {
    if (c.is_synthetic()) {
      throw Error(ErrorCode::kInvalidArgument, c.name + " carries synthetic text");
    }
  }
  std::vector<BitextCorpus> out = real;
  out.insert(out.end(), synth.begin(), synth.end());
  for (const auto& c : out) {
    if (!same_pair(c, out.front())) {
      throw Error(ErrorCode::kLanguageMismatch, c.name + " covers " + c.direction().key() +
                                                    ", expected " + out.front().direction().key());
    }
  }
  return out;
}

}  // namespace mtkit::synthesis
