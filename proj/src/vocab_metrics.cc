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

#include "mtkit/vocab_metrics.h"

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "mtkit/error.h"
#include "mtkit/parallel.h"

namespace mtkit::vocab_metrics {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

std::int64_t total_tokens(const vocab::Vocabulary& vocab,
                          const std::vector<std::string>& sentences,
                          unsigned threads) {
  constexpr std::size_t kChunks = 32;
  std::vector<std::int64_t> partial(kChunks, 0);
  parallel_for(kChunks, threads, [&](std::size_t c) {
    const std::size_t begin = sentences.size() * c / kChunks;
    const std::size_t end = sentences.size() * (c + 1) / kChunks;
    for (std::size_t i = begin; i < end; ++i) {
      partial[c] += static_cast<std::int64_t>(vocab.count_tokens(sentences[i]));
    }
  });
  std::int64_t total = 0;
  for (auto n : partial) total += n;
  return total;
}

RepresentationReport representation_change(const vocab::LangCorpusSet& data,
                                           const vocab::Vocabulary& a,
                                           const vocab::Vocabulary& b,
                                           unsigned threads) {
  RepresentationReport report;
  for (const auto& [lang, sentences] : data.sentences) {
    LanguageRepresentation row{lang};
    row.tokens_a = total_tokens(a, sentences, threads);
    row.tokens_b = total_tokens(b, sentences, threads);
    if (row.tokens_a <= 0 || row.tokens_b <= 0) {
      throw Error(ErrorCode::kEmptyLanguage,
                  "language " + lang.str() + " has no tokens");
    }
    row.change_pct = 100.0 * static_cast<double>(row.tokens_b - row.tokens_a) /
                     static_cast<double>(row.tokens_a);
    report.rows.push_back(row);
  }
  return report;
}

SpeedRow avg_tokens_per_pair(const corpus::BitextCorpus& corpus,
                             const vocab::Vocabulary& vocab, unsigned threads) {
  if (!corpus.has_language(english())) {
    throw Error(ErrorCode::kNonEnglishCorpus,
                "corpus '" + corpus.name + "' has no English side");
  }
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "corpus '" + corpus.name + "' is empty");
  }
  const auto eng_to_l =
      corpus::oriented(corpus, {english(), corpus.src_lang.is_english()
                                               ? corpus.tgt_lang
                                               : corpus.src_lang});
  SpeedRow row{eng_to_l.tgt_lang};
  row.tok_eng = total_tokens(vocab, eng_to_l.src_side(), threads);
  row.tok_l = total_tokens(vocab, eng_to_l.tgt_side(), threads);
  row.n_pairs = static_cast<std::int64_t>(corpus.size());
  row.avg_tokens = static_cast<double>(row.tok_l + row.tok_eng) /
                   static_cast<double>(row.n_pairs);
  return row;
}

VocabReport vocab_report(const std::vector<corpus::BitextCorpus>& corpora,
                         const vocab::Vocabulary& a, const vocab::Vocabulary& b,
                         unsigned threads) {
  VocabReport report;
  report.representation = representation_change(
      vocab::LangCorpusSet::from_corpora(corpora), a, b, threads);
  for (const auto& c : corpora) {
    if (!c.has_language(english())) continue;
    report.speed.push_back(
        {avg_tokens_per_pair(c, a, threads), avg_tokens_per_pair(c, b, threads)});
  }
  return report;
}

std::string VocabReport::to_json() const {
  nlohmann::ordered_json j;
  auto& rep = j["representation_change"];
  rep = nlohmann::ordered_json::array();
  for (const auto& r : representation.rows) {
    rep.push_back({{"lang", r.lang.str()},
                   {"tokens_a", r.tokens_a},
                   {"tokens_b", r.tokens_b},
                   {"change_pct", r.change_pct}});
  }
  auto& sp = j["avg_tokens_per_pair"];
  sp = nlohmann::ordered_json::array();
  auto row_json = [](const SpeedRow& r) {
    return nlohmann::ordered_json{{"tok_l", r.tok_l},
                                  {"tok_eng", r.tok_eng},
                                  {"n_pairs", r.n_pairs},
                                  {"avg_tokens", r.avg_tokens}};
  };
  for (const auto& s : speed) {
    sp.push_back({{"pair", "eng-" + s.a.lang.str()},
                  {"a", row_json(s.a)},
                  {"b", row_json(s.b)}});
  }
  return j.dump(2) + "\n";
}

std::string VocabReport::to_table() const {
  std::ostringstream out;
  out << "Representation change (b vs a)\n";
  out << pad_right("lang", 8) << pad_left("tokens_a", 12) << pad_left("tokens_b", 12)
      << pad_left("change%", 10) << "\n";
  for (const auto& r : representation.rows) {
    out << pad_right(r.lang.str(), 8) << pad_left(std::to_string(r.tokens_a), 12)
        << pad_left(std::to_string(r.tokens_b), 12)
        << pad_left(fixed(r.change_pct, 2), 10) << "\n";
  }
  out << "\nAverage tokens per sentence pair\n";
  out << pad_right("pair", 10) << pad_left("pairs", 8) << pad_left("a", 10)
      << pad_left("b", 10) << "\n";
  for (const auto& s : speed) {
    out << pad_right("eng-" + s.a.lang.str(), 10)
        << pad_left(std::to_string(s.a.n_pairs), 8)
        << pad_left(fixed(s.a.avg_tokens, 2), 10)
        << pad_left(fixed(s.b.avg_tokens, 2), 10) << "\n";
  }
  return out.str();
}

}  // namespace mtkit::vocab_metrics
