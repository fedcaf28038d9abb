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

#include "mtkit/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "mtkit/error.h"
#include "mtkit/parallel.h"
#include "mtkit/text.h"

namespace mtkit::eval {
namespace {

using Tokens = std::vector<std::string>;
using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

void check_lengths(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  if (hyps.size() != refs.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(hyps.size()) + " hypotheses vs " +
                                                std::to_string(refs.size()) + " references");
  }
  if (hyps.empty()) throw Error(ErrorCode::kEmptyInput, "no segments to score");
}

NgramCounts ngrams(const Tokens& tokens, std::size_t n) {
  NgramCounts out;
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out[Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                 tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

std::size_t total(const NgramCounts& c) {
  std::size_t t = 0;
  for (const auto& [_, v] : c) t += v;
  return t;
}

std::size_t overlap(const NgramCounts& hyp, const NgramCounts& ref) {
  std::size_t m = 0;
  for (const auto& [g, v] : hyp) {
    const auto it = ref.find(g);
    if (it != ref.end()) m += std::min(v, it->second);
  }
  return m;
}

double bleu_tokens(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs,
                   const BleuConfig& config) {
  const std::size_t n_max = config.max_ngram;
  std::vector<std::size_t> matches(n_max + 1, 0), hyp_total(n_max + 1, 0),
      ref_total(n_max + 1, 0);
  std::size_t c = 0, r = 0;
  bool identical = true;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    c += hyps[s].size();
    r += refs[s].size();
    identical = identical && hyps[s] == refs[s];
    for (std::size_t n = 1; n <= n_max; ++n) {
      const auto h = ngrams(hyps[s], n);
      const auto g = ngrams(refs[s], n);
      matches[n] += overlap(h, g);
      hyp_total[n] += total(h);
      ref_total[n] += total(g);
    }
  }
  if (identical) return 100.0;
  if (c == 0) return 0.0;

  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (hyp_total[n] == 0 && ref_total[n] == 0) continue;
    ++orders;
    double m = static_cast<double>(matches[n]);
    if (m == 0.0) {
      if (config.smoothing == Smoothing::kNone) return 0.0;
      m = config.floor_epsilon;
    }
    log_sum += std::log(m / static_cast<double>(std::max<std::size_t>(hyp_total[n], 1)));
  }
  const double bp =
      c >= r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  const double score = 100.0 * bp * std::exp(log_sum / static_cast<double>(orders));
  return std::clamp(score, 0.0, 100.0);
}

Tokens chars_no_space(std::string_view s) {
  Tokens out;
  for (const auto& w : text::split_whitespace(s)) {
    for (auto& cp : text::code_points(w)) out.push_back(std::move(cp));
  }
  return out;
}

double f_beta(std::size_t match, std::size_t hyp_total, std::size_t ref_total, double beta) {
  if (match == 0 || hyp_total == 0) return 0.0;
  const double p = static_cast<double>(match) / static_cast<double>(hyp_total);
  const double r = static_cast<double>(match) / static_cast<double>(ref_total);
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (b2 * p + r);
}

double chrf_segment(std::string_view hyp, std::string_view ref, const ChrfConfig& config) {
  const Tokens hc = chars_no_space(hyp), rc = chars_no_space(ref);
  const Tokens hw = text::split_whitespace(hyp), rw = text::split_whitespace(ref);
  double sum = 0.0;
  std::size_t orders = 0;
  auto add = [&](const Tokens& h, const Tokens& r, std::size_t n) {
    const auto rg = ngrams(r, n);
    const std::size_t rt = total(rg);
    if (rt == 0) return;
    const auto hg = ngrams(h, n);
    sum += f_beta(overlap(hg, rg), total(hg), rt, config.beta);
    ++orders;
  };
  for (std::size_t n = 1; n <= config.char_n; ++n) add(hc, rc, n);
  for (std::size_t n = 1; n <= config.word_n; ++n) add(hw, rw, n);
  if (orders == 0) return hc.empty() ? 1.0 : 0.0;
  return sum / static_cast<double>(orders);
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void BleuConfig::validate() const {
  if (max_ngram < 1) throw Error(ErrorCode::kInvalidArgument, "max_ngram must be at least 1");
  if (smoothing == Smoothing::kFloor && !(floor_epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "floor_epsilon must be positive");
  }
}

void ChrfConfig::validate() const {
  if (char_n < 1) throw Error(ErrorCode::kInvalidArgument, "char_n must be at least 1");
  if (!(beta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be positive");
}

double bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
            const BleuConfig& config) {
  config.validate();
  check_lengths(hyps, refs);
  std::vector<Tokens> h, r;
  h.reserve(hyps.size());
  r.reserve(refs.size());
  auto tokenize = [&](const std::string& s) {
    if (config.subword == nullptr) return text::split_whitespace(s);
    Tokens out;
    for (auto id : config.subword->encode(s)) out.push_back(std::to_string(id));
    return out;
  };
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    h.push_back(tokenize(hyps[i]));
    r.push_back(tokenize(refs[i]));
  }
  return bleu_tokens(h, r, config);
}

double spbleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
              const vocab::Vocabulary& vocab) {
  BleuConfig config;
  config.subword = &vocab;
  return bleu(hyps, refs, config);
}

double chrf(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
            const ChrfConfig& config) {
  config.validate();
  check_lengths(hyps, refs);
  bool identical = true;
  double sum = 0.0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    identical = identical && hyps[i] == refs[i];
    sum += chrf_segment(hyps[i], refs[i], config);
  }
  if (identical) return 100.0;
  return std::clamp(100.0 * sum / static_cast<double>(hyps.size()), 0.0, 100.0);
}

const DirectionScore* EvalReport::find(const Direction& direction) const {
  for (const auto& row : rows) {
    if (row.direction == direction) return &row;
  }
  return nullptr;
}

double EvalReport::average_bleu(const std::vector<Direction>& directions) const {
  if (directions.empty()) throw Error(ErrorCode::kInvalidArgument, "no directions to average");
  double sum = 0.0;
  for (const auto& d : directions) {
    const auto* row = find(d);
    if (row == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "report has no row for " + d.key());
    }
    sum += row->bleu;
  }
  return sum / static_cast<double>(directions.size());
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model_id;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    j["rows"].push_back({{"direction", row.direction.key()},
                         {"pairs", row.pairs},
                         {"bleu", row.bleu},
                         {"spbleu", row.spbleu},
                         {"chrf", row.chrf}});
  }
  return j.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %8s\n", "direction", "pairs", "BLEU",
                "spBLEU", "chrF2++");
  out << line;
  for (const auto& row : rows) {
    std::snprintf(line, sizeof(line), "%-10s %8zu %8s %8s %8s\n", row.direction.key().c_str(),
                  row.pairs, fixed2(row.bleu).c_str(), fixed2(row.spbleu).c_str(),
                  fixed2(row.chrf).c_str());
    out << line;
  }
  return out.str();
}

EvalReport evaluate_directions(const translator::TranslatorModel& model,
                               const std::vector<corpus::BitextCorpus>& testsets,
                               const vocab::Vocabulary& vocab, unsigned threads) {
  for (const auto& t : testsets) {
    if (!model.supports(t.direction())) {
      throw Error(ErrorCode::kUnsupportedDirection,
                  "model '" + model.id() + "' does not translate " + t.direction().key());
    }
  }
  std::vector<std::optional<DirectionScore>> rows(testsets.size());
  parallel_for(testsets.size(), threads, [&](std::size_t k) {
    const auto& t = testsets[k];
    const auto src = t.src_side();
    const auto refs = t.tgt_side();
    const auto hyps = model.translate_batch(src, t.src_lang, t.tgt_lang);
    rows[k] = DirectionScore{t.direction(), t.size(), bleu(hyps, refs), spbleu(hyps, refs, vocab),
                             chrf(hyps, refs)};
  });
  EvalReport report;
  report.model_id = model.id();
  for (auto& row : rows) report.rows.push_back(std::move(*row));
  return report;
}

Selection select_best(const std::vector<Candidate>& candidates,
                      const corpus::BitextCorpus& devset, const Direction& direction) {
  if (candidates.empty()) throw Error(ErrorCode::kEmptyInput, "no candidates to select from");
  const auto dev = corpus::oriented(devset, direction);
  const auto src = dev.src_side();
  const auto refs = dev.tgt_side();
  Selection sel;
  bool found = false;
  double best = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto* model = candidates[i].model;
    if (model == nullptr || !model->supports(direction)) {
      sel.scores.push_back(-1.0);
      continue;
    }
    const double score = bleu(model->translate_batch(src, direction.src, direction.tgt), refs);
    sel.scores.push_back(score);
    if (!found || score > best) {
      found = true;
      best = score;
      sel.index = i;
      sel.name = candidates[i].name;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kUnsupportedDirection, "no candidate translates " + direction.key());
  }
  return sel;
}

}  // namespace mtkit::eval
