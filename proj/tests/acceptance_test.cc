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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "mtkit/corpus.h"
#include "mtkit/dataset_builder.h"
#include "mtkit/error.h"
#include "mtkit/eval.h"
#include "mtkit/pipeline.h"
#include "mtkit/synthesis.h"
#include "mtkit/toy_data.h"
#include "mtkit/translator.h"
#include "mtkit/vocab.h"
#include "mtkit/vocab_metrics.h"
#include "oracles/bpe_oracle.h"
#include "oracles/cipher.h"
#include "oracles/ngram_oracle.h"
#include "random_text.h"
#include "test_util.h"

namespace {

namespace fs = std::filesystem;
using namespace mtkit;
using Clock = std::chrono::steady_clock;

// Tolerances and limits.
constexpr double kMetricTolerance = 1e-4;
constexpr double kRelativeTolerance = 1e-9;
constexpr double kRowSumTolerance = 1e-9;
constexpr double kRecoveryThreshold = 0.95;
constexpr double kOracleSeconds = 10.0;
constexpr double kToySeconds = 120.0;
constexpr int kOracleCorpora = 24;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

vocab::VocabConfig config_with(std::size_t extra, double p = -2.0) {
  auto c = vocab::VocabConfig::defaults();
  c.vocab_size = c.special_tokens.size() + extra;
  c.mean_exponent_p = p;
  return c;
}

std::vector<oracle::Pair> as_pairs(const vocab::Vocabulary& v) {
  std::vector<oracle::Pair> out;
  for (const auto& m : v.merges()) out.emplace_back(m.left, m.right);
  return out;
}

unsigned hw_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

Outcome ac1() {
  const auto t0 = Clock::now();
  int mismatches = 0;
  std::size_t bpe_merges = 0, obpe_merges = 0;
  const double p = -2.0;
  for (int seed = 100; seed < 100 + kOracleCorpora; ++seed) {
    // At most 100 sentences in total and a budget well under 300 tokens.
    const std::size_t langs = 2 + static_cast<std::size_t>(seed % 4);
    const auto data = testing_util::random_sentences(static_cast<std::uint64_t>(seed), langs,
                                                     100 / langs);
    const auto set = testing_util::to_corpus_set(data);
    const auto cfg = config_with(60 + static_cast<std::size_t>(seed % 7) * 10);
    const std::size_t specials = cfg.special_tokens.size();
    const auto bpe = as_pairs(vocab::train_bpe(set, cfg));
    const auto obpe = as_pairs(vocab::train_obpe(set, cfg));
    bpe_merges += bpe.size();
    obpe_merges += obpe.size();
    if (bpe != oracle::train(data, cfg.vocab_size, specials, "</w>")) ++mismatches;
    if (obpe != oracle::train(data, cfg.vocab_size, specials, "</w>", &p)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << kOracleCorpora << " corpora x {bpe, obpe} (" << bpe_merges << "/" << obpe_merges
    << " merges), " << mismatches << " mismatches, " << secs << " s";
  return {mismatches == 0 && secs < kOracleSeconds, d.str()};
}

Outcome ac2() {
  int mismatches = 0;
  for (int seed = 200; seed < 210; ++seed) {
    const auto set = testing_util::to_corpus_set(
        testing_util::random_sentences(static_cast<std::uint64_t>(seed), 4, 40));
    if (vocab::train_obpe(set, config_with(100, 1.0)).merges() !=
        vocab::train_bpe(set, config_with(100)).merges()) {
      ++mismatches;
    }
  }
  return {mismatches == 0, "10 corpora, p=1 merge lists vs BPE: " +
                               std::to_string(mismatches) + " differ"};
}

Outcome ac3() {
  // "ab" is shared by both languages but rarer in total than eng-only "xy".
  vocab::LangCorpusSet data;
  for (int i = 0; i < 6; ++i) data.add(LanguageCode("eng"), "xy xy xy ab");
  for (int i = 0; i < 6; ++i) data.add(LanguageCode("afr"), "ab pq");
  auto rank = [](const vocab::Vocabulary& v, const vocab::Merge& m) {
    const auto& ms = v.merges();
    return static_cast<long>(std::find(ms.begin(), ms.end(), m) - ms.begin());
  };
  const vocab::Merge shared{"a", "b</w>"};
  const auto bpe = vocab::train_bpe(data, config_with(16));
  const auto obpe = vocab::train_obpe(data, config_with(16, -2.0));
  const long rb = rank(bpe, shared), ro = rank(obpe, shared);
  return {ro < rb, "rank of shared pair: bpe " + std::to_string(rb) + ", obpe " +
                       std::to_string(ro)};
}

Outcome ac4() {
  testing_util::TempDir dir;
  std::vector<std::string> diffs;
  // Vocabulary training.
  const auto set = testing_util::to_corpus_set(testing_util::random_sentences(7, 5, 300));
  for (auto mode : {vocab::Mode::kBpe, vocab::Mode::kObpe}) {
    const auto ref = vocab::train(mode, set, config_with(200), {1}).to_json();
    for (unsigned t : {1u, 2u, 8u}) {
      if (vocab::train(mode, set, config_with(200), {t}).to_json() != ref) {
        diffs.push_back(std::string(vocab::mode_name(mode)) + "@" + std::to_string(t));
      }
    }
  }
  // Mixture export and the full pipeline on a reduced toy set.
  const auto ds = toy::write_toy_dataset(dir / "data", {.scale = 0.1});
  const auto cfg = pipeline::PipelineConfig::load(ds.config);
  std::map<std::string, std::string> ref;
  for (unsigned t : {1u, 2u, 8u}) {
    for (int rep = 0; rep < (t == 1 ? 2 : 1); ++rep) {
      const fs::path out = dir / ("run-" + std::to_string(t) + "-" + std::to_string(rep));
      pipeline::run_pipeline(cfg, {.threads = t, .output_root = out});
      const auto tree = testing_util::tree(out);
      if (ref.empty()) {
        ref = tree;
      } else if (tree != ref) {
        diffs.push_back("pipeline@" + std::to_string(t) + "#" + std::to_string(rep));
      }
    }
  }
  std::string d = "vocab x2 modes, pipeline at threads 1,1,2,8 (" +
                  std::to_string(ref.size()) + " files incl. mixtures)";
  for (const auto& x : diffs) d += " diff:" + x;
  return {diffs.empty() && !ref.empty(), d};
}

// Token count of `lines` when every merge is applied to every word in order.
long long oracle_count(const vocab::Vocabulary& v, const std::vector<std::string>& lines) {
  std::map<std::string, std::vector<std::string>> one{{"x", lines}};
  auto c = oracle::make_corpus(one, v.config().end_of_word_marker);
  for (const auto& m : v.merges()) oracle::apply(c.words["x"], {m.left, m.right});
  long long n = 0;
  for (const auto& w : c.words["x"]) n += static_cast<long long>(w.size());
  return n;
}

Outcome ac5() {
  testing_util::TempDir dir;
  const auto ds = toy::write_toy_dataset(dir / "data", {.scale = 0.1});
  std::vector<corpus::BitextCorpus> corpora;
  for (const auto& p : ds.old_corpora) corpora.push_back(corpus::load_bitext(p));
  const auto set = vocab::LangCorpusSet::from_corpora(corpora);
  auto cfg = vocab::VocabConfig::defaults();
  cfg.vocab_size = 1000;
  const auto a = vocab::train_bpe(set, cfg);
  const auto b = vocab::train_obpe(set, cfg);
  const auto report = vocab_metrics::vocab_report(corpora, a, b, 4);
  auto rel = [](double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
  };
  double worst = 0.0;
  bool counts_ok = true;
  for (const auto& row : report.representation.rows) {
    const auto& lines = set.sentences.at(row.lang);
    const long long ta = oracle_count(a, lines), tb = oracle_count(b, lines);
    counts_ok = counts_ok && ta == row.tokens_a && tb == row.tokens_b;
    worst = std::max(worst, rel(row.change_pct, 100.0 * static_cast<double>(tb - ta) /
                                                    static_cast<double>(ta)));
  }
  for (const auto& s : report.speed) {
    const auto& c = *std::find_if(corpora.begin(), corpora.end(), [&](const auto& x) {
      return x.has_language(s.a.lang);
    });
    for (const auto* side : {&s.a, &s.b}) {
      const auto& v = side == &s.a ? a : b;
      const long long n = oracle_count(v, c.src_side()) + oracle_count(v, c.tgt_side());
      worst = std::max(worst, rel(side->avg_tokens,
                                  static_cast<double>(n) / static_cast<double>(c.size())));
    }
  }
  bool zero = true;
  for (const auto& row : vocab_metrics::representation_change(set, a, a).rows) {
    zero = zero && row.change_pct == 0.0;
  }
  std::ostringstream d;
  d << report.representation.rows.size() << " languages, " << report.speed.size()
    << " pair rows, max rel err " << worst << ", change(v,v)=0 " << (zero ? "yes" : "no");
  return {counts_ok && zero && !report.speed.empty() && worst <= kRelativeTolerance, d.str()};
}

Outcome ac6() {
  using Strings = std::vector<std::string>;
  struct Case {
    Strings hyps, refs;
  };
  const std::vector<Case> cases = {
      {{"the cat sat on the mat"}, {"the cat sat on a mat"}},
      {{"the cat sat on"}, {"the cat sat on the mat"}},
      {{"a b c d e f", "one two three four"}, {"a b c x e f", "one two three five"}},
      {{"big red dog ran far away today"}, {"the big red dog ran away today"}},
      {{"we see it now", "it is here at last and fine"},
       {"we saw it now", "it is here at last and fine"}},
      {{"alpha beta gamma delta epsilon"}, {"alpha gamma beta delta epsilon zeta"}},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    std::vector<oracle::Tokens> h, r;
    for (const auto& s : c.hyps) h.push_back(oracle::words_of(s));
    for (const auto& s : c.refs) r.push_back(oracle::words_of(s));
    worst = std::max(worst, std::abs(eval::bleu(c.hyps, c.refs) - oracle::bleu(h, r)));
    worst = std::max(worst, std::abs(eval::chrf(c.hyps, c.refs) -
                                     oracle::chrf(c.hyps, c.refs, 6, 2, 2.0)));
  }
  const Strings refs = {"the cat sat", "on the mat"};
  const Strings other = {"x y z", "p q r"};
  const bool bounds = eval::bleu(refs, refs) == 100.0 && eval::chrf(refs, refs) == 100.0 &&
                      eval::bleu(other, refs) == 0.0 && eval::chrf(other, refs) == 0.0;
  std::ostringstream d;
  d << cases.size() << " cases (BLEU, chrF2++), max abs err " << worst
    << ", perfect/disjoint " << (bounds ? "100/0" : "wrong");
  return {worst <= kMetricTolerance && bounds, d.str()};
}

Outcome ac7() {
  auto numbered = [](const std::string& name, const char* s, const char* t, std::size_t n) {
    corpus::BitextCorpus c{name, LanguageCode(s), LanguageCode(t), {}, {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
      c.pairs.push_back({std::string(s) + std::to_string(i), std::string(t) + std::to_string(i)});
    }
    return std::make_shared<const corpus::BitextCorpus>(std::move(c));
  };
  const auto d = Direction::parse("xho-zul");
  const dataset::BalancePlan plan{{{d, {{d.src, english()}, {english(), d.tgt}}, std::nullopt}}};
  const auto mix = dataset::build_stage2_mixture(
      {numbered("ex", "eng", "xho", 3800), numbered("ez", "eng", "zul", 8600)},
      {numbered("xz", "xho", "zul", 1000)}, plan, {.seed = 1});
  const auto counts = mix.direction_counts();
  const bool ok = counts.at("xho-zul") == 1000 && counts.at("xho-eng") == 1000 &&
                  counts.at("eng-zul") == 1000;
  return {ok, "xho-zul " + std::to_string(counts.at("xho-zul")) + ", xho-eng " +
                  std::to_string(counts.at("xho-eng")) + ", eng-zul " +
                  std::to_string(counts.at("eng-zul"))};
}

Outcome ac8() {
  testing_util::TempDir dir;
  const auto ds = toy::write_toy_dataset(dir / "data", {.scale = 0.2});
  const translator::IdentityTranslator identity;
  const translator::ExecTranslator marker("sed 's/^/~/'");
  std::size_t checked = 0;
  std::vector<std::string> failures;
  auto check = [&](const corpus::BitextCorpus& in, const corpus::BitextCorpus& out,
                   bool pivot, const std::string& label) {
    const fs::path m = corpus::write_bitext(out, dir / "synth");
    const auto back = corpus::load_bitext(m);
    const auto j = nlohmann::json::parse(testing_util::slurp(m));
    bool ok = back == out && out.size() == in.size() && out.src_provenance.is_synthetic() &&
              !out.tgt_provenance.is_synthetic() && j["src_provenance"]["kind"] == "synthetic" &&
              j["tgt_provenance"]["kind"] == "real";
    for (std::size_t i = 0; ok && i < in.size(); ++i) {
      ok = out.pairs[i].tgt == in.pairs[i].tgt && out.pairs[i].src == "~" + in.pairs[i].src;
      if (!pivot) ok = ok && out.pairs[i].src != in.pairs[i].tgt;
    }
    if (!ok) failures.push_back(label);
    ++checked;
  };
  for (const auto& path : ds.old_corpora) {
    const auto c = corpus::load_bitext(path);
    // Back-translation regenerates English from the real side.
    const auto bt = synthesis::backtranslate(c, marker, {.batch_size = 16, .threads = 4});
    corpus::BitextCorpus expect_in = c;
    for (auto& p : expect_in.pairs) p.src = p.tgt;
    check(expect_in, bt, true, c.name + ".bt");
    const auto same = synthesis::backtranslate(c, identity);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (same.pairs[i].tgt != c.pairs[i].tgt) failures.push_back(c.name + ".identity");
    }
    // Pivot replaces English with a third language.
    const LanguageCode to(c.tgt_lang.str() == "sna" ? "afr" : "sna");
    const auto pv = synthesis::pivot_synthesize(c, marker, to, {.batch_size = 50, .threads = 2});
    check(c, pv, true, c.name + ".pivot");
    if (pv.src_lang != to || pv.tgt_lang != c.tgt_lang) failures.push_back(c.name + ".langs");
  }
  for (const auto& path : ds.new_corpora) {
    const auto c = corpus::load_bitext(path);
    const auto bt = synthesis::backtranslate(c, marker);
    corpus::BitextCorpus expect_in = c;
    for (auto& p : expect_in.pairs) p.src = p.tgt;
    check(expect_in, bt, true, c.name + ".bt");
  }
  std::string d = std::to_string(checked) + " synthetic corpora checked";
  for (const auto& f : failures) d += " bad:" + f;
  return {failures.empty() && checked > 0, d};
}

Outcome ac9() {
  const auto c = oracle::make_cipher_corpus(1000, 50, 2024, english(), LanguageCode("xho"));
  const auto lex = translator::train_lexicon(c.corpus, 20, {.threads = hw_threads()});
  std::size_t ok = 0;
  for (const auto& [e, f] : c.mapping) ok += lex.best_translation(e) == f ? 1 : 0;
  const double rec = static_cast<double>(ok) / static_cast<double>(c.mapping.size());
  bool monotone = true;
  const auto& ll = lex.log_likelihood();
  for (std::size_t i = 1; i < ll.size(); ++i) {
    monotone = monotone && ll[i] >= ll[i - 1] - 1e-9 * std::abs(ll[i - 1]);
  }
  std::ostringstream d;
  d << "recovery " << rec << ", LL non-decreasing " << (monotone ? "yes" : "no")
    << ", max row error " << lex.max_row_error();
  return {rec >= kRecoveryThreshold && monotone && ll.size() == 21 &&
              lex.max_row_error() <= kRowSumTolerance,
          d.str()};
}

Outcome ac10() {
  testing_util::TempDir dir;
  const std::string cmd = std::string("'") + MTKIT_CLI_PATH + "' repro-toy --threads " +
                          std::to_string(hw_threads()) + " --out '" + (dir / "toy").string() +
                          "' > '" + (dir / "stdout.txt").string() + "' 2>&1";
  const auto t0 = Clock::now();
  const int status = std::system(cmd.c_str());
  const double secs = seconds_since(t0);
  if (status != 0) {
    return {false, "repro-toy exited with status " + std::to_string(status) + ": " +
                       testing_util::slurp(dir / "stdout.txt")};
  }
  const fs::path run = dir / "toy" / "run";
  const auto summary = nlohmann::json::parse(testing_util::slurp(run / "14-summary" / "summary.json"));
  const double before = summary["new_bleu_before"].get<double>();
  const double after = summary["new_bleu_after"].get<double>();
  std::size_t steps_ok = 0;
  const auto log = nlohmann::json::parse(testing_util::slurp(run / "run_log.json"));
  for (const auto& step : log["steps"]) steps_ok += step["status"] == "ok" ? 1 : 0;
  std::ostringstream d;
  d << "repro-toy: " << steps_ok << " steps ok, " << summary["new_directions"].size()
    << " new directions, average BLEU " << before << " -> " << after << " in " << secs << " s";
  return {after > before && secs < kToySeconds && steps_ok == log["steps"].size() &&
              summary["new_directions"].size() == 8,
          d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},  {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}};
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %s %s\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
