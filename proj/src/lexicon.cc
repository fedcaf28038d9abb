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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mtkit/error.h"
#include "mtkit/parallel.h"
#include "mtkit/text.h"
#include "mtkit/translator.h"

namespace mtkit::translator {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kRowTolerance = 1e-9;

double round_significant(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << bytes;
}

ordered_json lexicon_json(const Lexicon& lex) {
  ordered_json j;
  j["kind"] = "lexicon";
  j["src_lang"] = lex.direction().src.str();
  j["tgt_lang"] = lex.direction().tgt.str();
  j["null_word"] = Lexicon::kNullWord;
  j["log_likelihood"] = lex.log_likelihood();
  auto row_json = [&](std::size_t e) {
    ordered_json row = ordered_json::object();
    for (const auto& entry : lex.rows()[e]) {
      row[lex.tgt_words()[static_cast<std::size_t>(entry.tgt)]] = round_significant(entry.prob);
    }
    return row;
  };
  j["null_row"] = row_json(0);
  ordered_json table = ordered_json::object();
  for (std::size_t e = 1; e < lex.src_words().size(); ++e) {
    table[lex.src_words()[e]] = row_json(e);
  }
  j["table"] = std::move(table);
  return j;
}

Lexicon lexicon_from_json(const nlohmann::json& j) {
  const Direction dir{LanguageCode(j.at("src_lang").get<std::string>()),
                      LanguageCode(j.at("tgt_lang").get<std::string>())};
  std::set<std::string> tgt_set;
  auto collect = [&](const nlohmann::json& row) {
    for (const auto& [f, _] : row.items()) tgt_set.insert(f);
  };
  collect(j.at("null_row"));
  for (const auto& [e, row] : j.at("table").items()) collect(row);
  std::vector<std::string> tgt_words(tgt_set.begin(), tgt_set.end());
  std::map<std::string, int> tgt_index;
  for (std::size_t i = 0; i < tgt_words.size(); ++i) tgt_index[tgt_words[i]] = static_cast<int>(i);

  auto parse_row = [&](const nlohmann::json& row) {
    std::vector<Lexicon::Entry> entries;
    double sum = 0.0;
    for (const auto& [f, p] : row.items()) {
      const double v = p.get<double>();
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::kBadModel, "probability outside [0, 1]");
      }
      entries.push_back({tgt_index.at(f), v});
      sum += v;
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.tgt < b.tgt; });
    if (sum <= 0.0) throw Error(ErrorCode::kBadModel, "lexicon row has no mass");
    for (auto& e : entries) e.prob /= sum;
    return entries;
  };
  std::vector<std::string> src_words = {std::string(Lexicon::kNullWord)};
  std::vector<std::vector<Lexicon::Entry>> rows = {parse_row(j.at("null_row"))};
  for (const auto& [e, row] : j.at("table").items()) {
    src_words.push_back(e);
    rows.push_back(parse_row(row));
  }
  std::vector<double> ll;
  if (j.contains("log_likelihood")) ll = j["log_likelihood"].get<std::vector<double>>();
  return Lexicon(dir, std::move(src_words), std::move(tgt_words), std::move(rows), std::move(ll));
}

// Flat CSR layout of the co-occurrence table used during EM.
struct EmState {
  std::vector<std::size_t> row_start;  // size src_words + 1
  std::vector<int> cols;
  std::vector<double> prob;
  std::vector<double> count;
};

}  // namespace

Lexicon::Lexicon(Direction direction, std::vector<std::string> src_words,
                 std::vector<std::string> tgt_words, std::vector<std::vector<Entry>> rows,
                 std::vector<double> log_likelihood)
    : direction_(std::move(direction)),
      src_words_(std::move(src_words)),
      tgt_words_(std::move(tgt_words)),
      rows_(std::move(rows)),
      log_likelihood_(std::move(log_likelihood)) {
  if (src_words_.empty() || src_words_.size() != rows_.size()) {
    throw Error(ErrorCode::kBadModel, "lexicon needs one row per source word plus null");
  }
  for (std::size_t e = 1; e < src_words_.size(); ++e) {
    if (!src_index_.emplace(src_words_[e], static_cast<int>(e)).second) {
      throw Error(ErrorCode::kBadModel, "duplicate source word '" + src_words_[e] + "'");
    }
  }
  best_.assign(rows_.size(), -1);
  for (std::size_t e = 0; e < rows_.size(); ++e) {
    double best_p = -1.0;
    for (const auto& entry : rows_[e]) {
      if (entry.tgt < 0 || static_cast<std::size_t>(entry.tgt) >= tgt_words_.size()) {
        throw Error(ErrorCode::kBadModel, "lexicon entry outside the target vocabulary");
      }
      // Rows are sorted by target index, so strict > keeps the smallest one.
      if (entry.prob > best_p) {
        best_p = entry.prob;
        best_[e] = entry.tgt;
      }
    }
  }
}

std::optional<int> Lexicon::src_index(std::string_view word) const {
  const auto it = src_index_.find(std::string(word));
  if (it == src_index_.end()) return std::nullopt;
  return it->second;
}

double Lexicon::prob(std::string_view tgt_word, std::string_view src_word) const {
  const int e = src_word == kNullWord ? 0 : src_index(src_word).value_or(-1);
  if (e < 0) return 0.0;
  const auto it = std::lower_bound(tgt_words_.begin(), tgt_words_.end(), tgt_word);
  if (it == tgt_words_.end() || *it != tgt_word) return 0.0;
  const int f = static_cast<int>(it - tgt_words_.begin());
  const auto& row = rows_[static_cast<std::size_t>(e)];
  const auto entry = std::lower_bound(row.begin(), row.end(), f,
                                      [](const Entry& x, int v) { return x.tgt < v; });
  return entry != row.end() && entry->tgt == f ? entry->prob : 0.0;
}

std::optional<std::string> Lexicon::best_translation(std::string_view src_word) const {
  const auto e = src_index(src_word);
  if (!e || best_[static_cast<std::size_t>(*e)] < 0) return std::nullopt;
  return tgt_words_[static_cast<std::size_t>(best_[static_cast<std::size_t>(*e)])];
}

double Lexicon::max_row_error() const {
  double worst = 0.0;
  for (const auto& row : rows_) {
    double sum = 0.0;
    for (const auto& entry : row) sum += entry.prob;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

std::string Lexicon::to_json() const { return lexicon_json(*this).dump(1) + "\n"; }

Lexicon Lexicon::from_json(std::string_view json) {
  try {
    return lexicon_from_json(nlohmann::json::parse(json));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadModel, std::string("lexicon: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw Error(ErrorCode::kBadModel, std::string("lexicon: ") + e.what());
  }
}

void Lexicon::save(const std::filesystem::path& path) const { write_all(path, to_json()); }

Lexicon Lexicon::load(const std::filesystem::path& path) { return from_json(read_all(path)); }

Lexicon train_lexicon(const corpus::BitextCorpus& corpus, std::size_t iterations,
                      const LexiconOptions& options) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot train a lexicon on an empty corpus");
  }
  if (iterations == 0) {
    throw Error(ErrorCode::kInvalidArgument, "iterations must be at least 1");
  }

  // Vocabularies, sorted so that index order is lexicographic order.
  std::vector<std::vector<std::string>> src_tok, tgt_tok;
  std::set<std::string> src_set, tgt_set;
  for (const auto& p : corpus.pairs) {
    src_tok.push_back(text::split_whitespace(p.src));
    tgt_tok.push_back(text::split_whitespace(p.tgt));
    src_set.insert(src_tok.back().begin(), src_tok.back().end());
    tgt_set.insert(tgt_tok.back().begin(), tgt_tok.back().end());
  }
  std::vector<std::string> src_words = {std::string(Lexicon::kNullWord)};
  src_words.insert(src_words.end(), src_set.begin(), src_set.end());
  std::vector<std::string> tgt_words(tgt_set.begin(), tgt_set.end());
  std::unordered_map<std::string, int> src_id, tgt_id;
  for (std::size_t i = 1; i < src_words.size(); ++i) src_id[src_words[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < tgt_words.size(); ++i) tgt_id[tgt_words[i]] = static_cast<int>(i);

  const std::size_t num_pairs = corpus.size();
  std::vector<std::vector<int>> es(num_pairs), fs(num_pairs);
  std::vector<std::set<int>> cooc(src_words.size());
  for (std::size_t p = 0; p < num_pairs; ++p) {
    es[p].push_back(0);
    for (const auto& w : src_tok[p]) es[p].push_back(src_id.at(w));
    for (const auto& w : tgt_tok[p]) fs[p].push_back(tgt_id.at(w));
    for (int e : es[p]) cooc[static_cast<std::size_t>(e)].insert(fs[p].begin(), fs[p].end());
  }

  EmState st;
  st.row_start.push_back(0);
  for (const auto& row : cooc) {
    st.cols.insert(st.cols.end(), row.begin(), row.end());
    st.row_start.push_back(st.cols.size());
  }
  st.prob.assign(st.cols.size(), 0.0);
  st.count.assign(st.cols.size(), 0.0);
  const std::size_t num_rows = src_words.size();

  auto cell = [&](int e, int f) {
    const auto begin = st.cols.begin() + static_cast<std::ptrdiff_t>(st.row_start[e]);
    const auto end = st.cols.begin() + static_cast<std::ptrdiff_t>(st.row_start[e + 1]);
    return static_cast<std::size_t>(std::lower_bound(begin, end, f) - st.cols.begin());
  };

  // cells[p][i * m + j] is the flat index of t(f_j | e_i) for pair p.
  std::vector<std::vector<std::size_t>> cells(num_pairs);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> occurrences(num_rows);
  for (std::size_t p = 0; p < num_pairs; ++p) {
    const std::size_t m = fs[p].size();
    cells[p].resize(es[p].size() * m);
    for (std::size_t i = 0; i < es[p].size(); ++i) {
      for (std::size_t j = 0; j < m; ++j) cells[p][i * m + j] = cell(es[p][i], fs[p][j]);
      occurrences[static_cast<std::size_t>(es[p][i])].emplace_back(p, i);
    }
  }

  for (std::size_t e = 0; e < num_rows; ++e) {
    const std::size_t begin = st.row_start[e], end = st.row_start[e + 1];
    const double uniform = 1.0 / static_cast<double>(end - begin);
    for (std::size_t k = begin; k < end; ++k) st.prob[k] = uniform;
    if (options.warm_start != nullptr) {
      double prior_sum = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        st.count[k] = options.warm_start->prob(tgt_words[static_cast<std::size_t>(st.cols[k])],
                                               src_words[e]);
        prior_sum += st.count[k];
      }
      if (prior_sum > 0.0) {
        for (std::size_t k = begin; k < end; ++k) {
          st.prob[k] = 0.5 * uniform + 0.5 * st.count[k] / prior_sum;
        }
      }
    }
  }

  const unsigned threads = std::max(1u, options.threads);
  std::vector<std::vector<double>> denom(num_pairs);
  std::vector<double> pair_ll(num_pairs, 0.0);
  std::vector<double> history;
  for (std::size_t iter = 0;; ++iter) {
    // E-step part 1: per-target normalisers and the likelihood of the
    // current table. Every pair writes only its own slots.
    parallel_for(num_pairs, threads, [&](std::size_t p) {
      const std::size_t l1 = es[p].size(), m = fs[p].size();
      auto& d = denom[p];
      d.assign(m, 0.0);
      for (std::size_t i = 0; i < l1; ++i) {
        for (std::size_t j = 0; j < m; ++j) d[j] += st.prob[cells[p][i * m + j]];
      }
      double ll = 0.0;
      for (std::size_t j = 0; j < m; ++j) ll += std::log(d[j] / static_cast<double>(l1));
      pair_ll[p] = ll;
    });
    double ll = 0.0;
    for (double v : pair_ll) ll += v;
    history.push_back(ll);
    if (iter == iterations) break;

    // E-step part 2 and M-step, row by row. Accumulation follows pair order
    // inside each row, so the sums do not depend on the thread count.
    parallel_for(num_rows, threads, [&](std::size_t e) {
      const std::size_t begin = st.row_start[e], end = st.row_start[e + 1];
      for (std::size_t k = begin; k < end; ++k) st.count[k] = 0.0;
      for (const auto& [p, i] : occurrences[e]) {
        const std::size_t m = fs[p].size();
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t k = cells[p][i * m + j];
          st.count[k] += st.prob[k] / denom[p][j];
        }
      }
      double sum = 0.0;
      for (std::size_t k = begin; k < end; ++k) sum += st.count[k];
      double check = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        st.prob[k] = st.count[k] / sum;
        check += st.prob[k];
      }
      if (std::abs(check - 1.0) > kRowTolerance) {
        throw Error(ErrorCode::kBadModel, "lexicon row for '" + src_words[e] +
                                              "' does not sum to one after M-step");
      }
    });
  }

  std::vector<std::vector<Lexicon::Entry>> rows(num_rows);
  for (std::size_t e = 0; e < num_rows; ++e) {
    for (std::size_t k = st.row_start[e]; k < st.row_start[e + 1]; ++k) {
      rows[e].push_back({st.cols[k], st.prob[k]});
    }
  }
  return Lexicon(corpus.direction(), std::move(src_words), std::move(tgt_words),
                 std::move(rows), std::move(history));
}

std::string lexicon_translate(const Lexicon& lexicon, std::string_view sentence) {
  std::vector<std::string> out;
  for (auto& word : text::split_whitespace(sentence)) {
    auto best = lexicon.best_translation(word);
    out.push_back(best ? std::move(*best) : std::move(word));
  }
  return text::join(out, " ");
}

std::string MultilingualLexiconModel::to_json() const {
  ordered_json j;
  j["kind"] = "multilingual";
  j["id"] = id_;
  std::vector<std::string> langs;
  for (const auto& l : languages_) langs.push_back(l.str());
  j["languages"] = langs;
  j["lexicons"] = ordered_json::array();
  for (const auto& [dir, lex] : lexicons_) j["lexicons"].push_back(lexicon_json(*lex));
  return j.dump(1) + "\n";
}

MultilingualLexiconModel MultilingualLexiconModel::from_json(std::string_view json) {
  try {
    const auto j = nlohmann::json::parse(json);
    std::set<LanguageCode> langs;
    for (const auto& l : j.at("languages")) langs.emplace(l.get<std::string>());
    std::map<Direction, std::shared_ptr<const Lexicon>> lexicons;
    for (const auto& lj : j.at("lexicons")) {
      auto lex = std::make_shared<const Lexicon>(lexicon_from_json(lj));
      lexicons.emplace(lex->direction(), lex);
    }
    return MultilingualLexiconModel(j.at("id").get<std::string>(), std::move(langs),
                                    std::move(lexicons));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadModel, std::string("multilingual model: ") + e.what());
  }
}

void MultilingualLexiconModel::save(const std::filesystem::path& path) const {
  write_all(path, to_json());
}

std::unique_ptr<TranslatorModel> load_model(std::string_view spec) {
  if (spec.rfind("exec:", 0) == 0) {
    return std::make_unique<ExecTranslator>(std::string(spec.substr(5)));
  }
  if (spec == "identity") return std::make_unique<IdentityTranslator>();
  const std::filesystem::path path{std::string(spec)};
  const std::string bytes = read_all(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadModel, path.string() + ": " + e.what());
  }
  const std::string kind = j.value("kind", "");
  if (kind == "lexicon") {
    return std::make_unique<LexiconTranslator>(
        std::make_shared<const Lexicon>(Lexicon::from_json(bytes)),
        "lexicon:" + path.stem().string());
  }
  if (kind == "multilingual") {
    return std::make_unique<MultilingualLexiconModel>(MultilingualLexiconModel::from_json(bytes));
  }
  throw Error(ErrorCode::kBadModel, path.string() + ": unknown model kind '" + kind + "'");
}

}  // namespace mtkit::translator
