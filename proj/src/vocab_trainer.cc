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
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "mtkit/error.h"
#include "mtkit/parallel.h"
#include "mtkit/text.h"
#include "mtkit/vocab.h"

namespace mtkit::vocab {
namespace {

using Key = std::uint64_t;

Key pack(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}
int left_of(Key k) { return static_cast<int>(k >> 32); }
int right_of(Key k) { return static_cast<int>(k & 0xffffffffu); }

class SymbolTable {
 public:
  int intern(const std::string& piece) {
    const auto [it, inserted] = ids_.emplace(piece, static_cast<int>(pieces_.size()));
    if (inserted) pieces_.push_back(piece);
    return it->second;
  }
  bool contains(const std::string& piece) const { return ids_.count(piece) != 0; }
  const std::string& operator[](int id) const { return pieces_[static_cast<std::size_t>(id)]; }
  const std::vector<std::string>& pieces() const { return pieces_; }

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> ids_;
};

struct PairStat {
  std::int64_t total = 0;
  std::vector<std::int64_t> per_lang;
};

struct WordTypes {
  std::vector<std::string> surface;
  std::vector<std::vector<int>> symbols;
  std::vector<std::vector<std::int64_t>> lang_counts;
  std::vector<std::int64_t> total;
};

// Word-type frequencies per language. Sharding affects only speed.
std::map<std::string, std::vector<std::int64_t>> count_words(
    const LangCorpusSet& data, unsigned threads) {
  constexpr std::size_t kShards = 16;
  const std::size_t num_langs = data.sentences.size();
  std::vector<const std::vector<std::string>*> streams;
  for (const auto& [lang, sentences] : data.sentences) streams.push_back(&sentences);

  std::vector<std::unordered_map<std::string, std::int64_t>> partial(num_langs * kShards);
  parallel_for(partial.size(), threads, [&](std::size_t task) {
    const auto& sentences = *streams[task / kShards];
    const std::size_t shard = task % kShards;
    const std::size_t begin = sentences.size() * shard / kShards;
    const std::size_t end = sentences.size() * (shard + 1) / kShards;
    auto& counts = partial[task];
    for (std::size_t i = begin; i < end; ++i) {
      for (auto& w : text::split_whitespace(sentences[i])) ++counts[std::move(w)];
    }
  });

  std::map<std::string, std::vector<std::int64_t>> merged;
  for (std::size_t task = 0; task < partial.size(); ++task) {
    const std::size_t lang = task / kShards;
    for (const auto& [word, n] : partial[task]) {
      auto& row = merged[word];
      if (row.empty()) row.assign(num_langs, 0);
      row[lang] += n;
    }
  }
  return merged;
}

class Trainer {
 public:
  Trainer(Mode mode, const LangCorpusSet& data, const VocabConfig& config,
          const TrainOptions& options)
      : mode_(mode), config_(config), num_langs_(data.sentences.size()) {
    config_.validate();
    if (data.empty()) {
      throw Error(ErrorCode::kEmptyCorpus, "vocabulary training data is empty");
    }
    if (mode_ == Mode::kObpe) {
      for (const auto& [lang, _] : data.sentences) {
        if (config_.hrl_langs.count(lang) == 0 && config_.lrl_langs.count(lang) == 0) {
          throw Error(ErrorCode::kInvalidArgument,
                      "language " + lang.str() +
                          " is in the data but in neither the HRL nor LRL set");
        }
      }
    }
    build_words(count_words(data, options.threads));
    count_pairs();
  }

  TrainResult run() {
    std::size_t token_count = config_.special_tokens.size() + base_.size();
    std::vector<Merge> merges;
    std::vector<std::string> outputs;
    while (token_count < config_.vocab_size) {
      const auto best = mode_ == Mode::kBpe ? best_bpe() : best_obpe();
      if (!best) break;
      const int a = left_of(*best), b = right_of(*best);
      std::string out = symbols_[a] + symbols_[b];
      merges.push_back({symbols_[a], symbols_[b]});
      if (!symbols_.contains(out)) {
        outputs.push_back(out);
        ++token_count;
      }
      apply_merge(a, b, symbols_.intern(out));
    }

    std::vector<std::string> tokens = config_.special_tokens;
    tokens.insert(tokens.end(), base_.begin(), base_.end());
    tokens.insert(tokens.end(), outputs.begin(), outputs.end());

    TrainResult result{Vocabulary(mode_, config_, std::move(tokens), std::move(merges)), {}};
    for (std::size_t w = 0; w < words_.surface.size(); ++w) {
      std::vector<std::string> pieces;
      for (int s : words_.symbols[w]) pieces.push_back(symbols_[s]);
      result.final_segmentation.emplace(words_.surface[w], std::move(pieces));
    }
    return result;
  }

 private:
  struct CandidateOrder {
    const SymbolTable* symbols;
    bool operator()(const std::pair<std::int64_t, Key>& x,
                    const std::pair<std::int64_t, Key>& y) const {
      if (x.first != y.first) return x.first > y.first;
      const auto& xl = (*symbols)[left_of(x.second)];
      const auto& yl = (*symbols)[left_of(y.second)];
      if (xl != yl) return xl < yl;
      return (*symbols)[right_of(x.second)] < (*symbols)[right_of(y.second)];
    }
  };

  bool pair_less(Key x, Key y) const {
    const auto& xl = symbols_[left_of(x)];
    const auto& yl = symbols_[left_of(y)];
    if (xl != yl) return xl < yl;
    return symbols_[right_of(x)] < symbols_[right_of(y)];
  }

  void build_words(const std::map<std::string, std::vector<std::int64_t>>& counts) {
    std::set<std::string> alphabet;
    for (const auto& [word, _] : counts) {
      for (const auto& cp : text::code_points(word)) {
        alphabet.insert(cp);
        alphabet.insert(cp + config_.end_of_word_marker);
      }
    }
    base_.assign(alphabet.begin(), alphabet.end());
    if (config_.vocab_size <= base_.size() + config_.special_tokens.size()) {
      throw Error(ErrorCode::kVocabSizeTooSmall,
                  "vocab_size " + std::to_string(config_.vocab_size) +
                      " must exceed base alphabet (" + std::to_string(base_.size()) +
                      ") plus special tokens (" +
                      std::to_string(config_.special_tokens.size()) + ")");
    }
    for (const auto& piece : base_) symbols_.intern(piece);

    for (const auto& [word, per_lang] : counts) {
      std::vector<int> syms;
      const auto cps = text::code_points(word);
      for (std::size_t i = 0; i < cps.size(); ++i) {
        syms.push_back(symbols_.intern(
            i + 1 == cps.size() ? cps[i] + config_.end_of_word_marker : cps[i]));
      }
      std::int64_t total = 0;
      for (auto n : per_lang) total += n;
      words_.surface.push_back(word);
      words_.symbols.push_back(std::move(syms));
      words_.lang_counts.push_back(per_lang);
      words_.total.push_back(total);
    }
  }

  void count_pairs() {
    pair_totals_.assign(num_langs_, 0);
    for (std::size_t w = 0; w < words_.symbols.size(); ++w) {
      const auto& syms = words_.symbols[w];
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        add_pair(pack(syms[i], syms[i + 1]), w, +1);
      }
      for (std::size_t l = 0; l < num_langs_; ++l) {
        pair_totals_[l] += words_.lang_counts[w][l] *
                           static_cast<std::int64_t>(syms.size() - 1);
      }
    }
    // Candidate set is rebuilt once here; afterwards maintained by deltas.
    if (mode_ == Mode::kBpe) {
      for (const auto& [key, stat] : stats_) {
        if (stat.total >= 2) queue_.emplace(stat.total, key);
      }
    }
    touched_.clear();
  }

  void add_pair(Key key, std::size_t w, int sign) {
    auto& stat = stats_[key];
    touched_.emplace(key, stat.total);
    if (sign > 0) where_[key].insert(static_cast<int>(w));
    stat.total += sign * words_.total[w];
    if (mode_ == Mode::kObpe) {
      if (stat.per_lang.empty()) stat.per_lang.assign(num_langs_, 0);
      for (std::size_t l = 0; l < num_langs_; ++l) {
        stat.per_lang[l] += sign * words_.lang_counts[w][l];
      }
    }
  }

  std::optional<Key> best_bpe() const {
    if (queue_.empty()) return std::nullopt;
    return queue_.begin()->second;
  }

  std::optional<Key> best_obpe() const {
    std::optional<Key> best;
    double best_score = 0.0;
    for (const auto& [key, stat] : stats_) {
      if (stat.total < 2) continue;
      const double score = obpe_score(stat.per_lang, pair_totals_, config_.mean_exponent_p);
      if (!(score > 0.0)) continue;
      if (!best || score > best_score || (score == best_score && pair_less(key, *best))) {
        best = key;
        best_score = score;
      }
    }
    return best;
  }

  void apply_merge(int a, int b, int out) {
    const Key merged_key = pack(a, b);
    std::vector<int> affected;
    if (const auto it = where_.find(merged_key); it != where_.end()) {
      affected.assign(it->second.begin(), it->second.end());
      where_.erase(it);
    }
    std::sort(affected.begin(), affected.end());
    touched_.clear();
    std::vector<int> next;
    for (int wi : affected) {
      const auto w = static_cast<std::size_t>(wi);
      auto& syms = words_.symbols[w];
      next.clear();
      for (std::size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size() && syms[i] == a && syms[i + 1] == b) {
          next.push_back(out);
          i += 2;
        } else {
          next.push_back(syms[i]);
          ++i;
        }
      }
      if (next.size() == syms.size()) continue;  // stale index entry
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        add_pair(pack(syms[i], syms[i + 1]), w, -1);
      }
      for (std::size_t i = 0; i + 1 < next.size(); ++i) {
        add_pair(pack(next[i], next[i + 1]), w, +1);
      }
      const auto removed = static_cast<std::int64_t>(syms.size() - next.size());
      for (std::size_t l = 0; l < num_langs_; ++l) {
        pair_totals_[l] -= removed * words_.lang_counts[w][l];
      }
      syms.swap(next);
    }
    for (const auto& [key, old_total] : touched_) {
      const auto it = stats_.find(key);
      const std::int64_t now = it == stats_.end() ? 0 : it->second.total;
      if (mode_ == Mode::kBpe && old_total != now) {
        if (old_total >= 2) queue_.erase({old_total, key});
        if (now >= 2) queue_.emplace(now, key);
      }
      if (it != stats_.end() && now == 0) {
        stats_.erase(it);
        where_.erase(key);
      }
    }
  }

  Mode mode_;
  VocabConfig config_;
  std::size_t num_langs_;
  SymbolTable symbols_;
  std::vector<std::string> base_;
  WordTypes words_;
  std::unordered_map<Key, PairStat> stats_;
  std::unordered_map<Key, std::unordered_set<int>> where_;
  std::vector<std::int64_t> pair_totals_;
  std::set<std::pair<std::int64_t, Key>, CandidateOrder> queue_{CandidateOrder{&symbols_}};
  // Pairs changed during the current merge, with their total before it.
  std::unordered_map<Key, std::int64_t> touched_;
};

}  // namespace

double obpe_score(std::span<const std::int64_t> pair_counts,
                  std::span<const std::int64_t> pair_totals, double p) {
  std::int64_t count_sum = 0, total_sum = 0;
  std::size_t active = 0;
  for (std::size_t l = 0; l < pair_totals.size(); ++l) {
    if (pair_totals[l] <= 0) continue;
    ++active;
    count_sum += pair_counts[l];
    total_sum += pair_totals[l];
  }
  if (active == 0) return 0.0;
  // With size-proportional weights the arithmetic mean collapses to the
  // pooled relative frequency; computing it that way keeps BPE ties exact.
  if (active == 1 || p == 1.0) {
    return static_cast<double>(count_sum) / static_cast<double>(total_sum);
  }
  double acc = 0.0;
  for (std::size_t l = 0; l < pair_totals.size(); ++l) {
    if (pair_totals[l] <= 0) continue;
    const double weight =
        static_cast<double>(pair_totals[l]) / static_cast<double>(total_sum);
    const double r =
        static_cast<double>(pair_counts[l]) / static_cast<double>(pair_totals[l]);
    if (r == 0.0 && p <= 0.0) return 0.0;
    acc += p == 0.0 ? weight * std::log(r) : weight * std::pow(r, p);
  }
  return p == 0.0 ? std::exp(acc) : std::pow(acc, 1.0 / p);
}

TrainResult train_detailed(Mode mode, const LangCorpusSet& data,
                           const VocabConfig& config, const TrainOptions& options) {
  return Trainer(mode, data, config, options).run();
}

Vocabulary train(Mode mode, const LangCorpusSet& data, const VocabConfig& config,
                 const TrainOptions& options) {
  return train_detailed(mode, data, config, options).vocab;
}

Vocabulary train_bpe(const LangCorpusSet& data, const VocabConfig& config,
                     const TrainOptions& options) {
  return train(Mode::kBpe, data, config, options);
}

Vocabulary train_obpe(const LangCorpusSet& data, const VocabConfig& config,
                      const TrainOptions& options) {
  return train(Mode::kObpe, data, config, options);
}

}  // namespace mtkit::vocab
