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

#include "mtkit/vocab.h"

#include <algorithm>
#include <climits>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mtkit/error.h"
#include "mtkit/text.h"

namespace mtkit::vocab {
namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t pair_key(TokenId a, TokenId b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// One code point, optionally followed by the marker.
bool is_base_symbol(std::string_view token, std::string_view marker) {
  if (ends_with(token, marker)) token.remove_suffix(marker.size());
  if (token.empty()) return false;
  try {
    return text::code_point_count(token) == 1;
  } catch (const Error&) {
    return false;
  }
}

ordered_json config_to_json(const VocabConfig& c) {
  ordered_json j;
  j["vocab_size"] = c.vocab_size;
  auto langs = [](const std::set<LanguageCode>& s) {
    std::vector<std::string> out;
    for (const auto& l : s) out.push_back(l.str());
    return out;
  };
  j["hrl_langs"] = langs(c.hrl_langs);
  j["lrl_langs"] = langs(c.lrl_langs);
  j["mean_exponent_p"] = c.mean_exponent_p;
  j["special_tokens"] = c.special_tokens;
  j["end_of_word_marker"] = c.end_of_word_marker;
  return j;
}

VocabConfig config_from_json(const nlohmann::json& j) {
  VocabConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  for (const auto& l : j.at("hrl_langs")) c.hrl_langs.emplace(l.get<std::string>());
  for (const auto& l : j.at("lrl_langs")) c.lrl_langs.emplace(l.get<std::string>());
  c.mean_exponent_p = j.at("mean_exponent_p").get<double>();
  c.special_tokens = j.at("special_tokens").get<std::vector<std::string>>();
  c.end_of_word_marker = j.at("end_of_word_marker").get<std::string>();
  return c;
}

}  // namespace

std::string_view mode_name(Mode mode) {
  return mode == Mode::kBpe ? "bpe" : "obpe";
}

Mode parse_mode(std::string_view name) {
  if (name == "bpe") return Mode::kBpe;
  if (name == "obpe") return Mode::kObpe;
  throw Error(ErrorCode::kInvalidArgument,
              "mode must be bpe or obpe, got '" + std::string(name) + "'");
}

std::string source_tag(const LanguageCode& lang) {
  return "<src:" + lang.str() + ">";
}

std::string target_tag(const LanguageCode& lang) {
  return "<tgt:" + lang.str() + ">";
}

std::vector<std::string> default_special_tokens() {
  std::vector<std::string> out = {std::string(kPadToken), std::string(kUnkToken),
                                  std::string(kBosToken), std::string(kEosToken)};
  const auto codes = LanguageRegistry::codes();
  for (const auto& code : codes) out.push_back(source_tag(LanguageCode(code)));
  for (const auto& code : codes) out.push_back(target_tag(LanguageCode(code)));
  return out;
}

VocabConfig VocabConfig::defaults() {
  VocabConfig c;
  for (const char* l : {"eng", "xho", "tsn", "sna"}) c.hrl_langs.emplace(l);
  for (const char* l : {"afr", "zul", "ssw", "nso", "tso"}) c.lrl_langs.emplace(l);
  return c;
}

void VocabConfig::validate() const {
  for (const auto& l : hrl_langs) {
    if (lrl_langs.count(l) != 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "language " + l.str() + " is listed as both HRL and LRL");
    }
  }
  if (vocab_size == 0) {
    throw Error(ErrorCode::kVocabSizeTooSmall, "vocab_size must be positive");
  }
  if (end_of_word_marker.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "end_of_word_marker is empty");
  }
  if (!std::isfinite(mean_exponent_p)) {
    throw Error(ErrorCode::kInvalidArgument, "mean_exponent_p must be finite");
  }
  std::set<std::string> seen;
  for (const auto& t : special_tokens) {
    if (t.empty() || !seen.insert(t).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "special tokens must be unique and non-empty: '" + t + "'");
    }
  }
  if (seen.count(std::string(kUnkToken)) == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "special tokens must include " + std::string(kUnkToken));
  }
}

bool LangCorpusSet::empty() const {
  return std::all_of(sentences.begin(), sentences.end(),
                     [](const auto& kv) { return kv.second.empty(); });
}

LangCorpusSet LangCorpusSet::from_corpora(
    const std::vector<corpus::BitextCorpus>& corpora) {
  LangCorpusSet set;
  for (const auto& c : corpora) {
    auto& src = set.sentences[c.src_lang];
    auto& tgt = set.sentences[c.tgt_lang];
    for (const auto& p : c.pairs) {
      src.push_back(p.src);
      tgt.push_back(p.tgt);
    }
  }
  return set;
}

std::vector<Word> pretokenize(std::string_view text, std::string_view marker) {
  std::vector<Word> words;
  for (const auto& w : text::split_whitespace(text)) {
    Word symbols = text::code_points(w);
    symbols.back().append(marker);
    words.push_back(std::move(symbols));
  }
  return words;
}

Vocabulary::Vocabulary(Mode mode, VocabConfig config,
                       std::vector<std::string> tokens,
                       std::vector<Merge> merges)
    : mode_(mode),
      config_(std::move(config)),
      tokens_(std::move(tokens)),
      merges_(std::move(merges)) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kBadVocabFile, msg);
  };
  try {
    config_.validate();
  } catch (const Error& e) {
    fail(std::string("invalid config: ") + e.what());
  }
  const auto& specials = config_.special_tokens;
  num_special_ = specials.size();
  if (tokens_.size() < num_special_ ||
      !std::equal(specials.begin(), specials.end(), tokens_.begin())) {
    fail("token table must start with the configured special tokens");
  }
  if (tokens_.size() > config_.vocab_size) {
    fail("token table has " + std::to_string(tokens_.size()) +
         " entries, above vocab_size " + std::to_string(config_.vocab_size));
  }
  for (std::size_t i = 0; i < num_special_; ++i) {
    special_ids_.emplace(tokens_[i], static_cast<TokenId>(i));
  }
  unk_id_ = special_ids_.at(std::string(kUnkToken));

  const std::string& marker = config_.end_of_word_marker;
  for (std::size_t i = num_special_; i < tokens_.size(); ++i) {
    if (!piece_ids_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      fail("duplicate token '" + tokens_[i] + "'");
    }
  }
  // A merge input is usable once it is a base symbol or an earlier output.
  std::vector<bool> reachable(tokens_.size(), false);
  for (std::size_t i = num_special_; i < tokens_.size(); ++i) {
    reachable[i] = is_base_symbol(tokens_[i], marker);
  }
  for (std::size_t rank = 0; rank < merges_.size(); ++rank) {
    const auto& m = merges_[rank];
    const auto l = piece_ids_.find(m.left);
    const auto r = piece_ids_.find(m.right);
    if (l == piece_ids_.end() || r == piece_ids_.end() ||
        !reachable[l->second] || !reachable[r->second]) {
      fail("merge " + std::to_string(rank) + " (" + m.left + ", " + m.right +
           ") uses a token that is neither base nor an earlier merge output");
    }
    if (ends_with(m.left, marker)) {
      fail("merge " + std::to_string(rank) +
           " has an end-of-word token on the left");
    }
    const auto out = piece_ids_.find(m.left + m.right);
    if (out == piece_ids_.end()) {
      fail("merge output '" + m.left + m.right + "' missing from tokens");
    }
    reachable[out->second] = true;
    merge_ranks_[pair_key(l->second, r->second)].emplace_back(
        static_cast<int>(rank), out->second);
  }
  for (std::size_t i = num_special_; i < tokens_.size(); ++i) {
    if (!reachable[i]) fail("token '" + tokens_[i] + "' is unreachable");
  }
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error(ErrorCode::kUnknownId, "token id " + std::to_string(id) +
                                           " outside [0, " +
                                           std::to_string(tokens_.size()) + ")");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocabulary::special_id(std::string_view surface) const {
  const auto it = special_ids_.find(std::string(surface));
  if (it == special_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<TokenId> Vocabulary::piece_id(std::string_view piece) const {
  const auto it = piece_ids_.find(std::string(piece));
  if (it == piece_ids_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::encode_word(const Word& word, std::vector<TokenId>& out) const {
  std::vector<TokenId> ids;
  ids.reserve(word.size());
  for (const auto& sym : word) {
    const auto it = piece_ids_.find(sym);
    ids.push_back(it == piece_ids_.end() ? unk_id_ : it->second);
  }
  // Reproduces sequential application: after merge r only ranks > r apply.
  int last = -1;
  std::vector<TokenId> next;
  while (ids.size() > 1) {
    int best_rank = INT_MAX;
    TokenId best_left = 0, best_right = 0, best_out = 0;
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      const auto it = merge_ranks_.find(pair_key(ids[i], ids[i + 1]));
      if (it == merge_ranks_.end()) continue;
      for (const auto& [rank, out_id] : it->second) {
        if (rank > last) {
          if (rank < best_rank) {
            best_rank = rank;
            best_left = ids[i];
            best_right = ids[i + 1];
            best_out = out_id;
          }
          break;
        }
      }
    }
    if (best_rank == INT_MAX) break;
    next.clear();
    for (std::size_t i = 0; i < ids.size();) {
      if (i + 1 < ids.size() && ids[i] == best_left && ids[i + 1] == best_right) {
        next.push_back(best_out);
        i += 2;
      } else {
        next.push_back(ids[i]);
        ++i;
      }
    }
    ids.swap(next);
    last = best_rank;
  }
  out.insert(out.end(), ids.begin(), ids.end());
}

std::vector<TokenId> Vocabulary::encode(std::string_view text) const {
  std::vector<TokenId> out;
  for (const auto& word : pretokenize(text, config_.end_of_word_marker)) {
    encode_word(word, out);
  }
  return out;
}

std::vector<std::string> Vocabulary::encode_pieces(std::string_view text) const {
  std::vector<std::string> out;
  for (TokenId id : encode(text)) out.push_back(tokens_[static_cast<std::size_t>(id)]);
  return out;
}

std::size_t Vocabulary::count_tokens(std::string_view text) const {
  return encode(text).size();
}

std::string Vocabulary::decode(std::span<const TokenId> ids) const {
  const std::string& marker = config_.end_of_word_marker;
  std::string out;
  for (TokenId id : ids) {
    const std::string& piece = token(id);
    if (is_special(id)) {
      if (id == unk_id_) out += piece;
      continue;
    }
    if (ends_with(piece, marker)) {
      out.append(piece, 0, piece.size() - marker.size());
      out.push_back(' ');
    } else {
      out += piece;
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string Vocabulary::to_json() const {
  ordered_json j;
  j["mode"] = mode_name(mode_);
  j["config"] = config_to_json(config_);
  j["tokens"] = tokens_;
  ordered_json merges = ordered_json::array();
  for (const auto& m : merges_) merges.push_back({m.left, m.right});
  j["merges"] = std::move(merges);
  return j.dump(1) + "\n";
}

Vocabulary Vocabulary::from_json(std::string_view json) {
  try {
    const auto j = nlohmann::json::parse(json);
    std::vector<Merge> merges;
    for (const auto& m : j.at("merges")) {
      if (!m.is_array() || m.size() != 2) {
        throw Error(ErrorCode::kBadVocabFile, "merge must be a [left, right] pair");
      }
      merges.push_back({m[0].get<std::string>(), m[1].get<std::string>()});
    }
    return Vocabulary(parse_mode(j.at("mode").get<std::string>()),
                      config_from_json(j.at("config")),
                      j.at("tokens").get<std::vector<std::string>>(),
                      std::move(merges));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadVocabFile, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBadVocabFile) throw;
    throw Error(ErrorCode::kBadVocabFile, e.what());
  }
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << to_json();
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace mtkit::vocab
