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

#include "mtkit/dataset_builder.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mtkit/error.h"
#include "mtkit/hashing.h"
#include "mtkit/parallel.h"

namespace mtkit::dataset {
namespace {

namespace fs = std::filesystem;

vocab::TokenId require_tag(const vocab::Vocabulary& vocab, const std::string& tag) {
  const auto id = vocab.special_id(tag);
  if (!id) {
    throw Error(ErrorCode::kMissingTagToken, "vocabulary has no " + tag + " token");
  }
  return *id;
}

void check_tags(const vocab::Vocabulary* vocab, const Direction& d) {
  if (vocab == nullptr) return;
  require_tag(*vocab, vocab::source_tag(d.src));
  require_tag(*vocab, vocab::target_tag(d.tgt));
}

// Directions a corpus may feed. Synthetic text is only ever a source.
std::vector<Direction> usable_directions(const corpus::BitextCorpus& c) {
  const bool src_syn = c.src_provenance.is_synthetic();
  const bool tgt_syn = c.tgt_provenance.is_synthetic();
  if (src_syn && !tgt_syn) return {c.direction()};
  if (tgt_syn && !src_syn) return {c.direction().reversed()};
  return {c.direction(), c.direction().reversed()};
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

bool same_pair(const corpus::BitextCorpus& c, const LanguageCode& a,
               const LanguageCode& b) {
  return (c.src_lang == a && c.tgt_lang == b) || (c.src_lang == b && c.tgt_lang == a);
}

std::string role_name(DirectionRole r) { return r == DirectionRole::kOld ? "old" : "new"; }

void register_corpus(TrainingMixture& mix, const CorpusRef& c) {
  if (!c) throw Error(ErrorCode::kInvalidArgument, "null corpus");
  const auto [it, inserted] = mix.corpora.emplace(c->name, c);
  if (!inserted && it->second != c) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate corpus name '" + c->name + "'");
  }
}

void write_text(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

// Splits "<src:xxx> text" into the language and the text.
std::pair<LanguageCode, std::string> strip_tag(const std::string& line,
                                               std::string_view prefix) {
  const auto close = line.find("> ");
  if (line.compare(0, prefix.size(), prefix) != 0 || close == std::string::npos) {
    throw Error(ErrorCode::kBadManifest, "untagged mixture line: " + line);
  }
  return {LanguageCode(line.substr(prefix.size(), close - prefix.size())),
          line.substr(close + 2)};
}

}  // namespace

TaggedExample tag_direction(const corpus::SentencePair& pair,
                            const Direction& pair_langs, const DirectionSpec& dir,
                            const vocab::Vocabulary& vocab, bool synthetic) {
  const std::string* src = nullptr;
  const std::string* tgt = nullptr;
  if (pair_langs.src == dir.src && pair_langs.tgt == dir.tgt) {
    src = &pair.src;
    tgt = &pair.tgt;
  } else if (pair_langs.src == dir.tgt && pair_langs.tgt == dir.src) {
    src = &pair.tgt;
    tgt = &pair.src;
  } else {
    throw Error(ErrorCode::kLanguageMismatch,
                "pair in " + pair_langs.key() + " cannot be tagged as " + dir.key());
  }
  TaggedExample ex{{require_tag(vocab, vocab::source_tag(dir.src))},
                   {require_tag(vocab, vocab::target_tag(dir.tgt))},
                   dir,
                   synthetic};
  const auto s = vocab.encode(*src);
  const auto t = vocab.encode(*tgt);
  ex.src_tokens.insert(ex.src_tokens.end(), s.begin(), s.end());
  ex.tgt_tokens.insert(ex.tgt_tokens.end(), t.begin(), t.end());
  return ex;
}

std::vector<std::size_t> downsample_indices(std::size_t size, std::size_t n,
                                            std::uint64_t seed, SampleMode mode) {
  if (n >= size) return all_indices(size);
  if (mode == SampleMode::kPrefix) return all_indices(n);
  // Selection sampling: each remaining item is kept with probability
  // (needed / remaining), which yields a uniform n-subset in order.
  Rng rng(seed);
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < size && out.size() < n; ++i) {
    if (rng.below(size - i) < n - out.size()) out.push_back(i);
  }
  return out;
}

corpus::BitextCorpus downsample(const corpus::BitextCorpus& corpus, std::size_t n,
                                std::uint64_t seed, SampleMode mode) {
  if (n >= corpus.size()) return corpus;
  corpus::BitextCorpus out = corpus;
  out.pairs.clear();
  for (std::size_t i : downsample_indices(corpus.size(), n, seed, mode)) {
    out.pairs.push_back(corpus.pairs[i]);
  }
  return out;
}

std::size_t TrainingMixture::total() const {
  std::size_t n = 0;
  for (const auto& s : slices) n += s.count;
  return n;
}

std::map<std::string, std::size_t> TrainingMixture::direction_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& s : slices) out[s.direction.key()] += s.count;
  return out;
}

void TrainingMixture::validate() const {
  for (const auto& s : slices) {
    const auto it = corpora.find(s.corpus_name);
    if (it == corpora.end()) {
      throw Error(ErrorCode::kMissingCorpus, "slice refers to unknown corpus '" +
                                                 s.corpus_name + "'");
    }
    if (s.count != s.indices.size()) {
      throw Error(ErrorCode::kInvalidArgument, "slice count differs from index set size");
    }
    for (std::size_t i = 0; i < s.indices.size(); ++i) {
      if (s.indices[i] >= it->second->size() ||
          (i > 0 && s.indices[i] <= s.indices[i - 1])) {
        throw Error(ErrorCode::kInvalidArgument,
                    "slice indices must be sorted, unique and in bounds");
      }
    }
    if (!same_pair(*it->second, s.direction.src, s.direction.tgt)) {
      throw Error(ErrorCode::kLanguageMismatch, "slice direction " + s.direction.key() +
                                                    " does not match corpus " +
                                                    s.corpus_name);
    }
  }
}

TrainingMixture build_stage1_mixture(const std::vector<CorpusRef>& eng_corpora,
                                     const vocab::Vocabulary* vocab,
                                     std::uint64_t seed) {
  if (eng_corpora.empty()) {
    throw Error(ErrorCode::kEmptyInput, "stage-1 mixture needs at least one corpus");
  }
  TrainingMixture mix;
  mix.stage = Stage::kStage1;
  mix.seed = seed;
  for (const auto& c : eng_corpora) {
    register_corpus(mix, c);
    if (!c->has_language(english())) {
      throw Error(ErrorCode::kNonEnglishCorpus,
                  "corpus '" + c->name + "' has no English side");
    }
    for (const auto& d : usable_directions(*c)) {
      check_tags(vocab, d);
      mix.slices.push_back({c->name,
                            {d.src, d.tgt, DirectionRole::kOld, std::nullopt},
                            all_indices(c->size()),
                            c->size(),
                            c->is_synthetic()});
    }
  }
  return mix;
}

BalancePlan BalancePlan::default_plan() {
  static const char* kNew[] = {"xho-zul", "zul-sna", "sna-afr", "afr-ssw",
                               "ssw-tsn", "tsn-tso", "tso-nso", "nso-xho"};
  BalancePlan plan;
  for (const char* key : kNew) {
    const auto d = Direction::parse(key);
    plan.entries.push_back({d, {{d.src, english()}, {english(), d.tgt}}, std::nullopt});
  }
  return plan;
}

void BalancePlan::validate() const {
  std::set<Direction> seen;
  for (const auto& e : entries) {
    const auto& d = e.new_direction;
    if (d.src == d.tgt || d.src.is_english() || d.tgt.is_english()) {
      throw Error(ErrorCode::kPlanCoverage,
                  "new direction " + d.key() + " must join two non-English languages");
    }
    if (!seen.insert(d).second) {
      throw Error(ErrorCode::kPlanCoverage, "new direction " + d.key() + " listed twice");
    }
    const std::set<Direction> expected = {{d.src, english()}, {english(), d.tgt}};
    const std::set<Direction> got(e.old_directions.begin(), e.old_directions.end());
    if (e.old_directions.size() != 2 || got != expected) {
      throw Error(ErrorCode::kPlanCoverage,
                  "plan entry " + d.key() + " must match exactly " + d.src.str() +
                      "-eng and eng-" + d.tgt.str());
    }
  }
}

BalancePlan BalancePlan::from_json(std::string_view json) {
  BalancePlan plan;
  try {
    const auto j = nlohmann::json::parse(json);
    if (!j.is_array()) throw Error(ErrorCode::kConfig, "balance plan must be a JSON list");
    for (const auto& e : j) {
      PlanEntry entry{Direction::parse(e.at("new").get<std::string>()), {}, std::nullopt};
      for (const auto& o : e.at("old")) {
        entry.old_directions.push_back(Direction::parse(o.get<std::string>()));
      }
      if (e.contains("n") && !e["n"].is_null()) entry.n = e["n"].get<std::size_t>();
      plan.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("balance plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

BalancePlan BalancePlan::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string BalancePlan::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json entry;
    entry["new"] = e.new_direction.key();
    entry["old"] = nlohmann::ordered_json::array();
    for (const auto& o : e.old_directions) entry["old"].push_back(o.key());
    if (e.n) entry["n"] = *e.n;
    j.push_back(std::move(entry));
  }
  return j.dump(2) + "\n";
}

TrainingMixture build_stage2_mixture(const std::vector<CorpusRef>& old_corpora,
                                     const std::vector<CorpusRef>& new_corpora,
                                     const BalancePlan& plan,
                                     const Stage2Options& options,
                                     const vocab::Vocabulary* vocab) {
  plan.validate();
  TrainingMixture mix;
  mix.stage = Stage::kStage2;
  mix.seed = options.seed;
  for (const auto& c : old_corpora) register_corpus(mix, c);
  for (const auto& c : new_corpora) register_corpus(mix, c);

  auto find_one = [](const std::vector<CorpusRef>& pool, const LanguageCode& a,
                     const LanguageCode& b) -> CorpusRef {
    CorpusRef found;
    for (const auto& c : pool) {
      if (!same_pair(*c, a, b)) continue;
      if (found) {
        throw Error(ErrorCode::kInvalidArgument, "several corpora hold " + a.str() +
                                                     "-" + b.str());
      }
      found = c;
    }
    return found;
  };

  for (const auto& c : new_corpora) {
    const bool covered = std::any_of(plan.entries.begin(), plan.entries.end(), [&](const PlanEntry& e) {
      return same_pair(*c, e.new_direction.src, e.new_direction.tgt);
    });
    if (!covered) {
      throw Error(ErrorCode::kPlanCoverage,
                  "new corpus '" + c->name + "' is not covered by the balance plan");
    }
  }

  // Old direction -> balanced size; several entries on one direction take
  // the largest.
  std::map<Direction, std::size_t> matched;
  std::vector<std::size_t> new_sizes;
  for (const auto& e : plan.entries) {
    const auto& d = e.new_direction;
    const CorpusRef nc = find_one(new_corpora, d.src, d.tgt);
    if (!nc) {
      throw Error(ErrorCode::kMissingCorpus, "no corpus for new direction " + d.key());
    }
    const std::size_t n = e.n.value_or(nc->size());
    new_sizes.push_back(n);
    check_tags(vocab, d);
    mix.slices.push_back({nc->name,
                          {d.src, d.tgt, DirectionRole::kNew, std::nullopt},
                          all_indices(nc->size()),
                          nc->size(),
                          nc->is_synthetic()});
    for (const auto& od : e.old_directions) {
      const LanguageCode& other = od.src.is_english() ? od.tgt : od.src;
      if (!find_one(old_corpora, english(), other)) {
        throw Error(ErrorCode::kMissingCorpus,
                    "no old corpus eng-" + other.str() + " for plan entry " + d.key());
      }
      auto [it, inserted] = matched.emplace(od, n);
      if (!inserted) it->second = std::max(it->second, n);
    }
  }

  std::size_t default_cap = 0;
  if (options.default_cap) {
    default_cap = *options.default_cap;
  } else if (!new_sizes.empty()) {
    std::vector<std::size_t> sorted = new_sizes;
    std::sort(sorted.begin(), sorted.end());
    default_cap = sorted[(sorted.size() - 1) / 2];
  }

  for (const auto& c : old_corpora) {
    if (!c->has_language(english())) {
      throw Error(ErrorCode::kNonEnglishCorpus,
                  "old corpus '" + c->name + "' has no English side");
    }
    for (const auto& d : usable_directions(*c)) {
      const auto it = matched.find(d);
      const std::size_t want = it != matched.end() ? it->second : default_cap;
      const std::size_t n = std::min(want, c->size());
      check_tags(vocab, d);
      auto indices = downsample_indices(
          c->size(), n, derive_seed(options.seed, "stage2:" + c->name + ":" + d.key()),
          options.mode);
      mix.slices.push_back({c->name,
                            {d.src, d.tgt, DirectionRole::kOld, want},
                            std::move(indices),
                            n,
                            c->is_synthetic()});
    }
  }
  return mix;
}

ExportResult export_mixture(const TrainingMixture& mix, const fs::path& out_dir,
                            unsigned threads) {
  mix.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string());

  struct Line {
    std::string src;
    std::string tgt;
  };
  std::vector<std::vector<Line>> per_slice(mix.slices.size());
  parallel_for(mix.slices.size(), threads, [&](std::size_t s) {
    const auto& slice = mix.slices[s];
    const auto& c = *mix.corpora.at(slice.corpus_name);
    const bool flip = c.src_lang != slice.direction.src;
    const std::string src_tag = vocab::source_tag(slice.direction.src) + " ";
    const std::string tgt_tag = vocab::target_tag(slice.direction.tgt) + " ";
    auto& lines = per_slice[s];
    lines.reserve(slice.indices.size());
    for (std::size_t i : slice.indices) {
      const auto& p = c.pairs[i];
      lines.push_back({src_tag + (flip ? p.tgt : p.src), tgt_tag + (flip ? p.src : p.tgt)});
    }
  });
  std::vector<Line> all;
  all.reserve(mix.total());
  for (auto& lines : per_slice) {
    for (auto& l : lines) all.push_back(std::move(l));
  }
  Rng rng(derive_seed(mix.seed, "export-shuffle"));
  for (std::size_t i = all.size(); i > 1; --i) {
    std::swap(all[i - 1], all[rng.below(i)]);
  }

  std::string src_bytes, tgt_bytes;
  for (const auto& l : all) {
    src_bytes += l.src;
    src_bytes.push_back('\n');
    tgt_bytes += l.tgt;
    tgt_bytes.push_back('\n');
  }
  ExportResult result{out_dir / "train.src", out_dir / "train.tgt", out_dir / "mixture.json"};
  write_text(result.src_file, src_bytes);
  write_text(result.tgt_file, tgt_bytes);

  nlohmann::ordered_json side;
  side["stage"] = mix.stage == Stage::kStage1 ? "stage1" : "stage2";
  side["seed"] = mix.seed;
  side["total"] = all.size();
  side["directions"] = mix.direction_counts();
  side["slices"] = nlohmann::ordered_json::array();
  for (const auto& s : mix.slices) {
    nlohmann::ordered_json j;
    j["corpus"] = s.corpus_name;
    j["direction"] = s.direction.key();
    j["role"] = role_name(s.direction.role);
    j["count"] = s.count;
    j["synthetic"] = s.synthetic;
    side["slices"].push_back(std::move(j));
  }
  side["src_sha256"] = sha256_hex(src_bytes);
  side["tgt_sha256"] = sha256_hex(tgt_bytes);
  write_text(result.sidecar, side.dump(2) + "\n");
  return result;
}

std::vector<ExportedExample> read_exported_mixture(const fs::path& dir) {
  const auto src = read_lines(dir / "train.src");
  const auto tgt = read_lines(dir / "train.tgt");
  if (src.size() != tgt.size()) {
    throw Error(ErrorCode::kMisalignedFiles, "exported mixture sides differ in length");
  }
  std::vector<ExportedExample> out;
  out.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    auto [src_lang, src_text] = strip_tag(src[i], "<src:");
    auto [tgt_lang, tgt_text] = strip_tag(tgt[i], "<tgt:");
    out.push_back({{src_lang, tgt_lang}, std::move(src_text), std::move(tgt_text)});
  }
  return out;
}

}  // namespace mtkit::dataset
