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

#include "mtkit/toy_data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"
#include "mtkit/dataset_builder.h"
#include "mtkit/error.h"

namespace mtkit::toy {
namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kNouns = {
    "dog",    "cat",     "house",  "tree",   "river",  "water",   "child",  "woman",
    "man",    "bird",    "fish",   "horse",  "cow",    "goat",    "field",  "road",
    "village", "city",   "market", "school", "teacher", "doctor", "friend", "mother",
    "father", "book",    "letter", "door",   "window", "table",   "chair",  "fire",
    "stone",  "mountain", "sun",   "moon",   "rain",   "wind",    "food",   "bread",
    "milk",   "meat",    "basket", "garden", "farmer", "boat",    "car",    "song",
    "story",  "hill"};
const std::vector<std::string> kVerbs = {
    "sees",   "likes",   "takes", "gives", "finds",  "carries", "wants",  "brings",
    "helps",  "calls",   "follows", "makes", "holds", "cleans", "opens",  "builds",
    "buys",   "sells",   "watches", "visits"};
const std::vector<std::string> kAdjectives = {
    "big",  "small", "old",   "new",   "red",    "green", "good",  "bad",   "happy",
    "tall", "long",  "short", "warm",  "cold",   "young", "strong", "clean", "quiet"};
const std::vector<std::string> kDeterminers = {"the", "a", "this", "that",
                                               "my",  "your", "our", "their"};
const std::vector<std::string> kPrepositions = {"in", "on", "near", "under",
                                                "with", "from", "behind"};
const std::vector<std::string> kAdverbs = {"today", "quickly", "slowly", "again"};
const std::string kAnd = "and";

enum class Family { kGermanic, kNguni, kSotho, kBantu };

struct LanguageSpec {
  const char* code;
  Family family;
  std::vector<std::pair<std::string, std::string>> shifts;
};

const std::vector<LanguageSpec>& specs() {
  static const std::vector<LanguageSpec> kSpecs = {
      {"eng", Family::kGermanic, {}},
      {"afr", Family::kGermanic, {{"th", "d"}, {"sh", "sk"}, {"w", "v"}, {"c", "k"},
                                  {"ee", "\xC3\xAA"}}},
      {"xho", Family::kNguni, {}},
      {"zul", Family::kNguni, {{"k", "kh"}, {"q", "ng"}}},
      {"ssw", Family::kNguni, {{"z", "t"}, {"l", "dl"}}},
      {"tsn", Family::kSotho, {}},
      {"nso", Family::kSotho, {{"l", "r"}, {"w", "g"}}},
      {"sna", Family::kBantu, {}},
      {"tso", Family::kBantu, {{"s", "x"}, {"v", "hl"}}},
  };
  return kSpecs;
}

const LanguageSpec& spec_for(const LanguageCode& lang) {
  for (const auto& s : specs()) {
    if (lang.str() == s.code) return s;
  }
  throw Error(ErrorCode::kInvalidLanguage, "no toy language '" + lang.str() + "'");
}

const char* family_name(Family f) {
  switch (f) {
    case Family::kGermanic: return "germanic";
    case Family::kNguni: return "nguni";
    case Family::kSotho: return "sotho";
    case Family::kBantu: return "bantu";
  }
  return "";
}

// Partial letter substitution that keeps vowels and consonants apart. The
// three Bantu-like families start from one shared cipher and swap a few more
// consonants each, so related languages keep much of their spelling.
std::map<char, char> family_cipher(Family f, std::uint64_t seed) {
  std::map<char, char> out;
  if (f == Family::kGermanic) return out;
  const std::string vowels = "aeiou";
  const std::string consonants = "bcdfghjklmnpqrstvwxyz";
  for (char c : vowels + consonants) out[c] = c;
  auto swaps = [&](Rng& rng, const std::string& letters, int count) {
    for (int k = 0; k < count; ++k) {
      const char a = letters[rng.below(letters.size())];
      const char b = letters[rng.below(letters.size())];
      std::swap(out[a], out[b]);
    }
  };
  Rng base(derive_seed(seed, "cipher:bantu"));
  swaps(base, vowels, 1);
  swaps(base, consonants, 5);
  Rng rng(derive_seed(seed, std::string("cipher:") + family_name(f)));
  swaps(rng, consonants, 3);
  return out;
}

const std::vector<std::string>& noun_prefixes(Family f) {
  static const std::vector<std::string> kNguni = {"um", "isi", "in", "ili", "ubu", "ama"};
  static const std::vector<std::string> kSotho = {"mo", "se", "le", "bo", "di"};
  static const std::vector<std::string> kBantu = {"mu", "chi", "ri", "ka", "zvi"};
  static const std::vector<std::string> kNone;
  switch (f) {
    case Family::kNguni: return kNguni;
    case Family::kSotho: return kSotho;
    case Family::kBantu: return kBantu;
    default: return kNone;
  }
}

std::string verb_prefix(Family f) {
  switch (f) {
    case Family::kNguni: return "u";
    case Family::kSotho: return "o";
    case Family::kBantu: return "a";
    default: return "";
  }
}

std::string apply_shifts(std::string s, const std::vector<std::pair<std::string, std::string>>& rules) {
  for (const auto& [from, to] : rules) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
      const std::size_t hit = s.find(from, pos);
      if (hit == std::string::npos) break;
      out.append(s, pos, hit - pos);
      out += to;
      pos = hit + from.size();
    }
    out.append(s, pos, std::string::npos);
    s = std::move(out);
  }
  return s;
}

bool is_article(const std::string& det) { return det == "the" || det == "a"; }

const std::string& pick(Rng& rng, const std::vector<std::string>& v) {
  return v[rng.below(v.size())];
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace

ToyWorld::ToyWorld(std::uint64_t seed) {
  struct Base {
    const std::vector<std::string>* words;
    bool noun;
    bool verb;
  };
  const std::vector<Base> bases = {{&kNouns, true, false},        {&kVerbs, false, true},
                                   {&kAdjectives, false, false},  {&kDeterminers, false, false},
                                   {&kPrepositions, false, false}, {&kAdverbs, false, false}};
  for (const auto& spec : specs()) {
    const LanguageCode lang(spec.code);
    const auto cipher = family_cipher(spec.family, seed);
    const auto& prefixes = noun_prefixes(spec.family);
    auto& table = lexicon_[lang];
    std::set<std::string> used;
    auto add = [&](const std::string& base, bool noun, bool verb) {
      std::string root;
      for (char c : base) {
        const auto it = cipher.find(c);
        root += it == cipher.end() ? c : it->second;
      }
      if (noun && !prefixes.empty()) {
        root = prefixes[fnv1a64(base) % prefixes.size()] + root;
      }
      if (verb) root = verb_prefix(spec.family) + root;
      std::string form = apply_shifts(root, spec.shifts);
      static const char* kFill[] = {"a", "e", "i", "o", "u"};
      for (std::size_t k = 0; used.count(form) != 0; ++k) form += kFill[k % 5];
      used.insert(form);
      table[base] = form;
    };
    for (const auto& b : bases) {
      for (const auto& w : *b.words) add(w, b.noun, b.verb);
    }
    add(kAnd, false, false);
  }
}

bool ToyWorld::is_bantu(const LanguageCode& lang) {
  return spec_for(lang).family != Family::kGermanic;
}

const std::string& ToyWorld::word(const LanguageCode& lang, const std::string& base) const {
  const auto lit = lexicon_.find(lang);
  if (lit == lexicon_.end()) {
    throw Error(ErrorCode::kInvalidLanguage, "no toy language '" + lang.str() + "'");
  }
  const auto it = lit->second.find(base);
  if (it == lit->second.end()) {
    throw Error(ErrorCode::kInvalidArgument, "'" + base + "' is not a toy base word");
  }
  return it->second;
}

ToySentence ToyWorld::sample(Rng& rng) const {
  auto np = [&] {
    ToyItem item;
    item.kind = ToyItem::Kind::kNounPhrase;
    item.det = pick(rng, kDeterminers);
    if (rng.uniform() < 0.4) item.adj = pick(rng, kAdjectives);
    item.word = pick(rng, kNouns);
    return item;
  };
  auto single = [&](ToyItem::Kind kind, const std::vector<std::string>& words) {
    ToyItem item;
    item.kind = kind;
    item.word = pick(rng, words);
    return item;
  };
  ToySentence s;
  const auto shape = rng.below(5);
  s.push_back(np());
  if (shape == 3) {
    s.push_back({ToyItem::Kind::kConjunction, "", "", kAnd});
    s.push_back(np());
  }
  s.push_back(single(ToyItem::Kind::kVerb, kVerbs));
  s.push_back(np());
  if (shape == 1 || shape == 4) {
    s.push_back(single(ToyItem::Kind::kPreposition, kPrepositions));
    s.push_back(np());
  }
  if (shape == 2 || shape == 4) s.push_back(single(ToyItem::Kind::kAdverb, kAdverbs));
  return s;
}

std::string ToyWorld::render(const ToySentence& sentence, const LanguageCode& lang) const {
  const bool bantu = is_bantu(lang);
  std::vector<std::string> words;
  for (const auto& item : sentence) {
    if (item.kind != ToyItem::Kind::kNounPhrase) {
      words.push_back(word(lang, item.word));
      continue;
    }
    if (!bantu) {
      if (!item.det.empty()) words.push_back(word(lang, item.det));
      if (!item.adj.empty()) words.push_back(word(lang, item.adj));
      words.push_back(word(lang, item.word));
    } else {
      if (!item.det.empty() && !is_article(item.det)) words.push_back(word(lang, item.det));
      words.push_back(word(lang, item.word));
      if (!item.adj.empty()) words.push_back(word(lang, item.adj));
    }
  }
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

const std::vector<std::pair<std::string, std::size_t>>& toy_old_sizes() {
  static const std::vector<std::pair<std::string, std::size_t>> kSizes = {
      {"sna", 8700}, {"xho", 8600}, {"tsn", 5900}, {"zul", 3800},
      {"nso", 3000}, {"afr", 1600}, {"tso", 630},  {"ssw", 165}};
  return kSizes;
}

const std::vector<std::pair<std::string, std::size_t>>& toy_new_sizes() {
  static const std::vector<std::pair<std::string, std::size_t>> kSizes = {
      {"xho-zul", 1000}, {"zul-sna", 1100}, {"ssw-tsn", 85},
      {"tsn-tso", 285},  {"tso-nso", 212},  {"nso-xho", 200}};
  return kSizes;
}

corpus::BitextCorpus make_toy_corpus(const ToyWorld& world, const LanguageCode& src,
                                     const LanguageCode& tgt, std::size_t n,
                                     std::uint64_t seed, const std::string& name) {
  corpus::BitextCorpus c{name, src, tgt, {}, {}, {}};
  Rng rng(derive_seed(seed, "toy-corpus:" + name));
  c.pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = world.sample(rng);
    c.pairs.push_back({world.render(s, src), world.render(s, tgt)});
  }
  return c;
}

ToyDataset write_toy_dataset(const fs::path& dir, const ToyOptions& options) {
  if (!(options.scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "scale must be positive");
  const ToyWorld world(options.seed);
  const auto scaled = [&](std::size_t n) {
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * options.scale)));
  };
  ToyDataset out;
  for (const char* sub : {"corpora", "new", "dev", "test"}) fs::create_directories(dir / sub);
  auto rel = [&](const fs::path& p) { return fs::relative(p, dir).generic_string(); };

  nlohmann::ordered_json cfg;
  std::vector<std::string> old_paths, new_paths, dev_paths, test_paths;
  for (const auto& [lang, n] : toy_old_sizes()) {
    const LanguageCode l(lang);
    const auto c = make_toy_corpus(world, english(), l, scaled(n), options.seed, "eng-" + lang);
    out.old_corpora.push_back(corpus::write_bitext(c, dir / "corpora"));
    old_paths.push_back(rel(out.old_corpora.back()));
  }
  for (const auto& [key, n] : toy_new_sizes()) {
    const auto d = Direction::parse(key);
    const auto c = make_toy_corpus(world, d.src, d.tgt, scaled(n), options.seed, key);
    out.new_corpora.push_back(corpus::write_bitext(c, dir / "new"));
    new_paths.push_back(rel(out.new_corpora.back()));
  }

  // Multiway dev and test sets: the same base sentences in every language.
  auto multiway = [&](const std::string& label, std::size_t n) {
    Rng rng(derive_seed(options.seed, "toy-multiway:" + label));
    std::vector<ToySentence> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(world.sample(rng));
    return v;
  };
  auto write_multiway = [&](const std::vector<ToySentence>& sents, const Direction& d,
                            const std::string& label, const fs::path& sub) {
    corpus::BitextCorpus c{label + "-" + d.key(), d.src, d.tgt, {}, {}, {}};
    for (const auto& s : sents) c.pairs.push_back({world.render(s, d.src), world.render(s, d.tgt)});
    return corpus::write_bitext(c, sub);
  };
  const auto dev = multiway("dev", options.dev_size);
  const auto test = multiway("test", options.test_size);
  for (const auto& [lang, _] : toy_old_sizes()) {
    const LanguageCode l(lang);
    out.dev.push_back(write_multiway(dev, {english(), l}, "dev", dir / "dev"));
    dev_paths.push_back(rel(out.dev.back()));
  }
  for (const auto& [lang, _] : toy_old_sizes()) {
    const LanguageCode l(lang);
    for (const auto& d : {Direction{english(), l}, Direction{l, english()}}) {
      out.tests.push_back(write_multiway(test, d, "test", dir / "test"));
      test_paths.push_back(rel(out.tests.back()));
    }
  }
  const auto plan = dataset::BalancePlan::default_plan();
  for (const auto& e : plan.entries) {
    out.tests.push_back(write_multiway(test, e.new_direction, "test", dir / "test"));
    test_paths.push_back(rel(out.tests.back()));
  }
  out.plan = dir / "plan.json";
  {
    std::ofstream p(out.plan, std::ios::binary | std::ios::trunc);
    p << plan.to_json();
    if (!p) throw Error(ErrorCode::kIo, "cannot write " + out.plan.string());
  }

  cfg["corpora"] = old_paths;
  cfg["new_corpora"] = new_paths;
  cfg["validation_size"] = options.validation_size;
  cfg["vocab"] = {{"vocab_size", options.vocab_size},
                  {"hrl", {"eng", "xho", "tsn", "sna"}},
                  {"lrl", {"afr", "zul", "ssw", "nso", "tso"}},
                  {"p", -2.0}};
  cfg["stage1"] = {{"seed", 11},
                   {"bilingual_iterations", 10},
                   {"multilingual_iterations", 5},
                   {"dev", dev_paths}};
  cfg["backtranslation"] = {{"mode", "supplement"}, {"models", nlohmann::ordered_json::object()}};
  cfg["pivots"] = {{{"corpus", "eng-afr"}, {"to", "sna"}}, {{"corpus", "eng-ssw"}, {"to", "afr"}}};
  cfg["stage2"] = {{"plan", "plan.json"}, {"seed", 17}, {"iterations", 10}};
  cfg["eval"] = {{"tests", test_paths}};
  cfg["batch_size"] = 64;
  cfg["output_root"] = "run";
  out.config = dir / "config.json";
  write_json(out.config, cfg);
  return out;
}

}  // namespace mtkit::toy
