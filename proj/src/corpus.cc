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

#include "mtkit/corpus.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mtkit/error.h"
#include "mtkit/hashing.h"
#include "mtkit/text.h"

namespace mtkit::corpus {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

// Splits file bytes into NFC lines. A final newline does not start a line.
std::vector<std::string> read_lines(const fs::path& path,
                                    const std::string& bytes) {
  if (bytes.size() >= 3 && bytes.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    throw Error(ErrorCode::kBadEncoding, path.string() + " starts with a BOM");
  }
  std::vector<std::string> lines;
  std::size_t begin = 0;
  while (begin < bytes.size()) {
    std::size_t end = bytes.find('\n', begin);
    if (end == std::string::npos) end = bytes.size();
    std::string_view line(bytes.data() + begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    try {
      lines.push_back(text::nfc(line));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + " line " +
                                std::to_string(lines.size() + 1) + ": " +
                                e.what());
    }
    begin = end + 1;
  }
  return lines;
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "corpus" : out;
}

ordered_json provenance_json(const Provenance& p) {
  ordered_json j;
  j["kind"] = p.is_synthetic() ? "synthetic" : "real";
  if (p.generator_id) j["generator_id"] = *p.generator_id;
  return j;
}

Provenance parse_provenance(const nlohmann::json& j, const char* field) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorCode::kBadManifest,
                std::string(field) + " must be an object with a 'kind'");
  }
  Provenance p;
  const auto kind = j["kind"].get<std::string>();
  if (kind == "real") {
    p.kind = ProvenanceKind::kReal;
  } else if (kind == "synthetic") {
    p.kind = ProvenanceKind::kSynthetic;
  } else {
    throw Error(ErrorCode::kBadManifest,
                std::string(field) + ".kind must be real or synthetic");
  }
  if (j.contains("generator_id")) {
    if (!j["generator_id"].is_string()) {
      throw Error(ErrorCode::kBadManifest,
                  std::string(field) + ".generator_id must be a string");
    }
    p.generator_id = j["generator_id"].get<std::string>();
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kBadManifest, std::string(field) + ": " + e.what());
  }
  return p;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& line : lines) {
    out += text::nfc(line);
    out.push_back('\n');
  }
  return out;
}

const std::string& string_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw Error(ErrorCode::kBadManifest,
                std::string("missing string field '") + key + "'");
  }
  return j[key].get_ref<const std::string&>();
}

LanguageCode manifest_language(const nlohmann::json& j, const char* key) {
  try {
    return LanguageCode(string_field(j, key));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBadManifest) throw;
    throw Error(ErrorCode::kBadManifest, std::string(key) + ": " + e.what());
  }
}

}  // namespace

void Provenance::validate() const {
  if (is_synthetic() && (!generator_id || generator_id->empty())) {
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic provenance requires a generator_id");
  }
  if (!is_synthetic() && generator_id) {
    throw Error(ErrorCode::kInvalidArgument,
                "real provenance must not carry a generator_id");
  }
}

std::vector<std::string> BitextCorpus::src_side() const {
  std::vector<std::string> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.src);
  return out;
}

std::vector<std::string> BitextCorpus::tgt_side() const {
  std::vector<std::string> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.tgt);
  return out;
}

void validate_sentence(const std::string& s, std::size_t line,
                       const char* side) {
  if (s.find('\n') != std::string::npos || s.find('\r') != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(side) + " line " + std::to_string(line) +
                    " contains a newline");
  }
  if (text::is_blank(s)) {
    throw Error(ErrorCode::kEmptyLine, std::string(side) + " line " +
                                           std::to_string(line) + " is empty");
  }
}

void BitextCorpus::validate() const {
  if (src_lang == tgt_lang) {
    throw Error(ErrorCode::kLanguageMismatch,
                "corpus '" + name + "' has identical source and target "
                "language " + src_lang.str());
  }
  src_provenance.validate();
  tgt_provenance.validate();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    validate_sentence(pairs[i].src, i + 1, "src");
    validate_sentence(pairs[i].tgt, i + 1, "tgt");
  }
}

BitextCorpus load_bitext(const fs::path& manifest_path) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kBadManifest,
                manifest_path.string() + ": " + e.what());
  }
  if (!m.is_object()) {
    throw Error(ErrorCode::kBadManifest,
                manifest_path.string() + ": manifest must be a JSON object");
  }
  const fs::path base = manifest_path.parent_path();
  const fs::path src_path = base / string_field(m, "src_file");
  const fs::path tgt_path = base / string_field(m, "tgt_file");

  BitextCorpus corpus{
      .name = string_field(m, "name"),
      .src_lang = manifest_language(m, "src_lang"),
      .tgt_lang = manifest_language(m, "tgt_lang"),
      .pairs = {},
      .src_provenance = m.contains("src_provenance")
                            ? parse_provenance(m["src_provenance"],
                                               "src_provenance")
                            : Provenance::real(),
      .tgt_provenance = m.contains("tgt_provenance")
                            ? parse_provenance(m["tgt_provenance"],
                                               "tgt_provenance")
                            : Provenance::real(),
  };
  if (corpus.src_lang == corpus.tgt_lang) {
    throw Error(ErrorCode::kBadManifest, "src_lang equals tgt_lang");
  }

  const std::string src_bytes = read_file(src_path);
  const std::string tgt_bytes = read_file(tgt_path);
  for (const auto& [key, bytes, path] :
       {std::tuple{"src_sha256", &src_bytes, &src_path},
        std::tuple{"tgt_sha256", &tgt_bytes, &tgt_path}}) {
    if (m.contains(key)) {
      if (!m[key].is_string() || m[key].get<std::string>() != sha256_hex(*bytes)) {
        throw Error(ErrorCode::kBadManifest,
                    std::string(key) + " does not match " + path->string());
      }
    }
  }

  const auto src_lines = read_lines(src_path, src_bytes);
  const auto tgt_lines = read_lines(tgt_path, tgt_bytes);
  if (src_lines.size() != tgt_lines.size()) {
    throw Error(ErrorCode::kMisalignedFiles,
                src_path.string() + " has " + std::to_string(src_lines.size()) +
                    " lines but " + tgt_path.string() + " has " +
                    std::to_string(tgt_lines.size()));
  }
  if (m.contains("pair_count")) {
    if (!m["pair_count"].is_number_unsigned() ||
        m["pair_count"].get<std::size_t>() != src_lines.size()) {
      throw Error(ErrorCode::kBadManifest,
                  "pair_count does not match the line count " +
                      std::to_string(src_lines.size()));
    }
  }
  corpus.pairs.reserve(src_lines.size());
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    validate_sentence(src_lines[i], i + 1, src_path.string().c_str());
    validate_sentence(tgt_lines[i], i + 1, tgt_path.string().c_str());
    corpus.pairs.push_back({src_lines[i], tgt_lines[i]});
  }
  return corpus;
}

fs::path write_bitext(const BitextCorpus& corpus, const fs::path& dir) {
  corpus.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string());

  const std::string stem = sanitize(corpus.name);
  const std::string src_name = stem + "." + corpus.src_lang.str();
  const std::string tgt_name = stem + "." + corpus.tgt_lang.str();
  const std::string src_bytes = join_lines(corpus.src_side());
  const std::string tgt_bytes = join_lines(corpus.tgt_side());
  write_file(dir / src_name, src_bytes);
  write_file(dir / tgt_name, tgt_bytes);

  ordered_json m;
  m["name"] = corpus.name;
  m["src_lang"] = corpus.src_lang.str();
  m["tgt_lang"] = corpus.tgt_lang.str();
  m["src_file"] = src_name;
  m["tgt_file"] = tgt_name;
  m["src_provenance"] = provenance_json(corpus.src_provenance);
  m["tgt_provenance"] = provenance_json(corpus.tgt_provenance);
  m["pair_count"] = corpus.size();
  m["src_sha256"] = sha256_hex(src_bytes);
  m["tgt_sha256"] = sha256_hex(tgt_bytes);
  const fs::path manifest = dir / (stem + ".json");
  write_file(manifest, m.dump(2) + "\n");
  return manifest;
}

fs::path import_bitext(const fs::path& src_file, const fs::path& tgt_file,
                       const LanguageCode& src_lang,
                       const LanguageCode& tgt_lang, const std::string& name,
                       const fs::path& out_dir) {
  const std::string src_bytes = read_file(src_file);
  const std::string tgt_bytes = read_file(tgt_file);
  BitextCorpus corpus{.name = name,
                      .src_lang = src_lang,
                      .tgt_lang = tgt_lang,
                      .pairs = {},
                      .src_provenance = Provenance::real(),
                      .tgt_provenance = Provenance::real()};
  const auto src_lines = read_lines(src_file, src_bytes);
  const auto tgt_lines = read_lines(tgt_file, tgt_bytes);
  if (src_lines.size() != tgt_lines.size()) {
    throw Error(ErrorCode::kMisalignedFiles,
                std::to_string(src_lines.size()) + " vs " +
                    std::to_string(tgt_lines.size()) + " lines");
  }
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    corpus.pairs.push_back({src_lines[i], tgt_lines[i]});
  }
  return write_bitext(corpus, out_dir);
}

ValidationSplit split_validation(const BitextCorpus& corpus, std::size_t n) {
  const std::size_t cut = std::min(n, corpus.size());
  ValidationSplit split{corpus, corpus};
  split.valid.name = corpus.name + ".valid";
  split.train.name = corpus.name + ".train";
  split.valid.pairs.assign(corpus.pairs.begin(), corpus.pairs.begin() + cut);
  split.train.pairs.assign(corpus.pairs.begin() + cut, corpus.pairs.end());
  return split;
}

CorpusStats corpus_stats(const BitextCorpus& corpus) {
  CorpusStats s;
  s.pair_count = corpus.size();
  for (const auto& p : corpus.pairs) {
    s.src_chars += text::code_point_count(p.src);
    s.tgt_chars += text::code_point_count(p.tgt);
    s.src_tokens += text::split_whitespace(p.src).size();
    s.tgt_tokens += text::split_whitespace(p.tgt).size();
  }
  return s;
}

BitextCorpus reversed(const BitextCorpus& corpus) {
  BitextCorpus out{.name = corpus.name,
                   .src_lang = corpus.tgt_lang,
                   .tgt_lang = corpus.src_lang,
                   .pairs = {},
                   .src_provenance = corpus.tgt_provenance,
                   .tgt_provenance = corpus.src_provenance};
  out.pairs.reserve(corpus.size());
  for (const auto& p : corpus.pairs) out.pairs.push_back({p.tgt, p.src});
  return out;
}

BitextCorpus oriented(const BitextCorpus& corpus, const Direction& direction) {
  if (corpus.src_lang == direction.src && corpus.tgt_lang == direction.tgt) {
    return corpus;
  }
  if (corpus.src_lang == direction.tgt && corpus.tgt_lang == direction.src) {
    return reversed(corpus);
  }
  throw Error(ErrorCode::kLanguageMismatch,
              "corpus '" + corpus.name + "' (" + corpus.direction().key() +
                  ") cannot serve direction " + direction.key());
}

CleanResult clean(const BitextCorpus& corpus, const CleanOptions& options) {
  CleanResult result{corpus, 0};
  result.corpus.pairs.clear();
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& p : corpus.pairs) {
    const double a = static_cast<double>(text::split_whitespace(p.src).size());
    const double b = static_cast<double>(text::split_whitespace(p.tgt).size());
    const bool ratio_ok = std::max(a, b) <= options.max_length_ratio * std::min(a, b);
    const bool fresh = !options.dedup || seen.emplace(p.src, p.tgt).second;
    if (ratio_ok && fresh) {
      result.corpus.pairs.push_back(p);
    } else {
      ++result.removed;
    }
  }
  return result;
}

}  // namespace mtkit::corpus
