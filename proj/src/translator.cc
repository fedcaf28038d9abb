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

#include "mtkit/translator.h"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "mtkit/error.h"
#include "mtkit/parallel.h"
#include "mtkit/text.h"

namespace mtkit::translator {
namespace {

std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

// Removes the file on scope exit.
class TempFile {
 public:
  TempFile() {
    const char* dir = std::getenv("TMPDIR");
    std::string pattern = std::string(dir != nullptr ? dir : "/tmp") + "/mtkit-XXXXXX";
    const int fd = mkstemp(pattern.data());
    if (fd < 0) throw Error(ErrorCode::kIo, "cannot create a temporary file");
    close(fd);
    path_ = pattern;
  }
  ~TempFile() { std::remove(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace

std::vector<std::string> TranslatorModel::translate_batch(std::span<const std::string> sentences,
                                                          const LanguageCode& src,
                                                          const LanguageCode& tgt) const {
  const Direction dir{src, tgt};
  if (!supports(dir)) {
    throw Error(ErrorCode::kUnsupportedDirection,
                "model '" + id() + "' does not translate " + dir.key());
  }
  auto out = do_translate(sentences, dir);
  if (out.size() != sentences.size()) {
    throw Error(ErrorCode::kBadModel, "model '" + id() + "' returned " +
                                          std::to_string(out.size()) + " lines for " +
                                          std::to_string(sentences.size()));
  }
  return out;
}

LexiconTranslator::LexiconTranslator(std::shared_ptr<const Lexicon> lexicon, std::string id)
    : lexicon_(std::move(lexicon)), id_(std::move(id)) {
  if (!lexicon_) throw Error(ErrorCode::kInvalidArgument, "null lexicon");
}

std::vector<std::string> LexiconTranslator::do_translate(std::span<const std::string> sentences,
                                                         const Direction&) const {
  std::vector<std::string> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(lexicon_translate(*lexicon_, s));
  return out;
}

MultilingualLexiconModel::MultilingualLexiconModel(
    std::string id, std::set<LanguageCode> languages,
    std::map<Direction, std::shared_ptr<const Lexicon>> lexicons)
    : id_(std::move(id)), languages_(std::move(languages)), lexicons_(std::move(lexicons)) {
  for (const auto& [dir, lex] : lexicons_) {
    if (!lex || lex->direction() != dir) {
      throw Error(ErrorCode::kBadModel, "lexicon stored under the wrong direction " + dir.key());
    }
    languages_.insert(dir.src);
    languages_.insert(dir.tgt);
  }
}

bool MultilingualLexiconModel::supports(const Direction& d) const {
  return d.src != d.tgt && languages_.count(d.src) != 0 && languages_.count(d.tgt) != 0;
}

std::vector<std::string> MultilingualLexiconModel::do_translate(
    std::span<const std::string> sentences, const Direction& direction) const {
  const auto it = lexicons_.find(direction);
  if (it == lexicons_.end()) return {sentences.begin(), sentences.end()};
  std::vector<std::string> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(lexicon_translate(*it->second, s));
  return out;
}

MultilingualLexiconModel train_multilingual(const std::string& id,
                                            const std::vector<DirectionalExamples>& data,
                                            std::size_t iterations,
                                            const MultilingualLexiconModel* warm_start,
                                            unsigned threads) {
  std::map<Direction, std::vector<const corpus::SentencePair*>> grouped;
  for (const auto& d : data) {
    auto& bucket = grouped[d.direction];
    for (const auto& p : d.pairs) bucket.push_back(&p);
  }
  if (grouped.empty()) throw Error(ErrorCode::kEmptyInput, "no training examples");

  std::vector<Direction> dirs;
  for (const auto& [dir, _] : grouped) dirs.push_back(dir);
  std::vector<std::shared_ptr<const Lexicon>> trained(dirs.size());
  parallel_for(dirs.size(), threads, [&](std::size_t k) {
    corpus::BitextCorpus c{dirs[k].key(), dirs[k].src, dirs[k].tgt, {}, {}, {}};
    for (const auto* p : grouped.at(dirs[k])) c.pairs.push_back(*p);
    LexiconOptions opts;
    if (warm_start != nullptr) {
      const auto it = warm_start->lexicons().find(dirs[k]);
      if (it != warm_start->lexicons().end()) opts.warm_start = it->second.get();
    }
    trained[k] = std::make_shared<const Lexicon>(train_lexicon(c, iterations, opts));
  });

  std::map<Direction, std::shared_ptr<const Lexicon>> lexicons;
  std::set<LanguageCode> languages;
  if (warm_start != nullptr) {
    lexicons = warm_start->lexicons();
    languages = warm_start->languages();
  }
  for (std::size_t k = 0; k < dirs.size(); ++k) lexicons[dirs[k]] = trained[k];
  return MultilingualLexiconModel(id, std::move(languages), std::move(lexicons));
}

ExecTranslator::ExecTranslator(std::string command, std::set<Direction> directions)
    : command_(std::move(command)), directions_(std::move(directions)) {
  if (command_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty exec command");
}

std::vector<std::string> ExecTranslator::do_translate(std::span<const std::string> sentences,
                                                      const Direction& direction) const {
  TempFile input;
  {
    std::ofstream out(input.path(), std::ios::binary);
    for (const auto& s : sentences) out << s << '\n';
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + input.path());
  }
  const std::string cmd = "MTKIT_SRC=" + shell_quote(direction.src.str()) +
                          " MTKIT_TGT=" + shell_quote(direction.tgt.str()) + " /bin/sh -c " +
                          shell_quote(command_) + " < " + shell_quote(input.path());
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw Error(ErrorCode::kBadModel, "cannot run '" + command_ + "'");
  std::string output;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
  const int status = pclose(pipe);
  if (status != 0) {
    throw Error(ErrorCode::kBadModel, "'" + command_ + "' exited with status " +
                                          std::to_string(WIFEXITED(status) ? WEXITSTATUS(status)
                                                                            : status));
  }
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < output.size()) {
    std::size_t end = output.find('\n', start);
    if (end == std::string::npos) end = output.size();
    std::string line = output.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  if (lines.size() != sentences.size()) {
    throw Error(ErrorCode::kBadModel, "'" + command_ + "' returned " +
                                          std::to_string(lines.size()) + " lines for " +
                                          std::to_string(sentences.size()));
  }
  return lines;
}

}  // namespace mtkit::translator
