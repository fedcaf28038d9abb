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

#include "mtkit/pipeline.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mtkit/corpus.h"
#include "mtkit/dataset_builder.h"
#include "mtkit/error.h"
#include "mtkit/hashing.h"
#include "mtkit/parallel.h"
#include "mtkit/synthesis.h"
#include "mtkit/translator.h"
#include "mtkit/vocab_metrics.h"

namespace mtkit::pipeline {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using corpus::BitextCorpus;
using dataset::CorpusRef;

// Schema reader that records problems instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<ConfigIssue>& issues) : issues_(issues) {}

  void issue(const std::string& field, const std::string& message) {
    issues_.push_back({field, message});
  }

  const json* get(const json& obj, const std::string& key, const std::string& field,
                  bool required) {
    if (!obj.is_object()) return nullptr;
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) issue(field, "missing required field");
      return nullptr;
    }
    return &*it;
  }

  template <typename T>
  std::optional<T> scalar(const json& obj, const std::string& key, const std::string& field,
                          bool required) {
    const json* v = get(obj, key, field, required);
    if (v == nullptr) return std::nullopt;
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v->is_string()) return bad(field, "expected a string");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v->is_number()) return bad(field, "expected a number");
    } else {
      if (!v->is_number_unsigned()) return bad(field, "expected a non-negative integer");
    }
    return v->get<T>();
  }

  std::vector<std::string> strings(const json& obj, const std::string& key,
                                   const std::string& field, bool required) {
    std::vector<std::string> out;
    const json* v = get(obj, key, field, required);
    if (v == nullptr) return out;
    if (!v->is_array()) {
      issue(field, "expected a list of strings");
      return out;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) {
        issue(field + "[" + std::to_string(i) + "]", "expected a string");
        continue;
      }
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

  std::optional<LanguageCode> language(const std::string& code, const std::string& field) {
    try {
      return LanguageCode(code);
    } catch (const Error& e) {
      issue(field, e.what());
      return std::nullopt;
    }
  }

  std::set<LanguageCode> languages(const json& obj, const std::string& key,
                                   const std::string& field) {
    std::set<LanguageCode> out;
    const auto codes = strings(obj, key, field, true);
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (auto l = language(codes[i], field + "[" + std::to_string(i) + "]")) out.insert(*l);
    }
    return out;
  }

  const json* object(const json& obj, const std::string& key, const std::string& field,
                     bool required) {
    const json* v = get(obj, key, field, required);
    if (v != nullptr && !v->is_object()) {
      issue(field, "expected an object");
      return nullptr;
    }
    return v;
  }

 private:
  std::nullopt_t bad(const std::string& field, const std::string& message) {
    issue(field, message);
    return std::nullopt;
  }

  std::vector<ConfigIssue>& issues_;
};

PipelineConfig parse_config(const json& j, const fs::path& base_dir,
                            std::vector<ConfigIssue>& issues) {
  Reader r(issues);
  PipelineConfig cfg;
  cfg.base_dir = base_dir;
  if (!j.is_object()) {
    r.issue("", "config must be a JSON object");
    return cfg;
  }
  cfg.corpora = r.strings(j, "corpora", "corpora", true);
  if (j.contains("corpora") && cfg.corpora.empty()) r.issue("corpora", "list is empty");
  cfg.new_corpora = r.strings(j, "new_corpora", "new_corpora", false);
  cfg.validation_size =
      r.scalar<std::size_t>(j, "validation_size", "validation_size", false).value_or(3000);
  cfg.batch_size = r.scalar<std::size_t>(j, "batch_size", "batch_size", false).value_or(64);
  if (cfg.batch_size == 0) r.issue("batch_size", "must be positive");
  cfg.output_root = r.scalar<std::string>(j, "output_root", "output_root", false).value_or("run");

  if (const json* v = r.object(j, "vocab", "vocab", true)) {
    cfg.vocab.vocab_size =
        r.scalar<std::size_t>(*v, "vocab_size", "vocab.vocab_size", false).value_or(40000);
    cfg.vocab.hrl_langs = r.languages(*v, "hrl", "vocab.hrl");
    cfg.vocab.lrl_langs = r.languages(*v, "lrl", "vocab.lrl");
    cfg.vocab.mean_exponent_p = r.scalar<double>(*v, "p", "vocab.p", false).value_or(-2.0);
    try {
      cfg.vocab.validate();
    } catch (const Error& e) {
      r.issue("vocab", e.what());
    }
  }
  if (const json* v = r.object(j, "stage1", "stage1", true)) {
    if (auto s = r.scalar<std::uint64_t>(*v, "seed", "stage1.seed", true)) cfg.stage1_seed = *s;
    cfg.bilingual_iterations =
        r.scalar<std::size_t>(*v, "bilingual_iterations", "stage1.bilingual_iterations", false)
            .value_or(10);
    cfg.multilingual_iterations =
        r.scalar<std::size_t>(*v, "multilingual_iterations", "stage1.multilingual_iterations",
                              false)
            .value_or(5);
    if (cfg.bilingual_iterations == 0) r.issue("stage1.bilingual_iterations", "must be positive");
    if (cfg.multilingual_iterations == 0) {
      r.issue("stage1.multilingual_iterations", "must be positive");
    }
    cfg.dev = r.strings(*v, "dev", "stage1.dev", true);
  }
  if (const json* v = r.object(j, "backtranslation", "backtranslation", false)) {
    const auto mode = r.scalar<std::string>(*v, "mode", "backtranslation.mode", false);
    if (mode && *mode == "replace") {
      cfg.backtranslation_mode = BacktranslationMode::kReplace;
    } else if (mode && *mode != "supplement") {
      r.issue("backtranslation.mode", "expected \"supplement\" or \"replace\"");
    }
    if (const json* m = r.object(*v, "models", "backtranslation.models", false)) {
      for (const auto& [key, spec] : m->items()) {
        const std::string field = "backtranslation.models." + key;
        try {
          Direction::parse(key);
        } catch (const Error& e) {
          r.issue(field, e.what());
          continue;
        }
        if (!spec.is_string()) {
          r.issue(field, "expected a model spec string");
          continue;
        }
        cfg.backtranslation_models[key] = spec.get<std::string>();
      }
    }
  }
  if (const json* v = r.get(j, "pivots", "pivots", false)) {
    if (!v->is_array()) {
      r.issue("pivots", "expected a list");
    } else {
      for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string field = "pivots[" + std::to_string(i) + "]";
        const auto name = r.scalar<std::string>((*v)[i], "corpus", field + ".corpus", true);
        const auto to = r.scalar<std::string>((*v)[i], "to", field + ".to", true);
        if (!name || !to) continue;
        if (auto l = r.language(*to, field + ".to")) cfg.pivots.push_back({*name, *l});
      }
    }
  }
  if (const json* v = r.object(j, "stage2", "stage2", true)) {
    cfg.plan = r.scalar<std::string>(*v, "plan", "stage2.plan", true).value_or("");
    if (auto s = r.scalar<std::uint64_t>(*v, "seed", "stage2.seed", true)) cfg.stage2_seed = *s;
    cfg.stage2_iterations =
        r.scalar<std::size_t>(*v, "iterations", "stage2.iterations", false).value_or(10);
    if (cfg.stage2_iterations == 0) r.issue("stage2.iterations", "must be positive");
    cfg.default_cap = r.scalar<std::size_t>(*v, "default_cap", "stage2.default_cap", false);
  }
  if (const json* v = r.object(j, "eval", "eval", true)) {
    cfg.tests = r.strings(*v, "tests", "eval.tests", true);
  }
  return cfg;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

std::vector<translator::DirectionalExamples> group_examples(
    const std::vector<dataset::ExportedExample>& examples) {
  std::map<Direction, std::vector<corpus::SentencePair>> grouped;
  for (const auto& e : examples) grouped[e.direction].push_back({e.src, e.tgt});
  std::vector<translator::DirectionalExamples> out;
  for (auto& [d, pairs] : grouped) out.push_back({d, std::move(pairs)});
  return out;
}

std::vector<CorpusRef> refs(const std::vector<BitextCorpus>& corpora) {
  std::vector<CorpusRef> out;
  for (const auto& c : corpora) out.push_back(std::make_shared<const BitextCorpus>(c));
  return out;
}

// Writes run_log.json after every step so that a failed run keeps a record.
class Runner {
 public:
  Runner(fs::path run_dir, fs::path base_dir)
      : run_dir_(std::move(run_dir)), base_dir_(std::move(base_dir)) {}

  const fs::path& run_dir() const { return run_dir_; }
  fs::path dir(const std::string& sub) const { return run_dir_ / sub; }

  void step(const std::string& name, const std::vector<fs::path>& inputs, const std::string& sub,
            const std::function<void(const fs::path&)>& fn) {
    ordered_json entry;
    entry["step"] = name;
    entry["inputs"] = checksums(inputs);
    const fs::path out = dir(sub);
    try {
      fs::create_directories(out);
      fn(out);
    } catch (const std::exception& e) {
      entry["status"] = "failed";
      entry["error"] = e.what();
      log_.push_back(entry);
      flush();
      throw StepError(name, e.what());
    }
    std::vector<fs::path> files;
    for (const auto& f : fs::recursive_directory_iterator(out)) {
      if (f.is_regular_file()) files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    entry["status"] = "ok";
    entry["outputs"] = checksums(files);
    log_.push_back(entry);
    flush();
  }

 private:
  std::string label(const fs::path& p) const {
    const auto rel = p.lexically_relative(run_dir_);
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
    return "config:" + p.lexically_relative(base_dir_).generic_string();
  }

  ordered_json checksums(const std::vector<fs::path>& files) const {
    ordered_json j = ordered_json::array();
    for (const auto& f : files) {
      j.push_back({{"path", label(f)},
                   {"sha256", fs::exists(f) ? sha256_file(f) : std::string("missing")}});
    }
    return j;
  }

  void flush() const {
    ordered_json j;
    j["steps"] = log_;
    write_file(run_dir_ / "run_log.json", j.dump(2) + "\n");
  }

  fs::path run_dir_;
  fs::path base_dir_;
  ordered_json log_ = ordered_json::array();
};

std::vector<fs::path> resolve_all(const PipelineConfig& cfg, const std::vector<std::string>& v) {
  std::vector<fs::path> out;
  for (const auto& p : v) out.push_back(cfg.resolve(p));
  return out;
}

std::vector<fs::path> manifest_and_text(const std::vector<fs::path>& manifests) {
  std::vector<fs::path> out;
  for (const auto& m : manifests) {
    out.push_back(m);
    try {
      const auto j = json::parse(read_file(m));
      out.push_back(m.parent_path() / j.at("src_file").get<std::string>());
      out.push_back(m.parent_path() / j.at("tgt_file").get<std::string>());
    } catch (const std::exception&) {
      // load_bitext reports the problem.
    }
  }
  return out;
}

std::vector<fs::path> files_in(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& f : fs::recursive_directory_iterator(dir)) {
    if (f.is_regular_file() && f.path().filename() != "run_log.json") out.push_back(f.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string bt_mode_name(BacktranslationMode m) {
  return m == BacktranslationMode::kReplace ? "replace" : "supplement";
}

}  // namespace

fs::path PipelineConfig::resolve(const std::string& path) const {
  const fs::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

PipelineConfig PipelineConfig::from_json(std::string_view text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  std::vector<ConfigIssue> issues;
  auto cfg = parse_config(j, base_dir, issues);
  if (!issues.empty()) {
    throw Error(ErrorCode::kConfig, issues.front().field + ": " + issues.front().message);
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  return from_json(read_file(path), fs::absolute(path).parent_path());
}

std::string PipelineConfig::to_json() const {
  ordered_json j;
  j["corpora"] = corpora;
  j["new_corpora"] = new_corpora;
  j["validation_size"] = validation_size;
  std::vector<std::string> hrl, lrl;
  for (const auto& l : vocab.hrl_langs) hrl.push_back(l.str());
  for (const auto& l : vocab.lrl_langs) lrl.push_back(l.str());
  j["vocab"] = {{"vocab_size", vocab.vocab_size},
                {"hrl", hrl},
                {"lrl", lrl},
                {"p", vocab.mean_exponent_p}};
  j["stage1"] = {{"seed", stage1_seed},
                 {"bilingual_iterations", bilingual_iterations},
                 {"multilingual_iterations", multilingual_iterations},
                 {"dev", dev}};
  ordered_json models = ordered_json::object();
  for (const auto& [k, v] : backtranslation_models) models[k] = v;
  j["backtranslation"] = {{"mode", bt_mode_name(backtranslation_mode)}, {"models", models}};
  j["pivots"] = ordered_json::array();
  for (const auto& p : pivots) j["pivots"].push_back({{"corpus", p.corpus}, {"to", p.to.str()}});
  j["stage2"] = {{"plan", plan}, {"seed", stage2_seed}, {"iterations", stage2_iterations}};
  if (default_cap) j["stage2"]["default_cap"] = *default_cap;
  j["eval"] = {{"tests", tests}};
  j["batch_size"] = batch_size;
  return j.dump(2) + "\n";
}

std::vector<ConfigIssue> validate_config(const fs::path& path) {
  std::vector<ConfigIssue> issues;
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    return {{"", e.what()}};
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    return {{"", e.what()}};
  }
  const auto cfg = parse_config(j, fs::absolute(path).parent_path(), issues);
  if (!issues.empty()) return issues;

  auto check_paths = [&](const std::vector<std::string>& paths, const std::string& field) {
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (!fs::exists(cfg.resolve(paths[i]))) {
        issues.push_back({field + "[" + std::to_string(i) + "]", "no such file: " + paths[i]});
      }
    }
  };
  check_paths(cfg.corpora, "corpora");
  check_paths(cfg.new_corpora, "new_corpora");
  check_paths(cfg.dev, "stage1.dev");
  check_paths(cfg.tests, "eval.tests");
  if (!fs::exists(cfg.resolve(cfg.plan))) {
    issues.push_back({"stage2.plan", "no such file: " + cfg.plan});
  } else {
    try {
      dataset::BalancePlan::load(cfg.resolve(cfg.plan)).validate();
    } catch (const Error& e) {
      issues.push_back({"stage2.plan", e.what()});
    }
  }

  // Manifest languages and names, read without loading the text.
  std::set<std::string> names;
  std::set<LanguageCode> data_langs;
  for (std::size_t i = 0; i < cfg.corpora.size(); ++i) {
    const auto p = cfg.resolve(cfg.corpora[i]);
    if (!fs::exists(p)) continue;
    const std::string field = "corpora[" + std::to_string(i) + "]";
    try {
      const auto m = json::parse(read_file(p));
      names.insert(m.at("name").get<std::string>());
      const LanguageCode a(m.at("src_lang").get<std::string>());
      const LanguageCode b(m.at("tgt_lang").get<std::string>());
      if (!a.is_english() && !b.is_english()) {
        issues.push_back({field, "English-centric corpus has no eng side"});
      }
      data_langs.insert(a);
      data_langs.insert(b);
    } catch (const std::exception& e) {
      issues.push_back({field, std::string("bad manifest: ") + e.what()});
    }
  }
  for (const auto& l : data_langs) {
    if (cfg.vocab.hrl_langs.count(l) == 0 && cfg.vocab.lrl_langs.count(l) == 0) {
      issues.push_back({"vocab", "language " + l.str() + " is in neither hrl nor lrl"});
    }
  }
  for (std::size_t i = 0; i < cfg.pivots.size(); ++i) {
    if (names.count(cfg.pivots[i].corpus) == 0) {
      issues.push_back({"pivots[" + std::to_string(i) + "].corpus",
                        "no corpus named '" + cfg.pivots[i].corpus + "'"});
    }
  }
  return issues;
}

RunResult run_pipeline(const PipelineConfig& cfg, const RunOptions& options) {
  const fs::path run_dir =
      options.output_root ? *options.output_root : cfg.resolve(cfg.output_root);
  fs::create_directories(run_dir);
  Runner runner(fs::absolute(run_dir), cfg.base_dir);
  const unsigned threads = std::max(1u, options.threads);
  RunResult result;
  result.run_dir = run_dir;

  std::vector<BitextCorpus> old_train, new_train;
  runner.step("config", {}, "00-config", [&](const fs::path& out) {
    write_file(out / "config.json", cfg.to_json());
  });

  const auto old_manifests = resolve_all(cfg, cfg.corpora);
  const auto new_manifests = resolve_all(cfg, cfg.new_corpora);
  std::vector<fs::path> split_inputs = manifest_and_text(old_manifests);
  for (const auto& p : manifest_and_text(new_manifests)) split_inputs.push_back(p);
  runner.step("split-validation", split_inputs, "01-split", [&](const fs::path& out) {
    auto split_all = [&](const std::vector<fs::path>& manifests, std::vector<BitextCorpus>& dst,
                         const std::string& sub) {
      for (const auto& m : manifests) {
        auto split = corpus::split_validation(corpus::load_bitext(m), cfg.validation_size);
        corpus::write_bitext(split.valid, out / sub);
        corpus::write_bitext(split.train, out / sub);
        dst.push_back(std::move(split.train));
      }
    };
    split_all(old_manifests, old_train, "old");
    split_all(new_manifests, new_train, "new");
  });

  std::unique_ptr<vocab::Vocabulary> bpe, obpe;
  const auto vocab_data = vocab::LangCorpusSet::from_corpora(old_train);
  const vocab::TrainOptions train_opts{threads};
  runner.step("vocab-bpe", files_in(runner.dir("01-split/old")), "02-vocab-bpe",
              [&](const fs::path& out) {
                bpe = std::make_unique<vocab::Vocabulary>(
                    vocab::train_bpe(vocab_data, cfg.vocab, train_opts));
                bpe->save(out / "bpe.json");
              });
  runner.step("vocab-obpe", files_in(runner.dir("01-split/old")), "02-vocab-obpe",
              [&](const fs::path& out) {
                obpe = std::make_unique<vocab::Vocabulary>(
                    vocab::train_obpe(vocab_data, cfg.vocab, train_opts));
                obpe->save(out / "obpe.json");
              });
  const fs::path obpe_path = runner.dir("02-vocab-obpe/obpe.json");

  runner.step("vocab-report",
              {runner.dir("02-vocab-bpe/bpe.json"), obpe_path}, "03-vocab-report",
              [&](const fs::path& out) {
                const auto report = vocab_metrics::vocab_report(old_train, *bpe, *obpe, threads);
                write_file(out / "report.json", report.to_json());
                write_file(out / "report.txt", report.to_table());
              });

  runner.step("stage1-mixture", {obpe_path}, "04-stage1-mixture", [&](const fs::path& out) {
    const auto mix = dataset::build_stage1_mixture(refs(old_train), obpe.get(), cfg.stage1_seed);
    dataset::export_mixture(mix, out, threads);
  });

  std::unique_ptr<translator::MultilingualLexiconModel> stage1;
  std::map<Direction, std::unique_ptr<translator::LexiconTranslator>> bilingual;
  runner.step("stage1-train", files_in(runner.dir("04-stage1-mixture")), "05-stage1-train",
              [&](const fs::path& out) {
                const auto data =
                    group_examples(dataset::read_exported_mixture(runner.dir("04-stage1-mixture")));
                stage1 = std::make_unique<translator::MultilingualLexiconModel>(
                    translator::train_multilingual("m-stage1", data, cfg.multilingual_iterations,
                                                   nullptr, threads));
                stage1->save(out / "multilingual.json");
                std::vector<std::shared_ptr<const translator::Lexicon>> lex(data.size());
                parallel_for(data.size(), threads, [&](std::size_t k) {
                  BitextCorpus c{data[k].direction.key(), data[k].direction.src,
                                 data[k].direction.tgt, data[k].pairs, {}, {}};
                  lex[k] = std::make_shared<const translator::Lexicon>(
                      translator::train_lexicon(c, cfg.bilingual_iterations));
                });
                for (std::size_t k = 0; k < data.size(); ++k) {
                  const auto& d = data[k].direction;
                  lex[k]->save(out / ("bi-" + d.key() + ".json"));
                  bilingual[d] =
                      std::make_unique<translator::LexiconTranslator>(lex[k], "bi-" + d.key());
                }
              });

  // Back-translation model per direction: the dev-set winner unless the
  // config names one.
  std::map<Direction, const translator::TranslatorModel*> chosen;
  std::vector<std::unique_ptr<translator::TranslatorModel>> overrides;
  const auto dev_manifests = resolve_all(cfg, cfg.dev);
  runner.step("stage1-select", manifest_and_text(dev_manifests), "06-stage1-select",
              [&](const fs::path& out) {
                ordered_json sel = ordered_json::object();
                for (const auto& m : dev_manifests) {
                  const auto dev = corpus::load_bitext(m);
                  for (const auto& d : {dev.direction(), dev.direction().reversed()}) {
                    std::vector<eval::Candidate> candidates;
                    const auto it = bilingual.find(d);
                    if (it != bilingual.end()) candidates.push_back({it->second.get(), it->second->id()});
                    candidates.push_back({stage1.get(), stage1->id()});
                    const auto best = eval::select_best(candidates, dev, d);
                    chosen[d] = candidates[best.index].model;
                    ordered_json scores = ordered_json::object();
                    for (std::size_t i = 0; i < candidates.size(); ++i) {
                      scores[candidates[i].name] = best.scores[i];
                    }
                    sel[d.key()] = {{"selected", best.name}, {"dev_bleu", scores}};
                  }
                }
                for (const auto& [key, spec] : cfg.backtranslation_models) {
                  const bool exec = spec.rfind("exec:", 0) == 0 || spec == "identity";
                  overrides.push_back(
                      translator::load_model(exec ? spec : cfg.resolve(spec).string()));
                  chosen[Direction::parse(key)] = overrides.back().get();
                  sel[key] = {{"selected", overrides.back()->id()}, {"override", spec}};
                }
                write_file(out / "selection.json", sel.dump(2) + "\n");
              });

  const synthesis::SynthesisOptions synth_opts{cfg.batch_size, threads};
  auto model_for = [&](const Direction& d) -> const translator::TranslatorModel& {
    const auto it = chosen.find(d);
    return it != chosen.end() ? *it->second : *stage1;
  };
  std::vector<BitextCorpus> bt;
  runner.step("backtranslation", files_in(runner.dir("06-stage1-select")), "07-backtranslation",
              [&](const fs::path& out) {
                for (const auto& c : old_train) {
                  const LanguageCode x = c.src_lang.is_english() ? c.tgt_lang : c.src_lang;
                  const auto eng_x = corpus::oriented(c, {english(), x});
                  auto fwd = synthesis::backtranslate(eng_x, model_for({x, english()}), synth_opts);
                  fwd.name = "bt-eng-" + x.str();
                  auto rev = synthesis::backtranslate(corpus::reversed(eng_x),
                                                      model_for({english(), x}), synth_opts);
                  rev.name = "bt-" + x.str() + "-eng";
                  corpus::write_bitext(fwd, out);
                  corpus::write_bitext(rev, out);
                  bt.push_back(std::move(fwd));
                  bt.push_back(std::move(rev));
                }
              });

  std::unique_ptr<translator::MultilingualLexiconModel> back;
  std::vector<fs::path> back_inputs = files_in(runner.dir("07-backtranslation"));
  back_inputs.push_back(runner.dir("05-stage1-train/multilingual.json"));
  runner.step("stage1-back-train", back_inputs, "08-stage1-back-train", [&](const fs::path& out) {
    std::vector<BitextCorpus> corpora;
    if (cfg.backtranslation_mode == BacktranslationMode::kSupplement) corpora = old_train;
    corpora.insert(corpora.end(), bt.begin(), bt.end());
    const auto mix = dataset::build_stage1_mixture(refs(corpora), obpe.get(), cfg.stage1_seed);
    dataset::export_mixture(mix, out / "mixture", threads);
    const auto data = group_examples(dataset::read_exported_mixture(out / "mixture"));
    back = std::make_unique<translator::MultilingualLexiconModel>(translator::train_multilingual(
        "m-back", data, cfg.multilingual_iterations, stage1.get(), threads));
    back->save(out / "model.json");
  });

  std::vector<BitextCorpus> tests;
  const auto test_manifests = resolve_all(cfg, cfg.tests);
  auto test_inputs = manifest_and_text(test_manifests);
  test_inputs.push_back(runner.dir("08-stage1-back-train/model.json"));
  runner.step("eval-before", test_inputs, "09-eval-before", [&](const fs::path& out) {
    for (const auto& m : test_manifests) tests.push_back(corpus::load_bitext(m));
    result.before = eval::evaluate_directions(*back, tests, *obpe, threads);
    write_file(out / "report.json", result.before.to_json());
    write_file(out / "report.txt", result.before.to_table());
  });

  std::vector<BitextCorpus> pivots;
  runner.step("pivot-synthesis", {runner.dir("08-stage1-back-train/model.json")},
              "10-pivot-synthesis", [&](const fs::path& out) {
                for (const auto& p : cfg.pivots) {
                  const auto it = std::find_if(old_train.begin(), old_train.end(), [&](const auto& c) {
                    return c.name == p.corpus || c.name == p.corpus + ".train";
                  });
                  if (it == old_train.end()) {
                    throw Error(ErrorCode::kMissingCorpus, "no corpus named '" + p.corpus + "'");
                  }
                  auto syn = synthesis::pivot_synthesize(*it, *back, p.to, synth_opts);
                  syn.name = "pivot-" + syn.src_lang.str() + "-" + syn.tgt_lang.str();
                  corpus::write_bitext(syn, out);
                  pivots.push_back(std::move(syn));
                }
              });

  std::vector<fs::path> balance_inputs = files_in(runner.dir("10-pivot-synthesis"));
  balance_inputs.push_back(cfg.resolve(cfg.plan));
  runner.step("stage2-balance", balance_inputs, "11-stage2-balance", [&](const fs::path& out) {
    const auto plan = dataset::BalancePlan::load(cfg.resolve(cfg.plan));
    for (const auto& e : plan.entries) result.new_directions.push_back(e.new_direction);
    std::vector<BitextCorpus> fresh = new_train;
    fresh.insert(fresh.end(), pivots.begin(), pivots.end());
    dataset::Stage2Options opts;
    opts.seed = cfg.stage2_seed;
    opts.default_cap = cfg.default_cap;
    const auto mix =
        dataset::build_stage2_mixture(refs(old_train), refs(fresh), plan, opts, obpe.get());
    dataset::export_mixture(mix, out, threads);
  });

  std::unique_ptr<translator::MultilingualLexiconModel> final_model;
  std::vector<fs::path> s2_inputs = files_in(runner.dir("11-stage2-balance"));
  s2_inputs.push_back(runner.dir("08-stage1-back-train/model.json"));
  runner.step("stage2-train", s2_inputs, "12-stage2-train", [&](const fs::path& out) {
    const auto data = group_examples(dataset::read_exported_mixture(runner.dir("11-stage2-balance")));
    final_model = std::make_unique<translator::MultilingualLexiconModel>(
        translator::train_multilingual("m-final", data, cfg.stage2_iterations, back.get(),
                                       threads));
    final_model->save(out / "model.json");
  });

  runner.step("eval-final", {runner.dir("12-stage2-train/model.json")}, "13-eval-final",
              [&](const fs::path& out) {
                result.after = eval::evaluate_directions(*final_model, tests, *obpe, threads);
                write_file(out / "report.json", result.after.to_json());
                write_file(out / "report.txt", result.after.to_table());
              });

  runner.step("summary",
              {runner.dir("09-eval-before/report.json"), runner.dir("13-eval-final/report.json")},
              "14-summary", [&](const fs::path& out) {
                result.new_bleu_before = result.before.average_bleu(result.new_directions);
                result.new_bleu_after = result.after.average_bleu(result.new_directions);
                ordered_json j;
                std::vector<std::string> keys;
                for (const auto& d : result.new_directions) keys.push_back(d.key());
                j["new_directions"] = keys;
                j["new_bleu_before"] = result.new_bleu_before;
                j["new_bleu_after"] = result.new_bleu_after;
                ordered_json rows = ordered_json::object();
                for (const auto& d : result.new_directions) {
                  rows[d.key()] = {{"before", result.before.find(d)->bleu},
                                   {"after", result.after.find(d)->bleu}};
                }
                j["per_direction"] = rows;
                write_file(out / "summary.json", j.dump(2) + "\n");
              });
  return result;
}

}  // namespace mtkit::pipeline
