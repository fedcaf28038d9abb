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

// mtkit command-line entry point.
//
// Exit status: 0 on success, 2 for bad arguments or an invalid config, 3 when
// a step of the requested work fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mtkit/corpus.h"
#include "mtkit/dataset_builder.h"
#include "mtkit/error.h"
#include "mtkit/eval.h"
#include "mtkit/pipeline.h"
#include "mtkit/synthesis.h"
#include "mtkit/text.h"
#include "mtkit/toy_data.h"
#include "mtkit/translator.h"
#include "mtkit/vocab.h"
#include "mtkit/vocab_metrics.h"

namespace {

namespace fs = std::filesystem;
using namespace mtkit;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStep = 3;

struct Common {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
};

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> read_lines_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_lines(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
}

std::vector<corpus::BitextCorpus> load_all(const std::vector<std::string>& manifests) {
  std::vector<corpus::BitextCorpus> out;
  for (const auto& m : manifests) out.push_back(corpus::load_bitext(m));
  return out;
}

std::vector<dataset::CorpusRef> as_refs(const std::vector<std::string>& manifests) {
  std::vector<dataset::CorpusRef> out;
  for (const auto& m : manifests) {
    out.push_back(std::make_shared<const corpus::BitextCorpus>(corpus::load_bitext(m)));
  }
  return out;
}

std::set<LanguageCode> parse_langs(const std::vector<std::string>& codes) {
  std::set<LanguageCode> out;
  for (const auto& c : codes) out.emplace(c);
  return out;
}

void print_issues(const std::vector<pipeline::ConfigIssue>& issues) {
  for (const auto& i : issues) {
    std::cerr << "config error: " << (i.field.empty() ? "<document>" : i.field) << ": "
              << i.message << "\n";
  }
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void print_summary(const pipeline::RunResult& r) {
  std::cout << "new-direction BLEU before stage 2:\n" << r.before.to_table();
  std::cout << "after stage 2:\n" << r.after.to_table();
  std::cout << "average BLEU on " << r.new_directions.size()
            << " new directions: " << fixed2(r.new_bleu_before) << " -> "
            << fixed2(r.new_bleu_after) << "\n";
  std::cout << "run directory: " << r.run_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mtkit: data pipeline toolkit for low-resource multilingual MT"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Random seed");
    sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", common.out, "Output path");
  };
  std::function<void()> action;

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "Bitext import, statistics and splits");
  corpus_cmd->require_subcommand(1);
  std::string in, src_file, tgt_file, src_lang, tgt_lang, name;
  std::size_t n = corpus::kDefaultValidationSize;
  auto* imp = corpus_cmd->add_subcommand("import", "Write a manifest for two aligned files");
  imp->add_option("--src-file", src_file)->required();
  imp->add_option("--tgt-file", tgt_file)->required();
  imp->add_option("--src-lang", src_lang)->required();
  imp->add_option("--tgt-lang", tgt_lang)->required();
  imp->add_option("--name", name)->required();
  add_common(imp);
  imp->callback([&] {
    action = [&] {
      const auto m = corpus::import_bitext(src_file, tgt_file, LanguageCode(src_lang),
                                           LanguageCode(tgt_lang), name,
                                           common.out.empty() ? "." : common.out);
      std::cout << m.string() << "\n";
    };
  });
  auto* stats = corpus_cmd->add_subcommand("stats", "Pair, character and token counts");
  stats->add_option("--in", in, "Manifest")->required();
  add_common(stats);
  stats->callback([&] {
    action = [&] {
      const auto c = corpus::load_bitext(in);
      const auto s = corpus::corpus_stats(c);
      nlohmann::ordered_json j{{"name", c.name},
                               {"direction", c.direction().key()},
                               {"pairs", s.pair_count},
                               {"src_chars", s.src_chars},
                               {"tgt_chars", s.tgt_chars},
                               {"src_tokens", s.src_tokens},
                               {"tgt_tokens", s.tgt_tokens}};
      write_text(common.out, j.dump(2) + "\n");
    };
  });
  auto* split = corpus_cmd->add_subcommand("split", "Hold out the first N pairs for validation");
  split->add_option("--in", in, "Manifest")->required();
  split->add_option("-n,--size", n, "Validation pairs");
  add_common(split);
  split->callback([&] {
    action = [&] {
      const auto s = corpus::split_validation(corpus::load_bitext(in), n);
      const fs::path dir = common.out.empty() ? "." : common.out;
      std::cout << corpus::write_bitext(s.valid, dir).string() << "\n"
                << corpus::write_bitext(s.train, dir).string() << "\n";
    };
  });
  double max_ratio = 3.0;
  bool no_dedup = false;
  auto* clean = corpus_cmd->add_subcommand("clean", "Optional duplicate and length-ratio filter");
  clean->add_option("--in", in, "Manifest")->required();
  clean->add_option("--max-ratio", max_ratio);
  clean->add_flag("--no-dedup", no_dedup);
  add_common(clean);
  clean->callback([&] {
    action = [&] {
      auto r = corpus::clean(corpus::load_bitext(in), {max_ratio, !no_dedup});
      r.corpus.name += ".clean";
      std::cout << corpus::write_bitext(r.corpus, common.out.empty() ? "." : common.out).string()
                << "\nremoved " << r.removed << "\n";
    };
  });

  // vocab
  auto* vocab_cmd = app.add_subcommand("vocab", "Train and apply subword vocabularies");
  vocab_cmd->require_subcommand(1);
  std::vector<std::string> inputs;
  std::string mode = "obpe", vocab_path;
  std::size_t vocab_size = 40000;
  std::vector<std::string> hrl = {"eng", "xho", "tsn", "sna"};
  std::vector<std::string> lrl = {"afr", "zul", "ssw", "nso", "tso"};
  double p = -2.0;
  auto* vtrain = vocab_cmd->add_subcommand("train", "Train BPE or OBPE on corpora");
  vtrain->add_option("--in", inputs, "Manifests")->required();
  vtrain->add_option("--mode", mode)->check(CLI::IsMember({"bpe", "obpe"}));
  vtrain->add_option("--size", vocab_size);
  vtrain->add_option("--hrl", hrl);
  vtrain->add_option("--lrl", lrl);
  vtrain->add_option("--p", p, "Power-mean exponent");
  add_common(vtrain);
  vtrain->callback([&] {
    action = [&] {
      vocab::VocabConfig cfg = vocab::VocabConfig::defaults();
      cfg.vocab_size = vocab_size;
      cfg.hrl_langs = parse_langs(hrl);
      cfg.lrl_langs = parse_langs(lrl);
      cfg.mean_exponent_p = p;
      const auto v = vocab::train(vocab::parse_mode(mode),
                                  vocab::LangCorpusSet::from_corpora(load_all(inputs)), cfg,
                                  {common.threads});
      write_text(common.out.empty() ? "vocab.json" : common.out, v.to_json());
    };
  });
  bool pieces = false;
  auto* venc = vocab_cmd->add_subcommand("encode", "Encode stdin lines to ids");
  venc->add_option("--vocab", vocab_path)->required();
  venc->add_flag("--pieces", pieces, "Print pieces instead of ids");
  add_common(venc);
  venc->callback([&] {
    action = [&] {
      const auto v = vocab::Vocabulary::load(vocab_path);
      std::ostringstream out;
      for (const auto& line : read_lines(std::cin)) {
        bool first = true;
        if (pieces) {
          for (const auto& piece : v.encode_pieces(line)) {
            out << (first ? "" : " ") << piece;
            first = false;
          }
        } else {
          for (auto id : v.encode(line)) {
            out << (first ? "" : " ") << id;
            first = false;
          }
        }
        out << "\n";
      }
      write_text(common.out, out.str());
    };
  });
  auto* vdec = vocab_cmd->add_subcommand("decode", "Decode id lines from stdin");
  vdec->add_option("--vocab", vocab_path)->required();
  add_common(vdec);
  vdec->callback([&] {
    action = [&] {
      const auto v = vocab::Vocabulary::load(vocab_path);
      std::ostringstream out;
      for (const auto& line : read_lines(std::cin)) {
        std::vector<vocab::TokenId> ids;
        for (const auto& tok : text::split_whitespace(line)) ids.push_back(std::stoi(tok));
        out << v.decode(ids) << "\n";
      }
      write_text(common.out, out.str());
    };
  });

  // vocab-report
  std::string bpe_path, obpe_path;
  auto* vrep = app.add_subcommand("vocab-report", "Token-count change and tokens per pair");
  vrep->add_option("--bpe", bpe_path, "Baseline vocabulary")->required();
  vrep->add_option("--obpe", obpe_path, "Compared vocabulary")->required();
  vrep->add_option("--in", inputs, "Manifests")->required();
  bool table = false;
  vrep->add_flag("--table", table, "Print aligned tables instead of JSON");
  add_common(vrep);
  vrep->callback([&] {
    action = [&] {
      const auto r = vocab_metrics::vocab_report(load_all(inputs), vocab::Vocabulary::load(bpe_path),
                                                 vocab::Vocabulary::load(obpe_path), common.threads);
      write_text(common.out, table ? r.to_table() : r.to_json());
    };
  });

  // mixture
  auto* mix_cmd = app.add_subcommand("mixture", "Assemble and export training mixtures");
  mix_cmd->require_subcommand(1);
  std::vector<std::string> old_in, new_in;
  std::string plan_path;
  std::size_t default_cap = 0;
  bool prefix = false;
  auto* s1 = mix_cmd->add_subcommand("stage1", "English-centric mixture, both directions");
  s1->add_option("--in", inputs, "Manifests")->required();
  s1->add_option("--vocab", vocab_path, "Check tag tokens against this vocabulary");
  add_common(s1);
  s1->callback([&] {
    action = [&] {
      std::unique_ptr<vocab::Vocabulary> v;
      if (!vocab_path.empty()) v = std::make_unique<vocab::Vocabulary>(vocab::Vocabulary::load(vocab_path));
      const auto mix = dataset::build_stage1_mixture(as_refs(inputs), v.get(), common.seed);
      const auto r = dataset::export_mixture(mix, common.out.empty() ? "mixture" : common.out,
                                             common.threads);
      std::cout << r.sidecar.string() << "\n";
    };
  });
  auto* s2 = mix_cmd->add_subcommand("stage2", "Balanced mixture for new directions");
  s2->add_option("--old", old_in, "English-centric manifests")->required();
  s2->add_option("--new", new_in, "New-direction manifests")->required();
  s2->add_option("--plan", plan_path, "Balance plan JSON (default: built-in plan)");
  s2->add_option("--default-cap", default_cap, "Cap for unmatched old directions");
  s2->add_flag("--prefix", prefix, "Take the first N pairs instead of a seeded sample");
  s2->add_option("--vocab", vocab_path);
  add_common(s2);
  s2->callback([&] {
    action = [&] {
      std::unique_ptr<vocab::Vocabulary> v;
      if (!vocab_path.empty()) v = std::make_unique<vocab::Vocabulary>(vocab::Vocabulary::load(vocab_path));
      const auto plan = plan_path.empty() ? dataset::BalancePlan::default_plan()
                                          : dataset::BalancePlan::load(plan_path);
      dataset::Stage2Options opts;
      opts.seed = common.seed;
      if (s2->count("--default-cap") > 0) opts.default_cap = default_cap;
      opts.mode = prefix ? dataset::SampleMode::kPrefix : dataset::SampleMode::kUniform;
      const auto mix =
          dataset::build_stage2_mixture(as_refs(old_in), as_refs(new_in), plan, opts, v.get());
      const auto r = dataset::export_mixture(mix, common.out.empty() ? "mixture" : common.out,
                                             common.threads);
      std::cout << r.sidecar.string() << "\n";
    };
  });

  // translator
  auto* tr_cmd = app.add_subcommand("translator", "Train and run stand-in translators");
  tr_cmd->require_subcommand(1);
  std::size_t iterations = 10;
  bool reverse = false;
  std::string model_spec;
  auto* trl = tr_cmd->add_subcommand("train-lexicon", "EM word-translation lexicon");
  trl->add_option("--in", in, "Manifest")->required();
  trl->add_option("--iterations", iterations)->check(CLI::PositiveNumber);
  trl->add_flag("--reverse", reverse, "Train tgt->src");
  add_common(trl);
  trl->callback([&] {
    action = [&] {
      auto c = corpus::load_bitext(in);
      if (reverse) c = corpus::reversed(c);
      const auto lex = translator::train_lexicon(c, iterations, {common.threads, nullptr});
      write_text(common.out.empty() ? "lexicon.json" : common.out, lex.to_json());
    };
  });
  auto* trun = tr_cmd->add_subcommand("run", "Translate stdin lines");
  trun->add_option("--model", model_spec, "Lexicon/multilingual JSON or exec:<command>")->required();
  trun->add_option("--src", src_lang)->required();
  trun->add_option("--tgt", tgt_lang)->required();
  add_common(trun);
  trun->callback([&] {
    action = [&] {
      const auto model = translator::load_model(model_spec);
      const auto lines = read_lines(std::cin);
      std::ostringstream out;
      for (const auto& l : model->translate_batch(lines, LanguageCode(src_lang), LanguageCode(tgt_lang))) {
        out << l << "\n";
      }
      write_text(common.out, out.str());
    };
  });

  // synth
  auto* syn_cmd = app.add_subcommand("synth", "Back-translation and pivot synthesis");
  syn_cmd->require_subcommand(1);
  std::size_t batch_size = 64;
  std::string pivot_to;
  auto* sbt = syn_cmd->add_subcommand("backtranslate", "(A, B) -> (model(B), B)");
  sbt->add_option("--model", model_spec)->required();
  sbt->add_option("--in", in, "Manifest")->required();
  sbt->add_option("--batch-size", batch_size)->check(CLI::PositiveNumber);
  add_common(sbt);
  sbt->callback([&] {
    action = [&] {
      const auto model = translator::load_model(model_spec);
      const auto out = synthesis::backtranslate(corpus::load_bitext(in), *model,
                                                {batch_size, common.threads});
      std::cout << corpus::write_bitext(out, common.out.empty() ? "." : common.out).string() << "\n";
    };
  });
  auto* spv = syn_cmd->add_subcommand("pivot", "(eng, L) -> (model(eng), L)");
  spv->add_option("--model", model_spec)->required();
  spv->add_option("--pivot-to", pivot_to)->required();
  spv->add_option("--in", in, "Manifest")->required();
  spv->add_option("--batch-size", batch_size)->check(CLI::PositiveNumber);
  add_common(spv);
  spv->callback([&] {
    action = [&] {
      const auto model = translator::load_model(model_spec);
      const auto out = synthesis::pivot_synthesize(corpus::load_bitext(in), *model,
                                                   LanguageCode(pivot_to),
                                                   {batch_size, common.threads});
      std::cout << corpus::write_bitext(out, common.out.empty() ? "." : common.out).string() << "\n";
    };
  });

  // eval
  auto* ev_cmd = app.add_subcommand("eval", "BLEU, spBLEU and chrF2++");
  ev_cmd->require_subcommand(1);
  std::string metric = "bleu", hyp, ref, tests_dir;
  auto* score = ev_cmd->add_subcommand("score", "Score a hypothesis file");
  score->add_option("--metric", metric)->check(CLI::IsMember({"bleu", "spbleu", "chrf"}));
  score->add_option("--hyp", hyp)->required();
  score->add_option("--ref", ref)->required();
  score->add_option("--vocab", vocab_path, "Required for spbleu");
  add_common(score);
  score->callback([&] {
    action = [&] {
      const auto h = read_lines_file(hyp);
      const auto r = read_lines_file(ref);
      double s = 0.0;
      if (metric == "bleu") {
        s = eval::bleu(h, r);
      } else if (metric == "chrf") {
        s = eval::chrf(h, r);
      } else {
        if (vocab_path.empty()) throw Error(ErrorCode::kInvalidArgument, "spbleu needs --vocab");
        s = eval::spbleu(h, r, vocab::Vocabulary::load(vocab_path));
      }
      std::cout << fixed2(s) << "\n";
    };
  });
  auto* report = ev_cmd->add_subcommand("report", "Evaluate a model on every test corpus");
  report->add_option("--model", model_spec)->required();
  report->add_option("--tests", tests_dir, "Directory of test manifests")->required();
  report->add_option("--vocab", vocab_path)->required();
  add_common(report);
  report->callback([&] {
    action = [&] {
      std::vector<fs::path> manifests;
      for (const auto& e : fs::directory_iterator(tests_dir)) {
        if (e.path().extension() == ".json") manifests.push_back(e.path());
      }
      std::sort(manifests.begin(), manifests.end());
      std::vector<corpus::BitextCorpus> tests;
      for (const auto& m : manifests) tests.push_back(corpus::load_bitext(m));
      const auto model = translator::load_model(model_spec);
      const auto r = eval::evaluate_directions(*model, tests, vocab::Vocabulary::load(vocab_path),
                                               common.threads);
      write_text(common.out.empty() ? "report.json" : common.out, r.to_json());
      std::cout << r.to_table();
    };
  });

  // pipeline
  std::string config_path;
  bool check_only = false;
  int pipeline_status = kExitOk;
  auto* pipe = app.add_subcommand("pipeline", "Run the two-stage recipe from a config");
  pipe->add_option("--config", config_path)->required();
  pipe->add_flag("--check", check_only, "Only validate the config");
  add_common(pipe);
  pipe->callback([&] {
    action = [&] {
      const auto issues = pipeline::validate_config(config_path);
      if (!issues.empty()) {
        print_issues(issues);
        pipeline_status = kExitConfig;
        return;
      }
      if (check_only) {
        std::cout << "config ok\n";
        return;
      }
      pipeline::RunOptions opts;
      opts.threads = common.threads;
      if (!common.out.empty()) opts.output_root = common.out;
      print_summary(pipeline::run_pipeline(pipeline::PipelineConfig::load(config_path), opts));
    };
  });

  // repro-toy
  double scale = 1.0;
  auto* toy = app.add_subcommand("repro-toy", "Generate the bundled toy corpus and run the recipe");
  toy->add_option("--scale", scale, "Corpus size multiplier")->check(CLI::PositiveNumber);
  add_common(toy);
  toy->callback([&] {
    action = [&] {
      const auto start = std::chrono::steady_clock::now();
      const fs::path root = common.out.empty() ? "toy-run" : common.out;
      toy::ToyOptions topts;
      if (toy->count("--seed") > 0) topts.seed = common.seed;
      topts.scale = scale;
      const auto data = toy::write_toy_dataset(root / "data", topts);
      pipeline::RunOptions opts;
      opts.threads = common.threads;
      opts.output_root = root / "run";
      const auto r = pipeline::run_pipeline(pipeline::PipelineConfig::load(data.config), opts);
      print_summary(r);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cout << "elapsed " << fixed2(secs) << " s\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    if (action) action();
  } catch (const pipeline::StepError& e) {
    std::cerr << "step failed: " << e.what() << "\n";
    return kExitStep;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfig ? kExitConfig : kExitStep;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStep;
  }
  return pipeline_status;
}
