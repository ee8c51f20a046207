/* Copyright 2026 The rwen-tts Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <omp.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rwen/deptree/conllu.hpp"
#include "rwen/deptree/paths.hpp"
#include "rwen/featstore/manifest.hpp"
#include "rwen/featstore/synth.hpp"
#include "rwen/featstore/tensor_file.hpp"
#include "rwen/nn/checkpoint.hpp"
#include "rwen/tts/gradient_suite.hpp"
#include "rwen/tts/trainer.hpp"

namespace fs = std::filesystem;
using ordered = nlohmann::ordered_json;
using namespace rwen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

// Rows go to stdout, either as tab-separated tables (a header line whenever
// the record kind changes) or as one JSON object per line.
class Output {
 public:
  explicit Output(bool jsonl) : jsonl_(jsonl) {}

  void row(const std::string& kind, const ordered& fields) {
    if (jsonl_) {
      ordered rec = {{"record", kind}};
      rec.update(fields);
      std::cout << rec.dump() << '\n';
      return;
    }
    if (kind != kind_) {
      if (!kind_.empty()) std::cout << '\n';
      kind_ = kind;
      std::string sep;
      for (const auto& [key, value] : fields.items()) {
        std::cout << sep << key;
        sep = "\t";
      }
      std::cout << '\n';
    }
    std::string sep;
    for (const auto& [key, value] : fields.items()) {
      std::cout << sep << text(value);
      sep = "\t";
    }
    std::cout << '\n';
  }

 private:
  static std::string text(const ordered& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
      return buf;
    }
    if (v.is_array()) {
      std::string out, sep;
      for (const auto& e : v) {
        out += sep + text(e);
        sep = " ";
      }
      return out;
    }
    return v.dump();
  }

  bool jsonl_;
  std::string kind_;
};

struct Globals {
  std::uint64_t seed = 1;
  std::string config;
  std::string out;
  bool jsonl = false;
  int threads = 0;
};

void log(const std::string& msg) { std::cerr << "[rwen] " << msg << '\n'; }

void log_config(const std::string& command, const nlohmann::json& config) {
  log(command + " config_hash=" + nn::config_hash(config) + " config=" + config.dump());
}

std::string require_out(const Globals& g, const std::string& command) {
  if (g.out.empty()) throw std::invalid_argument(command + ": --out is required");
  return g.out;
}

std::vector<featstore::PreparedSentence> load(const std::string& manifest) {
  return featstore::load_manifest(featstore::resolve_data_path(manifest));
}

std::string sanitize(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  }
  return out;
}

// Rejects data the model cannot consume, naming the config field involved.
void check_compatible(const tts::TrainConfig& cfg, const std::vector<featstore::PreparedSentence>& data,
                      bool need_targets) {
  for (const auto& s : data) {
    if (s.embeddings.rows() != cfg.rwen.d_h) {
      throw featstore::ValidationError(s.id, "rwen.d_h",
                                       "embedding dim " + std::to_string(s.embeddings.rows()) +
                                           " does not match config " + std::to_string(cfg.rwen.d_h));
    }
    for (const auto& word : s.phonemes) {
      for (int p : word) {
        if (p >= cfg.tts.phoneme_vocab) {
          throw featstore::ValidationError(s.id, "tts.phoneme_vocab",
                                           "phoneme id " + std::to_string(p) + " out of range");
        }
      }
    }
    if (!need_targets) continue;
    if (!s.targets) throw featstore::ValidationError(s.id, "targets", "training and evaluation need acoustic targets");
    if (s.phoneme_count() == 0) throw featstore::ValidationError(s.id, "phonemes", "sentence has no phonemes");
    if (s.targets->mel.rows() != cfg.tts.n_mels) {
      throw featstore::ValidationError(s.id, "tts.n_mels",
                                       "mel has " + std::to_string(s.targets->mel.rows()) + " bins, config " +
                                           std::to_string(cfg.tts.n_mels));
    }
  }
}

std::unique_ptr<tts::Model<float>> load_model(const std::string& ckpt) {
  const nn::CheckpointInfo info = nn::read_checkpoint_info(ckpt);
  auto model = tts::Model<float>::create(tts::train_config_from_json(info.config), 0);
  nn::load_checkpoint(ckpt, model->params);
  return model;
}

const char* ablation_label(const encoder::RwenConfig& c) {
  if (c.enable_sre && c.enable_awre) return "full";
  if (c.enable_sre) return "w/o AWRE";
  if (c.enable_awre) return "w/o SRE";
  return "w/o SRE & AWRE";
}

std::size_t parameter_count(const nn::ParamSet<float>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += static_cast<std::size_t>(p->value.size());
  return n;
}

ordered loss_fields(const tts::LossBreakdown& l) {
  return {{"total", l.total}, {"mel", l.mel}, {"pitch", l.pitch}, {"energy", l.energy}, {"duration", l.duration}};
}

// ---- parse

struct ParseArgs {
  std::string conllu;
  int embedding_dim = 16;
};

int cmd_parse(const Globals& g, const ParseArgs& a, Output& out) {
  const std::string dir = require_out(g, "parse");
  log_config("parse", {{"conllu", a.conllu}, {"embedding_dim", a.embedding_dim}, {"seed", g.seed}});
  if (a.embedding_dim < 1) throw std::invalid_argument("parse: --embedding-dim must be >= 1");
  const auto parsed = deptree::read_conllu_file(featstore::resolve_data_path(a.conllu));
  const std::string stem = fs::path(a.conllu).stem().string();

  // Skeleton records: identity spans, pseudo embeddings and no phonemes until
  // real features are exported for the same trees.
  std::vector<featstore::PreparedSentence> sentences;
  std::size_t words = 0, notes = 0;
  for (std::size_t k = 0; k < parsed.size(); ++k) {
    const auto& c = parsed[k];
    featstore::PreparedSentence s;
    s.id = c.sent_id.empty() ? stem + "-" + std::to_string(k + 1) : c.sent_id;
    s.words = c.forms;
    s.tree = c.tree;
    s.seg = align::SubwordSegmentation::identity(c.tree.size());
    s.embedding_source.kind = featstore::EmbeddingSource::Kind::kPseudo;
    s.embedding_source.dim = a.embedding_dim;
    s.embedding_source.seed = g.seed;
    s.embeddings = featstore::pseudo_embeddings(s.id, s.seg, a.embedding_dim, g.seed);
    s.phonemes.assign(static_cast<std::size_t>(c.tree.size()), {});
    words += c.forms.size();
    notes += c.notes.size();
    for (const auto& note : c.notes) log("parse: " + s.id + ": " + note);
    sentences.push_back(std::move(s));
  }
  const std::string manifest = (fs::path(dir) / "manifest.jsonl").string();
  featstore::save_manifest(manifest, sentences);
  for (const auto& s : sentences) out.row("sentence", {{"id", s.id}, {"words", s.word_count()}});
  out.row("summary", {{"sentences", sentences.size()}, {"words", words}, {"skipped_lines", notes}, {"manifest", manifest}});
  return kExitOk;
}

// ---- paths

struct PathsArgs {
  std::string manifest;
  std::string sentence;
  std::string kind = "root";
  std::optional<int> word;
};

int cmd_paths(const Globals&, const PathsArgs& a, Output& out) {
  log_config("paths", {{"manifest", a.manifest}, {"sentence", a.sentence}, {"kind", a.kind}});
  const auto kind = deptree::parse_path_kind(a.kind);
  if (kind == deptree::PathKind::kBoundary) throw std::invalid_argument("paths: --kind must be root, prev or next");
  const auto data = load(a.manifest);
  const featstore::PreparedSentence* s = nullptr;
  for (const auto& d : data) {
    if (d.id == a.sentence) s = &d;
  }
  if (!s) throw featstore::ValidationError(a.sentence, "id", "not found in " + a.manifest);
  const auto paths = deptree::sentence_paths(s->tree, kind);
  if (a.word && (*a.word < 0 || *a.word >= static_cast<int>(paths.size()))) {
    throw featstore::ValidationError(s->id, "word", "slot " + std::to_string(*a.word) + " out of range");
  }
  for (std::size_t slot = 0; slot < paths.size(); ++slot) {
    if (a.word && static_cast<int>(slot) != *a.word) continue;
    const auto& p = paths[slot];
    ordered dirs = ordered::array();
    for (auto d : p.directions) dirs.push_back(deptree::to_string(d));
    out.row("path", {{"slot", slot}, {"path", p.indexes}, {"directions", dirs}, {"kind", deptree::to_string(p.kind)}});
  }
  return kExitOk;
}

// ---- synth-data

struct SynthArgs {
  featstore::SynthOptions options;
};

int cmd_synth(const Globals& g, SynthArgs a, Output& out) {
  const std::string dir = require_out(g, "synth-data");
  a.options.seed = g.seed;
  const auto& o = a.options;
  log_config("synth-data", {{"n", o.sentences},
                            {"max_words", o.max_words},
                            {"embedding_dim", o.embedding_dim},
                            {"n_mels", o.n_mels},
                            {"phoneme_vocab", o.phoneme_vocab},
                            {"max_phonemes_per_word", o.max_phonemes_per_word},
                            {"seed", o.seed}});
  const auto data = featstore::synth_dataset(o);
  const std::string manifest = (fs::path(dir) / "manifest.jsonl").string();
  featstore::save_manifest(manifest, data);
  std::size_t words = 0, phonemes = 0, frames = 0;
  for (const auto& s : data) {
    words += static_cast<std::size_t>(s.word_count());
    phonemes += static_cast<std::size_t>(s.phoneme_count());
    frames += static_cast<std::size_t>(s.frame_count());
  }
  out.row("summary", {{"sentences", data.size()},
                      {"words", words},
                      {"phonemes", phonemes},
                      {"frames", frames},
                      {"manifest", manifest}});
  return kExitOk;
}

// ---- train

struct TrainArgs {
  std::string manifest;
  std::optional<int> steps;
  bool no_sre = false;
  bool no_awre = false;
  bool serial = false;
};

tts::TrainConfig default_config(const std::vector<featstore::PreparedSentence>& data) {
  int dim = 16, mels = 16, vocab = 24;
  if (!data.empty()) {
    dim = static_cast<int>(data.front().embeddings.rows());
    if (data.front().targets) mels = static_cast<int>(data.front().targets->mel.rows());
  }
  for (const auto& s : data) {
    for (const auto& w : s.phonemes) {
      for (int p : w) vocab = std::max(vocab, p + 1);
    }
  }
  return tts::TrainConfig::desk(dim, mels, vocab);
}

int cmd_train(const Globals& g, const TrainArgs& a, bool seed_given, Output& out) {
  const std::string dir = require_out(g, "train");
  const auto data = load(a.manifest);
  tts::TrainConfig cfg = g.config.empty() ? default_config(data) : tts::load_train_config(g.config);
  if (seed_given || g.config.empty()) cfg.seed = g.seed;
  if (a.steps) cfg.steps = *a.steps;
  if (a.no_sre) cfg.rwen.enable_sre = false;
  if (a.no_awre) cfg.rwen.enable_awre = false;
  cfg.validate();
  log_config("train", tts::to_json(cfg));
  check_compatible(cfg, data, true);

  fs::create_directories(dir);
  tts::save_train_config((fs::path(dir) / "config.json").string(), cfg);
  auto model = tts::Model<float>::create(cfg, cfg.seed);
  const auto examples = tts::make_examples(data);
  tts::TrainOptions options;
  options.out_dir = dir;
  options.exec = a.serial ? tts::Execution::kSerial : tts::Execution::kParallel;
  options.on_log = [&out](int step, const tts::LossBreakdown& l) {
    ordered row = {{"step", step}};
    row.update(loss_fields(l));
    out.row("step", row);
  };
  const tts::TrainResult r = tts::train(*model, examples, options);
  out.row("summary", {{"config", ablation_label(cfg.rwen)},
                      {"steps", r.steps},
                      {"parameters", parameter_count(model->params)},
                      {"initial_total", r.initial.total},
                      {"final_total", r.final.total},
                      {"ratio", r.initial.total > 0 ? r.final.total / r.initial.total : 0.0},
                      {"checkpoint", (fs::path(dir) / "checkpoint").string()}});
  return kExitOk;
}

// ---- encode

struct EncodeArgs {
  std::string manifest;
  std::string ckpt;
};

int cmd_encode(const Globals& g, const EncodeArgs& a, Output& out) {
  const std::string dir = require_out(g, "encode");
  auto model = load_model(a.ckpt);
  log_config("encode", tts::to_json(model->config));
  const auto data = load(a.manifest);
  check_compatible(model->config, data, false);
  const auto features = tts::encode_batch(*model, tts::make_examples(data), tts::Execution::kParallel);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::string file = std::to_string(i) + "_" + sanitize(data[i].id) + ".rwt";
    featstore::write_matrix((fs::path(dir) / file).string(), features[i]);
    out.row("features", {{"id", data[i].id}, {"rows", features[i].rows()}, {"cols", features[i].cols()}, {"file", file}});
  }
  return kExitOk;
}

// ---- eval

struct EvalArgs {
  std::string manifest;
  std::vector<std::string> ckpts;
};

int cmd_eval(const Globals&, const EvalArgs& a, Output& out) {
  const auto data = load(a.manifest);
  const auto examples = tts::make_examples(data);
  for (const auto& ckpt : a.ckpts) {
    auto model = load_model(ckpt);
    log_config("eval", tts::to_json(model->config));
    check_compatible(model->config, data, true);
    const auto l = tts::evaluate(*model, examples, tts::Execution::kParallel);
    ordered row = {{"config", ablation_label(model->config.rwen)}, {"checkpoint", ckpt}};
    row.update(loss_fields(l));
    out.row("loss", row);
  }
  return kExitOk;
}

// ---- gradcheck

int cmd_gradcheck(const std::string& module, Output& out) {
  const nn::GradcheckOptions options;
  log_config("gradcheck", {{"module", module},
                           {"step", options.step},
                           {"tolerance", options.tolerance},
                           {"max_entries_per_param", options.max_entries_per_param}});
  bool ok = true;
  for (const auto& e : tts::run_gradient_suite(module, options)) {
    int entries = 0;
    for (const auto& p : e.report.params) entries += p.entries_checked;
    out.row("check", {{"module", e.module},
                      {"name", e.name},
                      {"entries", entries},
                      {"max_rel_error", e.report.max_rel_error},
                      {"status", e.report.passed ? "pass" : "FAIL"},
                      {"seconds", e.seconds}});
    if (!e.report.passed) {
      ok = false;
      log(e.name + ":\n" + e.report.summary());
    }
  }
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relation-aware word encoding for TTS: data, paths, training and checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed (default 1)");
  app.add_option("--config", g.config, "Training config JSON")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--jsonl", g.jsonl, "Emit one JSON record per line instead of tables");
  app.add_option("--threads", g.threads, "OpenMP threads (default: runtime choice)")->check(CLI::NonNegativeNumber);

  ParseArgs parse;
  auto* parse_cmd = app.add_subcommand("parse", "CoNLL-U to a validated manifest skeleton");
  parse_cmd->add_option("--conllu", parse.conllu, "CoNLL-U file")->required();
  parse_cmd->add_option("--embedding-dim", parse.embedding_dim, "Pseudo embedding rows");

  PathsArgs paths;
  auto* paths_cmd = app.add_subcommand("paths", "Print relation paths for one sentence");
  paths_cmd->add_option("--manifest", paths.manifest)->required();
  paths_cmd->add_option("--sentence", paths.sentence, "Sentence id")->required();
  paths_cmd->add_option("--kind", paths.kind, "root, prev or next")->check(CLI::IsMember({"root", "prev", "next"}));
  paths_cmd->add_option("--word", paths.word, "Only this slot (1..n are words)");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth-data", "Write a synthetic dataset with a learnable teacher");
  synth_cmd->add_option("--n", synth.options.sentences, "Sentences")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--max-words", synth.options.max_words)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--embedding-dim", synth.options.embedding_dim)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--n-mels", synth.options.n_mels)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--phoneme-vocab", synth.options.phoneme_vocab)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--max-phonemes-per-word", synth.options.max_phonemes_per_word)->check(CLI::PositiveNumber);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train RWEN + TTS; writes metrics.csv and checkpoints");
  train_cmd->add_option("--manifest", train.manifest)->required();
  train_cmd->add_option("--steps", train.steps, "Override config steps")->check(CLI::NonNegativeNumber);
  train_cmd->add_flag("--no-sre", train.no_sre, "Disable the syntactic relation encoder");
  train_cmd->add_flag("--no-awre", train.no_awre, "Disable the adjacent word relation encoder");
  train_cmd->add_flag("--serial", train.serial, "Run the serial reference path");

  EncodeArgs encode;
  auto* encode_cmd = app.add_subcommand("encode", "Dump per-sentence RWEN word features");
  encode_cmd->add_option("--manifest", encode.manifest)->required();
  encode_cmd->add_option("--ckpt", encode.ckpt, "Checkpoint directory")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Loss table for one or more checkpoints");
  eval_cmd->add_option("--manifest", eval.manifest)->required();
  eval_cmd->add_option("--ckpt", eval.ckpts, "Checkpoint directories")->required();

  std::string module = "all";
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  grad_cmd->add_option("--module", module, "all, nncore, rwen or tts")
      ->check(CLI::IsMember({"all", "nncore", "rwen", "tts"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (g.threads > 0) omp_set_num_threads(g.threads);

  Output out(g.jsonl);
  try {
    if (*parse_cmd) return cmd_parse(g, parse, out);
    if (*paths_cmd) return cmd_paths(g, paths, out);
    if (*synth_cmd) return cmd_synth(g, synth, out);
    if (*train_cmd) return cmd_train(g, train, seed_opt->count() > 0, out);
    if (*encode_cmd) return cmd_encode(g, encode, out);
    if (*eval_cmd) return cmd_eval(g, eval, out);
    if (*grad_cmd) return cmd_gradcheck(module, out);
  } catch (const nn::NumericalError& e) {
    log(std::string("numerical failure: ") + e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return kExitValidation;
  }
  return kExitValidation;
}
