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

#include "rwen/featstore/manifest.hpp"

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "rwen/featstore/synth.hpp"
#include "rwen/featstore/tensor_file.hpp"

namespace rwen::featstore {

namespace fs = std::filesystem;
using nlohmann::json;

ValidationError::ValidationError(std::string sentence_id, std::string field, const std::string& message)
    : std::runtime_error("sentence '" + sentence_id + "', field '" + field + "': " + message),
      sentence_id_(std::move(sentence_id)),
      field_(std::move(field)) {}

int PreparedSentence::phoneme_count() const {
  int n = 0;
  for (const auto& p : phonemes) n += static_cast<int>(p.size());
  return n;
}

int PreparedSentence::frame_count() const {
  if (!targets) return 0;
  return std::accumulate(targets->durations.begin(), targets->durations.end(), 0);
}

void validate(const PreparedSentence& s) {
  auto fail = [&](const std::string& field, const std::string& msg) { throw ValidationError(s.id, field, msg); };
  if (s.id.empty()) fail("id", "empty sentence id");
  const int n = s.tree.size();
  if (n == 0) fail("head", "sentence has no words");
  if (static_cast<int>(s.words.size()) != n) {
    fail("words", std::to_string(s.words.size()) + " words for a tree of " + std::to_string(n));
  }
  if (s.seg.word_count() != n) fail("spans", std::to_string(s.seg.word_count()) + " spans for " + std::to_string(n) + " words");
  try {
    align::validate(s.seg);
  } catch (const align::AlignError& e) {
    fail("spans", e.what());
  }
  if (s.embeddings.cols() != s.seg.subword_count + 2) {
    fail("embeddings", "matrix has " + std::to_string(s.embeddings.cols()) + " columns, expected m+2 = " +
                           std::to_string(s.seg.subword_count + 2));
  }
  if (s.embeddings.rows() < 1) fail("embeddings", "zero embedding rows");
  if (!all_finite(s.embeddings)) fail("embeddings", "non-finite value");
  if (static_cast<int>(s.phonemes.size()) != n) {
    fail("phonemes", std::to_string(s.phonemes.size()) + " phoneme lists for " + std::to_string(n) + " words");
  }
  for (const auto& word : s.phonemes) {
    for (const int id : word) {
      if (id < 0) fail("phonemes", "negative phoneme id");
    }
  }
  if (!s.targets) return;
  const AcousticTargets& t = *s.targets;
  const auto p = static_cast<std::size_t>(s.phoneme_count());
  if (t.durations.size() != p) fail("targets.durations", "length differs from phoneme count " + std::to_string(p));
  if (t.pitch.size() != p) fail("targets.pitch", "length differs from phoneme count " + std::to_string(p));
  if (t.energy.size() != p) fail("targets.energy", "length differs from phoneme count " + std::to_string(p));
  for (const int d : t.durations) {
    if (d < 0) fail("targets.durations", "negative duration");
  }
  for (const float v : t.pitch) {
    if (!std::isfinite(v)) fail("targets.pitch", "non-finite value");
  }
  for (const float v : t.energy) {
    if (!std::isfinite(v)) fail("targets.energy", "non-finite value");
  }
  if (t.mel.cols() != s.frame_count()) {
    fail("targets.mel", "mel has " + std::to_string(t.mel.cols()) + " frames but durations sum to " +
                            std::to_string(s.frame_count()));
  }
  if (!all_finite(t.mel)) fail("targets.mel", "non-finite value");
}

namespace {

std::string sanitize(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

MatrixF row_of(const std::vector<float>& v) {
  MatrixF m(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

std::vector<float> values_of(const MatrixF& m) { return std::vector<float>(m.data(), m.data() + m.size()); }

json to_record(const PreparedSentence& s, const fs::path& dir, std::size_t index) {
  json r;
  r["id"] = s.id;
  r["words"] = s.words;
  r["head"] = s.tree.heads();
  r["rel"] = s.tree.rels();
  json spans = json::array();
  for (const auto& sp : s.seg.spans) spans.push_back({sp.begin, sp.end});
  r["spans"] = spans;
  r["subwords"] = s.seg.subword_count;
  const std::string stem = "tensors/" + std::to_string(index) + "_" + sanitize(s.id);
  if (s.embedding_source.kind == EmbeddingSource::Kind::kPseudo) {
    r["embeddings"] = {{"provider", "pseudo"}, {"dim", s.embedding_source.dim}, {"seed", s.embedding_source.seed}};
  } else {
    const std::string file = stem + ".emb.rwt";
    write_matrix((dir / file).string(), s.embeddings);
    r["embeddings"] = {{"file", file}};
  }
  r["phonemes"] = s.phonemes;
  if (s.targets) {
    json t;
    t["durations"] = s.targets->durations;
    for (const auto& [name, values] :
         {std::pair{"pitch", &s.targets->pitch}, std::pair{"energy", &s.targets->energy}}) {
      const std::string file = stem + "." + name + ".rwt";
      write_matrix((dir / file).string(), row_of(*values));
      t[name] = file;
    }
    const std::string mel = stem + ".mel.rwt";
    write_matrix((dir / mel).string(), s.targets->mel);
    t["mel"] = mel;
    r["targets"] = t;
  }
  return r;
}

template <typename V>
V field(const json& rec, const std::string& id, const char* name) {
  if (!rec.contains(name)) throw ValidationError(id, name, "missing field");
  try {
    return rec.at(name).get<V>();
  } catch (const json::exception& e) {
    throw ValidationError(id, name, std::string("wrong type: ") + e.what());
  }
}

MatrixF load_sidecar(const fs::path& dir, const std::string& id, const std::string& field_name, const std::string& rel) {
  const fs::path p = dir / rel;
  if (!fs::exists(p)) throw ValidationError(id, field_name, "dangling tensor reference " + p.string());
  try {
    return read_matrix(p.string());
  } catch (const FormatError& e) {
    throw ValidationError(id, field_name, e.what());
  }
}

PreparedSentence from_record(const json& rec, const fs::path& dir, int line) {
  if (!rec.is_object()) throw ValidationError("line " + std::to_string(line), "record", "not a JSON object");
  if (!rec.contains("id") || !rec["id"].is_string()) {
    throw ValidationError("line " + std::to_string(line), "id", "missing or non-string id");
  }
  PreparedSentence s;
  s.id = rec["id"].get<std::string>();
  s.words = field<std::vector<std::string>>(rec, s.id, "words");
  const auto heads = field<std::vector<int>>(rec, s.id, "head");
  const auto rels = field<std::vector<std::string>>(rec, s.id, "rel");
  try {
    s.tree = deptree::DependencyTree(heads, rels);
  } catch (const deptree::TreeError& e) {
    throw ValidationError(s.id, "head", e.what());
  }
  for (const auto& sp : field<std::vector<std::vector<int>>>(rec, s.id, "spans")) {
    if (sp.size() != 2) throw ValidationError(s.id, "spans", "each span must be [begin, end]");
    s.seg.spans.push_back({sp[0], sp[1]});
  }
  s.seg.subword_count = field<int>(rec, s.id, "subwords");
  s.phonemes = field<std::vector<std::vector<int>>>(rec, s.id, "phonemes");

  const json emb = field<json>(rec, s.id, "embeddings");
  if (emb.contains("file")) {
    s.embedding_source.kind = EmbeddingSource::Kind::kFile;
    s.embedding_source.file = field<std::string>(emb, s.id, "file");
    s.embeddings = load_sidecar(dir, s.id, "embeddings", s.embedding_source.file);
    s.embedding_source.dim = static_cast<int>(s.embeddings.rows());
  } else if (emb.value("provider", "") == "pseudo") {
    s.embedding_source.kind = EmbeddingSource::Kind::kPseudo;
    s.embedding_source.dim = field<int>(emb, s.id, "dim");
    s.embedding_source.seed = field<std::uint64_t>(emb, s.id, "seed");
    if (s.embedding_source.dim < 1) throw ValidationError(s.id, "embeddings", "dim must be >= 1");
    try {
      align::validate(s.seg);
    } catch (const align::AlignError& e) {
      throw ValidationError(s.id, "spans", e.what());
    }
    s.embeddings = pseudo_embeddings(s.id, s.seg, s.embedding_source.dim, s.embedding_source.seed);
  } else {
    throw ValidationError(s.id, "embeddings", "expected {\"file\": ...} or {\"provider\": \"pseudo\", ...}");
  }

  if (rec.contains("targets") && !rec["targets"].is_null()) {
    const json& t = rec["targets"];
    AcousticTargets targets;
    targets.durations = field<std::vector<int>>(t, s.id, "durations");
    targets.pitch = values_of(load_sidecar(dir, s.id, "targets.pitch", field<std::string>(t, s.id, "pitch")));
    targets.energy = values_of(load_sidecar(dir, s.id, "targets.energy", field<std::string>(t, s.id, "energy")));
    targets.mel = load_sidecar(dir, s.id, "targets.mel", field<std::string>(t, s.id, "mel"));
    s.targets = std::move(targets);
  }
  validate(s);
  return s;
}

}  // namespace

void save_manifest(const std::string& path, const std::vector<PreparedSentence>& sentences) {
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  fs::create_directories(dir / "tensors");
  std::set<std::string> ids;
  std::string text;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    validate(sentences[i]);
    if (!ids.insert(sentences[i].id).second) throw ValidationError(sentences[i].id, "id", "duplicate sentence id");
    text += to_record(sentences[i], dir, i).dump();
    text += '\n';
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
  }
  fs::rename(tmp, target);
}

std::vector<PreparedSentence> load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest " + path);
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");

  std::vector<std::pair<int, std::string>> lines;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.emplace_back(no, line);
  }

  // Records are independent; parse them in parallel and report the first
  // failure in file order.
  const auto count = static_cast<std::ptrdiff_t>(lines.size());
  std::vector<PreparedSentence> out(lines.size());
  std::vector<std::exception_ptr> errors(lines.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto& [no, text] = lines[static_cast<std::size_t>(i)];
    try {
      json rec;
      try {
        rec = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ValidationError("line " + std::to_string(no), "record", e.what());
      }
      out[static_cast<std::size_t>(i)] = from_record(rec, dir, no);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::set<std::string> ids;
  for (const auto& s : out) {
    if (!ids.insert(s.id).second) throw ValidationError(s.id, "id", "duplicate sentence id");
  }
  return out;
}

std::string default_data_dir() {
  const char* env = std::getenv("RWEN_DATA_DIR");
  return (env != nullptr && *env != '\0') ? std::string(env) : std::string("data");
}

std::string resolve_data_path(const std::string& path) {
  if (fs::exists(path) || fs::path(path).is_absolute()) return path;
  const fs::path alt = fs::path(default_data_dir()) / path;
  return fs::exists(alt) ? alt.string() : path;
}

}  // namespace rwen::featstore
