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

#include "rwen/featstore/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "rwen/featstore/relation_vocab.hpp"
#include "rwen/nn/random.hpp"

namespace rwen::featstore {

using nn::mix;
using nn::Rng;

MatrixF pseudo_embeddings(const std::string& sentence_id, const align::SubwordSegmentation& seg, int dim,
                          std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("pseudo embedding dim must be >= 1");
  const std::uint64_t base = mix(seed, nn::fnv1a64(sentence_id));
  const int cols = seg.subword_count + 2;
  MatrixF out(dim, cols);
  for (int c = 0; c < cols; ++c) {
    const std::uint64_t col_key = mix(base, static_cast<std::uint64_t>(c));
    for (int r = 0; r < dim; ++r) {
      out(r, c) = static_cast<float>(nn::normal_from_key(mix(col_key, static_cast<std::uint64_t>(r))));
    }
  }
  return out;
}

namespace {

constexpr int kTeacherDim = 8;

std::vector<int> random_heads(Rng& rng, int n) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n + 1));
  for (int i = 2; i <= n; ++i) {
    const int j = rng.between(1, i - 1);
    adj[static_cast<std::size_t>(i)].push_back(j);
    adj[static_cast<std::size_t>(j)].push_back(i);
  }
  // Re-root at a uniform node so the root is not always the first word.
  const int root = rng.between(1, n);
  std::vector<int> heads(static_cast<std::size_t>(n), -1);
  heads[static_cast<std::size_t>(root - 1)] = 0;
  std::queue<int> frontier;
  frontier.push(root);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (const int v : adj[static_cast<std::size_t>(u)]) {
      if (heads[static_cast<std::size_t>(v - 1)] != -1) continue;
      heads[static_cast<std::size_t>(v - 1)] = u;
      frontier.push(v);
    }
  }
  return heads;
}

std::string random_relation(Rng& rng) {
  static constexpr std::string_view kSubtypes[] = {"pass", "poss", "relcl", "tmod"};
  std::string_view tag;
  do {
    tag = kUniversalRelations[static_cast<std::size_t>(rng.below(static_cast<int>(kUniversalRelations.size())))];
  } while (tag == "root");
  std::string out(tag);
  if (rng.uniform() < 0.15) out += ":" + std::string(kSubtypes[rng.below(4)]);
  return out;
}

std::string random_word(Rng& rng) {
  static constexpr char kOnsets[] = "bdfgklmnprstvz";
  static constexpr char kVowels[] = "aeiou";
  std::string w;
  const int syllables = rng.between(1, 3);
  for (int s = 0; s < syllables; ++s) {
    w += kOnsets[rng.below(14)];
    w += kVowels[rng.below(5)];
  }
  return w;
}

MatrixD gaussian(Rng& rng, int rows, int cols, double stddev) {
  MatrixD m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = stddev * rng.normal();
  }
  return m;
}

}  // namespace

std::vector<PreparedSentence> synth_dataset(const SynthOptions& o) {
  if (o.sentences < 0 || o.max_words < 1 || o.phoneme_vocab < 1 || o.embedding_dim < 1 || o.n_mels < 1 ||
      o.max_phonemes_per_word < 1) {
    throw std::invalid_argument("synth options out of range");
  }
  Rng rng(mix(o.seed, 0x5EEDULL));

  // Teacher: z = A h_word + B[:, phoneme]; mel = C z; duration and pitch are
  // linear read-outs of z.
  const MatrixD a = gaussian(rng, kTeacherDim, o.embedding_dim, 1.0 / std::sqrt(o.embedding_dim));
  const MatrixD b = gaussian(rng, kTeacherDim, o.phoneme_vocab, 1.0);
  const MatrixD c = gaussian(rng, o.n_mels, kTeacherDim, 1.0 / std::sqrt(kTeacherDim));
  const MatrixD a_dur = gaussian(rng, 1, kTeacherDim, 0.6 / std::sqrt(kTeacherDim));
  const MatrixD a_pitch = gaussian(rng, 1, kTeacherDim, 1.0 / std::sqrt(kTeacherDim));

  std::vector<PreparedSentence> out;
  std::vector<std::vector<double>> raw_pitch;
  for (int k = 0; k < o.sentences; ++k) {
    PreparedSentence s;
    s.id = "synth-" + std::to_string(o.seed) + "-" + std::to_string(k);
    const int n = rng.between(1, o.max_words);
    const auto heads = random_heads(rng, n);
    std::vector<std::string> rels;
    for (int i = 0; i < n; ++i) {
      rels.push_back(heads[static_cast<std::size_t>(i)] == 0 ? "root" : random_relation(rng));
      s.words.push_back(random_word(rng));
    }
    s.tree = deptree::DependencyTree(heads, rels);

    int next = 1;
    for (int i = 0; i < n; ++i) {
      const int width = rng.between(1, 3);
      s.seg.spans.push_back({next, next + width});
      next += width;
    }
    s.seg.subword_count = next - 1;
    s.embedding_source = {EmbeddingSource::Kind::kPseudo, "", o.embedding_dim, o.seed};
    s.embeddings = pseudo_embeddings(s.id, s.seg, o.embedding_dim, o.seed);

    for (int i = 0; i < n; ++i) {
      std::vector<int> word;
      const int count = rng.between(0, o.max_phonemes_per_word);
      for (int p = 0; p < count; ++p) word.push_back(rng.below(o.phoneme_vocab));
      s.phonemes.push_back(std::move(word));
    }
    if (s.phoneme_count() == 0) s.phonemes[0].push_back(rng.below(o.phoneme_vocab));

    const MatrixD pooled = align::word_average_pool<float>(s.embeddings, s.seg).cast<double>();
    AcousticTargets t;
    std::vector<double> pitch;
    std::vector<Eigen::VectorXd> frames;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd h = pooled.col(i + 1);
      for (const int pid : s.phonemes[static_cast<std::size_t>(i)]) {
        const Eigen::VectorXd z = a * h + b.col(pid);
        const Eigen::VectorXd mel = c * z;
        const int dur = std::clamp(static_cast<int>(std::lround(3.0 + (a_dur * z)(0))), 1, 6);
        t.durations.push_back(dur);
        pitch.push_back((a_pitch * z)(0));
        t.energy.push_back(static_cast<float>(mel.norm() / std::sqrt(static_cast<double>(o.n_mels))));
        for (int f = 0; f < dur; ++f) frames.push_back(mel);
      }
    }
    t.mel.resize(o.n_mels, static_cast<Eigen::Index>(frames.size()));
    for (std::size_t f = 0; f < frames.size(); ++f) t.mel.col(static_cast<Eigen::Index>(f)) = frames[f].cast<float>();
    s.targets = std::move(t);
    raw_pitch.push_back(std::move(pitch));
    out.push_back(std::move(s));
  }

  // Pitch is standardized over the whole dataset.
  double sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (const auto& p : raw_pitch) {
    for (const double v : p) {
      sum += v;
      sq += v * v;
      ++count;
    }
  }
  const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
  const double var = count > 0 ? sq / static_cast<double>(count) - mean * mean : 0.0;
  const double stddev = var > 1e-12 ? std::sqrt(var) : 1.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (const double v : raw_pitch[k]) out[k].targets->pitch.push_back(static_cast<float>((v - mean) / stddev));
  }
  return out;
}

}  // namespace rwen::featstore
