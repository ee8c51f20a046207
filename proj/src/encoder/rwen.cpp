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

#include "rwen/encoder/rwen.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "rwen/featstore/relation_vocab.hpp"

namespace rwen::encoder {

using deptree::RelationPath;
using rwen::Matrix;
using nn::ShapeError;

RwenConfig RwenConfig::desk() {
  RwenConfig c;
  c.d_h = 16;
  c.d_et = 4;
  c.d_de = 3;
  c.d_out = 32;
  return c;
}

void RwenConfig::validate() const {
  if (d_h < 1 || d_et < 1 || d_de < 1 || d_out < 1) {
    throw std::invalid_argument("rwen: all dimensions must be >= 1");
  }
}

template <typename T>
RwenParams<T> RwenParams<T>::create(nn::ParamSet<T>& params, const RwenConfig& cfg, nn::Rng& rng) {
  cfg.validate();
  const Eigen::Index sre_hidden = cfg.d_h + cfg.d_et;
  const Eigen::Index awre_hidden = cfg.d_h + cfg.d_et + cfg.d_de;
  RwenParams p;
  p.rte = nn::Embedding<T>::create(params, "rwen.rte", cfg.d_et, featstore::kRelationVocabSize, rng);
  p.de = nn::Embedding<T>::create(params, "rwen.de", cfg.d_de, 3, rng);
  p.gru_sre = nn::GruCell<T>::create(params, "rwen.sre.gru", sre_hidden, sre_hidden, rng);
  p.gru_pwre = nn::GruCell<T>::create(params, "rwen.pwre.gru", awre_hidden, awre_hidden, rng);
  p.gru_nwre = nn::GruCell<T>::create(params, "rwen.nwre.gru", awre_hidden, awre_hidden, rng);
  p.ffn_sre = nn::Linear<T>::create(params, "rwen.sre.ffn", sre_hidden, cfg.d_h, rng);
  p.ffn_pwre = nn::Linear<T>::create(params, "rwen.pwre.ffn", awre_hidden, cfg.d_h, rng);
  p.ffn_nwre = nn::Linear<T>::create(params, "rwen.nwre.ffn", awre_hidden, cfg.d_h, rng);
  p.ffn_awre = nn::Linear<T>::create(params, "rwen.awre.ffn", 2 * cfg.d_h, cfg.d_h, rng);
  p.combiner = nn::Linear<T>::create(params, "rwen.combiner", 2 * cfg.d_h, cfg.d_out, rng);
  return p;
}

EncoderInput EncoderInput::from_tree(const deptree::DependencyTree& tree) {
  const int n = tree.size();
  EncoderInput in;
  in.relations.reserve(static_cast<std::size_t>(n + 2));
  in.relations.push_back(featstore::kBoundaryRelation);
  for (int i = 1; i <= n; ++i) in.relations.push_back(featstore::relation_id(tree.rel(i)));
  in.relations.push_back(featstore::kBoundaryRelation);
  in.root_paths = deptree::sentence_paths(tree, deptree::PathKind::kRoot);
  in.prev_paths = deptree::sentence_paths(tree, deptree::PathKind::kPrev);
  in.next_paths = deptree::sentence_paths(tree, deptree::PathKind::kNext);
  return in;
}

template <typename T>
Var<T> rte_lookup(const RwenParams<T>& p, Graph<T>& g, const std::vector<int>& relations) {
  return p.rte.lookup(g, relations);
}

template <typename T>
Var<T> encode_paths(const nn::GruCell<T>& gru, Var<T> words, Var<T> rte, const nn::Embedding<T>* de,
                    const std::vector<RelationPath>& paths) {
  const Eigen::Index slots = words.cols();
  if (rte.cols() != slots || static_cast<Eigen::Index>(paths.size()) != slots) {
    throw ShapeError("rwen: " + std::to_string(words.cols()) + " word columns, " + std::to_string(rte.cols()) +
                     " relation columns, " + std::to_string(paths.size()) + " paths");
  }
  const Eigen::Index in_rows = words.rows() + rte.rows() + (de != nullptr ? de->table->value.rows() : 0);
  if (in_rows != gru.input_size()) {
    throw ShapeError("rwen: path input has " + std::to_string(in_rows) + " rows, gru expects " +
                     std::to_string(gru.input_size()));
  }
  std::vector<int> lengths;
  std::size_t longest = 0;
  for (const RelationPath& path : paths) {
    if (path.indexes.empty()) throw ShapeError("rwen: empty path");
    if (path.directions.size() != path.indexes.size()) throw ShapeError("rwen: direction/path length mismatch");
    for (const int idx : path.indexes) {
      if (idx < 0 || idx >= slots) throw ShapeError("rwen: path index " + std::to_string(idx) + " out of range");
    }
    lengths.push_back(static_cast<int>(path.size()));
    longest = std::max(longest, path.size());
  }

  Graph<T>& g = *words.graph();
  std::vector<Var<T>> steps;
  for (std::size_t t = 0; t < longest; ++t) {
    // Finished paths repeat their last element; the mask keeps them frozen.
    std::vector<int> index(paths.size());
    std::vector<int> direction(paths.size());
    for (std::size_t c = 0; c < paths.size(); ++c) {
      const std::size_t k = std::min(t, paths[c].size() - 1);
      index[c] = paths[c].indexes[k];
      direction[c] = static_cast<int>(paths[c].directions[k]);
    }
    std::vector<Var<T>> parts = {nn::gather_cols(words, index), nn::gather_cols(rte, index)};
    if (de != nullptr) parts.push_back(de->lookup(g, direction));
    steps.push_back(nn::concat_rows(parts));
  }
  const Var<T> h0 = g.constant(Matrix<T>::Zero(gru.hidden_size(), slots));
  return gru.forward_masked(steps, h0, lengths).last;
}

template <typename T>
Var<T> sre_forward(const RwenParams<T>& p, Var<T> words, Var<T> rte, const std::vector<RelationPath>& paths) {
  return p.ffn_sre(encode_paths(p.gru_sre, words, rte, static_cast<const nn::Embedding<T>*>(nullptr), paths));
}

template <typename T>
Var<T> awre_forward(const RwenParams<T>& p, Var<T> words, Var<T> rte, const std::vector<RelationPath>& prev_paths,
                    const std::vector<RelationPath>& next_paths) {
  const Var<T> pwre = p.ffn_pwre(encode_paths(p.gru_pwre, words, rte, &p.de, prev_paths));
  const Var<T> nwre = p.ffn_nwre(encode_paths(p.gru_nwre, words, rte, &p.de, next_paths));
  return p.ffn_awre(nn::concat_rows<T>({pwre, nwre}));
}

template <typename T>
Var<T> combine(const RwenParams<T>& p, Var<T> sre, Var<T> awre) {
  if (sre.rows() != awre.rows() || sre.cols() != awre.cols()) throw ShapeError("rwen: combine shape mismatch");
  return p.combiner(nn::concat_rows<T>({sre, awre}));
}

template <typename T>
RwenOutput<T> encode(const RwenParams<T>& p, const RwenConfig& cfg, Var<T> words, const EncoderInput& input) {
  if (words.rows() != cfg.d_h || words.cols() != input.slots()) {
    throw ShapeError("rwen: word matrix is " + std::to_string(words.rows()) + "x" + std::to_string(words.cols()) +
                     ", expected " + std::to_string(cfg.d_h) + "x" + std::to_string(input.slots()));
  }
  Graph<T>& g = *words.graph();
  const Eigen::Index slots = words.cols();
  const Var<T> zeros = g.constant(Matrix<T>::Zero(cfg.d_h, slots));
  if (cfg.bypassed()) return {zeros, zeros, g.constant(Matrix<T>::Zero(cfg.d_out, slots))};

  const Var<T> rte = rte_lookup(p, g, input.relations);
  const Var<T> sre = cfg.enable_sre ? sre_forward(p, words, rte, input.root_paths) : zeros;
  const Var<T> awre = cfg.enable_awre ? awre_forward(p, words, rte, input.prev_paths, input.next_paths) : zeros;
  return {sre, awre, combine(p, sre, awre)};
}

template <typename T>
Var<T> upsample_to_phonemes(Var<T> features, const std::vector<int>& counts) {
  if (static_cast<Eigen::Index>(counts.size()) + 2 != features.cols()) {
    throw ShapeError("rwen: " + std::to_string(counts.size()) + " phoneme counts for " +
                     std::to_string(features.cols()) + " slots");
  }
  std::vector<int> index;
  for (std::size_t w = 0; w < counts.size(); ++w) {
    if (counts[w] < 0) throw ShapeError("rwen: negative phoneme count");
    index.insert(index.end(), static_cast<std::size_t>(counts[w]), static_cast<int>(w) + 1);
  }
  return nn::gather_cols(features, index);
}

std::vector<int> phoneme_counts(const std::vector<std::vector<int>>& phonemes) {
  std::vector<int> counts;
  counts.reserve(phonemes.size());
  for (const auto& word : phonemes) counts.push_back(static_cast<int>(word.size()));
  return counts;
}

#define RWEN_INSTANTIATE_ENCODER(T)                                                                           \
  template struct RwenParams<T>;                                                                              \
  template Var<T> rte_lookup(const RwenParams<T>&, Graph<T>&, const std::vector<int>&);                       \
  template Var<T> encode_paths(const nn::GruCell<T>&, Var<T>, Var<T>, const nn::Embedding<T>*,                \
                               const std::vector<RelationPath>&);                                             \
  template Var<T> sre_forward(const RwenParams<T>&, Var<T>, Var<T>, const std::vector<RelationPath>&);        \
  template Var<T> awre_forward(const RwenParams<T>&, Var<T>, Var<T>, const std::vector<RelationPath>&,        \
                               const std::vector<RelationPath>&);                                             \
  template Var<T> combine(const RwenParams<T>&, Var<T>, Var<T>);                                              \
  template RwenOutput<T> encode(const RwenParams<T>&, const RwenConfig&, Var<T>, const EncoderInput&);        \
  template Var<T> upsample_to_phonemes(Var<T>, const std::vector<int>&);

RWEN_INSTANTIATE_ENCODER(float)
RWEN_INSTANTIATE_ENCODER(double)

#undef RWEN_INSTANTIATE_ENCODER

}  // namespace rwen::encoder
