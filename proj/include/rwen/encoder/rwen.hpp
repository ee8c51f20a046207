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

#pragma once

#include <vector>

#include "rwen/deptree/paths.hpp"
#include "rwen/nn/layers.hpp"

namespace rwen::encoder {

using nn::Graph;
using nn::Var;

struct RwenConfig {
  int d_h = 768;   // word representation size; the language-model width
  int d_et = 64;   // relation tag embedding
  int d_de = 16;   // direction embedding
  int d_out = 256;
  bool enable_sre = true;
  bool enable_awre = true;

  // Small dimensions for tests and the synthetic data set.
  static RwenConfig desk();
  // With both branches disabled the encoder is bypassed and emits zeros.
  bool bypassed() const { return !enable_sre && !enable_awre; }
  // Throws std::invalid_argument.
  void validate() const;
  bool operator==(const RwenConfig&) const = default;
};

// Parameters are always allocated for both branches so checkpoints keep the
// same layout across ablation settings.
template <typename T>
struct RwenParams {
  nn::Embedding<T> rte;  // d_et x kRelationVocabSize
  nn::Embedding<T> de;   // d_de x 3
  nn::GruCell<T> gru_sre;   // hidden d_h + d_et
  nn::GruCell<T> gru_pwre;  // hidden d_h + d_et + d_de
  nn::GruCell<T> gru_nwre;
  nn::Linear<T> ffn_sre;    // omega_1
  nn::Linear<T> ffn_pwre;   // omega_2, one per direction of travel
  nn::Linear<T> ffn_nwre;
  nn::Linear<T> ffn_awre;   // omega_3
  nn::Linear<T> combiner;   // omega_c

  static RwenParams create(nn::ParamSet<T>& params, const RwenConfig& cfg, nn::Rng& rng);
};

// Everything the encoder needs from the tree, independent of parameters.
struct EncoderInput {
  std::vector<int> relations;  // n+2 relation ids; boundary at both ends
  std::vector<deptree::RelationPath> root_paths;
  std::vector<deptree::RelationPath> prev_paths;
  std::vector<deptree::RelationPath> next_paths;

  static EncoderInput from_tree(const deptree::DependencyTree& tree);
  int slots() const { return static_cast<int>(relations.size()); }
};

template <typename T>
Var<T> rte_lookup(const RwenParams<T>& p, Graph<T>& g, const std::vector<int>& relations);

// One GRU pass over every slot's path at once; column i of the result is the
// last hidden state for paths[i]. `de` is null for SRE.
template <typename T>
Var<T> encode_paths(const nn::GruCell<T>& gru, Var<T> words, Var<T> rte, const nn::Embedding<T>* de,
                    const std::vector<deptree::RelationPath>& paths);

// d_h x (n+2)
template <typename T>
Var<T> sre_forward(const RwenParams<T>& p, Var<T> words, Var<T> rte, const std::vector<deptree::RelationPath>& paths);

// d_h x (n+2)
template <typename T>
Var<T> awre_forward(const RwenParams<T>& p, Var<T> words, Var<T> rte,
                    const std::vector<deptree::RelationPath>& prev_paths,
                    const std::vector<deptree::RelationPath>& next_paths);

// omega_c [sre; awre] + b_c
template <typename T>
Var<T> combine(const RwenParams<T>& p, Var<T> sre, Var<T> awre);

template <typename T>
struct RwenOutput {
  Var<T> sre;    // zeros when disabled
  Var<T> awre;   // zeros when disabled
  Var<T> words;  // d_out x (n+2)
};

// `words` is the pooled word matrix, d_h x (n+2). A disabled branch is a zero
// block and its parameters never enter the graph.
template <typename T>
RwenOutput<T> encode(const RwenParams<T>& p, const RwenConfig& cfg, Var<T> words, const EncoderInput& input);

// Repeats word column i (slot i, 1-based) counts[i-1] times. The boundary
// slots own no phonemes and are dropped.
template <typename T>
Var<T> upsample_to_phonemes(Var<T> features, const std::vector<int>& counts);

std::vector<int> phoneme_counts(const std::vector<std::vector<int>>& phonemes);

}  // namespace rwen::encoder
