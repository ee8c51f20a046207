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

#include <cstdint>
#include <string>
#include <vector>

#include "rwen/featstore/manifest.hpp"

namespace rwen::featstore {

// Counter-based stand-in for a language-model encoder: entry (r, c) depends
// only on (seed, hash(sentence_id), c, r) and is approximately N(0, 1).
MatrixF pseudo_embeddings(const std::string& sentence_id, const align::SubwordSegmentation& seg, int dim,
                          std::uint64_t seed);

struct SynthOptions {
  int sentences = 32;
  int max_words = 8;
  int phoneme_vocab = 24;
  int embedding_dim = 16;
  int n_mels = 16;
  int max_phonemes_per_word = 6;
  std::uint64_t seed = 1;
};

// Random valid trees, UD tags, subword spans and phonemes, with acoustic
// targets produced by a fixed random linear teacher over the pooled word
// embedding and the phoneme id, so a model can fit them exactly.
std::vector<PreparedSentence> synth_dataset(const SynthOptions& options);

}  // namespace rwen::featstore
