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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwen/align/word_pooling.hpp"
#include "rwen/deptree/dependency_tree.hpp"
#include "rwen/nn/matrix.hpp"

namespace rwen::featstore {

// Names the offending sentence and field.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string sentence_id, std::string field, const std::string& message);

  const std::string& sentence_id() const { return sentence_id_; }
  const std::string& field() const { return field_; }

 private:
  std::string sentence_id_;
  std::string field_;
};

// Where the subword embedding matrix comes from.
struct EmbeddingSource {
  enum class Kind { kFile, kPseudo };
  Kind kind = Kind::kPseudo;
  std::string file;  // kFile: path relative to the manifest directory
  int dim = 16;      // rows; kFile takes it from the tensor
  std::uint64_t seed = 0;

  bool operator==(const EmbeddingSource&) const = default;
};

struct AcousticTargets {
  std::vector<int> durations;  // frames per phoneme
  std::vector<float> pitch;    // normalized, per phoneme
  std::vector<float> energy;   // per phoneme
  MatrixF mel;                 // n_mels x sum(durations)

  bool operator==(const AcousticTargets&) const = default;
};

struct PreparedSentence {
  std::string id;
  std::vector<std::string> words;
  deptree::DependencyTree tree;
  align::SubwordSegmentation seg;
  EmbeddingSource embedding_source;
  MatrixF embeddings;  // d_H x (m + 2), resolved at load
  std::vector<std::vector<int>> phonemes;
  std::optional<AcousticTargets> targets;

  int word_count() const { return tree.size(); }
  int phoneme_count() const;
  int frame_count() const;

  bool operator==(const PreparedSentence&) const = default;
};

// Checks every cross-field invariant; throws ValidationError.
void validate(const PreparedSentence& s);

// Line-delimited JSON, one record per sentence; tensors live in sidecar
// TensorFiles under "<manifest dir>/tensors/". Pseudo embeddings are stored
// as a directive, never as a tensor.
void save_manifest(const std::string& path, const std::vector<PreparedSentence>& sentences);
std::vector<PreparedSentence> load_manifest(const std::string& path);

// $RWEN_DATA_DIR, or "data" when unset.
std::string default_data_dir();
// Returns `path` if it exists, otherwise the same path under default_data_dir().
std::string resolve_data_path(const std::string& path);

}  // namespace rwen::featstore
