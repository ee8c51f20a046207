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

#include <nlohmann/json.hpp>

#include "rwen/encoder/rwen.hpp"

namespace rwen::tts {

struct TtsConfig {
  int d_enc = 256;
  int d_dec = 1024;
  int n_fft_blocks = 4;
  int attention_heads = 2;
  int ffn_channels = 1024;  // hidden width of the conv feed-forward in each block
  int predictor_channels = 256;
  int n_mels = 80;
  int phoneme_vocab = 64;
  double dropout = 0.1;
  double lambda_mel = 1.0;
  double lambda_pitch = 0.1;
  double lambda_energy = 0.1;
  double lambda_duration = 0.1;

  static TtsConfig desk();
  // Throws std::invalid_argument naming the field.
  void validate() const;
  bool operator==(const TtsConfig&) const = default;
};

struct TrainConfig {
  encoder::RwenConfig rwen;
  TtsConfig tts;
  double learning_rate = 1e-3;
  double clip_norm = 1.0;  // <= 0 disables clipping
  int steps = 2000;
  int batch_size = 32;     // sentences per step; the whole set when larger
  std::uint64_t seed = 1;
  int log_every = 100;
  int checkpoint_every = 0;  // 0: only the final checkpoint

  // Desk-scale model matched to synthetic data with the given dimensions.
  static TrainConfig desk(int embedding_dim = 16, int n_mels = 16, int phoneme_vocab = 24);
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

nlohmann::json to_json(const TrainConfig& c);
// Missing keys keep their defaults; unknown keys are rejected with
// std::invalid_argument so typos do not silently fall back.
TrainConfig train_config_from_json(const nlohmann::json& j);
TrainConfig load_train_config(const std::string& path);
void save_train_config(const std::string& path, const TrainConfig& c);

}  // namespace rwen::tts
