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

#include "rwen/tts/config.hpp"

#include <fstream>
#include <stdexcept>

namespace rwen::encoder {

// Hand-written rather than macro-generated: missing keys keep their defaults.
void to_json(nlohmann::json& j, const RwenConfig& c) {
  j = {{"d_h", c.d_h},   {"d_et", c.d_et},           {"d_de", c.d_de},
       {"d_out", c.d_out}, {"enable_sre", c.enable_sre}, {"enable_awre", c.enable_awre}};
}

void from_json(const nlohmann::json& j, RwenConfig& c) {
  const auto take = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  take("d_h", c.d_h);
  take("d_et", c.d_et);
  take("d_de", c.d_de);
  take("d_out", c.d_out);
  take("enable_sre", c.enable_sre);
  take("enable_awre", c.enable_awre);
}

}  // namespace rwen::encoder

namespace rwen::tts {

void to_json(nlohmann::json& j, const TtsConfig& c) {
  j = {{"d_enc", c.d_enc},
       {"d_dec", c.d_dec},
       {"n_fft_blocks", c.n_fft_blocks},
       {"attention_heads", c.attention_heads},
       {"ffn_channels", c.ffn_channels},
       {"predictor_channels", c.predictor_channels},
       {"n_mels", c.n_mels},
       {"phoneme_vocab", c.phoneme_vocab},
       {"dropout", c.dropout},
       {"lambda_mel", c.lambda_mel},
       {"lambda_pitch", c.lambda_pitch},
       {"lambda_energy", c.lambda_energy},
       {"lambda_duration", c.lambda_duration}};
}

void from_json(const nlohmann::json& j, TtsConfig& c) {
  const auto take = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  take("d_enc", c.d_enc);
  take("d_dec", c.d_dec);
  take("n_fft_blocks", c.n_fft_blocks);
  take("attention_heads", c.attention_heads);
  take("ffn_channels", c.ffn_channels);
  take("predictor_channels", c.predictor_channels);
  take("n_mels", c.n_mels);
  take("phoneme_vocab", c.phoneme_vocab);
  take("dropout", c.dropout);
  take("lambda_mel", c.lambda_mel);
  take("lambda_pitch", c.lambda_pitch);
  take("lambda_energy", c.lambda_energy);
  take("lambda_duration", c.lambda_duration);
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"rwen", c.rwen},
       {"tts", c.tts},
       {"learning_rate", c.learning_rate},
       {"clip_norm", c.clip_norm},
       {"steps", c.steps},
       {"batch_size", c.batch_size},
       {"seed", c.seed},
       {"log_every", c.log_every},
       {"checkpoint_every", c.checkpoint_every}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  const auto take = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  take("rwen", c.rwen);
  take("tts", c.tts);
  take("learning_rate", c.learning_rate);
  take("clip_norm", c.clip_norm);
  take("steps", c.steps);
  take("batch_size", c.batch_size);
  take("seed", c.seed);
  take("log_every", c.log_every);
  take("checkpoint_every", c.checkpoint_every);
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw std::invalid_argument("config field '" + field + "' " + what);
}

void reject_unknown_keys(const nlohmann::json& given, const nlohmann::json& known, const std::string& prefix) {
  if (!given.is_object()) throw std::invalid_argument("config section '" + prefix + "' must be an object");
  for (const auto& [key, value] : given.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!known.contains(key)) throw std::invalid_argument("unknown config field '" + path + "'");
    if (known[key].is_object()) reject_unknown_keys(value, known[key], path);
  }
}

}  // namespace

TtsConfig TtsConfig::desk() {
  TtsConfig c;
  c.d_enc = 32;
  c.d_dec = 64;
  c.n_fft_blocks = 1;
  c.attention_heads = 2;
  c.ffn_channels = 64;
  c.predictor_channels = 32;
  c.n_mels = 16;
  c.phoneme_vocab = 24;
  return c;
}

void TtsConfig::validate() const {
  require(d_enc >= 1, "tts.d_enc", "must be >= 1");
  require(d_dec >= 1, "tts.d_dec", "must be >= 1");
  require(n_fft_blocks >= 0, "tts.n_fft_blocks", "must be >= 0");
  require(attention_heads >= 1, "tts.attention_heads", "must be >= 1");
  require(d_enc % attention_heads == 0, "tts.attention_heads", "must divide tts.d_enc");
  require(d_dec % attention_heads == 0, "tts.attention_heads", "must divide tts.d_dec");
  require(ffn_channels >= 1, "tts.ffn_channels", "must be >= 1");
  require(predictor_channels >= 1, "tts.predictor_channels", "must be >= 1");
  require(n_mels >= 1, "tts.n_mels", "must be >= 1");
  require(phoneme_vocab >= 1, "tts.phoneme_vocab", "must be >= 1");
  require(dropout >= 0.0 && dropout < 1.0, "tts.dropout", "must be in [0, 1)");
  for (const auto& [name, v] : {std::pair{"tts.lambda_mel", lambda_mel}, std::pair{"tts.lambda_pitch", lambda_pitch},
                                std::pair{"tts.lambda_energy", lambda_energy},
                                std::pair{"tts.lambda_duration", lambda_duration}}) {
    require(v >= 0.0, name, "must be >= 0");
  }
}

TrainConfig TrainConfig::desk(int embedding_dim, int n_mels, int phoneme_vocab) {
  TrainConfig c;
  c.rwen = encoder::RwenConfig::desk();
  c.rwen.d_h = embedding_dim;
  c.tts = TtsConfig::desk();
  c.tts.n_mels = n_mels;
  c.tts.phoneme_vocab = phoneme_vocab;
  c.rwen.d_out = c.tts.d_enc;
  return c;
}

void TrainConfig::validate() const {
  try {
    rwen.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config section 'rwen': ") + e.what());
  }
  tts.validate();
  require(learning_rate > 0.0, "learning_rate", "must be > 0");
  require(steps >= 0, "steps", "must be >= 0");
  require(batch_size >= 1, "batch_size", "must be >= 1");
  require(log_every >= 1, "log_every", "must be >= 1");
  require(checkpoint_every >= 0, "checkpoint_every", "must be >= 0");
}

nlohmann::json to_json(const TrainConfig& c) {
  nlohmann::json j;
  to_json(j, c);
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, to_json(TrainConfig{}), "");
  TrainConfig c;
  try {
    from_json(j, c);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  return train_config_from_json(j);
}

void save_train_config(const std::string& path, const TrainConfig& c) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write config " + path);
  out << to_json(c).dump(2) << '\n';
}

}  // namespace rwen::tts
