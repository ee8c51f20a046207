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

#include <memory>
#include <vector>

#include "rwen/encoder/rwen.hpp"
#include "rwen/featstore/manifest.hpp"
#include "rwen/tts/config.hpp"

namespace rwen::tts {

using nn::ForwardContext;
using nn::Graph;
using nn::Var;

// Self-attention and a conv feed-forward, each wrapped in dropout, a residual
// connection and layer norm.
template <typename T>
struct FftBlock {
  nn::MultiHeadAttention<T> attention;
  nn::LayerNorm<T> attention_norm;
  nn::Conv1d<T> ffn_in;   // kernel 3, d -> ffn_channels
  nn::Conv1d<T> ffn_out;  // kernel 1, ffn_channels -> d
  nn::LayerNorm<T> ffn_norm;

  static FftBlock create(nn::ParamSet<T>& params, const std::string& name, int dim, int heads, int ffn_channels,
                         nn::Rng& rng);
  Var<T> operator()(Var<T> x, double dropout, ForwardContext& ctx) const;
};

// (conv k3 -> ReLU -> LayerNorm -> dropout) x 2, then a linear read-out to one
// scalar per position.
template <typename T>
struct VariancePredictor {
  nn::Conv1d<T> conv1;
  nn::LayerNorm<T> norm1;
  nn::Conv1d<T> conv2;
  nn::LayerNorm<T> norm2;
  nn::Linear<T> out;

  static VariancePredictor create(nn::ParamSet<T>& params, const std::string& name, int in, int channels,
                                  nn::Rng& rng);
  Var<T> operator()(Var<T> x, double dropout, ForwardContext& ctx) const;  // 1 x L
};

template <typename T>
struct TtsParams {
  nn::Embedding<T> phoneme_embedding;  // d_enc x vocab
  std::vector<FftBlock<T>> encoder;
  nn::Linear<T> fuse;  // (d_enc + d_out) -> d_enc
  VariancePredictor<T> duration;
  VariancePredictor<T> pitch;
  VariancePredictor<T> energy;
  nn::Conv1d<T> pitch_embedding;   // 1 -> d_enc, kernel 3
  nn::Conv1d<T> energy_embedding;  // 1 -> d_enc, kernel 3
  nn::Linear<T> decoder_in;        // d_enc -> d_dec
  std::vector<FftBlock<T>> decoder;
  nn::Linear<T> mel_out;           // d_dec -> n_mels

  static TtsParams create(nn::ParamSet<T>& params, const TtsConfig& cfg, int rwen_out, nn::Rng& rng);
};

// d_enc x L. Throws ShapeError for an id outside the vocabulary.
template <typename T>
Var<T> phoneme_encode(const TtsParams<T>& p, const TtsConfig& cfg, Graph<T>& g, const std::vector<int>& ids,
                      ForwardContext& ctx);

// Concatenates the phoneme representation with the phoneme-aligned RWEN
// features and projects back to d_enc.
template <typename T>
Var<T> fuse_rwen(const TtsParams<T>& p, Var<T> phonemes, Var<T> rwen_features);

template <typename T>
struct VariancePrediction {
  Var<T> log_duration;  // 1 x L, predicts log(1 + frames)
  Var<T> pitch;         // 1 x L
  Var<T> energy;        // 1 x L
};

template <typename T>
VariancePrediction<T> predict_variances(const TtsParams<T>& p, const TtsConfig& cfg, Var<T> fused,
                                        ForwardContext& ctx);

template <typename T>
Var<T> add_variance_embeddings(const TtsParams<T>& p, Var<T> fused, Var<T> pitch, Var<T> energy);

// Column i repeated durations[i] times.
template <typename T>
Var<T> length_regulate(Var<T> x, const std::vector<int>& durations);

// n_mels x T; T = 0 yields an empty matrix.
template <typename T>
Var<T> mel_decode(const TtsParams<T>& p, const TtsConfig& cfg, Var<T> frames, ForwardContext& ctx);

// max(0, round(exp(x) - 1)) per position.
std::vector<int> durations_from_log(const MatrixF& log_duration);

// One sentence with everything precomputed that does not depend on
// parameters.
struct Example {
  const featstore::PreparedSentence* sentence = nullptr;
  encoder::EncoderInput input;
  MatrixF words;  // pooled word matrix, d_h x (n+2)
  std::vector<int> phonemes;       // flattened
  std::vector<int> phoneme_counts;  // per word

  static Example from(const featstore::PreparedSentence& s);
};

std::vector<Example> make_examples(const std::vector<featstore::PreparedSentence>& data);

template <typename T>
struct Model {
  TrainConfig config;
  nn::ParamSet<T> params;
  encoder::RwenParams<T> rwen;
  TtsParams<T> tts;

  // Initialization draws from a stream keyed only on `seed`.
  static std::unique_ptr<Model> create(const TrainConfig& config, std::uint64_t seed);
};

struct LossBreakdown {
  double total = 0.0;
  double mel = 0.0;
  double pitch = 0.0;
  double energy = 0.0;
  double duration = 0.0;

  LossBreakdown& operator+=(const LossBreakdown& o);
  LossBreakdown scaled(double s) const;
};

template <typename T>
struct TrainingForward {
  Var<T> loss;  // 1 x 1
  LossBreakdown parts;
  Var<T> rwen_features;  // d_out x L
  Var<T> mel;            // n_mels x sum(target durations)
};

// Teacher-forced pass: target durations drive length regulation and target
// pitch/energy feed the variance embeddings. Requires targets.
template <typename T>
TrainingForward<T> training_forward(const Model<T>& m, Graph<T>& g, const Example& ex, ForwardContext& ctx);

struct Synthesis {
  MatrixF rwen_features;  // d_out x L
  MatrixF log_duration;   // 1 x L
  MatrixF pitch;
  MatrixF energy;
  std::vector<int> durations;
  MatrixF mel;  // n_mels x sum(durations)
};

// Inference: predicted durations, pitch and energy; dropout off.
Synthesis synthesize(const Model<float>& m, const Example& ex);

}  // namespace rwen::tts
