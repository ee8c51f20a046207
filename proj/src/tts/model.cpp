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

#include "rwen/tts/model.hpp"

#include <cmath>
#include <string>

namespace rwen::tts {

using nn::ShapeError;

template <typename T>
FftBlock<T> FftBlock<T>::create(nn::ParamSet<T>& params, const std::string& name, int dim, int heads,
                                int ffn_channels, nn::Rng& rng) {
  FftBlock b;
  b.attention = nn::MultiHeadAttention<T>::create(params, name + ".attention", dim, heads, rng);
  b.attention_norm = nn::LayerNorm<T>::create(params, name + ".attention_norm", dim);
  b.ffn_in = nn::Conv1d<T>::create(params, name + ".ffn_in", dim, ffn_channels, 3, rng);
  b.ffn_out = nn::Conv1d<T>::create(params, name + ".ffn_out", ffn_channels, dim, 1, rng);
  b.ffn_norm = nn::LayerNorm<T>::create(params, name + ".ffn_norm", dim);
  return b;
}

template <typename T>
Var<T> FftBlock<T>::operator()(Var<T> x, double dropout, ForwardContext& ctx) const {
  x = attention_norm(nn::add(x, nn::dropout(attention(x), dropout, ctx)));
  const Var<T> f = ffn_out(nn::relu(ffn_in(x)));
  return ffn_norm(nn::add(x, nn::dropout(f, dropout, ctx)));
}

template <typename T>
VariancePredictor<T> VariancePredictor<T>::create(nn::ParamSet<T>& params, const std::string& name, int in,
                                                  int channels, nn::Rng& rng) {
  VariancePredictor v;
  v.conv1 = nn::Conv1d<T>::create(params, name + ".conv1", in, channels, 3, rng);
  v.norm1 = nn::LayerNorm<T>::create(params, name + ".norm1", channels);
  v.conv2 = nn::Conv1d<T>::create(params, name + ".conv2", channels, channels, 3, rng);
  v.norm2 = nn::LayerNorm<T>::create(params, name + ".norm2", channels);
  v.out = nn::Linear<T>::create(params, name + ".out", channels, 1, rng);
  return v;
}

template <typename T>
Var<T> VariancePredictor<T>::operator()(Var<T> x, double dropout, ForwardContext& ctx) const {
  x = nn::dropout(norm1(nn::relu(conv1(x))), dropout, ctx);
  x = nn::dropout(norm2(nn::relu(conv2(x))), dropout, ctx);
  return out(x);
}

template <typename T>
TtsParams<T> TtsParams<T>::create(nn::ParamSet<T>& params, const TtsConfig& cfg, int rwen_out, nn::Rng& rng) {
  cfg.validate();
  TtsParams p;
  p.phoneme_embedding = nn::Embedding<T>::create(params, "tts.phoneme_embedding", cfg.d_enc, cfg.phoneme_vocab, rng);
  // Unit-scale phoneme embeddings so they are not drowned by the position
  // encoding at initialization.
  nn::init_normal(*p.phoneme_embedding.table, 1.0, rng);
  for (int b = 0; b < cfg.n_fft_blocks; ++b) {
    p.encoder.push_back(FftBlock<T>::create(params, "tts.encoder." + std::to_string(b), cfg.d_enc,
                                            cfg.attention_heads, cfg.ffn_channels, rng));
  }
  p.fuse = nn::Linear<T>::create(params, "tts.fuse", cfg.d_enc + rwen_out, cfg.d_enc, rng);
  p.duration = VariancePredictor<T>::create(params, "tts.duration", cfg.d_enc, cfg.predictor_channels, rng);
  p.pitch = VariancePredictor<T>::create(params, "tts.pitch", cfg.d_enc, cfg.predictor_channels, rng);
  p.energy = VariancePredictor<T>::create(params, "tts.energy", cfg.d_enc, cfg.predictor_channels, rng);
  p.pitch_embedding = nn::Conv1d<T>::create(params, "tts.pitch_embedding", 1, cfg.d_enc, 3, rng);
  p.energy_embedding = nn::Conv1d<T>::create(params, "tts.energy_embedding", 1, cfg.d_enc, 3, rng);
  p.decoder_in = nn::Linear<T>::create(params, "tts.decoder_in", cfg.d_enc, cfg.d_dec, rng);
  for (int b = 0; b < cfg.n_fft_blocks; ++b) {
    p.decoder.push_back(FftBlock<T>::create(params, "tts.decoder." + std::to_string(b), cfg.d_dec,
                                            cfg.attention_heads, cfg.ffn_channels, rng));
  }
  p.mel_out = nn::Linear<T>::create(params, "tts.mel_out", cfg.d_dec, cfg.n_mels, rng);
  return p;
}

template <typename T>
Var<T> phoneme_encode(const TtsParams<T>& p, const TtsConfig& cfg, Graph<T>& g, const std::vector<int>& ids,
                      ForwardContext& ctx) {
  for (const int id : ids) {
    if (id < 0 || id >= cfg.phoneme_vocab) {
      throw ShapeError("phoneme id " + std::to_string(id) + " outside vocabulary of " +
                       std::to_string(cfg.phoneme_vocab));
    }
  }
  const auto length = static_cast<Eigen::Index>(ids.size());
  if (length == 0) return g.constant(Matrix<T>::Zero(cfg.d_enc, 0));
  Var<T> x = nn::add_const(p.phoneme_embedding.lookup(g, ids), nn::sinusoidal_positions<T>(cfg.d_enc, length));
  for (const auto& block : p.encoder) x = block(x, cfg.dropout, ctx);
  return x;
}

template <typename T>
Var<T> fuse_rwen(const TtsParams<T>& p, Var<T> phonemes, Var<T> rwen_features) {
  if (phonemes.cols() != rwen_features.cols()) {
    throw ShapeError("fuse: " + std::to_string(phonemes.cols()) + " phonemes but " +
                     std::to_string(rwen_features.cols()) + " feature columns");
  }
  return p.fuse(nn::concat_rows<T>({phonemes, rwen_features}));
}

template <typename T>
VariancePrediction<T> predict_variances(const TtsParams<T>& p, const TtsConfig& cfg, Var<T> fused,
                                        ForwardContext& ctx) {
  return {p.duration(fused, cfg.dropout, ctx), p.pitch(fused, cfg.dropout, ctx), p.energy(fused, cfg.dropout, ctx)};
}

template <typename T>
Var<T> add_variance_embeddings(const TtsParams<T>& p, Var<T> fused, Var<T> pitch, Var<T> energy) {
  if (pitch.rows() != 1 || energy.rows() != 1 || pitch.cols() != fused.cols() || energy.cols() != fused.cols()) {
    throw ShapeError("variance embedding: pitch/energy must be 1 x " + std::to_string(fused.cols()));
  }
  return nn::add(fused, nn::add(p.pitch_embedding(pitch), p.energy_embedding(energy)));
}

template <typename T>
Var<T> length_regulate(Var<T> x, const std::vector<int>& durations) {
  if (static_cast<Eigen::Index>(durations.size()) != x.cols()) {
    throw ShapeError("length regulator: " + std::to_string(durations.size()) + " durations for " +
                     std::to_string(x.cols()) + " positions");
  }
  std::vector<int> index;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    if (durations[i] < 0) throw ShapeError("length regulator: negative duration");
    index.insert(index.end(), static_cast<std::size_t>(durations[i]), static_cast<int>(i));
  }
  return nn::gather_cols(x, index);
}

template <typename T>
Var<T> mel_decode(const TtsParams<T>& p, const TtsConfig& cfg, Var<T> frames, ForwardContext& ctx) {
  Graph<T>& g = *frames.graph();
  if (frames.cols() == 0) return g.constant(Matrix<T>::Zero(cfg.n_mels, 0));
  Var<T> x = nn::add_const(p.decoder_in(frames), nn::sinusoidal_positions<T>(cfg.d_dec, frames.cols()));
  for (const auto& block : p.decoder) x = block(x, cfg.dropout, ctx);
  return p.mel_out(x);
}

std::vector<int> durations_from_log(const MatrixF& log_duration) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(log_duration.size()));
  for (Eigen::Index i = 0; i < log_duration.size(); ++i) {
    const double frames = std::exp(static_cast<double>(log_duration.data()[i])) - 1.0;
    out.push_back(static_cast<int>(std::max(0.0, std::round(std::min(frames, 1e6)))));
  }
  return out;
}

Example Example::from(const featstore::PreparedSentence& s) {
  Example ex;
  ex.sentence = &s;
  ex.input = encoder::EncoderInput::from_tree(s.tree);
  ex.words = align::word_average_pool(s.embeddings, s.seg);
  for (const auto& word : s.phonemes) ex.phonemes.insert(ex.phonemes.end(), word.begin(), word.end());
  ex.phoneme_counts = encoder::phoneme_counts(s.phonemes);
  return ex;
}

std::vector<Example> make_examples(const std::vector<featstore::PreparedSentence>& data) {
  std::vector<Example> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back(Example::from(s));
  return out;
}

template <typename T>
std::unique_ptr<Model<T>> Model<T>::create(const TrainConfig& config, std::uint64_t seed) {
  config.validate();
  auto m = std::make_unique<Model>();
  m->config = config;
  nn::Rng rng(seed);
  m->rwen = encoder::RwenParams<T>::create(m->params, config.rwen, rng);
  m->tts = TtsParams<T>::create(m->params, config.tts, config.rwen.d_out, rng);
  return m;
}

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& o) {
  total += o.total;
  mel += o.mel;
  pitch += o.pitch;
  energy += o.energy;
  duration += o.duration;
  return *this;
}

LossBreakdown LossBreakdown::scaled(double s) const { return {total * s, mel * s, pitch * s, energy * s, duration * s}; }

namespace {

template <typename T>
Var<T> rwen_phoneme_features(const Model<T>& m, Graph<T>& g, const Example& ex) {
  const auto& rc = m.config.rwen;
  if (ex.words.rows() != rc.d_h) {
    throw ShapeError("config field 'rwen.d_h' is " + std::to_string(rc.d_h) + " but sentence '" + ex.sentence->id +
                     "' has " + std::to_string(ex.words.rows()) + "-dimensional embeddings");
  }
  const auto words = g.constant(ex.words.template cast<T>());
  const auto out = encoder::encode(m.rwen, rc, words, ex.input);
  return encoder::upsample_to_phonemes(out.words, ex.phoneme_counts);
}

template <typename T>
Matrix<T> row_of(const std::vector<float>& v) {
  Matrix<T> r(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) r(0, static_cast<Eigen::Index>(i)) = static_cast<T>(v[i]);
  return r;
}

}  // namespace

template <typename T>
TrainingForward<T> training_forward(const Model<T>& m, Graph<T>& g, const Example& ex, ForwardContext& ctx) {
  const featstore::PreparedSentence& s = *ex.sentence;
  if (!s.targets) throw featstore::ValidationError(s.id, "targets", "training needs acoustic targets");
  const featstore::AcousticTargets& t = *s.targets;
  const TtsConfig& cfg = m.config.tts;
  const auto length = static_cast<Eigen::Index>(ex.phonemes.size());

  TrainingForward<T> out;
  out.rwen_features = rwen_phoneme_features(m, g, ex);
  if (length == 0) {
    out.loss = g.constant(Matrix<T>::Zero(1, 1));
    out.mel = g.constant(Matrix<T>::Zero(cfg.n_mels, 0));
    return out;
  }
  const Var<T> phonemes = phoneme_encode(m.tts, cfg, g, ex.phonemes, ctx);
  const Var<T> fused = fuse_rwen(m.tts, phonemes, out.rwen_features);
  const VariancePrediction<T> pred = predict_variances(m.tts, cfg, fused, ctx);

  const Matrix<T> pitch = row_of<T>(t.pitch);
  const Matrix<T> energy = row_of<T>(t.energy);
  Matrix<T> log_duration(1, length);
  for (Eigen::Index i = 0; i < length; ++i) log_duration(0, i) = static_cast<T>(std::log1p(t.durations[i]));

  const Var<T> adapted = add_variance_embeddings(m.tts, fused, g.constant(pitch), g.constant(energy));
  out.mel = mel_decode(m.tts, cfg, length_regulate(adapted, t.durations), ctx);

  const Var<T> mel_loss = nn::mse(out.mel, Matrix<T>(t.mel.template cast<T>()));
  const Var<T> pitch_loss = nn::mse(pred.pitch, pitch);
  const Var<T> energy_loss = nn::mse(pred.energy, energy);
  const Var<T> duration_loss = nn::mse(pred.log_duration, log_duration);
  out.loss = nn::add(nn::add(nn::scale(mel_loss, static_cast<T>(cfg.lambda_mel)),
                             nn::scale(pitch_loss, static_cast<T>(cfg.lambda_pitch))),
                     nn::add(nn::scale(energy_loss, static_cast<T>(cfg.lambda_energy)),
                             nn::scale(duration_loss, static_cast<T>(cfg.lambda_duration))));
  out.parts = {static_cast<double>(out.loss.value()(0, 0)), static_cast<double>(mel_loss.value()(0, 0)),
               static_cast<double>(pitch_loss.value()(0, 0)), static_cast<double>(energy_loss.value()(0, 0)),
               static_cast<double>(duration_loss.value()(0, 0))};
  return out;
}

Synthesis synthesize(const Model<float>& m, const Example& ex) {
  Graph<float> g(false);
  ForwardContext ctx;  // eval mode
  const TtsConfig& cfg = m.config.tts;
  Synthesis out;
  const Var<float> features = rwen_phoneme_features(m, g, ex);
  out.rwen_features = features.value();
  if (ex.phonemes.empty()) {
    out.log_duration = out.pitch = out.energy = MatrixF(1, 0);
    out.mel = MatrixF(cfg.n_mels, 0);
    return out;
  }
  const Var<float> fused = fuse_rwen(m.tts, phoneme_encode(m.tts, cfg, g, ex.phonemes, ctx), features);
  const VariancePrediction<float> pred = predict_variances(m.tts, cfg, fused, ctx);
  out.log_duration = pred.log_duration.value();
  out.pitch = pred.pitch.value();
  out.energy = pred.energy.value();
  out.durations = durations_from_log(out.log_duration);
  const Var<float> adapted = add_variance_embeddings(m.tts, fused, pred.pitch, pred.energy);
  out.mel = mel_decode(m.tts, cfg, length_regulate(adapted, out.durations), ctx).value();
  return out;
}

#define RWEN_INSTANTIATE_TTS(T)                                                                              \
  template struct FftBlock<T>;                                                                               \
  template struct VariancePredictor<T>;                                                                      \
  template struct TtsParams<T>;                                                                              \
  template struct Model<T>;                                                                                  \
  template Var<T> phoneme_encode(const TtsParams<T>&, const TtsConfig&, Graph<T>&, const std::vector<int>&,   \
                                 ForwardContext&);                                                           \
  template Var<T> fuse_rwen(const TtsParams<T>&, Var<T>, Var<T>);                                            \
  template VariancePrediction<T> predict_variances(const TtsParams<T>&, const TtsConfig&, Var<T>,            \
                                                   ForwardContext&);                                         \
  template Var<T> add_variance_embeddings(const TtsParams<T>&, Var<T>, Var<T>, Var<T>);                      \
  template Var<T> length_regulate(Var<T>, const std::vector<int>&);                                          \
  template Var<T> mel_decode(const TtsParams<T>&, const TtsConfig&, Var<T>, ForwardContext&);                \
  template TrainingForward<T> training_forward(const Model<T>&, Graph<T>&, const Example&, ForwardContext&);

RWEN_INSTANTIATE_TTS(float)
RWEN_INSTANTIATE_TTS(double)

#undef RWEN_INSTANTIATE_TTS

}  // namespace rwen::tts
