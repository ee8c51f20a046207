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

#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "rwen/featstore/synth.hpp"
#include "rwen/nn/checkpoint.hpp"
#include "rwen/nn/gradcheck.hpp"
#include "rwen/tts/gradient_suite.hpp"
#include "rwen/tts/trainer.hpp"

namespace rwen::tts {
namespace {

namespace fs = std::filesystem;
using nn::ParamSet;
using nn::Rng;

// d_H = 8, d_enc = 16 and everything else as small as it goes.
TrainConfig tiny_config() {
  TrainConfig c = TrainConfig::desk(8, 4, 6);
  c.rwen.d_et = 4;
  c.rwen.d_de = 3;
  c.rwen.d_out = 6;
  c.tts.d_enc = 16;
  c.tts.d_dec = 8;
  c.tts.ffn_channels = 8;
  c.tts.predictor_channels = 6;
  return c;
}

std::vector<featstore::PreparedSentence> tiny_data(int sentences, std::uint64_t seed) {
  featstore::SynthOptions o;
  o.sentences = sentences;
  o.max_words = 4;
  o.embedding_dim = 8;
  o.n_mels = 4;
  o.phoneme_vocab = 6;
  o.max_phonemes_per_word = 2;
  o.seed = seed;
  return featstore::synth_dataset(o);
}

MatrixD layer_norm_oracle(const MatrixD& x) {
  MatrixD out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mean = x.col(c).mean();
    const double var = (x.col(c).array() - mean).square().mean();
    out.col(c) = (x.col(c).array() - mean) / std::sqrt(var + 1e-5);
  }
  return out;
}

TEST(Config, JsonRoundTripAndUnknownKeys) {
  TrainConfig c = TrainConfig::desk();
  c.rwen.enable_awre = false;
  c.tts.lambda_pitch = 0.25;
  c.seed = 99;
  EXPECT_EQ(train_config_from_json(to_json(c)), c);

  nlohmann::json partial = {{"steps", 7}, {"tts", {{"d_enc", 8}, {"attention_heads", 1}}}};
  const TrainConfig p = train_config_from_json(partial);
  EXPECT_EQ(p.steps, 7);
  EXPECT_EQ(p.tts.d_enc, 8);
  EXPECT_EQ(p.tts.d_dec, TtsConfig{}.d_dec);

  EXPECT_THROW(train_config_from_json({{"stpes", 7}}), std::invalid_argument);
  EXPECT_THROW(train_config_from_json({{"tts", {{"dropuot", 0.1}}}}), std::invalid_argument);
  try {
    train_config_from_json({{"tts", {{"dropout", 1.5}}}});
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("tts.dropout"), std::string::npos);
  }
  EXPECT_THROW(train_config_from_json({{"tts", {{"d_enc", 15}, {"attention_heads", 2}}}}), std::invalid_argument);
  EXPECT_THROW(train_config_from_json({{"steps", "many"}}), std::invalid_argument);
}

TEST(Config, FileRoundTripAndHash) {
  const fs::path dir = fs::temp_directory_path() / "rwen_tts_config";
  fs::create_directories(dir);
  const TrainConfig c = TrainConfig::desk();
  save_train_config((dir / "c.json").string(), c);
  EXPECT_EQ(load_train_config((dir / "c.json").string()), c);
  EXPECT_EQ(nn::config_hash(to_json(c)), nn::config_hash(to_json(load_train_config((dir / "c.json").string()))));
  TrainConfig other = c;
  other.rwen.enable_sre = false;
  EXPECT_NE(nn::config_hash(to_json(c)), nn::config_hash(to_json(other)));
}

TEST(PhonemeEncoder, SinglePhonemeAndRange) {
  const auto m = Model<double>::create(tiny_config(), 1);
  Graph<double> g;
  ForwardContext ctx;
  const auto x = phoneme_encode(m->tts, m->config.tts, g, {3}, ctx);
  EXPECT_EQ(x.rows(), 16);
  EXPECT_EQ(x.cols(), 1);
  EXPECT_TRUE(all_finite(x.value()));
  EXPECT_THROW(phoneme_encode(m->tts, m->config.tts, g, {6}, ctx), nn::ShapeError);
  EXPECT_THROW(phoneme_encode(m->tts, m->config.tts, g, {-1}, ctx), nn::ShapeError);
  EXPECT_EQ(phoneme_encode(m->tts, m->config.tts, g, {}, ctx).cols(), 0);
}

TEST(PhonemeEncoder, ZeroOutputProjectionsLeaveLayerNormOfEmbeddings) {
  auto m = Model<double>::create(tiny_config(), 2);
  for (auto& block : m->tts.encoder) {
    for (auto* p : {block.attention.output.weight, block.attention.output.bias, block.ffn_out.weight,
                    block.ffn_out.bias}) {
      p->value.setZero();
    }
  }
  const std::vector<int> ids = {0, 4, 2, 2, 5};
  Graph<double> g;
  ForwardContext ctx;
  const MatrixD out = phoneme_encode(m->tts, m->config.tts, g, ids, ctx).value();
  MatrixD embedded(16, 5);
  for (int i = 0; i < 5; ++i) embedded.col(i) = m->tts.phoneme_embedding.table->value.col(ids[static_cast<std::size_t>(i)]);
  embedded += nn::sinusoidal_positions<double>(16, 5);
  // One norm per residual; the second is a no-op up to eps.
  const MatrixD expected = layer_norm_oracle(layer_norm_oracle(embedded));
  EXPECT_LT((out - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Fuse, IdentityProjection) {
  auto m = Model<double>::create(tiny_config(), 3);
  auto& w = m->tts.fuse.weight->value;
  w.setZero();
  w.leftCols(16).setIdentity();
  m->tts.fuse.bias->value.setZero();
  Graph<double> g;
  const MatrixD ph = MatrixD::Random(16, 7);
  const auto out = fuse_rwen(m->tts, g.constant(ph), g.constant(MatrixD::Zero(6, 7)));
  EXPECT_EQ(out.value(), ph);
  EXPECT_THROW(fuse_rwen(m->tts, g.constant(ph), g.constant(MatrixD::Zero(6, 6))), nn::ShapeError);
}

TEST(Variances, ConstantInputGivesConstantInterior) {
  const auto m = Model<double>::create(tiny_config(), 4);
  Graph<double> g;
  ForwardContext ctx;
  const auto v = predict_variances(m->tts, m->config.tts, g.constant(MatrixD::Constant(16, 9, 0.3)), ctx);
  for (const auto& out : {v.log_duration, v.pitch, v.energy}) {
    ASSERT_EQ(out.rows(), 1);
    ASSERT_EQ(out.cols(), 9);
    // Two kernel-3 convolutions see the zero padding only within two
    // positions of either edge.
    for (int c = 3; c < 7; ++c) EXPECT_NEAR(out.value()(0, c), out.value()(0, 2), 1e-12);
  }
}

TEST(Variances, EmbeddingIdentityAndCommutativity) {
  auto m = Model<double>::create(tiny_config(), 5);
  Graph<double> g;
  const MatrixD fused = MatrixD::Random(16, 5);
  m->tts.pitch_embedding.bias->value.setZero();
  m->tts.energy_embedding.bias->value.setZero();
  const auto zero = g.constant(MatrixD::Zero(1, 5));
  EXPECT_EQ(add_variance_embeddings(m->tts, g.constant(fused), zero, zero).value(), fused);

  const MatrixD pitch = MatrixD::Random(1, 5), energy = MatrixD::Random(1, 5);
  Graph<double> g1;
  const MatrixD a = add_variance_embeddings(m->tts, g1.constant(fused), g1.constant(pitch), g1.constant(energy)).value();
  std::swap(m->tts.pitch_embedding, m->tts.energy_embedding);
  Graph<double> g2;
  const MatrixD b = add_variance_embeddings(m->tts, g2.constant(fused), g2.constant(energy), g2.constant(pitch)).value();
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LengthRegulator, RepeatsInOrder) {
  Graph<double> g;
  MatrixD x(1, 3);
  x << 1, 2, 3;
  MatrixD expected(1, 6);
  expected << 1, 1, 2, 3, 3, 3;
  EXPECT_EQ(length_regulate(g.constant(x), {2, 1, 3}).value(), expected);
  EXPECT_EQ(length_regulate(g.constant(x), {0, 0, 0}).cols(), 0);
  EXPECT_THROW(length_regulate(g.constant(x), {1, 1}), nn::ShapeError);
  EXPECT_THROW(length_regulate(g.constant(x), {1, -1, 1}), nn::ShapeError);
}

TEST(LengthRegulator, GradientIsDuplication) {
  ParamSet<double> ps;
  auto& x = ps.add("x", 2, 3);
  x.value.setRandom();
  Graph<double> g;
  g.backward(nn::sum(length_regulate(g.param(x), {2, 0, 3})));
  g.accumulate_param_grads();
  MatrixD expected(2, 3);
  expected << 2, 0, 3,
              2, 0, 3;
  EXPECT_EQ(x.grad, expected);
}

TEST(MelDecoder, EmptyAndShape) {
  const auto m = Model<double>::create(tiny_config(), 6);
  Graph<double> g;
  ForwardContext ctx;
  const auto empty = mel_decode(m->tts, m->config.tts, g.constant(MatrixD::Zero(16, 0)), ctx);
  EXPECT_EQ(empty.rows(), 4);
  EXPECT_EQ(empty.cols(), 0);
  const auto mel = mel_decode(m->tts, m->config.tts, g.constant(MatrixD::Random(16, 11)), ctx);
  EXPECT_EQ(mel.rows(), 4);
  EXPECT_EQ(mel.cols(), 11);
}

TEST(Durations, FromLogDomain) {
  MatrixF x(1, 5);
  x << std::log(1.0f + 3.0f), 0.0f, -2.0f, std::log(1.0f + 2.4f), std::log(1.0f + 2.6f);
  EXPECT_EQ(durations_from_log(x), (std::vector<int>{3, 0, 0, 2, 3}));
}

TEST(Model, ShapeLawsAndEmptySentences) {
  const auto data = tiny_data(40, 7);
  const auto examples = make_examples(data);
  const auto m = Model<float>::create(tiny_config(), 7);
  for (const auto& ex : examples) {
    Graph<float> g;
    ForwardContext ctx;
    const auto f = training_forward(*m, g, ex, ctx);
    EXPECT_EQ(f.rwen_features.rows(), 6);
    EXPECT_EQ(f.rwen_features.cols(), ex.sentence->phoneme_count());
    EXPECT_EQ(f.mel.rows(), 4);
    EXPECT_EQ(f.mel.cols(), ex.sentence->frame_count());
    const Synthesis s = synthesize(*m, ex);
    EXPECT_EQ(s.mel.cols(), std::accumulate(s.durations.begin(), s.durations.end(), 0));
  }

  featstore::PreparedSentence silent = data[0];
  for (auto& word : silent.phonemes) word.clear();
  silent.targets = featstore::AcousticTargets{{}, {}, {}, MatrixF(4, 0)};
  const Example ex = Example::from(silent);
  Graph<float> g;
  ForwardContext ctx;
  const auto f = training_forward(*m, g, ex, ctx);
  EXPECT_EQ(f.loss.value()(0, 0), 0.0f);
  EXPECT_EQ(synthesize(*m, ex).mel.cols(), 0);
}

TEST(Model, WrongEmbeddingWidthNamesTheField) {
  const auto data = tiny_data(1, 8);
  const auto examples = make_examples(data);
  TrainConfig c = tiny_config();
  c.rwen.d_h = 9;
  const auto m = Model<float>::create(c, 8);
  Graph<float> g;
  ForwardContext ctx;
  try {
    training_forward(*m, g, examples[0], ctx);
    FAIL();
  } catch (const nn::ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("rwen.d_h"), std::string::npos);
  }
}

TEST(Model, TeacherMatchingParamsGiveZeroLoss) {
  auto m = Model<float>::create(tiny_config(), 9);
  // Every phoneme lasts three frames.
  m->tts.duration.out.weight->value.setZero();
  m->tts.duration.out.bias->value.setConstant(static_cast<float>(std::log1p(3.0)));
  auto data = tiny_data(3, 9);
  for (auto& s : data) {
    const Synthesis out = synthesize(*m, Example::from(s));
    auto& t = *s.targets;
    t.durations = out.durations;
    t.pitch.assign(out.pitch.data(), out.pitch.data() + out.pitch.size());
    t.energy.assign(out.energy.data(), out.energy.data() + out.energy.size());
    t.mel = out.mel;
  }
  // Teacher forcing with targets equal to the predictions reproduces them.
  const LossBreakdown l = evaluate(*m, make_examples(data), Execution::kSerial);
  EXPECT_LT(l.total, 1e-10);
}

TEST(Gradients, FullRwenAndTtsForward) {
  const auto data = tiny_data(1, 10);
  const Example ex = Example::from(data[0]);
  ASSERT_GE(ex.phonemes.size(), 2u);
  auto m = Model<double>::create(tiny_config(), 10);
  const auto report = nn::gradcheck(
      [&](Graph<double>& g) {
        ForwardContext ctx{true, 77, 0};  // same dropout masks on every call
        return training_forward(*m, g, ex, ctx).loss;
      },
      m->params);
  EXPECT_TRUE(report.passed) << report.summary();
  EXPECT_LT(report.max_rel_error, 1e-4);
}

TEST(Parallel, BatchGradientsMatchSerialBitForBit) {
  const auto data = tiny_data(12, 11);
  const auto examples = make_examples(data);
  std::vector<const Example*> batch;
  for (const auto& ex : examples) batch.push_back(&ex);
  auto serial = Model<float>::create(tiny_config(), 11);
  auto parallel = Model<float>::create(tiny_config(), 11);
  const int threads = omp_get_max_threads();
  omp_set_num_threads(4);
  serial->params.zero_grad();
  parallel->params.zero_grad();
  const LossBreakdown a = batch_gradients(*serial, batch, true, 5, Execution::kSerial);
  const LossBreakdown b = batch_gradients(*parallel, batch, true, 5, Execution::kParallel);
  omp_set_num_threads(threads);
  EXPECT_EQ(a.total, b.total);
  for (std::size_t i = 0; i < serial->params.size(); ++i) {
    EXPECT_EQ(serial->params[i].grad, parallel->params[i].grad) << serial->params[i].name;
  }
}

TEST(Parallel, InferenceIsBatchInvariant) {
  const auto data = tiny_data(10, 12);
  const auto examples = make_examples(data);
  const auto m = Model<float>::create(tiny_config(), 12);
  omp_set_num_threads(3);
  const auto batched = synthesize_batch(*m, examples, Execution::kParallel);
  const auto encoded = encode_batch(*m, examples, Execution::kParallel);
  const auto encoded_serial = encode_batch(*m, examples, Execution::kSerial);
  omp_set_num_threads(1);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Synthesis alone = synthesize(*m, examples[i]);
    EXPECT_EQ(alone.mel, batched[i].mel);
    EXPECT_EQ(alone.durations, batched[i].durations);
    EXPECT_EQ(encoded[i], encoded_serial[i]);
  }
}

TEST(Ablation, DisabledRwenReceivesZeroGradientAndTtsShapesHold) {
  const auto data = tiny_data(6, 13);
  const auto examples = make_examples(data);
  std::vector<const Example*> batch;
  for (const auto& ex : examples) batch.push_back(&ex);
  std::size_t tts_scalars = 0;
  for (const auto [sre, awre] : {std::pair{true, true}, std::pair{false, true}, std::pair{true, false},
                                 std::pair{false, false}}) {
    TrainConfig c = tiny_config();
    c.rwen.enable_sre = sre;
    c.rwen.enable_awre = awre;
    auto m = Model<float>::create(c, 13);
    m->params.zero_grad();
    batch_gradients(*m, batch, true, 1, Execution::kSerial);
    std::size_t tts = 0;
    for (const auto& p : m->params) {
      if (p->name.starts_with("tts.")) tts += static_cast<std::size_t>(p->value.size());
      const bool sre_param = p->name.starts_with("rwen.sre.");
      const bool awre_param = p->name.starts_with("rwen.pwre.") || p->name.starts_with("rwen.nwre.") ||
                              p->name.starts_with("rwen.awre.") || p->name == "rwen.de.table";
      const bool rwen_shared = p->name.starts_with("rwen.") && !sre_param && !awre_param;
      if ((sre_param && !sre) || (awre_param && !awre) || (rwen_shared && !sre && !awre)) {
        EXPECT_TRUE(p->grad.isZero(0.0f)) << p->name;
      }
    }
    if (tts_scalars == 0) tts_scalars = tts;
    EXPECT_EQ(tts, tts_scalars);
  }
}

TEST(Training, NonFiniteLossAbortsWithSentenceName) {
  const auto data = tiny_data(2, 14);
  const auto examples = make_examples(data);
  auto m = Model<float>::create(tiny_config(), 14);
  m->tts.mel_out.bias->value(0, 0) = std::numeric_limits<float>::quiet_NaN();
  std::vector<const Example*> batch = {&examples[0], &examples[1]};
  try {
    batch_gradients(*m, batch, true, 1, Execution::kParallel);
    FAIL();
  } catch (const nn::NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find(data[0].id), std::string::npos) << e.what();
  }
}

TEST(Training, LossFallsAndArtifactsAreWritten) {
  const fs::path dir = fs::temp_directory_path() / "rwen_tts_training";
  fs::remove_all(dir);
  const auto data = tiny_data(8, 15);
  const auto examples = make_examples(data);
  TrainConfig c = tiny_config();
  c.steps = 150;
  c.batch_size = 4;
  c.log_every = 50;
  c.checkpoint_every = 100;
  c.learning_rate = 3e-3;
  auto m = Model<float>::create(c, 15);
  TrainOptions opts;
  opts.out_dir = dir.string();
  const TrainResult r = train(*m, examples, opts);
  EXPECT_EQ(r.steps, 150);
  EXPECT_LT(r.final.total, 0.5 * r.initial.total);

  std::ifstream csv(dir / "metrics.csv");
  std::vector<std::string> lines;
  for (std::string line; std::getline(csv, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);  // header, steps 1, 50, 100, 150
  EXPECT_EQ(lines[0], "step,total,mel,pitch,energy,duration");
  EXPECT_EQ(lines[4].substr(0, 4), "150,");
  EXPECT_TRUE(fs::exists(dir / "checkpoint-100" / "metadata.json"));

  auto reloaded = Model<float>::create(c, 999);
  const auto info = nn::load_checkpoint((dir / "checkpoint").string(), reloaded->params);
  EXPECT_EQ(info.step, 150);
  EXPECT_EQ(train_config_from_json(info.config), c);
  EXPECT_EQ(synthesize(*reloaded, examples[0]).mel, synthesize(*m, examples[0]).mel);
}

TEST(Training, SameSeedSameRun) {
  const auto data = tiny_data(6, 16);
  const auto examples = make_examples(data);
  TrainConfig c = tiny_config();
  c.steps = 20;
  c.batch_size = 4;
  auto a = Model<float>::create(c, 16);
  auto b = Model<float>::create(c, 16);
  const TrainResult ra = train(*a, examples, {});
  TrainOptions serial;
  serial.exec = Execution::kSerial;
  const TrainResult rb = train(*b, examples, serial);
  EXPECT_EQ(ra.final.total, rb.final.total);
  for (std::size_t i = 0; i < a->params.size(); ++i) EXPECT_EQ(a->params[i].value, b->params[i].value);
}

TEST(GradientSuite, EveryCheckPasses) {
  const auto entries = run_gradient_suite("all");
  EXPECT_EQ(entries.size(), 13u);
  for (const auto& e : entries) EXPECT_TRUE(e.report.passed) << e.name << "\n" << e.report.summary();
  EXPECT_EQ(run_gradient_suite("rwen").size(), 3u);
  EXPECT_THROW(run_gradient_suite("decoder"), std::invalid_argument);
}

}  // namespace
}  // namespace rwen::tts
