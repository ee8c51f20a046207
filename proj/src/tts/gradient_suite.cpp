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

#include "rwen/tts/gradient_suite.hpp"

#include <chrono>
#include <functional>
#include <stdexcept>

#include "rwen/featstore/synth.hpp"
#include "rwen/tts/model.hpp"

namespace rwen::tts {

namespace {

using nn::GradcheckOptions;
using nn::GradcheckReport;
using nn::ParamSet;
using nn::Rng;
using G = Graph<double>;
using V = Var<double>;

MatrixD gaussian(Rng& rng, Eigen::Index r, Eigen::Index c) {
  MatrixD m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

nn::Param<double>& input(ParamSet<double>& ps, const std::string& name, const MatrixD& v) {
  auto& p = ps.add(name, v.rows(), v.cols());
  p.value = v;
  return p;
}

GradcheckReport elementwise(const GradcheckOptions& o) {
  Rng rng(101);
  ParamSet<double> ps;
  auto& a = input(ps, "a", gaussian(rng, 4, 3));
  auto& b = input(ps, "b", gaussian(rng, 4, 3));
  const MatrixD c = gaussian(rng, 4, 3), probe = gaussian(rng, 4, 3);
  return nn::gradcheck(
      [&](G& g) {
        const V va = g.param(a), vb = g.param(b);
        V x = nn::add(nn::sub(va, nn::scale(vb, 0.7)), nn::mul(va, vb));
        x = nn::mul_const(nn::add_const(x, c), c);
        return nn::dot_const(x, probe);
      },
      ps, o);
}

GradcheckReport products(const GradcheckOptions& o) {
  Rng rng(102);
  ParamSet<double> ps;
  auto& w = input(ps, "w", gaussian(rng, 3, 4));
  auto& x = input(ps, "x", gaussian(rng, 4, 5));
  auto& bias = input(ps, "bias", gaussian(rng, 3, 1));
  auto& gamma = input(ps, "gamma", gaussian(rng, 5, 1));
  const MatrixD probe = gaussian(rng, 5, 3);
  return nn::gradcheck(
      [&](G& g) {
        const V y = nn::add_bias(nn::matmul(g.param(w), g.param(x)), g.param(bias));
        return nn::dot_const(nn::scale_rows(nn::transpose(y), g.param(gamma)), probe);
      },
      ps, o);
}

GradcheckReport activations(const GradcheckOptions& o) {
  Rng rng(103);
  ParamSet<double> ps;
  auto& a = input(ps, "a", gaussian(rng, 5, 4));
  const MatrixD probe = gaussian(rng, 15, 4);
  return nn::gradcheck(
      [&](G& g) {
        const V va = g.param(a);
        return nn::dot_const(nn::concat_rows<double>({nn::sigmoid(va), nn::tanh(va), nn::relu(va)}), probe);
      },
      ps, o);
}

GradcheckReport structure(const GradcheckOptions& o) {
  Rng rng(104);
  ParamSet<double> ps;
  auto& a = input(ps, "a", gaussian(rng, 4, 6));
  auto& b = input(ps, "b", gaussian(rng, 4, 6));
  const MatrixD probe = gaussian(rng, 3, 9);
  return nn::gradcheck(
      [&](G& g) {
        const V va = g.param(a), vb = g.param(b);
        V x = nn::select_cols({true, false, false, true, true, false}, va, vb);
        x = nn::add(nn::shift_cols(x, 2), nn::shift_cols(vb, -1));
        x = nn::concat_cols<double>({x, nn::slice_cols(va, 1, 3)});  // 4 x 9
        x = nn::gather_cols(x, {8, 0, 0, 3, 2, 5, 1, 7, 7});
        const V y = nn::gather_cols(va, {5, 4, 3, 2, 1, 0, 0, 1, 2});
        return nn::dot_const(nn::slice_rows(nn::concat_rows<double>({x, y}), 1, 3), probe);
      },
      ps, o);
}

GradcheckReport normalization(const GradcheckOptions& o) {
  Rng rng(105);
  ParamSet<double> ps;
  auto& a = input(ps, "a", gaussian(rng, 5, 4));
  auto& b = input(ps, "b", gaussian(rng, 6, 4));
  const MatrixD target = gaussian(rng, 5, 4), probe = gaussian(rng, 6, 4);
  return nn::gradcheck(
      [&](G& g) {
        const V sm = nn::softmax_cols(g.param(a));
        const V ln = nn::layer_norm_cols(g.param(b), 1e-5);
        return nn::add(nn::mse(sm, target), nn::add(nn::dot_const(ln, probe), nn::sum(nn::mul(sm, sm))));
      },
      ps, o);
}

GradcheckReport layers(const GradcheckOptions& o) {
  Rng rng(106);
  ParamSet<double> ps;
  const auto conv = nn::Conv1d<double>::create(ps, "conv", 4, 6, 3, rng);
  const auto lin = nn::Linear<double>::create(ps, "linear", 6, 6, rng);
  const auto ln = nn::LayerNorm<double>::create(ps, "ln", 6);
  ps.at("ln.gamma").value = gaussian(rng, 6, 1);
  ps.at("ln.beta").value = gaussian(rng, 6, 1);
  const auto attn = nn::MultiHeadAttention<double>::create(ps, "attn", 6, 2, rng);
  const auto emb = nn::Embedding<double>::create(ps, "emb", 4, 7, rng);
  ps.at("emb.table").value = gaussian(rng, 4, 7);
  const MatrixD probe = gaussian(rng, 6, 5);
  return nn::gradcheck(
      [&](G& g) {
        ForwardContext ctx{true, 9, 0};
        V x = emb.lookup(g, {1, 6, 0, 6, 3});
        x = nn::dropout(conv(x), 0.2, ctx);
        x = ln(lin(x));
        return nn::dot_const(attn(x), probe);
      },
      ps, o);
}

GradcheckReport gru(const GradcheckOptions& o) {
  Rng rng(107);
  ParamSet<double> ps;
  const auto cell = nn::GruCell<double>::create(ps, "gru", 3, 4, rng);
  std::vector<nn::Param<double>*> xs;
  for (int t = 0; t < 4; ++t) xs.push_back(&input(ps, "x" + std::to_string(t), gaussian(rng, 3, 3)));
  auto& h0 = input(ps, "h0", gaussian(rng, 4, 3));
  const MatrixD probe = gaussian(rng, 4, 3);
  return nn::gradcheck(
      [&](G& g) {
        std::vector<V> inputs;
        for (auto* x : xs) inputs.push_back(g.param(*x));
        return nn::dot_const(cell.forward_masked(inputs, g.param(h0), {4, 1, 3}).last, probe);
      },
      ps, o);
}

TrainConfig suite_config() {
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

featstore::PreparedSentence suite_sentence() {
  featstore::SynthOptions o;
  o.sentences = 1;
  o.max_words = 5;
  o.embedding_dim = 8;
  o.n_mels = 4;
  o.phoneme_vocab = 6;
  o.max_phonemes_per_word = 2;
  // Seed picked so the sentence has several words and phonemes.
  for (o.seed = 3;; ++o.seed) {
    auto s = featstore::synth_dataset(o)[0];
    if (s.word_count() >= 4 && s.phoneme_count() >= 4) return s;
  }
}

// Perturbs all parameters away from zero-initialized biases and unit norms
// so no gradient is trivially zero.
void jitter(ParamSet<double>& ps, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& p : ps) p->value += 0.1 * gaussian(rng, p->value.rows(), p->value.cols());
}

GradcheckReport rwen_branch(bool sre, const GradcheckOptions& o) {
  const auto s = suite_sentence();
  const Example ex = Example::from(s);
  TrainConfig c = suite_config();
  auto m = Model<double>::create(c, 21);
  jitter(m->params, 22);
  auto& words = input(m->params, "input.words", ex.words.cast<double>());
  Rng rng(23);
  const MatrixD probe = gaussian(rng, c.rwen.d_h, ex.input.slots());
  return nn::gradcheck(
      [&](G& g) {
        const V w = g.param(words);
        const V rte = encoder::rte_lookup(m->rwen, g, ex.input.relations);
        const V out = sre ? encoder::sre_forward(m->rwen, w, rte, ex.input.root_paths)
                          : encoder::awre_forward(m->rwen, w, rte, ex.input.prev_paths, ex.input.next_paths);
        return nn::dot_const(out, probe);
      },
      m->params, o);
}

GradcheckReport rwen_full(const GradcheckOptions& o) {
  const auto s = suite_sentence();
  const Example ex = Example::from(s);
  TrainConfig c = suite_config();
  auto m = Model<double>::create(c, 24);
  jitter(m->params, 25);
  auto& words = input(m->params, "input.words", ex.words.cast<double>());
  Rng rng(26);
  const MatrixD probe = gaussian(rng, c.rwen.d_out, s.phoneme_count());
  return nn::gradcheck(
      [&](G& g) {
        const auto out = encoder::encode(m->rwen, c.rwen, g.param(words), ex.input);
        return nn::dot_const(encoder::upsample_to_phonemes(out.words, ex.phoneme_counts), probe);
      },
      m->params, o);
}

GradcheckReport tts_front(const GradcheckOptions& o) {
  const auto s = suite_sentence();
  const Example ex = Example::from(s);
  TrainConfig c = suite_config();
  auto m = Model<double>::create(c, 27);
  jitter(m->params, 28);
  const auto length = static_cast<Eigen::Index>(ex.phonemes.size());
  Rng rng(29);
  auto& features = input(m->params, "input.rwen", gaussian(rng, c.rwen.d_out, length));
  const MatrixD probe = gaussian(rng, 3, length);
  return nn::gradcheck(
      [&](G& g) {
        ForwardContext ctx{true, 30, 0};
        const V fused = fuse_rwen(m->tts, phoneme_encode(m->tts, c.tts, g, ex.phonemes, ctx), g.param(features));
        const auto v = predict_variances(m->tts, c.tts, fused, ctx);
        return nn::dot_const(nn::concat_rows<double>({v.log_duration, v.pitch, v.energy}), probe);
      },
      m->params, o);
}

GradcheckReport tts_back(const GradcheckOptions& o) {
  TrainConfig c = suite_config();
  auto m = Model<double>::create(c, 31);
  jitter(m->params, 32);
  Rng rng(33);
  auto& fused = input(m->params, "input.fused", gaussian(rng, c.tts.d_enc, 4));
  auto& pitch = input(m->params, "input.pitch", gaussian(rng, 1, 4));
  auto& energy = input(m->params, "input.energy", gaussian(rng, 1, 4));
  const std::vector<int> durations = {2, 0, 3, 1};
  const MatrixD target = gaussian(rng, c.tts.n_mels, 6);
  return nn::gradcheck(
      [&](G& g) {
        ForwardContext ctx{true, 34, 0};
        const V adapted = add_variance_embeddings(m->tts, g.param(fused), g.param(pitch), g.param(energy));
        return nn::mse(mel_decode(m->tts, c.tts, length_regulate(adapted, durations), ctx), target);
      },
      m->params, o);
}

GradcheckReport full_forward(const GradcheckOptions& o) {
  const auto s = suite_sentence();
  const Example ex = Example::from(s);
  auto m = Model<double>::create(suite_config(), 35);
  jitter(m->params, 36);
  return nn::gradcheck(
      [&](G& g) {
        ForwardContext ctx{true, 37, 0};
        return training_forward(*m, g, ex, ctx).loss;
      },
      m->params, o);
}

struct Check {
  const char* module;
  const char* name;
  std::function<GradcheckReport(const GradcheckOptions&)> run;
};

}  // namespace

std::vector<SuiteEntry> run_gradient_suite(const std::string& module, const GradcheckOptions& options) {
  const std::vector<Check> checks = {
      {"nncore", "ops.elementwise", elementwise},
      {"nncore", "ops.matmul_bias_transpose_scale_rows", products},
      {"nncore", "ops.sigmoid_tanh_relu", activations},
      {"nncore", "ops.concat_slice_gather_shift_select", structure},
      {"nncore", "ops.softmax_layer_norm_mse_sum", normalization},
      {"nncore", "layers.embedding_conv_dropout_linear_norm_attention", layers},
      {"nncore", "layers.gru_masked", gru},
      {"rwen", "rwen.sre", [](const GradcheckOptions& o) { return rwen_branch(true, o); }},
      {"rwen", "rwen.awre", [](const GradcheckOptions& o) { return rwen_branch(false, o); }},
      {"rwen", "rwen.encode_upsample", rwen_full},
      {"tts", "tts.encoder_fuse_predictors", tts_front},
      {"tts", "tts.variance_embedding_regulator_decoder", tts_back},
      {"tts", "tts.full_rwen_tts_loss", full_forward},
  };
  if (module != "all" && module != "nncore" && module != "rwen" && module != "tts") {
    throw std::invalid_argument("unknown module '" + module + "' (expected all, nncore, rwen or tts)");
  }
  std::vector<SuiteEntry> out;
  for (const Check& c : checks) {
    if (module != "all" && module != c.module) continue;
    const auto t0 = std::chrono::steady_clock::now();
    SuiteEntry e{c.module, c.name, c.run(options), 0.0};
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace rwen::tts
