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

#include <cmath>
#include <filesystem>

#include "rwen/nn/checkpoint.hpp"
#include "rwen/nn/gradcheck.hpp"
#include "rwen/nn/layers.hpp"
#include "rwen/nn/optim.hpp"

namespace rwen::nn {
namespace {

MatrixD random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  MatrixD m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

// Wraps a matrix as a parameter so gradients with respect to "inputs" are
// checked by the same harness.
Param<double>& input_param(ParamSet<double>& ps, const std::string& name, const MatrixD& v) {
  Param<double>& p = ps.add(name, v.rows(), v.cols());
  p.value = v;
  return p;
}

void expect_gradcheck(const LossClosure& loss, ParamSet<double>& params) {
  const GradcheckReport report = gradcheck(loss, params);
  EXPECT_TRUE(report.passed) << report.summary();
  EXPECT_LT(report.max_rel_error, 1e-4);
}

TEST(Ops, LinearIdentity) {
  Graph<float> g;
  MatrixF x = MatrixF::Random(4, 3);
  ParamSet<float> ps;
  Rng rng(1);
  Linear<float> lin = Linear<float>::create(ps, "l", 4, 4, rng);
  lin.weight->value = MatrixF::Identity(4, 4);
  lin.bias->value.setZero();
  EXPECT_EQ(lin(g.constant(x)).value(), x);
}

TEST(Ops, ConvAveragingKernelOnConstantInput) {
  ParamSet<float> ps;
  Rng rng(1);
  Conv1d<float> conv = Conv1d<float>::create(ps, "c", 1, 1, 3, rng);
  conv.weight->value.setConstant(1.0f / 3.0f);
  conv.bias->value.setZero();
  Graph<float> g;
  const MatrixF out = conv(g.constant(MatrixF::Constant(1, 7, 2.0f))).value();
  // Same padding: interior columns see three taps of the constant.
  for (Eigen::Index c = 1; c < 6; ++c) EXPECT_NEAR(out(0, c), 2.0f, 1e-6f);
  EXPECT_NEAR(out(0, 0), 4.0f / 3.0f, 1e-6f);
}

TEST(Ops, MseOfIdenticalIsZero) {
  Graph<double> g;
  const MatrixD x = MatrixD::Random(3, 5);
  EXPECT_EQ(mse(g.constant(x), x).value()(0, 0), 0.0);
  EXPECT_EQ(mse(g.constant(MatrixD(2, 0)), MatrixD(2, 0)).value()(0, 0), 0.0);
}

TEST(Ops, ShapeMismatchThrows) {
  Graph<double> g;
  const Var<double> a = g.constant(MatrixD::Zero(2, 3));
  const Var<double> b = g.constant(MatrixD::Zero(3, 2));
  EXPECT_THROW(add(a, b), ShapeError);
  EXPECT_THROW(matmul(a, a), ShapeError);
  EXPECT_THROW(gather_cols(a, {3}), ShapeError);
  EXPECT_THROW(mse(a, MatrixD(MatrixD::Zero(1, 1))), ShapeError);
}

TEST(Ops, DropoutModes) {
  Graph<float> g;
  const Var<float> x = g.constant(MatrixF::Ones(8, 64));
  ForwardContext eval;
  EXPECT_EQ(dropout(x, 0.5, eval).value(), x.value());
  ForwardContext a{true, 11, 0}, b{true, 11, 0};
  const MatrixF ma = dropout(x, 0.5, a).value();
  EXPECT_EQ(ma, dropout(x, 0.5, b).value());
  const Eigen::Index zeros = (ma.array() == 0.0f).count();
  EXPECT_GT(zeros, 100);
  EXPECT_LT(zeros, 412);
  EXPECT_THROW(dropout(x, 1.0, a), std::invalid_argument);
  EXPECT_THROW(dropout(x, -0.1, a), std::invalid_argument);
}

TEST(Ops, LayerNormStatistics) {
  Graph<double> g;
  Rng rng(3);
  const MatrixD y = layer_norm_cols(g.constant(random_matrix(rng, 16, 9, 5.0)), 1e-12).value();
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    EXPECT_LT(std::abs(y.col(c).mean()), 1e-6);
    EXPECT_NEAR((y.col(c).array() - y.col(c).mean()).square().mean(), 1.0, 1e-5);
  }
}

TEST(Gradients, ElementwiseAndStructuralOps) {
  Rng rng(5);
  ParamSet<double> ps;
  Param<double>& a = input_param(ps, "a", random_matrix(rng, 4, 5));
  Param<double>& b = input_param(ps, "b", random_matrix(rng, 4, 5));
  Param<double>& w = input_param(ps, "w", random_matrix(rng, 3, 8));
  Param<double>& bias = input_param(ps, "bias", random_matrix(rng, 3, 1));
  Param<double>& gamma = input_param(ps, "gamma", random_matrix(rng, 3, 1));
  const MatrixD probe = random_matrix(rng, 3, 7);
  expect_gradcheck(
      [&](Graph<double>& g) {
        const Var<double> va = g.param(a), vb = g.param(b);
        Var<double> x = concat_rows<double>({tanh(va), sigmoid(mul(va, vb))});           // 8x5
        x = add_bias(matmul(g.param(w), x), g.param(bias));                               // 3x5
        x = concat_cols<double>({x, slice_cols(relu(x), 1, 2)});                          // 3x7
        x = scale_rows(sub(x, scale(shift_cols(x, 1), 0.5)), g.param(gamma));
        x = gather_cols(x, {6, 0, 0, 3, 2, 5, 1});
        x = add(x, slice_rows(concat_rows<double>({x, x}), 3, 3));
        return dot_const(x, probe);
      },
      ps);
}

TEST(Gradients, SoftmaxLayerNormSelectMse) {
  Rng rng(6);
  ParamSet<double> ps;
  Param<double>& a = input_param(ps, "a", random_matrix(rng, 5, 4));
  Param<double>& b = input_param(ps, "b", random_matrix(rng, 5, 4));
  const MatrixD target = random_matrix(rng, 4, 5);
  expect_gradcheck(
      [&](Graph<double>& g) {
        const Var<double> sm = softmax_cols(g.param(a));
        const Var<double> ln = layer_norm_cols(g.param(b), 1e-5);
        const Var<double> sel = select_cols({true, false, true, false}, sm, ln);
        return mse(transpose(add(sel, mul(sm, ln))), target);
      },
      ps);
}

TEST(Gradients, LayersAndAttention) {
  Rng rng(7);
  ParamSet<double> ps;
  const auto conv = Conv1d<double>::create(ps, "conv", 4, 6, 3, rng);
  const auto ln = LayerNorm<double>::create(ps, "ln", 6);
  const auto attn = MultiHeadAttention<double>::create(ps, "attn", 6, 2, rng);
  const auto emb = Embedding<double>::create(ps, "emb", 4, 5, rng);
  for (const auto& p : ps) p->value += random_matrix(rng, p->value.rows(), p->value.cols(), 0.1);
  const MatrixD probe = random_matrix(rng, 6, 5);
  expect_gradcheck(
      [&](Graph<double>& g) {
        Var<double> x = emb.lookup(g, {1, 4, 4, 0, 2});
        ForwardContext ctx{true, 99, 0};
        x = dropout(relu(conv(x)), 0.2, ctx);
        x = ln(add(x, attn(x)));
        return dot_const(x, probe);
      },
      ps);
}

TEST(Gru, ZeroWeightsStayAtZero) {
  ParamSet<float> ps;
  Rng rng(1);
  GruCell<float> cell = GruCell<float>::create(ps, "gru", 3, 4, rng);
  for (const auto& p : ps) p->value.setZero();
  Graph<float> g;
  std::vector<Var<float>> xs;
  for (int t = 0; t < 5; ++t) xs.push_back(g.constant(MatrixF::Random(3, 1)));
  const GruOutput<float> out = cell.forward(xs, g.constant(MatrixF::Zero(4, 1)));
  ASSERT_EQ(out.states.size(), 5u);
  for (const auto& h : out.states) EXPECT_TRUE(h.value().isZero(0.0f));
}

TEST(Gru, SaturatedUpdateGateTracksCandidate) {
  ParamSet<double> ps;
  Rng rng(1);
  GruCell<double> cell = GruCell<double>::create(ps, "gru", 1, 1, rng);
  for (const auto& p : ps) p->value.setZero();
  cell.w_h->value(0, 0) = 0.7;
  cell.u_h->value(0, 0) = 0.0;
  cell.b_z->value(0, 0) = 20.0;
  cell.w_r->value(0, 0) = 0.3;
  Graph<double> g;
  std::vector<Var<double>> xs;
  const std::vector<double> inputs = {0.5, -1.2, 2.0, 0.1};
  for (const double v : inputs) xs.push_back(g.constant(MatrixD::Constant(1, 1, v)));
  const GruOutput<double> out = cell.forward(xs, g.constant(MatrixD::Zero(1, 1)));
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    EXPECT_NEAR(out.states[t].value()(0, 0), std::tanh(0.7 * inputs[t]), 1e-8);
  }
}

TEST(Gru, GatingConventionSingleStep) {
  // h' = (1 - z) h + z c with hand-computed scalars.
  ParamSet<double> ps;
  Rng rng(1);
  GruCell<double> cell = GruCell<double>::create(ps, "gru", 1, 1, rng);
  const double wr = cell.w_r->value(0, 0), wz = cell.w_z->value(0, 0), wh = cell.w_h->value(0, 0);
  const double ur = cell.u_r->value(0, 0), uz = cell.u_z->value(0, 0), uh = cell.u_h->value(0, 0);
  const double x = 0.8, h = -0.4;
  const double r = 1.0 / (1.0 + std::exp(-(wr * x + ur * h)));
  const double z = 1.0 / (1.0 + std::exp(-(wz * x + uz * h)));
  const double c = std::tanh(wh * x + uh * (r * h));
  Graph<double> g;
  const double got = cell.step(g.constant(MatrixD::Constant(1, 1, x)), g.constant(MatrixD::Constant(1, 1, h))).value()(0, 0);
  EXPECT_NEAR(got, (1.0 - z) * h + z * c, 1e-15);
}

TEST(Gru, GradcheckRandomCell) {
  Rng rng(8);
  ParamSet<double> ps;
  const GruCell<double> cell = GruCell<double>::create(ps, "gru", 3, 4, rng);
  Param<double>& xs = input_param(ps, "inputs", random_matrix(rng, 3, 6));
  const MatrixD probe = random_matrix(rng, 4, 1);
  expect_gradcheck(
      [&](Graph<double>& g) {
        std::vector<Var<double>> steps;
        const Var<double> x = g.param(xs);
        for (int t = 0; t < 6; ++t) steps.push_back(slice_cols(x, t, 1));
        return dot_const(cell.forward(steps, g.constant(MatrixD::Zero(4, 1))).last, probe);
      },
      ps);
}

TEST(Gru, MaskedBatchMatchesPerSequenceRuns) {
  Rng rng(9);
  ParamSet<double> ps;
  const GruCell<double> cell = GruCell<double>::create(ps, "gru", 2, 3, rng);
  const std::vector<int> lengths = {1, 4, 2};
  const MatrixD data = random_matrix(rng, 2, 12);  // 3 sequences x 4 steps
  Graph<double> g;
  std::vector<Var<double>> steps;
  for (int t = 0; t < 4; ++t) steps.push_back(g.constant(data.middleCols(3 * t, 3)));
  const MatrixD batched = cell.forward_masked(steps, g.constant(MatrixD::Zero(3, 3)), lengths).last.value();
  for (int c = 0; c < 3; ++c) {
    std::vector<Var<double>> seq;
    for (int t = 0; t < lengths[static_cast<std::size_t>(c)]; ++t) seq.push_back(g.constant(data.col(3 * t + c)));
    const MatrixD single = cell.forward(seq, g.constant(MatrixD::Zero(3, 1))).last.value();
    EXPECT_TRUE(batched.col(c).isApprox(single.col(0), 1e-14));
  }
}

TEST(Gru, ShapeMismatch) {
  ParamSet<float> ps;
  Rng rng(1);
  const GruCell<float> cell = GruCell<float>::create(ps, "gru", 3, 4, rng);
  Graph<float> g;
  EXPECT_THROW(cell.step(g.constant(MatrixF::Zero(2, 1)), g.constant(MatrixF::Zero(4, 1))), ShapeError);
  EXPECT_THROW(cell.forward({}, g.constant(MatrixF::Zero(4, 1))), ShapeError);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  ParamSet<float> ps;
  Param<float>& p = ps.add("p", 3, 2);
  p.value.setRandom();
  const MatrixF before = p.value;
  for (int t = 1; t <= 10; ++t) adam_step(ps, AdamConfig{}, t);
  EXPECT_EQ(p.value, before);
}

TEST(Adam, ConstantGradientStepApproachesLearningRate) {
  ParamSet<double> ps;
  Param<double>& p = ps.add("p", 1, 2);
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  for (int t = 1; t <= 500; ++t) {
    p.grad << 3.0, -0.25;
    const MatrixD before = p.value;
    adam_step(ps, cfg, t);
    const MatrixD delta = p.value - before;
    if (t == 500) {
      EXPECT_NEAR(delta(0, 0), -0.01, 1e-8);
      EXPECT_NEAR(delta(0, 1), 0.01, 1e-7);
    }
  }
}

TEST(Adam, QuadraticBowl) {
  ParamSet<double> ps;
  Param<double>& w = ps.add("w", 1, 1);
  w.value(0, 0) = 1.0;
  AdamConfig cfg;
  cfg.learning_rate = 0.1;
  int reached = -1;
  for (int t = 1; t <= 200; ++t) {
    w.grad(0, 0) = 2.0 * w.value(0, 0);
    adam_step(ps, cfg, t);
    if (std::abs(w.value(0, 0)) < 0.1 && reached < 0) reached = t;
  }
  EXPECT_GT(reached, 0);
  EXPECT_LT(std::abs(w.value(0, 0)), 0.1);
}

TEST(Adam, NonFiniteGradientNamesParameter) {
  ParamSet<float> ps;
  ps.add("fine", 1, 1);
  Param<float>& bad = ps.add("broken.weight", 2, 2);
  bad.grad(1, 0) = std::numeric_limits<float>::quiet_NaN();
  try {
    adam_step(ps, AdamConfig{}, 1);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("broken.weight"), std::string::npos);
  }
}

TEST(Gradcheck, IdentityModelHasZeroError) {
  ParamSet<double> ps;
  Param<double>& x = ps.add("x", 2, 2);
  x.value << 1, 2, 3, 4;
  // A dyadic step keeps both perturbed sums exact.
  GradcheckOptions opts;
  opts.step = 0x1p-20;
  const GradcheckReport r = gradcheck([&](Graph<double>& g) { return sum(g.param(x)); }, ps, opts);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.max_rel_error, 0.0);
}

TEST(Gradcheck, BrokenBackwardIsReported) {
  ParamSet<double> ps;
  Param<double>& x = ps.add("x", 3, 1);
  x.value << 0.5, -1.0, 2.0;
  // Square with a backward that forgets the factor 2.
  auto broken_square = [](Var<double> a) {
    const int ia = a.id();
    return a.graph()->record(a.value().cwiseProduct(a.value()), {a}, [ia](Graph<double>& g, const MatrixD& go) {
      g.accumulate(ia, go.cwiseProduct(g.value(ia)));
    });
  };
  const GradcheckReport r = gradcheck([&](Graph<double>& g) { return sum(broken_square(g.param(x))); }, ps);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_rel_error, 0.1);
}

TEST(Checkpoint, RoundTripAndShapeMismatch) {
  const std::string dir = (std::filesystem::temp_directory_path() / "rwen_ckpt_test").string();
  std::filesystem::remove_all(dir);
  ParamSet<float> ps;
  Rng rng(4);
  Linear<float>::create(ps, "proj", 3, 2, rng);
  ps.at("proj.bias").value << 0.25f, -7.5f;
  save_checkpoint(dir, ps, {{"width", 2}}, 17);

  ParamSet<float> loaded;
  Linear<float>::create(loaded, "proj", 3, 2, rng);
  const CheckpointInfo info = load_checkpoint(dir, loaded);
  EXPECT_EQ(info.step, 17);
  EXPECT_EQ(info.config_hash, config_hash(nlohmann::json{{"width", 2}}));
  for (std::size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(loaded[i].value, ps[i].value);

  ParamSet<float> wrong;
  Linear<float>::create(wrong, "proj", 4, 2, rng);
  try {
    load_checkpoint(dir, wrong);
    FAIL();
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("proj.weight"), std::string::npos);
  }
}

}  // namespace
}  // namespace rwen::nn
