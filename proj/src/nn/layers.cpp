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

#include "rwen/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace rwen::nn {

template <typename T>
Var<T> dropout(Var<T> x, double p, ForwardContext& ctx) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("dropout probability must lie in [0, 1)");
  if (!ctx.training || p == 0.0) return x;
  const std::uint64_t call = mix(ctx.seed, ++ctx.dropout_calls);
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  Matrix<T> mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = to_unit(mix(call, static_cast<std::uint64_t>(i))) < p ? T(0) : keep_scale;
  }
  return mul_const(x, mask);
}

template <typename T>
void init_uniform_fan_in(Param<T>& p, Eigen::Index fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = static_cast<T>(rng.uniform(-bound, bound));
}

template <typename T>
void init_normal(Param<T>& p, double stddev, Rng& rng) {
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = static_cast<T>(stddev * rng.normal());
}

template <typename T>
Linear<T> Linear<T>::create(ParamSet<T>& params, const std::string& name, Eigen::Index in, Eigen::Index out, Rng& rng) {
  Linear l;
  l.weight = &params.add(name + ".weight", out, in);
  l.bias = &params.add(name + ".bias", out, 1);
  init_uniform_fan_in(*l.weight, in, rng);
  return l;
}

template <typename T>
Var<T> Linear<T>::operator()(Var<T> x) const {
  Graph<T>& g = *x.graph();
  return add_bias(matmul(g.param(*weight), x), g.param(*bias));
}

template <typename T>
Conv1d<T> Conv1d<T>::create(ParamSet<T>& params, const std::string& name, Eigen::Index in, Eigen::Index out, int kernel,
                            Rng& rng) {
  if (kernel < 1 || kernel % 2 == 0) throw std::invalid_argument("conv1d kernel must be odd and positive");
  Conv1d c;
  c.kernel = kernel;
  c.weight = &params.add(name + ".weight", out, in * kernel);
  c.bias = &params.add(name + ".bias", out, 1);
  init_uniform_fan_in(*c.weight, in * kernel, rng);
  return c;
}

template <typename T>
Var<T> Conv1d<T>::operator()(Var<T> x) const {
  const Eigen::Index in = weight->value.cols() / kernel;
  if (x.rows() != in) {
    throw ShapeError("conv1d: expected " + std::to_string(in) + " input channels, got " + std::to_string(x.rows()));
  }
  Graph<T>& g = *x.graph();
  Var<T> stacked = x;
  if (kernel > 1) {
    std::vector<Var<T>> taps;
    const int half = kernel / 2;
    for (int offset = -half; offset <= half; ++offset) taps.push_back(offset == 0 ? x : shift_cols(x, offset));
    stacked = concat_rows(taps);
  }
  return add_bias(matmul(g.param(*weight), stacked), g.param(*bias));
}

template <typename T>
LayerNorm<T> LayerNorm<T>::create(ParamSet<T>& params, const std::string& name, Eigen::Index features) {
  LayerNorm ln;
  ln.gamma = &params.add(name + ".gamma", features, 1);
  ln.beta = &params.add(name + ".beta", features, 1);
  ln.gamma->value.setOnes();
  return ln;
}

template <typename T>
Var<T> LayerNorm<T>::operator()(Var<T> x) const {
  Graph<T>& g = *x.graph();
  return add_bias(scale_rows(layer_norm_cols(x, eps), g.param(*gamma)), g.param(*beta));
}

template <typename T>
Embedding<T> Embedding<T>::create(ParamSet<T>& params, const std::string& name, Eigen::Index dim, Eigen::Index vocab,
                                  Rng& rng) {
  Embedding e;
  e.table = &params.add(name + ".table", dim, vocab);
  init_normal(*e.table, 0.02, rng);
  return e;
}

template <typename T>
Var<T> Embedding<T>::lookup(Graph<T>& g, const std::vector<int>& ids) const {
  return gather_cols(g.param(*table), ids);
}

template <typename T>
GruCell<T> GruCell<T>::create(ParamSet<T>& params, const std::string& name, Eigen::Index in, Eigen::Index hidden,
                              Rng& rng) {
  GruCell c;
  c.w_r = &params.add(name + ".w_r", hidden, in);
  c.w_z = &params.add(name + ".w_z", hidden, in);
  c.w_h = &params.add(name + ".w_h", hidden, in);
  c.u_r = &params.add(name + ".u_r", hidden, hidden);
  c.u_z = &params.add(name + ".u_z", hidden, hidden);
  c.u_h = &params.add(name + ".u_h", hidden, hidden);
  c.b_r = &params.add(name + ".b_r", hidden, 1);
  c.b_z = &params.add(name + ".b_z", hidden, 1);
  c.b_h = &params.add(name + ".b_h", hidden, 1);
  for (Param<T>* w : {c.w_r, c.w_z, c.w_h}) init_uniform_fan_in(*w, in, rng);
  for (Param<T>* u : {c.u_r, c.u_z, c.u_h}) init_uniform_fan_in(*u, hidden, rng);
  return c;
}

template <typename T>
Var<T> GruCell<T>::step(Var<T> x, Var<T> h) const {
  if (x.rows() != input_size()) {
    throw ShapeError("gru: input has " + std::to_string(x.rows()) + " rows, cell expects " +
                     std::to_string(input_size()));
  }
  if (h.rows() != hidden_size() || h.cols() != x.cols()) throw ShapeError("gru: hidden state shape mismatch");
  Graph<T>& g = *x.graph();
  auto gate = [&](Param<T>* w, Param<T>* u, Param<T>* b, Var<T> hin) {
    return add_bias(add(matmul(g.param(*w), x), matmul(g.param(*u), hin)), g.param(*b));
  };
  const Var<T> r = sigmoid(gate(w_r, u_r, b_r, h));
  const Var<T> z = sigmoid(gate(w_z, u_z, b_z, h));
  const Var<T> cand = tanh(gate(w_h, u_h, b_h, mul(r, h)));
  // h + z * (c - h) == (1 - z) * h + z * c
  return add(h, mul(z, sub(cand, h)));
}

template <typename T>
GruOutput<T> GruCell<T>::forward(const std::vector<Var<T>>& inputs, Var<T> h0) const {
  if (inputs.empty()) throw ShapeError("gru: empty input sequence");
  GruOutput<T> out;
  Var<T> h = h0;
  for (const Var<T>& x : inputs) {
    h = step(x, h);
    out.states.push_back(h);
  }
  out.last = h;
  return out;
}

template <typename T>
GruOutput<T> GruCell<T>::forward_masked(const std::vector<Var<T>>& inputs, Var<T> h0,
                                        const std::vector<int>& lengths) const {
  if (inputs.empty()) throw ShapeError("gru: empty input sequence");
  if (static_cast<Eigen::Index>(lengths.size()) != h0.cols()) throw ShapeError("gru: lengths/columns mismatch");
  GruOutput<T> out;
  Var<T> h = h0;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const Var<T> next = step(inputs[t], h);
    std::vector<bool> active(lengths.size());
    bool all = true;
    for (std::size_t c = 0; c < lengths.size(); ++c) {
      active[c] = static_cast<int>(t) < lengths[c];
      all = all && active[c];
    }
    h = all ? next : select_cols(active, next, h);
    out.states.push_back(h);
  }
  out.last = h;
  return out;
}

template <typename T>
MultiHeadAttention<T> MultiHeadAttention<T>::create(ParamSet<T>& params, const std::string& name, Eigen::Index dim,
                                                    int heads, Rng& rng) {
  if (heads < 1 || dim % heads != 0) throw std::invalid_argument("attention width must be divisible by head count");
  MultiHeadAttention a;
  a.heads = heads;
  a.query = Linear<T>::create(params, name + ".query", dim, dim, rng);
  a.key = Linear<T>::create(params, name + ".key", dim, dim, rng);
  a.value = Linear<T>::create(params, name + ".value", dim, dim, rng);
  a.output = Linear<T>::create(params, name + ".output", dim, dim, rng);
  return a;
}

template <typename T>
Var<T> MultiHeadAttention<T>::operator()(Var<T> x) const {
  const Eigen::Index dim = query.out_features();
  const Eigen::Index head_dim = dim / heads;
  const T inv_sqrt = static_cast<T>(1.0 / std::sqrt(static_cast<double>(head_dim)));
  const Var<T> q = query(x);
  const Var<T> k = key(x);
  const Var<T> v = value(x);
  std::vector<Var<T>> per_head;
  for (int h = 0; h < heads; ++h) {
    const Var<T> qh = slice_rows(q, h * head_dim, head_dim);
    const Var<T> kh = slice_rows(k, h * head_dim, head_dim);
    const Var<T> vh = slice_rows(v, h * head_dim, head_dim);
    // scores(j, i): key j against query i; softmax over keys per query.
    const Var<T> weights = softmax_cols(scale(matmul(transpose(kh), qh), inv_sqrt));
    per_head.push_back(matmul(vh, weights));
  }
  return output(heads == 1 ? per_head.front() : concat_rows(per_head));
}

template <typename T>
Matrix<T> sinusoidal_positions(Eigen::Index dim, Eigen::Index length) {
  Matrix<T> pe(dim, length);
  for (Eigen::Index pos = 0; pos < length; ++pos) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(dim));
      const double angle = static_cast<double>(pos) * rate;
      pe(i, pos) = static_cast<T>(i % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return pe;
}

#define RWEN_INSTANTIATE_LAYERS(T)                                         \
  template Var<T> dropout(Var<T>, double, ForwardContext&);                \
  template void init_uniform_fan_in(Param<T>&, Eigen::Index, Rng&);        \
  template void init_normal(Param<T>&, double, Rng&);                      \
  template struct Linear<T>;                                               \
  template struct Conv1d<T>;                                               \
  template struct LayerNorm<T>;                                            \
  template struct Embedding<T>;                                            \
  template struct GruCell<T>;                                              \
  template struct MultiHeadAttention<T>;                                   \
  template Matrix<T> sinusoidal_positions<T>(Eigen::Index, Eigen::Index);

RWEN_INSTANTIATE_LAYERS(float)
RWEN_INSTANTIATE_LAYERS(double)

#undef RWEN_INSTANTIATE_LAYERS

}  // namespace rwen::nn
