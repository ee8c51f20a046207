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

#include "rwen/nn/graph.hpp"
#include "rwen/nn/ops.hpp"
#include "rwen/nn/param.hpp"
#include "rwen/nn/random.hpp"

namespace rwen::nn {

// Mode and dropout stream for one forward pass. Every dropout call draws a
// fresh mask keyed on (seed, call number), so a forward pass is reproducible
// given the same seed and call order.
struct ForwardContext {
  bool training = false;
  std::uint64_t seed = 0;
  std::uint64_t dropout_calls = 0;
};

template <typename T>
Var<T> dropout(Var<T> x, double p, ForwardContext& ctx);

// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in))
template <typename T>
void init_uniform_fan_in(Param<T>& p, Eigen::Index fan_in, Rng& rng);
template <typename T>
void init_normal(Param<T>& p, double stddev, Rng& rng);

template <typename T>
struct Linear {
  Param<T>* weight = nullptr;  // out x in
  Param<T>* bias = nullptr;    // out x 1

  static Linear create(ParamSet<T>& params, const std::string& name, Eigen::Index in, Eigen::Index out, Rng& rng);
  Var<T> operator()(Var<T> x) const;
  Eigen::Index in_features() const { return weight->value.cols(); }
  Eigen::Index out_features() const { return weight->value.rows(); }
};

// 1-D convolution along columns with zero "same" padding; odd kernel only.
template <typename T>
struct Conv1d {
  Param<T>* weight = nullptr;  // out x (kernel * in), tap-major
  Param<T>* bias = nullptr;
  int kernel = 3;

  static Conv1d create(ParamSet<T>& params, const std::string& name, Eigen::Index in, Eigen::Index out, int kernel,
                       Rng& rng);
  Var<T> operator()(Var<T> x) const;
};

template <typename T>
struct LayerNorm {
  Param<T>* gamma = nullptr;
  Param<T>* beta = nullptr;
  T eps = T(1e-5);

  static LayerNorm create(ParamSet<T>& params, const std::string& name, Eigen::Index features);
  Var<T> operator()(Var<T> x) const;
};

template <typename T>
struct Embedding {
  Param<T>* table = nullptr;  // dim x vocab; one column per entry

  static Embedding create(ParamSet<T>& params, const std::string& name, Eigen::Index dim, Eigen::Index vocab, Rng& rng);
  Var<T> lookup(Graph<T>& g, const std::vector<int>& ids) const;
  Eigen::Index vocab() const { return table->value.cols(); }
};

template <typename T>
struct GruOutput {
  std::vector<Var<T>> states;  // h_1 .. h_T
  Var<T> last;
};

// r = s(W_r x + U_r h + b_r), z = s(W_z x + U_z h + b_z),
// c = tanh(W_h x + U_h (r * h) + b_h), h' = (1 - z) * h + z * c.
// Inputs may carry several columns; each column is an independent sequence.
template <typename T>
struct GruCell {
  Param<T>* w_r = nullptr;
  Param<T>* w_z = nullptr;
  Param<T>* w_h = nullptr;
  Param<T>* u_r = nullptr;
  Param<T>* u_z = nullptr;
  Param<T>* u_h = nullptr;
  Param<T>* b_r = nullptr;
  Param<T>* b_z = nullptr;
  Param<T>* b_h = nullptr;

  static GruCell create(ParamSet<T>& params, const std::string& name, Eigen::Index in, Eigen::Index hidden, Rng& rng);

  Eigen::Index input_size() const { return w_r->value.cols(); }
  Eigen::Index hidden_size() const { return w_r->value.rows(); }

  Var<T> step(Var<T> x, Var<T> h) const;
  GruOutput<T> forward(const std::vector<Var<T>>& inputs, Var<T> h0) const;
  // Column c only advances while t < lengths[c]; afterwards its state is
  // carried unchanged, so `last` holds each column's own final state.
  GruOutput<T> forward_masked(const std::vector<Var<T>>& inputs, Var<T> h0, const std::vector<int>& lengths) const;
};

template <typename T>
struct MultiHeadAttention {
  Linear<T> query;
  Linear<T> key;
  Linear<T> value;
  Linear<T> output;
  int heads = 1;

  static MultiHeadAttention create(ParamSet<T>& params, const std::string& name, Eigen::Index dim, int heads, Rng& rng);
  Var<T> operator()(Var<T> x) const;
};

// Fixed sinusoidal position table, dim x length.
template <typename T>
Matrix<T> sinusoidal_positions(Eigen::Index dim, Eigen::Index length);

}  // namespace rwen::nn
