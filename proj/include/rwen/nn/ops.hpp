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

#include <vector>

#include "rwen/nn/graph.hpp"

// Differentiable ops on column-major matrices. Every op checks shapes and
// throws ShapeError on mismatch.
namespace rwen::nn {

template <typename T> Var<T> add(Var<T> a, Var<T> b);
template <typename T> Var<T> sub(Var<T> a, Var<T> b);
template <typename T> Var<T> mul(Var<T> a, Var<T> b);  // elementwise
template <typename T> Var<T> scale(Var<T> a, T s);
template <typename T> Var<T> add_const(Var<T> a, const Matrix<T>& c);
template <typename T> Var<T> mul_const(Var<T> a, const Matrix<T>& c);

// x + b broadcast over columns; b is rows x 1.
template <typename T> Var<T> add_bias(Var<T> x, Var<T> b);
// x(r, c) * gamma(r); gamma is rows x 1.
template <typename T> Var<T> scale_rows(Var<T> x, Var<T> gamma);

template <typename T> Var<T> matmul(Var<T> a, Var<T> b);
template <typename T> Var<T> transpose(Var<T> a);

template <typename T> Var<T> sigmoid(Var<T> a);
template <typename T> Var<T> tanh(Var<T> a);
template <typename T> Var<T> relu(Var<T> a);

template <typename T> Var<T> concat_rows(const std::vector<Var<T>>& parts);
template <typename T> Var<T> slice_rows(Var<T> a, Eigen::Index start, Eigen::Index count);
template <typename T> Var<T> concat_cols(const std::vector<Var<T>>& parts);
template <typename T> Var<T> slice_cols(Var<T> a, Eigen::Index start, Eigen::Index count);

// Output column k is column index[k] of a; indexes may repeat.
template <typename T> Var<T> gather_cols(Var<T> a, const std::vector<int>& index);
// Output column j is column j + offset of a, or zeros past either edge.
template <typename T> Var<T> shift_cols(Var<T> a, int offset);
// Column c comes from a when take_a[c], otherwise from b.
template <typename T> Var<T> select_cols(const std::vector<bool>& take_a, Var<T> a, Var<T> b);

// Softmax over the rows of each column.
template <typename T> Var<T> softmax_cols(Var<T> a);
// Zero-mean unit-variance normalization of each column over its rows.
template <typename T> Var<T> layer_norm_cols(Var<T> a, T eps);

// 1x1 reductions.
template <typename T> Var<T> sum(Var<T> a);
template <typename T> Var<T> dot_const(Var<T> a, const Matrix<T>& weights);
// Mean squared error against a constant target; 0 for empty inputs.
template <typename T> Var<T> mse(Var<T> pred, const Matrix<T>& target);

}  // namespace rwen::nn
