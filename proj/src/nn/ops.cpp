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

#include "rwen/nn/ops.hpp"

#include <cmath>
#include <string>

namespace rwen::nn {

namespace {

std::string shape_of(Eigen::Index r, Eigen::Index c) { return std::to_string(r) + "x" + std::to_string(c); }

template <typename T>
void require_same_shape(const char* op, Var<T> a, Var<T> b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": " + shape_of(a.rows(), a.cols()) + " vs " + shape_of(b.rows(), b.cols()));
  }
}

template <typename T>
void require_same_graph(Var<T> a, Var<T> b) {
  if (a.graph() != b.graph()) throw std::logic_error("operands recorded on different graphs");
}

}  // namespace

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  require_same_graph(a, b);
  require_same_shape("add", a, b);
  const int ia = a.id(), ib = b.id();
  return a.graph()->record(a.value() + b.value(), {a, b}, [ia, ib](Graph<T>& g, const Matrix<T>& go) {
    g.accumulate(ia, go);
    g.accumulate(ib, go);
  });
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
  require_same_graph(a, b);
  require_same_shape("sub", a, b);
  const int ia = a.id(), ib = b.id();
  return a.graph()->record(a.value() - b.value(), {a, b}, [ia, ib](Graph<T>& g, const Matrix<T>& go) {
    g.accumulate(ia, go);
    g.accumulate(ib, -go);
  });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  require_same_graph(a, b);
  require_same_shape("mul", a, b);
  const int ia = a.id(), ib = b.id();
  return a.graph()->record(a.value().cwiseProduct(b.value()), {a, b}, [ia, ib](Graph<T>& g, const Matrix<T>& go) {
    g.accumulate(ia, go.cwiseProduct(g.value(ib)));
    g.accumulate(ib, go.cwiseProduct(g.value(ia)));
  });
}

template <typename T>
Var<T> scale(Var<T> a, T s) {
  const int ia = a.id();
  return a.graph()->record(a.value() * s, {a}, [ia, s](Graph<T>& g, const Matrix<T>& go) { g.accumulate(ia, go * s); });
}

template <typename T>
Var<T> add_const(Var<T> a, const Matrix<T>& c) {
  if (c.rows() != a.rows() || c.cols() != a.cols()) throw ShapeError("add_const: shape mismatch");
  const int ia = a.id();
  return a.graph()->record(a.value() + c, {a}, [ia](Graph<T>& g, const Matrix<T>& go) { g.accumulate(ia, go); });
}

template <typename T>
Var<T> mul_const(Var<T> a, const Matrix<T>& c) {
  if (c.rows() != a.rows() || c.cols() != a.cols()) throw ShapeError("mul_const: shape mismatch");
  const int ia = a.id();
  return a.graph()->record(a.value().cwiseProduct(c), {a},
                           [ia, c](Graph<T>& g, const Matrix<T>& go) { g.accumulate(ia, go.cwiseProduct(c)); });
}

template <typename T>
Var<T> add_bias(Var<T> x, Var<T> b) {
  require_same_graph(x, b);
  if (b.cols() != 1 || b.rows() != x.rows()) {
    throw ShapeError("add_bias: bias " + shape_of(b.rows(), b.cols()) + " for input " + shape_of(x.rows(), x.cols()));
  }
  const int ix = x.id(), ib = b.id();
  Matrix<T> out = x.value().colwise() + b.value().col(0);
  return x.graph()->record(std::move(out), {x, b}, [ix, ib](Graph<T>& g, const Matrix<T>& go) {
    g.accumulate(ix, go);
    g.accumulate(ib, go.rowwise().sum());
  });
}

template <typename T>
Var<T> scale_rows(Var<T> x, Var<T> gamma) {
  require_same_graph(x, gamma);
  if (gamma.cols() != 1 || gamma.rows() != x.rows()) throw ShapeError("scale_rows: gamma shape mismatch");
  const int ix = x.id(), ig = gamma.id();
  Matrix<T> out = gamma.value().col(0).asDiagonal() * x.value();
  return x.graph()->record(std::move(out), {x, gamma}, [ix, ig](Graph<T>& g, const Matrix<T>& go) {
    g.accumulate(ix, g.value(ig).col(0).asDiagonal() * go);
    g.accumulate(ig, go.cwiseProduct(g.value(ix)).rowwise().sum());
  });
}

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
  require_same_graph(a, b);
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_of(a.rows(), a.cols()) + " * " + shape_of(b.rows(), b.cols()));
  }
  const int ia = a.id(), ib = b.id();
  Matrix<T> out = a.value() * b.value();
  return a.graph()->record(std::move(out), {a, b}, [ia, ib](Graph<T>& g, const Matrix<T>& go) {
    if (g.requires_grad(ia)) g.accumulate(ia, go * g.value(ib).transpose());
    if (g.requires_grad(ib)) g.accumulate(ib, g.value(ia).transpose() * go);
  });
}

template <typename T>
Var<T> transpose(Var<T> a) {
  const int ia = a.id();
  Matrix<T> out = a.value().transpose();
  return a.graph()->record(std::move(out), {a},
                           [ia](Graph<T>& g, const Matrix<T>& go) { g.accumulate(ia, go.transpose()); });
}

template <typename T>
Var<T> sigmoid(Var<T> a) {
  Matrix<T> y = a.value().unaryExpr([](T v) { return T(1) / (T(1) + std::exp(-v)); });
  const int ia = a.id();
  Graph<T>* graph = a.graph();
  const int self = static_cast<int>(graph->node_count());
  return graph->record(std::move(y), {a}, [ia, self](Graph<T>& g, const Matrix<T>& go) {
    const Matrix<T>& y = g.value(self);
    g.accumulate(ia, go.cwiseProduct(y.cwiseProduct((T(1) - y.array()).matrix())));
  });
}

template <typename T>
Var<T> tanh(Var<T> a) {
  Matrix<T> y = a.value().array().tanh().matrix();
  const int ia = a.id();
  Graph<T>* graph = a.graph();
  const int self = static_cast<int>(graph->node_count());
  return graph->record(std::move(y), {a}, [ia, self](Graph<T>& g, const Matrix<T>& go) {
    const Matrix<T>& y = g.value(self);
    g.accumulate(ia, go.cwiseProduct((T(1) - y.array().square()).matrix()));
  });
}

template <typename T>
Var<T> relu(Var<T> a) {
  Matrix<T> y = a.value().cwiseMax(T(0));
  const int ia = a.id();
  return a.graph()->record(std::move(y), {a}, [ia](Graph<T>& g, const Matrix<T>& go) {
    const Matrix<T>& x = g.value(ia);
    g.accumulate(ia, (x.array() > T(0)).select(go.array(), T(0)).matrix());
  });
}

template <typename T>
Var<T> concat_rows(const std::vector<Var<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    require_same_graph(parts.front(), p);
    if (p.cols() != cols) throw ShapeError("concat_rows: column counts differ");
    rows += p.rows();
  }
  Matrix<T> out(rows, cols);
  std::vector<std::pair<int, Eigen::Index>> pieces;
  Eigen::Index offset = 0;
  for (const auto& p : parts) {
    out.middleRows(offset, p.rows()) = p.value();
    pieces.emplace_back(p.id(), offset);
    offset += p.rows();
  }
  return parts.front().graph()->record(std::move(out), parts, [pieces](Graph<T>& g, const Matrix<T>& go) {
    for (const auto& [id, off] : pieces) {
      if (g.requires_grad(id)) g.accumulate(id, go.middleRows(off, g.value(id).rows()));
    }
  });
}

template <typename T>
Var<T> slice_rows(Var<T> a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) throw ShapeError("slice_rows: range out of bounds");
  const int ia = a.id();
  const Eigen::Index rows = a.rows(), cols = a.cols();
  Matrix<T> out = a.value().middleRows(start, count);
  return a.graph()->record(std::move(out), {a}, [ia, start, count, rows, cols](Graph<T>& g, const Matrix<T>& go) {
    Matrix<T> full = Matrix<T>::Zero(rows, cols);
    full.middleRows(start, count) = go;
    g.accumulate(ia, full);
  });
}

template <typename T>
Var<T> concat_cols(const std::vector<Var<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    require_same_graph(parts.front(), p);
    if (p.rows() != rows) throw ShapeError("concat_cols: row counts differ");
    cols += p.cols();
  }
  Matrix<T> out(rows, cols);
  std::vector<std::pair<int, Eigen::Index>> pieces;
  Eigen::Index offset = 0;
  for (const auto& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    pieces.emplace_back(p.id(), offset);
    offset += p.cols();
  }
  return parts.front().graph()->record(std::move(out), parts, [pieces](Graph<T>& g, const Matrix<T>& go) {
    for (const auto& [id, off] : pieces) {
      if (g.requires_grad(id)) g.accumulate(id, go.middleCols(off, g.value(id).cols()));
    }
  });
}

template <typename T>
Var<T> slice_cols(Var<T> a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) throw ShapeError("slice_cols: range out of bounds");
  const int ia = a.id();
  const Eigen::Index rows = a.rows(), cols = a.cols();
  Matrix<T> out = a.value().middleCols(start, count);
  return a.graph()->record(std::move(out), {a}, [ia, start, count, rows, cols](Graph<T>& g, const Matrix<T>& go) {
    Matrix<T> full = Matrix<T>::Zero(rows, cols);
    full.middleCols(start, count) = go;
    g.accumulate(ia, full);
  });
}

template <typename T>
Var<T> gather_cols(Var<T> a, const std::vector<int>& index) {
  const Eigen::Index cols = a.cols();
  Matrix<T> out(a.rows(), static_cast<Eigen::Index>(index.size()));
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] < 0 || index[k] >= cols) {
      throw ShapeError("gather_cols: index " + std::to_string(index[k]) + " outside [0, " + std::to_string(cols) + ")");
    }
    out.col(static_cast<Eigen::Index>(k)) = a.value().col(index[k]);
  }
  const int ia = a.id();
  const Eigen::Index rows = a.rows();
  return a.graph()->record(std::move(out), {a}, [ia, index, rows, cols](Graph<T>& g, const Matrix<T>& go) {
    Matrix<T> full = Matrix<T>::Zero(rows, cols);
    for (std::size_t k = 0; k < index.size(); ++k) full.col(index[k]) += go.col(static_cast<Eigen::Index>(k));
    g.accumulate(ia, full);
  });
}

template <typename T>
Var<T> shift_cols(Var<T> a, int offset) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  Matrix<T> out = Matrix<T>::Zero(rows, cols);
  // Output column j reads input column j + offset.
  const Eigen::Index lo = std::max<Eigen::Index>(0, -offset);
  const Eigen::Index hi = std::min<Eigen::Index>(cols, cols - offset);
  if (hi > lo) out.middleCols(lo, hi - lo) = a.value().middleCols(lo + offset, hi - lo);
  const int ia = a.id();
  return a.graph()->record(std::move(out), {a}, [ia, offset, rows, cols, lo, hi](Graph<T>& g, const Matrix<T>& go) {
    Matrix<T> full = Matrix<T>::Zero(rows, cols);
    if (hi > lo) full.middleCols(lo + offset, hi - lo) = go.middleCols(lo, hi - lo);
    g.accumulate(ia, full);
  });
}

template <typename T>
Var<T> select_cols(const std::vector<bool>& take_a, Var<T> a, Var<T> b) {
  require_same_graph(a, b);
  require_same_shape("select_cols", a, b);
  if (static_cast<Eigen::Index>(take_a.size()) != a.cols()) throw ShapeError("select_cols: mask length mismatch");
  Matrix<T> out(a.rows(), a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    out.col(c) = take_a[static_cast<std::size_t>(c)] ? a.value().col(c) : b.value().col(c);
  }
  const int ia = a.id(), ib = b.id();
  return a.graph()->record(std::move(out), {a, b}, [ia, ib, take_a](Graph<T>& g, const Matrix<T>& go) {
    Matrix<T> ga = Matrix<T>::Zero(go.rows(), go.cols());
    Matrix<T> gb = Matrix<T>::Zero(go.rows(), go.cols());
    for (Eigen::Index c = 0; c < go.cols(); ++c) {
      if (take_a[static_cast<std::size_t>(c)]) {
        ga.col(c) = go.col(c);
      } else {
        gb.col(c) = go.col(c);
      }
    }
    g.accumulate(ia, ga);
    g.accumulate(ib, gb);
  });
}

template <typename T>
Var<T> softmax_cols(Var<T> a) {
  Matrix<T> y(a.rows(), a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const auto col = a.value().col(c);
    const T mx = col.maxCoeff();
    y.col(c) = (col.array() - mx).exp().matrix();
    y.col(c) /= y.col(c).sum();
  }
  const int ia = a.id();
  Graph<T>* graph = a.graph();
  const int self = static_cast<int>(graph->node_count());
  return graph->record(std::move(y), {a}, [ia, self](Graph<T>& g, const Matrix<T>& go) {
    const Matrix<T>& y = g.value(self);
    const Eigen::Matrix<T, 1, Eigen::Dynamic> dots = go.cwiseProduct(y).colwise().sum();
    Matrix<T> gx = y.cwiseProduct((go.rowwise() - dots));
    g.accumulate(ia, gx);
  });
}

template <typename T>
Var<T> layer_norm_cols(Var<T> a, T eps) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  if (rows == 0) throw ShapeError("layer_norm_cols: zero features");
  Matrix<T> y(rows, cols);
  ColVector<T> inv_std(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto col = a.value().col(c);
    const T mean = col.mean();
    const T var = (col.array() - mean).square().mean();
    inv_std(c) = T(1) / std::sqrt(var + eps);
    y.col(c) = ((col.array() - mean) * inv_std(c)).matrix();
  }
  const int ia = a.id();
  Graph<T>* graph = a.graph();
  const int self = static_cast<int>(graph->node_count());
  return graph->record(std::move(y), {a}, [ia, self, inv_std](Graph<T>& g, const Matrix<T>& go) {
    const Matrix<T>& y = g.value(self);
    Matrix<T> gx(go.rows(), go.cols());
    for (Eigen::Index c = 0; c < go.cols(); ++c) {
      const T mean_g = go.col(c).mean();
      const T mean_gy = go.col(c).dot(y.col(c)) / static_cast<T>(go.rows());
      gx.col(c) = inv_std(c) * (go.col(c).array() - mean_g - y.col(c).array() * mean_gy).matrix();
    }
    g.accumulate(ia, gx);
  });
}

template <typename T>
Var<T> sum(Var<T> a) {
  Matrix<T> out(1, 1);
  out(0, 0) = a.value().sum();
  const int ia = a.id();
  const Eigen::Index rows = a.rows(), cols = a.cols();
  return a.graph()->record(std::move(out), {a}, [ia, rows, cols](Graph<T>& g, const Matrix<T>& go) {
    g.accumulate(ia, Matrix<T>::Constant(rows, cols, go(0, 0)));
  });
}

template <typename T>
Var<T> dot_const(Var<T> a, const Matrix<T>& weights) {
  if (weights.rows() != a.rows() || weights.cols() != a.cols()) throw ShapeError("dot_const: shape mismatch");
  Matrix<T> out(1, 1);
  out(0, 0) = a.value().cwiseProduct(weights).sum();
  const int ia = a.id();
  return a.graph()->record(std::move(out), {a},
                           [ia, weights](Graph<T>& g, const Matrix<T>& go) { g.accumulate(ia, weights * go(0, 0)); });
}

template <typename T>
Var<T> mse(Var<T> pred, const Matrix<T>& target) {
  if (target.rows() != pred.rows() || target.cols() != pred.cols()) {
    throw ShapeError("mse: prediction " + shape_of(pred.rows(), pred.cols()) + " vs target " +
                     shape_of(target.rows(), target.cols()));
  }
  const auto count = pred.value().size();
  Matrix<T> out(1, 1);
  out(0, 0) = count == 0 ? T(0) : (pred.value() - target).squaredNorm() / static_cast<T>(count);
  const int ip = pred.id();
  return pred.graph()->record(std::move(out), {pred}, [ip, target, count](Graph<T>& g, const Matrix<T>& go) {
    if (count == 0) return;
    g.accumulate(ip, (g.value(ip) - target) * (T(2) * go(0, 0) / static_cast<T>(count)));
  });
}

#define RWEN_INSTANTIATE_OPS(T)                                                          \
  template Var<T> add(Var<T>, Var<T>);                                                   \
  template Var<T> sub(Var<T>, Var<T>);                                                   \
  template Var<T> mul(Var<T>, Var<T>);                                                   \
  template Var<T> scale(Var<T>, T);                                                      \
  template Var<T> add_const(Var<T>, const Matrix<T>&);                                   \
  template Var<T> mul_const(Var<T>, const Matrix<T>&);                                   \
  template Var<T> add_bias(Var<T>, Var<T>);                                              \
  template Var<T> scale_rows(Var<T>, Var<T>);                                            \
  template Var<T> matmul(Var<T>, Var<T>);                                                \
  template Var<T> transpose(Var<T>);                                                     \
  template Var<T> sigmoid(Var<T>);                                                       \
  template Var<T> tanh(Var<T>);                                                          \
  template Var<T> relu(Var<T>);                                                          \
  template Var<T> concat_rows(const std::vector<Var<T>>&);                               \
  template Var<T> slice_rows(Var<T>, Eigen::Index, Eigen::Index);                        \
  template Var<T> concat_cols(const std::vector<Var<T>>&);                               \
  template Var<T> slice_cols(Var<T>, Eigen::Index, Eigen::Index);                        \
  template Var<T> gather_cols(Var<T>, const std::vector<int>&);                          \
  template Var<T> shift_cols(Var<T>, int);                                               \
  template Var<T> select_cols(const std::vector<bool>&, Var<T>, Var<T>);                 \
  template Var<T> softmax_cols(Var<T>);                                                  \
  template Var<T> layer_norm_cols(Var<T>, T);                                            \
  template Var<T> sum(Var<T>);                                                           \
  template Var<T> dot_const(Var<T>, const Matrix<T>&);                                   \
  template Var<T> mse(Var<T>, const Matrix<T>&);

RWEN_INSTANTIATE_OPS(float)
RWEN_INSTANTIATE_OPS(double)

#undef RWEN_INSTANTIATE_OPS

}  // namespace rwen::nn
