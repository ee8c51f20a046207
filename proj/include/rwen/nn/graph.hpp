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

#include <functional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rwen/nn/matrix.hpp"
#include "rwen/nn/param.hpp"

namespace rwen::nn {

template <typename T>
class Graph;

// Handle to a node recorded on a Graph.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(Graph<T>* graph, int id) : graph_(graph), id_(id) {}

  Graph<T>* graph() const { return graph_; }
  int id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

  const Matrix<T>& value() const { return graph_->value(id_); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }

 private:
  Graph<T>* graph_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Nodes are recorded in evaluation order, so walking the
// tape backwards visits every node after all of its consumers.
//
// One graph belongs to one thread. Parameter gradients stay on the graph
// until they are flushed with accumulate_param_grads(), which lets several
// graphs run concurrently against the same ParamSet.
template <typename T>
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, const Matrix<T>& out_grad)>;

  explicit Graph(bool record_backward = true) : record_backward_(record_backward) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var<T> constant(Matrix<T> value);

  // Leaf bound to a parameter; repeated calls with the same parameter return
  // the same node.
  Var<T> param(Param<T>& p);

  // Records an op result. `fn` receives this node's gradient and must push
  // contributions to its parents through accumulate().
  Var<T> record(Matrix<T> value, std::initializer_list<Var<T>> parents, BackwardFn fn);
  Var<T> record(Matrix<T> value, const std::vector<Var<T>>& parents, BackwardFn fn);

  const Matrix<T>& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  bool requires_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }

  // Adds `g` to the gradient of node `id` (no-op for constants).
  template <typename Expr>
  void accumulate(int id, const Expr& g) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.requires_grad) return;
    if (!n.has_grad) {
      n.grad = g;
      n.has_grad = true;
    } else {
      n.grad += g;
    }
  }

  // Gradient of node `id` after backward(); zeros when nothing reached it.
  Matrix<T> grad(int id) const;

  // Seeds a 1x1 output with 1 and propagates.
  void backward(Var<T> output);
  void backward(Var<T> output, const Matrix<T>& seed);

  // p.grad += scale * dL/dp for every parameter leaf on this graph.
  void accumulate_param_grads(T scale = T(1)) const;

  // Parameter leaves that received a gradient, in first-use order.
  std::vector<std::pair<Param<T>*, Matrix<T>>> param_gradients() const;

  std::size_t node_count() const { return nodes_.size(); }
  bool recording() const { return record_backward_; }

 private:
  struct Node {
    Matrix<T> value;
    Matrix<T> grad;
    BackwardFn backward;
    Param<T>* param = nullptr;
    bool requires_grad = false;
    bool has_grad = false;
  };

  bool record_backward_;
  std::vector<Node> nodes_;
  std::unordered_map<const Param<T>*, int> param_nodes_;
  std::vector<int> param_order_;
};

extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace rwen::nn
