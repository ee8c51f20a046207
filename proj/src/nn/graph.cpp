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

#include "rwen/nn/graph.hpp"

#include <string>

namespace rwen::nn {

template <typename T>
Var<T> Graph<T>::constant(Matrix<T> value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Var<T> Graph<T>::param(Param<T>& p) {
  const auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return Var<T>(this, it->second);
  Node n;
  n.value = p.value;
  n.param = &p;
  n.requires_grad = record_backward_;
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.emplace(&p, id);
  param_order_.push_back(id);
  return Var<T>(this, id);
}

template <typename T>
Var<T> Graph<T>::record(Matrix<T> value, std::initializer_list<Var<T>> parents, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  if (record_backward_) {
    for (const Var<T>& p : parents) n.requires_grad = n.requires_grad || requires_grad(p.id());
    if (n.requires_grad) n.backward = std::move(fn);
  }
  nodes_.push_back(std::move(n));
  return Var<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Var<T> Graph<T>::record(Matrix<T> value, const std::vector<Var<T>>& parents, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  if (record_backward_) {
    for (const Var<T>& p : parents) n.requires_grad = n.requires_grad || requires_grad(p.id());
    if (n.requires_grad) n.backward = std::move(fn);
  }
  nodes_.push_back(std::move(n));
  return Var<T>(this, static_cast<int>(nodes_.size()) - 1);
}

template <typename T>
Matrix<T> Graph<T>::grad(int id) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.has_grad) return n.grad;
  return Matrix<T>::Zero(n.value.rows(), n.value.cols());
}

template <typename T>
void Graph<T>::backward(Var<T> output) {
  if (output.rows() != 1 || output.cols() != 1) {
    throw ShapeError("backward() without a seed needs a 1x1 output, got " + std::to_string(output.rows()) + "x" +
                     std::to_string(output.cols()));
  }
  backward(output, Matrix<T>::Ones(1, 1));
}

template <typename T>
void Graph<T>::backward(Var<T> output, const Matrix<T>& seed) {
  if (!record_backward_) throw std::logic_error("backward() on a graph built without gradient recording");
  if (seed.rows() != output.rows() || seed.cols() != output.cols()) throw ShapeError("backward seed shape mismatch");
  accumulate(output.id(), seed);
  for (int id = output.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, n.grad);
  }
}

template <typename T>
void Graph<T>::accumulate_param_grads(T scale) const {
  for (const int id : param_order_) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.has_grad) continue;
    n.param->grad += scale * n.grad;
  }
}

template <typename T>
std::vector<std::pair<Param<T>*, Matrix<T>>> Graph<T>::param_gradients() const {
  std::vector<std::pair<Param<T>*, Matrix<T>>> out;
  for (const int id : param_order_) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.has_grad) out.emplace_back(n.param, n.grad);
  }
  return out;
}

template class Graph<float>;
template class Graph<double>;

}  // namespace rwen::nn
