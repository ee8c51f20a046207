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

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwen/nn/matrix.hpp"

namespace rwen::nn {

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A named trainable tensor with its gradient and optimizer state.
template <typename T>
struct Param {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;
  Matrix<T> adam_m;
  Matrix<T> adam_v;

  Param(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)),
        value(Matrix<T>::Zero(rows, cols)),
        grad(Matrix<T>::Zero(rows, cols)),
        adam_m(Matrix<T>::Zero(rows, cols)),
        adam_v(Matrix<T>::Zero(rows, cols)) {}
};

// Owns parameters in insertion order. Pointers returned by add() stay valid
// for the lifetime of the set.
template <typename T>
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(const ParamSet&) = delete;
  ParamSet& operator=(const ParamSet&) = delete;
  ParamSet(ParamSet&&) noexcept = default;
  ParamSet& operator=(ParamSet&&) noexcept = default;

  Param<T>& add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    if (find(name) != nullptr) throw std::invalid_argument("duplicate parameter name " + name);
    params_.push_back(std::make_unique<Param<T>>(name, rows, cols));
    return *params_.back();
  }

  Param<T>* find(const std::string& name) const {
    for (const auto& p : params_) {
      if (p->name == name) return p.get();
    }
    return nullptr;
  }

  Param<T>& at(const std::string& name) const {
    Param<T>* p = find(name);
    if (p == nullptr) throw std::out_of_range("no parameter named " + name);
    return *p;
  }

  std::size_t size() const { return params_.size(); }
  Param<T>& operator[](std::size_t i) const { return *params_[i]; }

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad() {
    for (auto& p : params_) p->grad.setZero();
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
    return n;
  }

  // Copies values into a set of another precision with identical names and
  // shapes. Gradients and optimizer state are not copied.
  template <typename U>
  ParamSet<U> cast() const {
    ParamSet<U> out;
    for (const auto& p : params_) {
      out.add(p->name, p->value.rows(), p->value.cols()).value = p->value.template cast<U>();
    }
    return out;
  }

 private:
  std::vector<std::unique_ptr<Param<T>>> params_;
};

}  // namespace rwen::nn
