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

#include "rwen/nn/optim.hpp"

#include <cmath>
#include <string>

namespace rwen::nn {

template <typename T>
void adam_step(ParamSet<T>& params, const AdamConfig& config, int step) {
  if (step < 1) throw std::invalid_argument("adam step counter starts at 1");
  for (const auto& p : params) {
    if (!all_finite(p->grad)) throw NumericalError("non-finite gradient in parameter " + p->name);
  }
  const double c1 = 1.0 - std::pow(config.beta1, step);
  const double c2 = 1.0 - std::pow(config.beta2, step);
  const T b1 = static_cast<T>(config.beta1);
  const T b2 = static_cast<T>(config.beta2);
  for (const auto& p : params) {
    p->adam_m = b1 * p->adam_m + (T(1) - b1) * p->grad;
    p->adam_v = b2 * p->adam_v + (T(1) - b2) * p->grad.cwiseProduct(p->grad);
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      const double m_hat = static_cast<double>(p->adam_m.data()[i]) / c1;
      const double v_hat = static_cast<double>(p->adam_v.data()[i]) / c2;
      p->value.data()[i] -= static_cast<T>(config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon));
    }
  }
}

template <typename T>
double clip_grad_norm(ParamSet<T>& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params) sq += static_cast<double>(p->grad.squaredNorm());
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const T factor = static_cast<T>(max_norm / norm);
    for (const auto& p : params) p->grad *= factor;
  }
  return norm;
}

template void adam_step(ParamSet<float>&, const AdamConfig&, int);
template void adam_step(ParamSet<double>&, const AdamConfig&, int);
template double clip_grad_norm(ParamSet<float>&, double);
template double clip_grad_norm(ParamSet<double>&, double);

}  // namespace rwen::nn
