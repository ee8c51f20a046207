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

#include "rwen/nn/param.hpp"

namespace rwen::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam update from each parameter's `grad`; `step` counts
// from 1. Throws NumericalError naming the first parameter with a non-finite
// gradient, before any parameter is touched.
template <typename T>
void adam_step(ParamSet<T>& params, const AdamConfig& config, int step);

// Rescales all gradients so their joint L2 norm is at most `max_norm`.
// Returns the norm before clipping.
template <typename T>
double clip_grad_norm(ParamSet<T>& params, double max_norm);

}  // namespace rwen::nn
