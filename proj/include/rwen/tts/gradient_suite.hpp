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

#include <string>
#include <vector>

#include "rwen/nn/gradcheck.hpp"

namespace rwen::tts {

struct SuiteEntry {
  std::string module;  // "nncore", "rwen" or "tts"
  std::string name;
  nn::GradcheckReport report;
  double seconds = 0.0;
};

// Finite-difference checks in double precision covering every differentiable
// op, each layer, the RWEN branches and the full RWEN+TTS loss at d_H = 8,
// d_enc = 16. `module` is "all" or one module name; anything else throws
// std::invalid_argument.
std::vector<SuiteEntry> run_gradient_suite(const std::string& module, const nn::GradcheckOptions& options = {});

}  // namespace rwen::tts
