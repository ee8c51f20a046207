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
#include <functional>
#include <string>
#include <vector>

#include "rwen/nn/graph.hpp"

namespace rwen::nn {

struct GradcheckOptions {
  double step = 1e-6;
  double tolerance = 1e-4;
  // Parameters larger than this are checked on a seeded random sample.
  int max_entries_per_param = 48;
  std::uint64_t sample_seed = 1;
  // Relative error is |a - n| / max(|a|, |n|, denominator_floor); gradients
  // smaller than the floor are effectively compared in absolute terms.
  double denominator_floor = 1e-5;
};

struct ParamCheck {
  std::string name;
  int entries_checked = 0;
  double max_rel_error = 0.0;
  double analytic_at_max = 0.0;
  double numeric_at_max = 0.0;
};

struct GradcheckReport {
  std::vector<ParamCheck> params;
  double max_rel_error = 0.0;
  bool passed = true;

  std::string summary() const;
};

// Builds the scalar loss on a fresh graph per evaluation. The closure must be
// deterministic (same dropout seed, same inputs) for the check to be valid.
using LossClosure = std::function<Var<double>(Graph<double>&)>;

// Compares reverse-mode gradients with central differences for every
// parameter in `params`.
GradcheckReport gradcheck(const LossClosure& loss, ParamSet<double>& params, const GradcheckOptions& options = {});

}  // namespace rwen::nn
