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
#include <string>
#include <vector>

#include "rwen/nn/optim.hpp"
#include "rwen/tts/model.hpp"

namespace rwen::tts {

// Serial is the reference; parallel runs one sentence per OpenMP task and
// must produce bit-identical results.
enum class Execution { kSerial, kParallel };

// Forward and backward for every sentence in its own graph, then adds the
// parameter gradients into Param::grad in sentence order, each scaled by
// 1/|batch|. Returns the mean losses. Dropout masks depend only on
// (dropout_seed, position in batch), so the execution mode cannot change
// them. Throws NumericalError on a non-finite loss.
template <typename T>
LossBreakdown batch_gradients(Model<T>& m, const std::vector<const Example*>& batch, bool training,
                              std::uint64_t dropout_seed, Execution exec);

// Mean teacher-forced losses in eval mode.
LossBreakdown evaluate(const Model<float>& m, const std::vector<Example>& data, Execution exec);

std::vector<Synthesis> synthesize_batch(const Model<float>& m, const std::vector<Example>& data, Execution exec);

// RWEN word features per sentence, d_out x (n+2).
std::vector<MatrixF> encode_batch(const Model<float>& m, const std::vector<Example>& data, Execution exec);

struct TrainOptions {
  std::string out_dir;       // checkpoints and metrics.csv; empty disables both
  Execution exec = Execution::kParallel;
  std::function<void(int step, const LossBreakdown&)> on_log;
};

struct TrainResult {
  LossBreakdown initial;  // eval-mode loss before the first update
  LossBreakdown final;    // eval-mode loss after the last update
  LossBreakdown first_step;  // training-mode loss of step 1
  LossBreakdown last_step;
  int steps = 0;
};

// Adam on mini-batches drawn from a per-epoch permutation keyed on the config
// seed. Appends "step,total,mel,pitch,energy,duration" rows to
// <out_dir>/metrics.csv and writes <out_dir>/checkpoint (plus
// checkpoint-<step> every checkpoint_every steps).
TrainResult train(Model<float>& m, const std::vector<Example>& data, const TrainOptions& options);

}  // namespace rwen::tts
