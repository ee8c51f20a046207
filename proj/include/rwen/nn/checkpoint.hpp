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

#include <nlohmann/json.hpp>

#include "rwen/nn/param.hpp"

namespace rwen::nn {

// A checkpoint is a directory holding one TensorFile per parameter
// ("<name>.rwt") and a metadata.json record:
//   {"format": "rwen-checkpoint-1", "step": N, "config": {...},
//    "config_hash": "<16 hex>", "params": [{"name", "shape", "file"}, ...]}
struct CheckpointInfo {
  nlohmann::json config;
  std::string config_hash;
  int step = 0;
};

// FNV-1a over the canonical (sorted-key) JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

void save_checkpoint(const std::string& dir, const ParamSet<float>& params, const nlohmann::json& config, int step);

// Reads metadata only.
CheckpointInfo read_checkpoint_info(const std::string& dir);

// Loads values into an already-built parameter set. Every parameter in
// `params` must be present with an identical shape; a mismatch throws
// ShapeError naming the parameter.
CheckpointInfo load_checkpoint(const std::string& dir, ParamSet<float>& params);

}  // namespace rwen::nn
