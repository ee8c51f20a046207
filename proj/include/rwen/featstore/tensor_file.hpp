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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwen/nn/matrix.hpp"

namespace rwen::featstore {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// On-disk layout, all little-endian:
//   "RWT1" | u32 ndim | u32 dims[ndim] | f32 payload[prod(dims)] (row-major)
struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t element_count() const;
  bool operator==(const Tensor&) const = default;
};

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
// `source` names the origin in error messages.
Tensor decode_tensor(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");

// Written to a temporary sibling and renamed into place.
void write_tensor_file(const std::string& path, const Tensor& t);
Tensor read_tensor_file(const std::string& path);

// 2-D tensors map to matrices with dims [rows, cols]; a 1-D tensor maps to a
// single column.
Tensor from_matrix(const MatrixF& m);
MatrixF to_matrix(const Tensor& t, const std::string& source = "<memory>");

void write_matrix(const std::string& path, const MatrixF& m);
MatrixF read_matrix(const std::string& path);

}  // namespace rwen::featstore
