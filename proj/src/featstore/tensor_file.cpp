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

#include "rwen/featstore/tensor_file.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace rwen::featstore {

namespace {

constexpr char kMagic[4] = {'R', 'W', 'T', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes[at + static_cast<std::size_t>(k)]) << (8 * k);
  return v;
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (const auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  if (t.data.size() != t.element_count()) throw FormatError("tensor payload does not match its dims");
  std::vector<std::uint8_t> out;
  out.reserve(8 + 4 * t.dims.size() + 4 * t.data.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
  for (const auto d : t.dims) put_u32(out, d);
  for (const float f : t.data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes, const std::string& source) {
  if (bytes.size() < 8 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin(),
                                      [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
    throw FormatError(source + ": missing RWT1 magic");
  }
  Tensor t;
  const std::uint32_t ndim = get_u32(bytes, 4);
  std::size_t at = 8;
  if (bytes.size() < at + 4ULL * ndim) throw FormatError(source + ": truncated header");
  for (std::uint32_t k = 0; k < ndim; ++k, at += 4) t.dims.push_back(get_u32(bytes, at));
  const std::size_t count = t.element_count();
  if (bytes.size() - at != 4 * count) {
    throw FormatError(source + ": payload is " + std::to_string(bytes.size() - at) + " bytes, dims require " +
                      std::to_string(4 * count));
  }
  t.data.resize(count);
  for (std::size_t i = 0; i < count; ++i, at += 4) t.data[i] = std::bit_cast<float>(get_u32(bytes, at));
  return t;
}

void write_tensor_file(const std::string& path, const Tensor& t) {
  const auto bytes = encode_tensor(t);
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("short write to " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

Tensor read_tensor_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open tensor file " + path);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_tensor(bytes, path);
}

Tensor from_matrix(const MatrixF& m) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
  t.data.resize(static_cast<std::size_t>(m.size()));
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) t.data[k++] = m(r, c);
  }
  return t;
}

MatrixF to_matrix(const Tensor& t, const std::string& source) {
  if (t.dims.size() == 1) {
    MatrixF m(t.dims[0], 1);
    for (std::size_t i = 0; i < t.data.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = t.data[i];
    return m;
  }
  if (t.dims.size() != 2) {
    throw FormatError(source + ": expected a 1-D or 2-D tensor, found " + std::to_string(t.dims.size()) + " dims");
  }
  MatrixF m(t.dims[0], t.dims[1]);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = t.data[k++];
  }
  return m;
}

void write_matrix(const std::string& path, const MatrixF& m) { write_tensor_file(path, from_matrix(m)); }

MatrixF read_matrix(const std::string& path) { return to_matrix(read_tensor_file(path), path); }

}  // namespace rwen::featstore
