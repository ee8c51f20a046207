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

#include "rwen/nn/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rwen/featstore/tensor_file.hpp"
#include "rwen/nn/random.hpp"

namespace rwen::nn {

namespace fs = std::filesystem;
using nlohmann::json;

std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

void save_checkpoint(const std::string& dir, const ParamSet<float>& params, const json& config, int step) {
  fs::create_directories(dir);
  json meta;
  meta["format"] = "rwen-checkpoint-1";
  meta["step"] = step;
  meta["config"] = config;
  meta["config_hash"] = config_hash(config);
  meta["params"] = json::array();
  for (const auto& p : params) {
    const std::string file = p->name + ".rwt";
    featstore::write_matrix((fs::path(dir) / file).string(), p->value);
    meta["params"].push_back({{"name", p->name}, {"shape", {p->value.rows(), p->value.cols()}}, {"file", file}});
  }
  const std::string path = (fs::path(dir) / "metadata.json").string();
  std::ofstream out(path + ".tmp", std::ios::trunc);
  out << meta.dump(2) << "\n";
  out.close();
  fs::rename(path + ".tmp", path);
}

namespace {

json read_meta(const std::string& dir) {
  const std::string path = (fs::path(dir) / "metadata.json").string();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint metadata not found: " + path);
  json meta = json::parse(in);
  if (meta.value("format", "") != "rwen-checkpoint-1") throw std::runtime_error(path + ": unknown checkpoint format");
  return meta;
}

}  // namespace

CheckpointInfo read_checkpoint_info(const std::string& dir) {
  const json meta = read_meta(dir);
  return {meta.at("config"), meta.at("config_hash").get<std::string>(), meta.at("step").get<int>()};
}

CheckpointInfo load_checkpoint(const std::string& dir, ParamSet<float>& params) {
  const json meta = read_meta(dir);
  for (const auto& p : params) {
    const json* entry = nullptr;
    for (const auto& e : meta.at("params")) {
      if (e.at("name") == p->name) entry = &e;
    }
    if (entry == nullptr) throw ShapeError("checkpoint " + dir + " has no parameter " + p->name);
    const auto shape = entry->at("shape").get<std::vector<Eigen::Index>>();
    if (shape.size() != 2 || shape[0] != p->value.rows() || shape[1] != p->value.cols()) {
      throw ShapeError("parameter " + p->name + ": checkpoint shape " + entry->at("shape").dump() + " but model expects [" +
                       std::to_string(p->value.rows()) + "," + std::to_string(p->value.cols()) + "]");
    }
    MatrixF value = featstore::read_matrix((fs::path(dir) / entry->at("file").get<std::string>()).string());
    if (value.rows() != p->value.rows() || value.cols() != p->value.cols()) {
      throw ShapeError("parameter " + p->name + ": tensor file shape disagrees with metadata");
    }
    p->value = std::move(value);
  }
  return {meta.at("config"), meta.at("config_hash").get<std::string>(), meta.at("step").get<int>()};
}

}  // namespace rwen::nn
