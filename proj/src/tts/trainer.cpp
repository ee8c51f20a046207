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

#include "rwen/tts/trainer.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rwen/nn/checkpoint.hpp"

namespace rwen::tts {

namespace fs = std::filesystem;

namespace {

// Runs body(i) for i in [0, n) and rethrows the first failure in index order.
template <typename Body>
void for_each_index(std::size_t n, Execution exec, Body body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string describe(const LossBreakdown& l) {
  std::ostringstream os;
  os << "total=" << l.total << " mel=" << l.mel << " pitch=" << l.pitch << " energy=" << l.energy
     << " duration=" << l.duration;
  return os.str();
}

bool finite(const LossBreakdown& l) {
  return std::isfinite(l.total) && std::isfinite(l.mel) && std::isfinite(l.pitch) && std::isfinite(l.energy) &&
         std::isfinite(l.duration);
}

}  // namespace

template <typename T>
LossBreakdown batch_gradients(Model<T>& m, const std::vector<const Example*>& batch, bool training,
                              std::uint64_t dropout_seed, Execution exec) {
  using Grads = std::vector<std::pair<nn::Param<T>*, Matrix<T>>>;
  LossBreakdown mean;
  if (batch.empty()) return mean;
  const T inv = static_cast<T>(1.0 / static_cast<double>(batch.size()));
  // Per-sentence gradients are as large as the model, so only one chunk of
  // them is alive at a time. Reduction is always in sentence order, which
  // keeps the result independent of the chunk size.
  const std::size_t chunk =
      exec == Execution::kParallel ? static_cast<std::size_t>(std::max(1, omp_get_max_threads())) : 1;
  std::vector<Grads> grads(chunk);
  std::vector<LossBreakdown> losses(chunk);
  for (std::size_t start = 0; start < batch.size(); start += chunk) {
    const std::size_t count = std::min(chunk, batch.size() - start);
    for_each_index(count, exec, [&](std::size_t k) {
      const std::size_t i = start + k;
      Graph<T> g;
      ForwardContext ctx{training, nn::mix(dropout_seed, i), 0};
      const TrainingForward<T> f = training_forward(m, g, *batch[i], ctx);
      losses[k] = f.parts;
      if (!finite(f.parts)) {
        throw nn::NumericalError("non-finite loss on sentence '" + batch[i]->sentence->id + "': " + describe(f.parts));
      }
      g.backward(f.loss);
      grads[k] = g.param_gradients();
    });
    for (std::size_t k = 0; k < count; ++k) {
      for (auto& [param, grad] : grads[k]) param->grad += inv * grad;
      grads[k].clear();
      mean += losses[k];
    }
  }
  return mean.scaled(1.0 / static_cast<double>(batch.size()));
}

LossBreakdown evaluate(const Model<float>& m, const std::vector<Example>& data, Execution exec) {
  std::vector<LossBreakdown> losses(data.size());
  for_each_index(data.size(), exec, [&](std::size_t i) {
    Graph<float> g(false);
    ForwardContext ctx;
    losses[i] = training_forward(m, g, data[i], ctx).parts;
  });
  LossBreakdown mean;
  for (const auto& l : losses) mean += l;
  return data.empty() ? mean : mean.scaled(1.0 / static_cast<double>(data.size()));
}

std::vector<Synthesis> synthesize_batch(const Model<float>& m, const std::vector<Example>& data, Execution exec) {
  std::vector<Synthesis> out(data.size());
  for_each_index(data.size(), exec, [&](std::size_t i) { out[i] = synthesize(m, data[i]); });
  return out;
}

std::vector<MatrixF> encode_batch(const Model<float>& m, const std::vector<Example>& data, Execution exec) {
  std::vector<MatrixF> out(data.size());
  for_each_index(data.size(), exec, [&](std::size_t i) {
    Graph<float> g(false);
    const auto words = g.constant(data[i].words);
    out[i] = encoder::encode(m.rwen, m.config.rwen, words, data[i].input).words.value();
  });
  return out;
}

TrainResult train(Model<float>& m, const std::vector<Example>& data, const TrainOptions& options) {
  const TrainConfig& cfg = m.config;
  TrainResult result;
  if (data.empty()) throw std::invalid_argument("training set is empty");

  std::ofstream metrics;
  if (!options.out_dir.empty()) {
    fs::create_directories(options.out_dir);
    const fs::path path = fs::path(options.out_dir) / "metrics.csv";
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    metrics.open(path, std::ios::app);
    if (!metrics) throw std::runtime_error("cannot open " + path.string());
    if (fresh) metrics << "step,total,mel,pitch,energy,duration\n";
  }

  result.initial = evaluate(m, data, options.exec);
  const std::size_t batch_size = std::min(data.size(), static_cast<std::size_t>(cfg.batch_size));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = data.size();  // forces a shuffle on the first step
  std::uint64_t epoch = 0;
  const nn::AdamConfig adam{cfg.learning_rate, 0.9, 0.999, 1e-8};

  for (int step = 1; step <= cfg.steps; ++step) {
    if (cursor + batch_size > data.size()) {
      if (batch_size < data.size()) {
        nn::Rng rng(nn::mix(cfg.seed, ++epoch));
        for (std::size_t i = order.size() - 1; i > 0; --i) {
          std::swap(order[i], order[static_cast<std::size_t>(rng.below(static_cast<int>(i + 1)))]);
        }
      }
      cursor = 0;
    }
    std::vector<const Example*> batch;
    for (std::size_t k = 0; k < batch_size; ++k) batch.push_back(&data[order[cursor + k]]);
    cursor += batch_size;

    m.params.zero_grad();
    const LossBreakdown loss =
        batch_gradients(m, batch, true, nn::mix(cfg.seed ^ 0xD5A7ULL, static_cast<std::uint64_t>(step)), options.exec);
    if (cfg.clip_norm > 0.0) nn::clip_grad_norm(m.params, cfg.clip_norm);
    nn::adam_step(m.params, adam, step);

    if (step == 1) result.first_step = loss;
    result.last_step = loss;
    result.steps = step;
    if (step % cfg.log_every == 0 || step == 1 || step == cfg.steps) {
      if (metrics.is_open()) {
        metrics << step << ',' << loss.total << ',' << loss.mel << ',' << loss.pitch << ',' << loss.energy << ','
                << loss.duration << '\n';
        metrics.flush();
      }
      if (options.on_log) options.on_log(step, loss);
    }
    if (!options.out_dir.empty() && cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0) {
      nn::save_checkpoint((fs::path(options.out_dir) / ("checkpoint-" + std::to_string(step))).string(), m.params,
                          to_json(cfg), step);
    }
  }
  result.final = evaluate(m, data, options.exec);
  if (!options.out_dir.empty()) {
    nn::save_checkpoint((fs::path(options.out_dir) / "checkpoint").string(), m.params, to_json(cfg), result.steps);
  }
  return result;
}

template LossBreakdown batch_gradients(Model<float>&, const std::vector<const Example*>&, bool, std::uint64_t,
                                       Execution);
template LossBreakdown batch_gradients(Model<double>&, const std::vector<const Example*>&, bool, std::uint64_t,
                                       Execution);

}  // namespace rwen::tts
