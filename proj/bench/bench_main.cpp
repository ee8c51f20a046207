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

#include <benchmark/benchmark.h>

#include "rwen/featstore/synth.hpp"
#include "rwen/tts/trainer.hpp"

namespace {

using namespace rwen;

struct Fixture {
  std::vector<featstore::PreparedSentence> data;
  std::vector<tts::Example> examples;
  std::vector<const tts::Example*> batch;
  std::unique_ptr<tts::Model<float>> model;

  Fixture() {
    featstore::SynthOptions o;
    o.sentences = 32;
    o.max_words = 12;
    data = featstore::synth_dataset(o);
    examples = tts::make_examples(data);
    for (const auto& e : examples) batch.push_back(&e);
    model = tts::Model<float>::create(tts::TrainConfig::desk(), 1);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

tts::Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? tts::Execution::kSerial : tts::Execution::kParallel;
}

void BM_BatchGradients(benchmark::State& state) {
  auto& f = fixture();
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
  for (auto _ : state) {
    f.model->params.zero_grad();
    benchmark::DoNotOptimize(tts::batch_gradients(*f.model, f.batch, true, 7, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.batch.size()));
}
BENCHMARK(BM_BatchGradients)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EncodeBatch(benchmark::State& state) {
  auto& f = fixture();
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
  for (auto _ : state) benchmark::DoNotOptimize(tts::encode_batch(*f.model, f.examples, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.examples.size()));
}
BENCHMARK(BM_EncodeBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  auto& f = fixture();
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
  for (auto _ : state) benchmark::DoNotOptimize(tts::evaluate(*f.model, f.examples, mode(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.examples.size()));
}
BENCHMARK(BM_Evaluate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
