/*
 * Copyright 2026 The QSketch Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <memory>
#include <span>
#include <vector>

#include "qsketch/harness.hpp"

namespace {

using qsketch::bench::SketchKind;

const std::vector<qsketch::WeightedElement>& shared_stream() {
  static const auto stream = [] {
    qsketch::StreamSpec spec;
    spec.n = 1 << 20;
    spec.seed = 1;
    return qsketch::generate(spec);
  }();
  return stream;
}

qsketch::bench::TrialConfig config_for(SketchKind kind, std::int64_t m) {
  qsketch::bench::TrialConfig c;
  c.kind = kind;
  c.m = static_cast<std::uint32_t>(m);
  return c;
}

// One element per iteration, cycling through a pre-generated stream. The
// sketch is rebuilt when the stream wraps so every update sees a new key.
template <SketchKind Kind>
void BM_Update(benchmark::State& state) {
  const auto& stream = shared_stream();
  const auto config = config_for(Kind, state.range(0));
  auto sketch = std::make_unique<qsketch::bench::Sketch>(config, 0);
  std::size_t i = 0;
  for (auto _ : state) {
    if (i == stream.size()) {
      state.PauseTiming();
      sketch = std::make_unique<qsketch::bench::Sketch>(config, 0);
      i = 0;
      state.ResumeTiming();
    }
    sketch->update(stream[i].key, stream[i].weight);
    ++i;
  }
  benchmark::DoNotOptimize(sketch.get());
  state.SetItemsProcessed(state.iterations());
}

template <SketchKind Kind>
void BM_Estimate(benchmark::State& state) {
  const auto& stream = shared_stream();
  qsketch::bench::Sketch sketch(config_for(Kind, state.range(0)), 0);
  sketch.update(std::span(stream).first(100000));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sketch.estimate());
  }
}

#define QSKETCH_SIZES RangeMultiplier(4)->Range(64, 4096)

BENCHMARK(BM_Update<SketchKind::lm>)->QSKETCH_SIZES;
BENCHMARK(BM_Update<SketchKind::fastgm>)->QSKETCH_SIZES;
BENCHMARK(BM_Update<SketchKind::qsketch>)->QSKETCH_SIZES;
BENCHMARK(BM_Update<SketchKind::qsketch_dyn>)->QSKETCH_SIZES;

BENCHMARK(BM_Estimate<SketchKind::lm>)->QSKETCH_SIZES;
BENCHMARK(BM_Estimate<SketchKind::fastgm>)->QSKETCH_SIZES;
BENCHMARK(BM_Estimate<SketchKind::qsketch>)->QSKETCH_SIZES;
BENCHMARK(BM_Estimate<SketchKind::qsketch_dyn>)->QSKETCH_SIZES;

}  // namespace

BENCHMARK_MAIN();
