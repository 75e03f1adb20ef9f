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

#pragma once

// Experiment engine behind the CLI: repeated-seed accuracy runs, update and
// estimation timing, and the truncation / variance diagnostics. Accuracy and
// timing are separate code paths; neither touches the other's outputs.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qsketch/baseline_sketches.hpp"
#include "qsketch/qsketch.hpp"
#include "qsketch/qsketch_dyn.hpp"
#include "qsketch/stream.hpp"

namespace qsketch::bench {

enum class SketchKind { lm, fastgm, qsketch, qsketch_dyn };

/// Accepts "lm", "fastgm", "qsketch", "qsketch-dyn" (or "qsketch_dyn").
SketchKind parse_sketch_kind(std::string_view name);
std::string_view to_string(SketchKind kind) noexcept;

struct TrialConfig {
  SketchKind kind = SketchKind::qsketch;
  std::uint32_t m = 256;
  int bits = 8;  // quantized sketches only
  std::uint32_t runs = 1;
  std::uint64_t base_seed = 0;
  ChangeTiming timing = ChangeTiming::before_update;
};

/// Throws std::invalid_argument for runs == 0, m == 0, m < 3 on the
/// baselines, or bits outside [4, 8] on the quantized sketches.
void validate(const TrialConfig& config);

/// Any of the four sketches behind one interface.
class Sketch {
 public:
  Sketch(const TrialConfig& config, std::uint64_t seed);

  void update(ElementKey key, double weight);
  void update(std::span<const WeightedElement> stream) {
    for (const auto& e : stream) update(e.key, e.weight);
  }
  EstimateReport report() const;
  double estimate() const { return report().estimate; }

  /// QSketch-Dyn's running variance accumulator; 0 for other kinds.
  double variance_accumulator() const;

  SketchKind kind() const noexcept { return kind_; }
  const auto& impl() const noexcept { return impl_; }

 private:
  SketchKind kind_;
  std::variant<LmSketch, FastGmSketch, QSketch, QSketchDyn> impl_;
};

/// sqrt(mean((est - truth)^2)) / truth. Throws unless truth > 0 and
/// estimates is non-empty.
double rrmse(std::span<const double> estimates, double truth);

/// mean(|est - truth| / |truth|) over (estimate, truth) pairs. Throws for a
/// zero truth or an empty input.
double aare(std::span<const std::pair<double, double>> estimate_truth);

struct RunRecord {
  std::uint32_t run_index;
  std::string stream;
  double estimate;
  double truth;
  double rel_error;
};

/// Single-stream mode fills rrmse and sets aare over the runs; multi-stream
/// mode averages the per-run AARE over runs and leaves rrmse NaN. mean and
/// stddev describe the estimates (single) or the per-run AARE (multi).
struct AccuracyReport {
  std::vector<RunRecord> records;
  std::vector<double> estimates;
  double truth = 0.0;
  double rrmse = 0.0;
  double aare = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  bool multi_stream = false;
};

/// Runs `runs` sketches seeded base_seed + run over the same stream.
/// An empty stream (truth 0) reports rrmse 0 when every estimate is 0.
AccuracyReport run_accuracy(const TrialConfig& config, std::span<const WeightedElement> stream,
                            std::string_view label = {});

/// Multi-stream mode: each run sketches every stream once.
AccuracyReport run_accuracy(const TrialConfig& config, std::span<const NamedStream> streams);

struct TimingReport {
  double median = 0.0;
  std::vector<double> samples;
};

/// Update throughput in updates per second: median over `repeats` fresh
/// sketches of the pre-materialized stream's update loop.
TimingReport run_throughput(const TrialConfig& config, std::span<const WeightedElement> stream,
                            int repeats = 5);

/// Seconds per estimate call on a sketch populated with the stream: median
/// over `invocations` timed samples. Very fast calls are batched inside a
/// sample so clock resolution does not dominate.
TimingReport run_estimation_time(const TrialConfig& config, std::span<const WeightedElement> stream,
                                 int invocations = 100);

struct TruncationReport {
  int bits;
  double epsilon;
  double cardinality;
  std::uint64_t samples;
  ValidRange range;
  double low_fraction;   // stored at r_min
  double high_fraction;  // stored at r_max
  double fraction;
};

/// Draws `samples` single-register observations clamp(floor(-log2 X)) with
/// X ~ EXP(cardinality) and reports how many sit at r_min or r_max. The
/// cardinality must lie in the closed valid range; otherwise throws
/// std::invalid_argument with the range in the message.
TruncationReport run_truncation_diagnostic(int bits, double epsilon, double cardinality,
                                           std::uint64_t samples, std::uint64_t seed = 0);

struct VarianceReport {
  std::uint32_t runs;
  double truth;
  double mean_estimate;
  double empirical_variance;
  double mean_accumulator;
  double ratio;  // empirical_variance / mean_accumulator
};

/// QSketch-Dyn only, runs >= 100.
VarianceReport run_variance_diagnostic(const TrialConfig& config,
                                       std::span<const WeightedElement> stream);

// CSV writers. Headers are part of the public interface; see README.md.
void write_accuracy_csv(std::ostream& out, const AccuracyReport& report);
void write_throughput_csv(std::ostream& out, const TrialConfig& config, std::string_view mode,
                          std::size_t stream_length, const TimingReport& report);
void write_truncation_csv(std::ostream& out, const TruncationReport& report);
void write_variance_csv(std::ostream& out, const TrialConfig& config, const VarianceReport& report);

/// Best-effort pin of the calling thread to one CPU (Linux only).
void pin_to_single_cpu() noexcept;

}  // namespace qsketch::bench
