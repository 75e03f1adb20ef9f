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

#include "qsketch/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#if defined(__linux__)
#include <pthread.h>
#include <sched.h>
#endif

namespace qsketch::bench {
namespace {

using Clock = std::chrono::steady_clock;

template <typename T>
inline void keep(const T& value) {
  asm volatile("" : : "r,m"(value) : "memory");
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_double(std::ostream& out, double v) {
  if (std::isnan(v)) {
    return;  // empty field
  }
  std::ostringstream s;
  s.precision(17);
  s << v;
  out << s.str();
}

}  // namespace

SketchKind parse_sketch_kind(std::string_view name) {
  if (name == "lm") return SketchKind::lm;
  if (name == "fastgm") return SketchKind::fastgm;
  if (name == "qsketch") return SketchKind::qsketch;
  if (name == "qsketch-dyn" || name == "qsketch_dyn") return SketchKind::qsketch_dyn;
  throw std::invalid_argument("unknown sketch kind '" + std::string(name) + "'");
}

std::string_view to_string(SketchKind kind) noexcept {
  switch (kind) {
    case SketchKind::lm: return "lm";
    case SketchKind::fastgm: return "fastgm";
    case SketchKind::qsketch: return "qsketch";
    case SketchKind::qsketch_dyn: return "qsketch-dyn";
  }
  return "unknown";
}

void validate(const TrialConfig& config) {
  if (config.runs == 0) {
    throw std::invalid_argument("runs must be at least 1");
  }
  if (config.m == 0) {
    throw std::invalid_argument("m must be positive");
  }
  const bool baseline = config.kind == SketchKind::lm || config.kind == SketchKind::fastgm;
  if (baseline && config.m < 3) {
    throw std::invalid_argument("baseline estimators need m >= 3");
  }
  if (!baseline && (config.bits < PackedRegisters::kMinBits || config.bits > PackedRegisters::kMaxBits)) {
    throw std::invalid_argument("bits must be in [4, 8]");
  }
}

namespace {

std::variant<LmSketch, FastGmSketch, QSketch, QSketchDyn> make_sketch(const TrialConfig& c,
                                                                      std::uint64_t seed) {
  switch (c.kind) {
    case SketchKind::lm: return LmSketch(c.m, seed);
    case SketchKind::fastgm: return FastGmSketch(c.m, seed);
    case SketchKind::qsketch: return QSketch(c.m, c.bits, seed);
    case SketchKind::qsketch_dyn: return QSketchDyn(c.m, c.bits, seed, c.timing);
  }
  throw std::invalid_argument("unknown sketch kind");
}

}  // namespace

Sketch::Sketch(const TrialConfig& config, std::uint64_t seed)
    : kind_(config.kind), impl_(make_sketch(config, seed)) {}

void Sketch::update(ElementKey key, double weight) {
  std::visit([&](auto& s) { s.update(key, weight); }, impl_);
}

EstimateReport Sketch::report() const {
  return std::visit(
      [](const auto& s) -> EstimateReport {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, QSketchDyn>) {
          EstimateReport r;
          r.estimate = s.estimate();
          r.variance = s.variance_accumulator();
          r.converged = true;
          return r;
        } else {
          return s.estimate();
        }
      },
      impl_);
}

double Sketch::variance_accumulator() const {
  const auto* dyn = std::get_if<QSketchDyn>(&impl_);
  return dyn != nullptr ? dyn->variance_accumulator() : 0.0;
}

double rrmse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) {
    throw std::invalid_argument("rrmse: no estimates");
  }
  if (!(truth > 0.0)) {
    throw std::invalid_argument("rrmse: truth must be positive");
  }
  double sq = 0.0;
  for (double e : estimates) {
    sq += (e - truth) * (e - truth);
  }
  return std::sqrt(sq / static_cast<double>(estimates.size())) / truth;
}

double aare(std::span<const std::pair<double, double>> estimate_truth) {
  if (estimate_truth.empty()) {
    throw std::invalid_argument("aare: no estimates");
  }
  double total = 0.0;
  for (const auto& [est, truth] : estimate_truth) {
    if (truth == 0.0) {
      throw std::invalid_argument("aare: zero truth");
    }
    total += std::abs(est - truth) / std::abs(truth);
  }
  return total / static_cast<double>(estimate_truth.size());
}

AccuracyReport run_accuracy(const TrialConfig& config, std::span<const WeightedElement> stream,
                            std::string_view label) {
  validate(config);
  AccuracyReport report;
  report.truth = true_cardinality(stream);
  std::vector<std::pair<double, double>> pairs;
  for (std::uint32_t run = 0; run < config.runs; ++run) {
    Sketch sketch(config, config.base_seed + run);
    sketch.update(stream);
    const double est = sketch.estimate();
    const double rel = report.truth > 0.0 ? (est - report.truth) / report.truth
                                          : (est == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    report.records.push_back(RunRecord{run, std::string(label), est, report.truth, rel});
    report.estimates.push_back(est);
    pairs.emplace_back(est, report.truth);
  }
  if (report.truth > 0.0) {
    report.rrmse = rrmse(report.estimates, report.truth);
    report.aare = aare(pairs);
  } else {
    // Empty stream: exact when every estimate is 0.
    const bool exact = std::all_of(report.estimates.begin(), report.estimates.end(),
                                   [](double e) { return e == 0.0; });
    report.rrmse = exact ? 0.0 : std::numeric_limits<double>::infinity();
    report.aare = report.rrmse;
  }
  const double n = static_cast<double>(report.estimates.size());
  report.mean = std::accumulate(report.estimates.begin(), report.estimates.end(), 0.0) / n;
  double var = 0.0;
  for (double e : report.estimates) var += (e - report.mean) * (e - report.mean);
  report.stddev = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  return report;
}

AccuracyReport run_accuracy(const TrialConfig& config, std::span<const NamedStream> streams) {
  validate(config);
  if (streams.empty()) {
    throw std::invalid_argument("multi-stream accuracy needs at least one stream");
  }
  AccuracyReport report;
  report.multi_stream = true;
  report.rrmse = std::numeric_limits<double>::quiet_NaN();
  report.truth = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> truths;
  for (const auto& s : streams) {
    truths.push_back(true_cardinality(s.elements));
    if (!(truths.back() > 0.0)) {
      throw std::invalid_argument("stream '" + s.name + "' has zero weighted cardinality");
    }
  }
  std::vector<double> per_run;
  for (std::uint32_t run = 0; run < config.runs; ++run) {
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < streams.size(); ++i) {
      Sketch sketch(config, config.base_seed + run);
      sketch.update(streams[i].elements);
      const double est = sketch.estimate();
      report.records.push_back(
          RunRecord{run, streams[i].name, est, truths[i], (est - truths[i]) / truths[i]});
      report.estimates.push_back(est);
      pairs.emplace_back(est, truths[i]);
    }
    per_run.push_back(aare(pairs));
  }
  const double n = static_cast<double>(per_run.size());
  report.aare = std::accumulate(per_run.begin(), per_run.end(), 0.0) / n;
  report.mean = report.aare;
  double var = 0.0;
  for (double a : per_run) var += (a - report.mean) * (a - report.mean);
  report.stddev = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  return report;
}

TimingReport run_throughput(const TrialConfig& config, std::span<const WeightedElement> stream,
                            int repeats) {
  validate(config);
  if (stream.empty()) {
    throw std::invalid_argument("throughput needs a non-empty stream");
  }
  if (repeats < 1) {
    throw std::invalid_argument("repeats must be at least 1");
  }
  TimingReport report;
  for (int rep = 0; rep < repeats; ++rep) {
    Sketch sketch(config, config.base_seed + static_cast<std::uint64_t>(rep));
    const auto start = Clock::now();
    for (const auto& e : stream) {
      sketch.update(e.key, e.weight);
    }
    const double elapsed = seconds_since(start);
    keep(&sketch);
    report.samples.push_back(static_cast<double>(stream.size()) / elapsed);
  }
  report.median = median_of(report.samples);
  return report;
}

TimingReport run_estimation_time(const TrialConfig& config, std::span<const WeightedElement> stream,
                                 int invocations) {
  validate(config);
  if (invocations < 1) {
    throw std::invalid_argument("invocations must be at least 1");
  }
  Sketch sketch(config, config.base_seed);
  sketch.update(stream);

  const auto batch = [&](std::uint64_t calls) {
    const auto start = Clock::now();
    for (std::uint64_t i = 0; i < calls; ++i) {
      const double e = sketch.estimate();
      keep(e);
    }
    return seconds_since(start);
  };

  // Grow the batch until one sample spans at least 20 microseconds.
  std::uint64_t calls = 1;
  while (calls < (1ULL << 24) && batch(calls) < 20e-6) {
    calls *= 2;
  }
  TimingReport report;
  for (int i = 0; i < invocations; ++i) {
    report.samples.push_back(batch(calls) / static_cast<double>(calls));
  }
  report.median = median_of(report.samples);
  return report;
}

TruncationReport run_truncation_diagnostic(int bits, double epsilon, double cardinality,
                                           std::uint64_t samples, std::uint64_t seed) {
  const ValidRange range = valid_range(bits, epsilon);
  if (!(cardinality >= range.low && cardinality <= range.high)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "cardinality " << cardinality << " outside the valid range [" << range.low << ", "
        << range.high << "] for b = " << bits << ", epsilon = " << epsilon;
    throw std::invalid_argument(msg.str());
  }
  if (samples == 0) {
    throw std::invalid_argument("samples must be positive");
  }
  const int r_min = register_min(bits);
  const int r_max = register_max(bits);
  std::uint64_t low = 0;
  std::uint64_t high = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double x = -std::log(indexed_uniform(seed, ElementKey{i}, 0)) / cardinality;
    const int v = quantize(x);
    low += v <= r_min ? 1 : 0;
    high += v >= r_max ? 1 : 0;
  }
  const double n = static_cast<double>(samples);
  return TruncationReport{bits,     epsilon,  cardinality,           samples, range,
                          low / n,  high / n, (low + high) / n};
}

VarianceReport run_variance_diagnostic(const TrialConfig& config,
                                       std::span<const WeightedElement> stream) {
  validate(config);
  if (config.kind != SketchKind::qsketch_dyn) {
    throw std::invalid_argument("variance diagnostic applies to qsketch-dyn only");
  }
  if (config.runs < 100) {
    throw std::invalid_argument("variance diagnostic needs at least 100 runs");
  }
  VarianceReport report{};
  report.runs = config.runs;
  report.truth = true_cardinality(stream);
  std::vector<double> estimates;
  double acc_total = 0.0;
  for (std::uint32_t run = 0; run < config.runs; ++run) {
    Sketch sketch(config, config.base_seed + run);
    sketch.update(stream);
    estimates.push_back(sketch.estimate());
    acc_total += sketch.variance_accumulator();
  }
  const double n = static_cast<double>(estimates.size());
  // Welford: identical estimates give exactly zero variance.
  double mean = 0.0, m2 = 0.0, k = 0.0;
  for (double e : estimates) {
    k += 1.0;
    const double delta = e - mean;
    mean += delta / k;
    m2 += delta * (e - mean);
  }
  report.mean_estimate = mean;
  report.empirical_variance = m2 / (n - 1);
  report.mean_accumulator = acc_total / n;
  report.ratio = report.mean_accumulator > 0.0
                     ? report.empirical_variance / report.mean_accumulator
                     : std::numeric_limits<double>::quiet_NaN();
  return report;
}

void write_accuracy_csv(std::ostream& out, const AccuracyReport& report) {
  out << "run_index,stream,estimate,truth,rel_error,rrmse,aare,mean,stddev\n";
  for (const auto& r : report.records) {
    out << r.run_index << ',' << r.stream << ',';
    write_double(out, r.estimate);
    out << ',';
    write_double(out, r.truth);
    out << ',';
    write_double(out, r.rel_error);
    out << ",,,,\n";
  }
  out << "summary,,,";
  write_double(out, report.truth);
  out << ",,";
  write_double(out, report.rrmse);
  out << ',';
  write_double(out, report.aare);
  out << ',';
  write_double(out, report.mean);
  out << ',';
  write_double(out, report.stddev);
  out << '\n';
}

void write_throughput_csv(std::ostream& out, const TrialConfig& config, std::string_view mode,
                          std::size_t stream_length, const TimingReport& report) {
  out << "sketch,m,bits,mode,stream_length,repeats,median,unit\n";
  out << to_string(config.kind) << ',' << config.m << ',' << config.bits << ',' << mode << ','
      << stream_length << ',' << report.samples.size() << ',';
  write_double(out, report.median);
  out << ',' << (mode == "update" ? "updates_per_second" : "seconds_per_estimate") << '\n';
}

void write_truncation_csv(std::ostream& out, const TruncationReport& r) {
  out << "bits,epsilon,cardinality,samples,c_low,c_high,low_fraction,high_fraction,fraction,bound\n";
  out << r.bits << ',';
  for (double v : {r.epsilon, r.cardinality}) {
    write_double(out, v);
    out << ',';
  }
  out << r.samples << ',';
  for (double v : {r.range.low, r.range.high, r.low_fraction, r.high_fraction, r.fraction}) {
    write_double(out, v);
    out << ',';
  }
  write_double(out, 2.0 * r.epsilon);
  out << '\n';
}

void write_variance_csv(std::ostream& out, const TrialConfig& config, const VarianceReport& r) {
  out << "sketch,m,bits,runs,truth,mean_estimate,empirical_variance,mean_accumulator,ratio\n";
  out << to_string(config.kind) << ',' << config.m << ',' << config.bits << ',' << r.runs << ',';
  write_double(out, r.truth);
  out << ',';
  write_double(out, r.mean_estimate);
  out << ',';
  write_double(out, r.empirical_variance);
  out << ',';
  write_double(out, r.mean_accumulator);
  out << ',';
  write_double(out, r.ratio);
  out << '\n';
}

void pin_to_single_cpu() noexcept {
#if defined(__linux__)
  cpu_set_t current;
  CPU_ZERO(&current);
  if (sched_getaffinity(0, sizeof current, &current) != 0) {
    return;
  }
  for (int cpu = 0; cpu < CPU_SETSIZE; ++cpu) {
    if (CPU_ISSET(cpu, &current)) {
      cpu_set_t one;
      CPU_ZERO(&one);
      CPU_SET(cpu, &one);
      pthread_setaffinity_np(pthread_self(), sizeof one, &one);
      return;
    }
  }
#endif
}

}  // namespace qsketch::bench
