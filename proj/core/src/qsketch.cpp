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

#include "qsketch/qsketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qsketch {

int quantize(double r) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("quantize: value must be positive");
  }
  if (std::isinf(r)) {
    return std::numeric_limits<int>::min();
  }
  // r = f * 2^e with f in [0.5, 1): -log2 r lies in (-e, 1 - e], reaching
  // the upper end only when f is exactly 0.5.
  int e = 0;
  const double f = std::frexp(r, &e);
  return f == 0.5 ? 1 - e : -e;
}

ValidRange valid_range(int bits, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("valid_range: epsilon must lie in (0, 1)");
  }
  if (bits < PackedRegisters::kMinBits || bits > PackedRegisters::kMaxBits) {
    throw std::invalid_argument("valid_range: bits must be in [4, 8]");
  }
  return ValidRange{
      -std::ldexp(1.0, register_min(bits) + 1) * std::log(epsilon),
      -std::ldexp(1.0, register_max(bits)) * std::log1p(-epsilon),
  };
}

RegisterHistogram::RegisterHistogram(int bits, std::span<const int> values) : bits_(bits) {
  if (bits < PackedRegisters::kMinBits || bits > PackedRegisters::kMaxBits) {
    throw std::invalid_argument("RegisterHistogram: bits must be in [4, 8]");
  }
  const int lo = r_min();
  const int hi = r_max();
  for (int v : values) {
    if (v < lo || v > hi) {
      throw std::invalid_argument("RegisterHistogram: value " + std::to_string(v) +
                                  " outside [r_min, r_max]");
    }
    ++counts_[v - lo];
  }
  total_ = static_cast<std::uint32_t>(values.size());
}

LikelihoodScore log_likelihood_score(double cardinality, const RegisterHistogram& histogram) {
  if (!(cardinality > 0.0)) {
    throw std::invalid_argument("log_likelihood_score: cardinality must be positive");
  }
  const double c = cardinality;
  const int lo = histogram.r_min();
  const int hi = histogram.r_max();
  double f = 0.0;
  double f_prime = 0.0;

  // Registers at r_min: ln P = -C 2^-(r_min+1), constant slope.
  if (const auto n = histogram.count(lo); n != 0) {
    f -= n * std::ldexp(1.0, -(lo + 1));
  }

  // Interior: a (2 - e^{Ca}) / (e^{Ca} - 1) = a (1 / expm1(Ca) - 1), with
  // derivative -a^2 e^{-Ca} / (1 - e^{-Ca})^2.
  for (int v = lo + 1; v < hi; ++v) {
    const auto n = histogram.count(v);
    if (n == 0) {
      continue;
    }
    const double a = std::ldexp(1.0, -(v + 1));
    const double x = c * a;
    const double em1 = std::expm1(-x);  // e^{-x} - 1, in (-1, 0)
    f += n * a * (1.0 / std::expm1(x) - 1.0);
    f_prime -= n * a * a * std::exp(-x) / (em1 * em1);
  }

  // Registers at r_max: ln P = ln(1 - e^{-C a'}), a' = 2^-r_max.
  if (const auto n = histogram.count(hi); n != 0) {
    const double a = std::ldexp(1.0, -hi);
    const double x = c * a;
    const double em1 = std::expm1(-x);
    f += n * a / std::expm1(x);
    f_prime -= n * a * a * std::exp(-x) / (em1 * em1);
  }
  return LikelihoodScore{f, f_prime};
}

namespace {

EstimateReport bisect(const RegisterHistogram& histogram, double lo, double hi,
                      const SolverOptions& options, int iterations_so_far) {
  // Widen until the root is bracketed: f is decreasing, f(lo) > 0 > f(hi).
  while (log_likelihood_score(lo, histogram).f < 0.0 && lo > std::numeric_limits<double>::min()) {
    lo *= 0x1.0p-20;
  }
  while (log_likelihood_score(hi, histogram).f > 0.0 && hi < std::numeric_limits<double>::max() / 0x1.0p20) {
    hi *= 0x1.0p20;
  }
  EstimateReport report;
  report.iterations = iterations_so_far;
  // Bisection in log space; 2100 halvings cover the full double range.
  for (int i = 0; i < 4096; ++i) {
    ++report.iterations;
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (log_likelihood_score(mid, histogram).f > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if ((hi - lo) <= options.relative_tolerance * lo) {
      break;
    }
  }
  report.estimate = std::sqrt(lo) * std::sqrt(hi);
  const double fp = log_likelihood_score(report.estimate, histogram).f_prime;
  report.variance = fp < 0.0 ? -1.0 / fp : std::numeric_limits<double>::infinity();
  report.converged = (hi - lo) <= options.relative_tolerance * lo;
  report.flag = report.converged ? EstimateFlag::ok : EstimateFlag::not_converged;
  return report;
}

}  // namespace

EstimateReport mle_estimate(const RegisterHistogram& histogram, const SolverOptions& options) {
  EstimateReport report;
  const std::uint32_t m = histogram.total();
  if (m == 0 || histogram.count(histogram.r_min()) == m) {
    report.flag = EstimateFlag::all_min;
    return report;
  }
  if (histogram.count(histogram.r_max()) == m) {
    report.flag = EstimateFlag::all_max;
    report.estimate = valid_range(histogram.bits(), 0.001).high;
    return report;
  }

  double inverse_sum = 0.0;
  for (int v = histogram.r_min(); v <= histogram.r_max(); ++v) {
    if (const auto n = histogram.count(v); n != 0) {
      inverse_sum += n * std::ldexp(1.0, -v);
    }
  }
  const double c0 = static_cast<double>(m > 1 ? m - 1 : 1) / inverse_sum;

  double c = c0;
  int halvings = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const LikelihoodScore s = log_likelihood_score(c, histogram);
    if (s.f == 0.0) {
      report.iterations = it;
      report.estimate = c;
      report.variance = -1.0 / s.f_prime;
      report.converged = true;
      return report;
    }
    double step = s.f / s.f_prime;
    double next = c - step;
    while (!(next > 0.0) || !std::isfinite(next)) {
      if (++halvings > 5) {
        return bisect(histogram, c0 * 0x1.0p-20, c0 * 0x1.0p20, options, it);
      }
      step *= 0.5;
      next = c - step;
    }
    halvings = 0;
    const double delta = std::abs(next - c);
    c = next;
    if (delta <= options.relative_tolerance * c) {
      report.iterations = it;
      report.estimate = c;
      report.variance = -1.0 / log_likelihood_score(c, histogram).f_prime;
      report.converged = true;
      return report;
    }
  }
  report.iterations = options.max_iterations;
  report.estimate = c;
  report.variance = -1.0 / log_likelihood_score(c, histogram).f_prime;
  report.flag = EstimateFlag::not_converged;
  return report;
}

QSketch::QSketch(std::uint32_t m, int bits, std::uint64_t seed, bool early_stop)
    : registers_(m, bits), seed_(seed), early_stop_(early_stop), gen_(m == 0 ? 1 : m) {}

QSketch QSketch::from_register_values(int bits, std::uint64_t seed, std::span<const int> values) {
  QSketch sketch(static_cast<std::uint32_t>(values.size()), bits, seed);
  for (std::uint32_t i = 0; i < values.size(); ++i) {
    if (values[i] < sketch.registers_.r_min() || values[i] > sketch.registers_.r_max()) {
      throw std::invalid_argument("QSketch: register value " + std::to_string(values[i]) +
                                  " outside [r_min, r_max]");
    }
    sketch.registers_.set(i, values[i]);
  }
  sketch.rescan_min();
  return sketch;
}

QSketch QSketch::from_packed(PackedRegisters registers, std::uint64_t seed) {
  QSketch sketch(registers.size(), registers.bits(), seed);
  sketch.registers_ = std::move(registers);
  sketch.rescan_min();
  return sketch;
}

void QSketch::rescan_min() noexcept {
  std::uint32_t best = 0;
  int best_value = registers_.get(0);
  for (std::uint32_t j = 1; j < registers_.size(); ++j) {
    const int v = registers_.get(j);
    if (v < best_value) {
      best_value = v;
      best = j;
    }
  }
  j_star_ = best;
}

void QSketch::update(ElementKey key, double weight) {
  gen_.begin(seed_, key, weight);
  const int r_min = registers_.r_min();
  const int r_max = registers_.r_max();
  int floor_value = registers_.get(j_star_);
  while (!gen_.exhausted()) {
    const AscendingDraw draw = gen_.next();
    const int y = quantize(draw.value);
    // Values only descend from here on; none can raise any register.
    if (early_stop_ && y <= floor_value) {
      break;
    }
    const int stored = std::clamp(y, r_min, r_max);
    if (stored > registers_.get(draw.position)) {
      registers_.set(draw.position, stored);
      if (draw.position == j_star_) {
        rescan_min();
        floor_value = registers_.get(j_star_);
      }
    }
  }
}

RegisterHistogram QSketch::histogram() const {
  const std::vector<int> values = registers_.values();
  return RegisterHistogram(registers_.bits(), values);
}

EstimateReport QSketch::estimate(const SolverOptions& options) const {
  return mle_estimate(histogram(), options);
}

LikelihoodScore QSketch::score(double cardinality) const {
  return log_likelihood_score(cardinality, histogram());
}

}  // namespace qsketch
