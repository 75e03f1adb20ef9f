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

#include "qsketch/qsketch_dyn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qsketch/exp_generator.hpp"
#include "qsketch/qsketch.hpp"

namespace qsketch {

QSketchDyn::QSketchDyn(std::uint32_t m, int bits, std::uint64_t seed, ChangeTiming timing)
    : registers_(m, bits), seed_(seed), timing_(timing) {
  const int r_min = registers_.r_min();
  for (std::size_t k = 0; k < bins(); ++k) {
    scale_[k] = std::ldexp(1.0, -(static_cast<int>(k) + r_min + 1));
  }
  hist_[0] = m;
}

double QSketchDyn::change_mass(double weight) const noexcept {
  double mass = 0.0;
  for (std::uint32_t k = lowest_bin_; k <= highest_bin_; ++k) {
    if (hist_[k] != 0) {
      mass -= hist_[k] * std::expm1(-weight * scale_[k]);
    }
  }
  return mass;
}

double QSketchDyn::change_probability(double weight) const {
  require_positive_weight(weight);
  return change_mass(weight) / static_cast<double>(registers_.size());
}

void QSketchDyn::recompute_occupied_range() noexcept {
  std::uint32_t lo = 0;
  while (hist_[lo] == 0) {
    ++lo;
  }
  std::uint32_t hi = static_cast<std::uint32_t>(bins()) - 1;
  while (hist_[hi] == 0) {
    --hi;
  }
  lowest_bin_ = lo;
  highest_bin_ = hi;
}

double QSketchDyn::update(ElementKey key, double weight) {
  require_positive_weight(weight);
  const std::uint32_t j = register_choice(seed_, key, registers_.size());
  const double r = -std::log(indexed_uniform(seed_, key, j)) / weight;
  const int y = std::clamp(quantize(r), registers_.r_min(), registers_.r_max());
  const int current = registers_.get(j);
  if (y <= current) {
    return estimate_;
  }

  const double m = static_cast<double>(registers_.size());
  const double mass_before = change_mass(weight);
  const double q_before = mass_before / m;

  const auto from = static_cast<std::uint32_t>(current - registers_.r_min());
  const auto to = static_cast<std::uint32_t>(y - registers_.r_min());
  --hist_[from];
  ++hist_[to];
  registers_.set(j, y);
  if (hist_[from] == 0 && from == lowest_bin_) {
    recompute_occupied_range();
  }
  highest_bin_ = std::max(highest_bin_, to);

  double q = q_before;
  if (timing_ == ChangeTiming::after_update) {
    // Only register j moved, so patch its term instead of re-sweeping.
    const double mass_after = mass_before + std::expm1(-weight * scale_[from]) -
                              std::expm1(-weight * scale_[to]);
    q = mass_after > 0.0 ? mass_after / m : change_mass(weight) / m;
  }
  q = std::max(q, std::numeric_limits<double>::min());
  estimate_ += weight / q;

  const double qv = std::max(q_before, std::numeric_limits<double>::min());
  variance_acc_ += weight * weight * (1.0 - qv) / (qv * qv);
  return estimate_;
}

QSketchDyn QSketchDyn::restore(PackedRegisters registers, std::uint64_t seed, ChangeTiming timing,
                               std::span<const std::uint32_t> histogram, double estimate,
                               double variance_accumulator) {
  QSketchDyn sketch(registers.size(), registers.bits(), seed, timing);
  if (histogram.size() != sketch.bins()) {
    throw std::invalid_argument("QSketchDyn: histogram has " + std::to_string(histogram.size()) +
                                " bins, expected " + std::to_string(sketch.bins()));
  }
  std::array<std::uint32_t, kMaxBins> scanned{};
  for (std::uint32_t i = 0; i < registers.size(); ++i) {
    ++scanned[static_cast<std::size_t>(registers.get(i) - registers.r_min())];
  }
  if (!std::equal(histogram.begin(), histogram.end(), scanned.begin())) {
    throw std::invalid_argument("QSketchDyn: histogram does not match register contents");
  }
  if (!(estimate >= 0.0) || !(variance_accumulator >= 0.0)) {
    throw std::invalid_argument("QSketchDyn: negative running estimate or variance");
  }
  sketch.registers_ = std::move(registers);
  sketch.hist_ = scanned;
  sketch.estimate_ = estimate;
  sketch.variance_acc_ = variance_accumulator;
  sketch.recompute_occupied_range();
  return sketch;
}

}  // namespace qsketch
