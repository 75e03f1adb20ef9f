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

#include <array>
#include <cstdint>
#include <span>

#include "qsketch/keyed_random.hpp"
#include "qsketch/packed_registers.hpp"

namespace qsketch {

/// Which sketch state the change probability q_R is evaluated on when a
/// register changes.
enum class ChangeTiming : std::uint8_t {
  /// State before the element is applied. q_R is then the exact probability
  /// that the element changes the sketch, which makes the running estimate
  /// a martingale with the true cardinality as its mean.
  before_update,
  /// State after the changed register and histogram are written. The
  /// change probability is then understated and the estimate runs high by
  /// roughly 1/m.
  after_update,
};

/// QSketch-Dyn: one hashed register per element, a histogram of register
/// values, and a running estimate that adds w / q_R whenever a register
/// changes. Update is O(1) plus a sweep over the occupied histogram bins;
/// estimate() is a field read.
class QSketchDyn {
 public:
  static constexpr std::size_t kMaxBins = 256;

  /// Throws std::invalid_argument for m == 0 or bits outside [4, 8].
  QSketchDyn(std::uint32_t m, int bits, std::uint64_t seed,
             ChangeTiming timing = ChangeTiming::before_update);

  /// Applies one element and returns the running estimate.
  double update(ElementKey key, double weight);

  double estimate() const noexcept { return estimate_; }

  /// Running sum of w^2 (1 - q) / q^2 over register changes, with q the
  /// pre-update change probability. Its expectation equals the variance of
  /// estimate().
  double variance_accumulator() const noexcept { return variance_acc_; }

  /// q_R = 1 - (1/m) sum_k T[k] exp(-w 2^-(k + r_min + 1)) for the current
  /// histogram. Throws std::invalid_argument for non-positive weight.
  double change_probability(double weight) const;

  const PackedRegisters& registers() const noexcept { return registers_; }
  std::span<const std::uint32_t> histogram() const noexcept { return {hist_.data(), bins()}; }
  std::uint32_t size() const noexcept { return registers_.size(); }
  int bits() const noexcept { return registers_.bits(); }
  std::uint64_t seed() const noexcept { return seed_; }
  ChangeTiming timing() const noexcept { return timing_; }

  /// Rebuilds a sketch from serialized parts, validating that the histogram
  /// matches the registers.
  static QSketchDyn restore(PackedRegisters registers, std::uint64_t seed, ChangeTiming timing,
                            std::span<const std::uint32_t> histogram, double estimate,
                            double variance_accumulator);

 private:
  std::size_t bins() const noexcept { return std::size_t{1} << registers_.bits(); }
  // Sum over occupied bins of T[k] * (1 - exp(-w a_k)), i.e. m * q_R.
  double change_mass(double weight) const noexcept;
  void recompute_occupied_range() noexcept;

  PackedRegisters registers_;
  std::uint64_t seed_;
  ChangeTiming timing_;
  std::array<std::uint32_t, kMaxBins> hist_{};
  std::array<double, kMaxBins> scale_{};  // a_k = 2^-(k + r_min + 1)
  std::uint32_t lowest_bin_ = 0;
  std::uint32_t highest_bin_ = 0;
  double estimate_ = 0.0;
  double variance_acc_ = 0.0;
};

}  // namespace qsketch
