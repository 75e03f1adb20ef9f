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

// 64-bit-register baselines. Both keep R[j] = min over distinct elements of
// an EXP(w) draw and share the estimator (m - 1) / sum(R).

#include <cstdint>
#include <span>
#include <vector>

#include "qsketch/estimate_report.hpp"
#include "qsketch/exp_generator.hpp"
#include "qsketch/keyed_random.hpp"

namespace qsketch {

/// Estimator shared by LM and FastGM. Variance is estimate^2 / (m - 2)
/// (infinite for m < 3). Any +inf register yields 0 with not_saturated.
EstimateReport min_sum_estimate(std::span<const double> registers);

/// Lemiesz's method: every element touches all m registers with independent
/// hashes h_j(x).
class LmSketch {
 public:
  LmSketch(std::uint32_t m, std::uint64_t seed);

  static LmSketch from_registers(std::uint64_t seed, std::vector<double> registers);

  void update(ElementKey key, double weight);
  EstimateReport estimate() const { return min_sum_estimate(registers_); }

  std::span<const double> registers() const noexcept { return registers_; }
  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(registers_.size()); }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::vector<double> registers_;
  std::uint64_t seed_;
};

/// FastGM: draws are produced in ascending order and generation stops once
/// the current value exceeds the largest register.
class FastGmSketch {
 public:
  FastGmSketch(std::uint32_t m, std::uint64_t seed, bool early_stop = true);

  void update(ElementKey key, double weight);
  EstimateReport estimate() const { return min_sum_estimate(registers_); }

  std::span<const double> registers() const noexcept { return registers_; }
  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(registers_.size()); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t filled_count() const noexcept { return filled_; }
  bool early_stop() const noexcept { return early_stop_; }

  /// Largest register value; +inf until every register is filled.
  double r_star() const noexcept;

 private:
  void rescan_max() noexcept;

  std::vector<double> registers_;
  std::uint64_t seed_;
  bool early_stop_;
  std::uint32_t filled_ = 0;
  std::uint32_t max_index_ = 0;
  AscendingExpGenerator gen_;
};

}  // namespace qsketch
