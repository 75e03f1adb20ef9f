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

// QSketch: b-bit registers holding floor(-log2 r) of the per-register minimum
// exponential draw, estimated by maximum likelihood over the truncated
// register distribution.

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qsketch/estimate_report.hpp"
#include "qsketch/exp_generator.hpp"
#include "qsketch/keyed_random.hpp"
#include "qsketch/packed_registers.hpp"

namespace qsketch {

/// floor(-log2 r), unclamped. Exact for every positive finite double.
/// Throws std::invalid_argument unless r > 0.
int quantize(double r);

/// Cardinality interval over which each register avoids truncation with
/// probability at least 1 - 2 epsilon. Throws std::invalid_argument unless
/// 0 < epsilon < 1 and 4 <= bits <= 8.
struct ValidRange {
  double low;
  double high;
};
ValidRange valid_range(int bits, double epsilon);

/// Newton-Raphson settings for the likelihood solve.
struct SolverOptions {
  double relative_tolerance = 1e-9;
  int max_iterations = 100;
};

/// Counts of registers per value, indexed by value - r_min. This is all the
/// likelihood depends on.
class RegisterHistogram {
 public:
  RegisterHistogram(int bits, std::span<const int> values);

  int bits() const noexcept { return bits_; }
  int r_min() const noexcept { return register_min(bits_); }
  int r_max() const noexcept { return register_max(bits_); }
  std::uint32_t total() const noexcept { return total_; }
  std::uint32_t count(int value) const noexcept { return counts_[value - r_min()]; }
  std::span<const std::uint32_t> counts() const noexcept { return {counts_.data(), bins()}; }

 private:
  std::size_t bins() const noexcept { return std::size_t{1} << bits_; }

  int bits_;
  std::uint32_t total_ = 0;
  std::array<std::uint32_t, 256> counts_{};
};

/// f(C) = d/dC ln L(C) and its derivative.
struct LikelihoodScore {
  double f;
  double f_prime;
};

/// Score of the truncated log-likelihood. Throws std::invalid_argument
/// unless C > 0.
LikelihoodScore log_likelihood_score(double cardinality, const RegisterHistogram& histogram);

/// Full estimator: all-min / all-max short cuts, then a safeguarded Newton
/// solve from (m - 1) / sum(2^-R[j]). Variance is -1 / f'(C_hat).
EstimateReport mle_estimate(const RegisterHistogram& histogram, const SolverOptions& options = {});

class QSketch {
 public:
  /// Throws std::invalid_argument for m == 0 or bits outside [4, 8].
  QSketch(std::uint32_t m, int bits, std::uint64_t seed, bool early_stop = true);

  /// Sketch with explicit register values, each in [r_min, r_max].
  static QSketch from_register_values(int bits, std::uint64_t seed, std::span<const int> values);

  /// Sketch with explicit packed words (deserialization).
  static QSketch from_packed(PackedRegisters registers, std::uint64_t seed);

  void update(ElementKey key, double weight);

  EstimateReport estimate(const SolverOptions& options = {}) const;
  LikelihoodScore score(double cardinality) const;
  RegisterHistogram histogram() const;

  const PackedRegisters& registers() const noexcept { return registers_; }
  std::uint32_t size() const noexcept { return registers_.size(); }
  int bits() const noexcept { return registers_.bits(); }
  std::uint64_t seed() const noexcept { return seed_; }
  bool early_stop() const noexcept { return early_stop_; }
  std::uint32_t min_index() const noexcept { return j_star_; }

 private:
  void rescan_min() noexcept;

  PackedRegisters registers_;
  std::uint64_t seed_;
  bool early_stop_;
  std::uint32_t j_star_ = 0;
  AscendingExpGenerator gen_;
};

}  // namespace qsketch
