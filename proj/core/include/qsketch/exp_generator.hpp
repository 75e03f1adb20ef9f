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

#include <cstdint>
#include <vector>

#include "qsketch/keyed_random.hpp"

namespace qsketch {

/// One ascending exponential value and the register it belongs to.
struct AscendingDraw {
  double value;
  std::uint32_t position;  // zero-based register index
};

/// Generates an element's m EXP(w) values in ascending order, assigning each
/// to a fresh register via an incremental Fisher-Yates shuffle.
///
/// Step j (1-based) consumes two draws from the element's stream: one for the
/// spacing -ln(u) / (w (m - j + 1)) and one for the swap index in [j, m].
/// FastGM and QSketch both drive this class, which is what makes their
/// register states comparable pointwise under a shared seed.
///
/// The permutation buffer is owned by the generator and reused across
/// elements; begin() restores identity by undoing only the touched slots.
class AscendingExpGenerator {
 public:
  explicit AscendingExpGenerator(std::uint32_t m);

  /// Positions the generator before the first spacing of (key, weight).
  /// Throws std::invalid_argument unless weight is finite and positive.
  void begin(std::uint64_t seed, ElementKey key, double weight);

  /// Next (value, position). Throws std::out_of_range after m steps.
  AscendingDraw next();

  std::uint32_t size() const noexcept { return m_; }
  std::uint32_t steps_taken() const noexcept { return step_; }
  bool exhausted() const noexcept { return step_ >= m_; }

 private:
  void restore_identity() noexcept;

  std::uint32_t m_;
  std::vector<std::uint32_t> perm_;
  std::vector<std::uint32_t> touched_;
  ElementRandomStream stream_{0, ElementKey{}};
  double weight_ = 1.0;
  double value_ = 0.0;
  std::uint32_t step_ = 0;
};

/// Throws std::invalid_argument unless w is finite and strictly positive.
void require_positive_weight(double w);

}  // namespace qsketch
