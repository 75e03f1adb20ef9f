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

#include "qsketch/exp_generator.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsketch {

void require_positive_weight(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw std::invalid_argument("element weight must be finite and positive, got " +
                                std::to_string(w));
  }
}

AscendingExpGenerator::AscendingExpGenerator(std::uint32_t m) : m_(m), perm_(m) {
  if (m == 0) {
    throw std::invalid_argument("AscendingExpGenerator: m must be positive");
  }
  std::iota(perm_.begin(), perm_.end(), 0U);
  touched_.reserve(64);
  step_ = m_;
}

void AscendingExpGenerator::restore_identity() noexcept {
  for (std::uint32_t slot : touched_) {
    perm_[slot] = slot;
  }
  touched_.clear();
}

void AscendingExpGenerator::begin(std::uint64_t seed, ElementKey key, double weight) {
  require_positive_weight(weight);
  restore_identity();
  stream_ = ElementRandomStream(seed, key);
  weight_ = weight;
  value_ = 0.0;
  step_ = 0;
}

AscendingDraw AscendingExpGenerator::next() {
  if (step_ >= m_) {
    throw std::out_of_range("AscendingExpGenerator: all m values already generated");
  }
  const std::uint32_t remaining = m_ - step_;
  value_ += -std::log(stream_.next_uniform()) / (weight_ * static_cast<double>(remaining));

  const auto k = static_cast<std::uint32_t>(stream_.rand_int(step_, m_ - 1));
  if (k != step_) {
    std::swap(perm_[k], perm_[step_]);
    touched_.push_back(k);
  }
  touched_.push_back(step_);
  return AscendingDraw{value_, perm_[step_++]};
}

}  // namespace qsketch
