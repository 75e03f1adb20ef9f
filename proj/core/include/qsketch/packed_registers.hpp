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
#include <span>
#include <vector>

namespace qsketch {

/// m signed b-bit registers packed floor(32 / b) to a 32-bit word. A value v
/// in [r_min, r_max] is stored as the unsigned offset v - r_min; no register
/// straddles a word boundary.
class PackedRegisters {
 public:
  static constexpr int kMinBits = 4;
  static constexpr int kMaxBits = 8;

  /// All registers start at r_min. Throws std::invalid_argument for m == 0
  /// or bits outside [4, 8].
  PackedRegisters(std::uint32_t m, int bits);

  /// Rebuilds from raw words, validating the word count.
  PackedRegisters(std::uint32_t m, int bits, std::vector<std::uint32_t> words);

  int get(std::uint32_t index) const noexcept {
    const std::uint32_t word = index / per_word_;
    const std::uint32_t shift = (index - word * per_word_) * bits_;
    return static_cast<int>((words_[word] >> shift) & mask_) + r_min_;
  }

  /// Precondition: r_min <= value <= r_max.
  void set(std::uint32_t index, int value) noexcept {
    const std::uint32_t word = index / per_word_;
    const std::uint32_t shift = (index - word * per_word_) * bits_;
    const auto offset = static_cast<std::uint32_t>(value - r_min_);
    words_[word] = (words_[word] & ~(mask_ << shift)) | (offset << shift);
  }

  std::uint32_t size() const noexcept { return m_; }
  int bits() const noexcept { return bits_; }
  int r_min() const noexcept { return r_min_; }
  int r_max() const noexcept { return r_max_; }
  std::uint32_t registers_per_word() const noexcept { return per_word_; }
  std::span<const std::uint32_t> words() const noexcept { return words_; }

  std::vector<int> values() const;

  friend bool operator==(const PackedRegisters&, const PackedRegisters&) = default;

 private:
  std::uint32_t m_;
  int bits_;
  int r_min_;
  int r_max_;
  std::uint32_t per_word_;
  std::uint32_t mask_;
  std::vector<std::uint32_t> words_;
};

/// r_min = -2^(b-1) + 1.
constexpr int register_min(int bits) noexcept { return -(1 << (bits - 1)) + 1; }
/// r_max = 2^(b-1) - 1.
constexpr int register_max(int bits) noexcept { return (1 << (bits - 1)) - 1; }

}  // namespace qsketch
