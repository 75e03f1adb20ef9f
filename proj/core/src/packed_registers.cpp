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

#include "qsketch/packed_registers.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qsketch {
namespace {

int checked_bits(int bits) {
  if (bits < PackedRegisters::kMinBits || bits > PackedRegisters::kMaxBits) {
    throw std::invalid_argument("register width must be in [4, 8] bits, got " +
                                std::to_string(bits));
  }
  return bits;
}

std::uint32_t word_count(std::uint32_t m, int bits) {
  const std::uint32_t per_word = 32U / static_cast<std::uint32_t>(bits);
  return (m + per_word - 1) / per_word;
}

}  // namespace

PackedRegisters::PackedRegisters(std::uint32_t m, int bits)
    : m_(m),
      bits_(checked_bits(bits)),
      r_min_(register_min(bits)),
      r_max_(register_max(bits)),
      per_word_(32U / static_cast<std::uint32_t>(bits)),
      mask_((1U << bits) - 1U),
      words_(word_count(m, bits), 0U) {
  if (m == 0) {
    throw std::invalid_argument("PackedRegisters: m must be positive");
  }
}

PackedRegisters::PackedRegisters(std::uint32_t m, int bits, std::vector<std::uint32_t> words)
    : PackedRegisters(m, bits) {
  if (words.size() != words_.size()) {
    throw std::invalid_argument("PackedRegisters: expected " + std::to_string(words_.size()) +
                                " words, got " + std::to_string(words.size()));
  }
  // Bits outside the occupied slots must be zero so equal states have equal
  // images.
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::uint32_t first = static_cast<std::uint32_t>(w) * per_word_;
    const std::uint32_t slots = std::min(per_word_, m_ - first);
    const std::uint64_t used = (std::uint64_t{1} << (slots * bits_)) - 1U;
    if ((words[w] & ~static_cast<std::uint32_t>(used)) != 0U) {
      throw std::invalid_argument("PackedRegisters: nonzero padding bits in word " +
                                  std::to_string(w));
    }
  }
  words_ = std::move(words);
  for (std::uint32_t i = 0; i < m_; ++i) {
    if (get(i) > r_max_) {
      throw std::invalid_argument("PackedRegisters: register " + std::to_string(i) +
                                  " exceeds r_max");
    }
  }
}

std::vector<int> PackedRegisters::values() const {
  std::vector<int> out(m_);
  for (std::uint32_t i = 0; i < m_; ++i) {
    out[i] = get(i);
  }
  return out;
}

}  // namespace qsketch
