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

#include "qsketch/keyed_random.hpp"

#include <stdexcept>

namespace qsketch {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Domain tags keep the three families of draws unrelated even though they
// share a seed and key.
constexpr std::uint64_t kIndexedDomain = 0x243f6a8885a308d3ULL;
constexpr std::uint64_t kStreamDomain = 0x13198a2e03707344ULL;
constexpr std::uint64_t kChoiceDomain = 0xa4093822299f31d0ULL;

constexpr std::uint64_t keyed_base(std::uint64_t seed, ElementKey key,
                                   std::uint64_t domain) noexcept {
  return mix64(mix64(seed ^ domain) ^ mix64(key.id + kGolden));
}

}  // namespace

ElementKey ElementKey::from_bytes(std::string_view bytes) noexcept {
  // FNV-1a, then a finalizer to spread the low-entropy high bits.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return ElementKey{mix64(h ^ bytes.size())};
}

IndexedUniform::IndexedUniform(std::uint64_t seed, ElementKey key) noexcept
    : base_(keyed_base(seed, key, kIndexedDomain)) {}

double indexed_uniform(std::uint64_t seed, ElementKey key, std::uint64_t j) noexcept {
  return IndexedUniform(seed, key)(j);
}

std::uint32_t register_choice(std::uint64_t seed, ElementKey key, std::uint32_t m) {
  if (m == 0) {
    throw std::invalid_argument("register_choice: m must be positive");
  }
  const std::uint64_t bits = mix64(keyed_base(seed, key, kChoiceDomain));
  return static_cast<std::uint32_t>(scale_to_range(bits, m));
}

ElementRandomStream::ElementRandomStream(std::uint64_t seed, ElementKey key) noexcept
    : base_(keyed_base(seed, key, kStreamDomain)) {}

std::uint64_t ElementRandomStream::next_bits() noexcept {
  return mix64(base_ + (counter_++) * kGolden);
}

std::int64_t ElementRandomStream::rand_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) {
    throw std::invalid_argument("rand_int: lo > hi");
  }
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t bits = next_bits();
  // span == 0 only for the full 64-bit range.
  if (span == 0) {
    return static_cast<std::int64_t>(bits);
  }
  return lo + static_cast<std::int64_t>(scale_to_range(bits, span));
}

}  // namespace qsketch
