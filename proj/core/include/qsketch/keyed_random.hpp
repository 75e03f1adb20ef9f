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

// Deterministic per-element randomness. Every draw made on behalf of an
// element is a pure function of (sketch seed, element key, draw index), so a
// repeated element replays exactly the same values and cannot move a sketch.

#include <compare>
#include <cstdint>
#include <string_view>

namespace qsketch {

/// Opaque element identifier. Byte-string keys are folded to 64 bits.
struct ElementKey {
  std::uint64_t id = 0;

  static ElementKey from_bytes(std::string_view bytes) noexcept;

  friend constexpr bool operator==(ElementKey, ElementKey) = default;
  friend constexpr auto operator<=>(ElementKey, ElementKey) = default;
};

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Maps 64 random bits to the open interval (0, 1). Uses the top 52 bits at
/// cell midpoints, so the result lies in [2^-53, 1 - 2^-53].
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Uniform integer in [0, range) from 64 random bits (multiply-high).
constexpr std::uint64_t scale_to_range(std::uint64_t bits, std::uint64_t range) noexcept {
  __extension__ using u128 = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<u128>(bits) * range) >> 64);
}

/// h_j(x): the j-th independent uniform hash of an element. j is any 64-bit
/// index; sketches use the zero-based register index.
double indexed_uniform(std::uint64_t seed, ElementKey key, std::uint64_t j) noexcept;

/// h_j(x) for a fixed (seed, key) with the keyed prefix hashed once; used
/// when one element needs many indices.
class IndexedUniform {
 public:
  IndexedUniform(std::uint64_t seed, ElementKey key) noexcept;
  double operator()(std::uint64_t j) const noexcept {
    return to_open_unit(mix64(base_ + (j + 1) * 0x9e3779b97f4a7c15ULL));
  }

 private:
  std::uint64_t base_;
};

/// g(x): the register an element is routed to, in [0, m). Throws
/// std::invalid_argument when m == 0.
std::uint32_t register_choice(std::uint64_t seed, ElementKey key, std::uint32_t m);

/// Counter-based stream of draws for one element. Value type; copying a
/// stream forks it.
class ElementRandomStream {
 public:
  ElementRandomStream(std::uint64_t seed, ElementKey key) noexcept;

  /// Raw 64 bits of the next draw.
  std::uint64_t next_bits() noexcept;

  /// Next draw mapped to (0, 1).
  double next_uniform() noexcept { return to_open_unit(next_bits()); }

  /// Uniform integer in [lo, hi], consuming exactly one draw. Throws
  /// std::invalid_argument when lo > hi.
  std::int64_t rand_int(std::int64_t lo, std::int64_t hi);

  /// One-based index of the draw the next call will produce.
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 1;
};

}  // namespace qsketch
