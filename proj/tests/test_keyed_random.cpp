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

#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "qsketch/keyed_random.hpp"
#include "stat_oracles.hpp"

namespace qsketch {
namespace {

TEST(IndexedUniform, IsDeterministic) {
  const ElementKey key{12345};
  EXPECT_EQ(indexed_uniform(7, key, 3), indexed_uniform(7, key, 3));
  EXPECT_NE(indexed_uniform(7, key, 3), indexed_uniform(8, key, 3));
  EXPECT_EQ(IndexedUniform(7, key)(3), indexed_uniform(7, key, 3));
}

TEST(IndexedUniform, ChiSquareOverKeys) {
  std::vector<std::size_t> bins(64, 0);
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const double u = indexed_uniform(99, ElementKey{i}, 5);
    ++bins[static_cast<std::size_t>(u * 64.0)];
  }
  EXPECT_TRUE(testing::chi_square_uniform_passes(bins, 0.01));
}

TEST(IndexedUniform, NeverHitsTheEndpoints) {
  for (std::uint64_t i = 0; i < 1000000; ++i) {
    const double u = indexed_uniform(1, ElementKey{i}, i % 17);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(IndexedUniform, OpenUnitMappingExtremes) {
  EXPECT_GT(to_open_unit(0), 0.0);
  EXPECT_LT(to_open_unit(~std::uint64_t{0}), 1.0);
  EXPECT_TRUE(std::isfinite(-std::log(to_open_unit(0))));
  EXPECT_GT(-std::log(to_open_unit(~std::uint64_t{0})), 0.0);
}

TEST(IndexedUniform, DistinctIndicesUncorrelated) {
  std::vector<double> a, b;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    a.push_back(indexed_uniform(3, ElementKey{i}, 0));
    b.push_back(indexed_uniform(3, ElementKey{i}, 1));
  }
  EXPECT_LT(std::abs(testing::pearson(a, b)), 0.05);
}

TEST(ElementRandomStream, ReplaysUnderSameSeedAndKey) {
  ElementRandomStream s1(11, ElementKey{42});
  ElementRandomStream s2(11, ElementKey{42});
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(s1.next_bits(), s2.next_bits());
  }
}

TEST(ElementRandomStream, OneBitKeyChangeDecorrelates) {
  ElementRandomStream s1(11, ElementKey{0x1000});
  ElementRandomStream s2(11, ElementKey{0x1001});
  std::vector<double> a, b;
  for (int i = 0; i < 10000; ++i) {
    a.push_back(s1.next_uniform());
    b.push_back(s2.next_uniform());
  }
  EXPECT_LT(std::abs(testing::pearson(a, b)), 0.05);
}

TEST(ElementRandomStream, CounterStartsAtOneAndIncrements) {
  ElementRandomStream s(0, ElementKey{1});
  EXPECT_EQ(s.counter(), 1U);
  s.next_uniform();
  EXPECT_EQ(s.counter(), 2U);
  s.rand_int(0, 9);
  EXPECT_EQ(s.counter(), 3U);
}

TEST(ElementRandomStream, RandIntSingletonRange) {
  ElementRandomStream s(0, ElementKey{1});
  EXPECT_EQ(s.rand_int(5, 5), 5);
  EXPECT_EQ(s.counter(), 2U);
}

TEST(ElementRandomStream, RandIntRejectsInvertedRange) {
  ElementRandomStream s(0, ElementKey{1});
  EXPECT_THROW(s.rand_int(3, 2), std::invalid_argument);
}

TEST(ElementRandomStream, RandIntReplay) {
  ElementRandomStream s(5, ElementKey{9});
  ElementRandomStream copy = s;
  EXPECT_EQ(s.rand_int(1, 1000), copy.rand_int(1, 1000));
}

TEST(ElementRandomStream, RandIntFrequenciesWithinThreeSigma) {
  // Binomial(10^5, 1/8): sigma = sqrt(n p (1 - p)).
  const int n = 100000;
  std::vector<int> counts(9, 0);
  ElementRandomStream s(2024, ElementKey{77});
  for (int i = 0; i < n; ++i) {
    const auto v = s.rand_int(1, 8);
    ASSERT_GE(v, 1);
    ASSERT_LE(v, 8);
    ++counts[static_cast<std::size_t>(v)];
  }
  const double p = 1.0 / 8.0;
  const double sigma = std::sqrt(n * p * (1 - p));
  for (int v = 1; v <= 8; ++v) {
    EXPECT_NEAR(counts[static_cast<std::size_t>(v)], n * p, 3 * sigma) << "value " << v;
  }
}

TEST(RegisterChoice, SingleRegister) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    EXPECT_EQ(register_choice(4, ElementKey{i}, 1), 0U);
  }
}

TEST(RegisterChoice, IsAHashNotAFreshDraw) {
  EXPECT_EQ(register_choice(4, ElementKey{555}, 256), register_choice(4, ElementKey{555}, 256));
}

TEST(RegisterChoice, RejectsZeroRegisters) {
  EXPECT_THROW(register_choice(4, ElementKey{1}, 0), std::invalid_argument);
}

TEST(RegisterChoice, OccupancyChiSquare) {
  std::vector<std::size_t> bins(256, 0);
  for (std::uint64_t i = 0; i < 100000; ++i) {
    ++bins[register_choice(31337, ElementKey{i}, 256)];
  }
  EXPECT_TRUE(testing::chi_square_uniform_passes(bins, 0.01));
}

TEST(ElementKey, BytesFoldDeterministically) {
  EXPECT_EQ(ElementKey::from_bytes("alpha"), ElementKey::from_bytes("alpha"));
  EXPECT_NE(ElementKey::from_bytes("alpha"), ElementKey::from_bytes("alphb"));
  EXPECT_NE(ElementKey::from_bytes(""), ElementKey::from_bytes(std::string_view("\0", 1)));
}

}  // namespace
}  // namespace qsketch
