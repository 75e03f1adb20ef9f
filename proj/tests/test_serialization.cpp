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

#include <filesystem>
#include <vector>

#include <gtest/gtest.h>

#include "qsketch/serialization.hpp"
#include "qsketch/stream.hpp"

namespace qsketch {
namespace {

std::vector<WeightedElement> sample_stream() {
  StreamSpec spec;
  spec.distribution = WeightDistribution::gamma;
  spec.n = 1500;
  spec.seed = 12;
  return generate(spec);
}

TEST(Serialization, QSketchRoundTrip) {
  for (int bits = 4; bits <= 8; ++bits) {
    QSketch s(100, bits, 77);
    for (const auto& e : sample_stream()) s.update(e.key, e.weight);
    const auto bytes = serialize(s);
    ASSERT_EQ(bytes.size(), 4 + 4 + 4 + 8 + 4 + 4 * s.registers().words().size());
    const QSketch back = deserialize_qsketch(bytes);
    EXPECT_EQ(back.registers(), s.registers());
    EXPECT_EQ(back.seed(), 77U);
    EXPECT_EQ(back.min_index(), s.min_index());
    EXPECT_EQ(back.estimate().estimate, s.estimate().estimate);
    EXPECT_EQ(serialize(back), bytes);
  }
}

TEST(Serialization, QSketchHeaderIsLittleEndian) {
  const QSketch s(3, 8, 0x0102030405060708ULL);
  const auto bytes = serialize(s);
  EXPECT_EQ(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 4),
            (std::vector<std::uint8_t>{'Q', 'S', 'K', '1'}));
  EXPECT_EQ(bytes[4], 3);
  EXPECT_EQ(bytes[8], 8);
  EXPECT_EQ(bytes[12], 0x08);
  EXPECT_EQ(bytes[19], 0x01);
}

TEST(Serialization, QSketchDynRoundTripContinuesIdentically) {
  const auto stream = sample_stream();
  const std::size_t half = stream.size() / 2;
  for (auto timing : {ChangeTiming::before_update, ChangeTiming::after_update}) {
    QSketchDyn a(64, 6, 5, timing);
    for (std::size_t i = 0; i < half; ++i) a.update(stream[i].key, stream[i].weight);
    QSketchDyn b = deserialize_qsketch_dyn(serialize(a));
    EXPECT_EQ(b.timing(), timing);
    for (std::size_t i = half; i < stream.size(); ++i) {
      a.update(stream[i].key, stream[i].weight);
      b.update(stream[i].key, stream[i].weight);
    }
    EXPECT_EQ(a.estimate(), b.estimate());
    EXPECT_EQ(a.variance_accumulator(), b.variance_accumulator());
    EXPECT_EQ(serialize(a), serialize(b));
  }
}

TEST(Serialization, RejectsTruncatedInput) {
  QSketchDyn d(16, 8, 1);
  d.update(ElementKey{1}, 1.0);
  const auto dyn = serialize(d);
  const auto plain = serialize(QSketch(16, 8, 1));
  for (std::size_t len = 0; len < plain.size(); ++len) {
    EXPECT_THROW(deserialize_qsketch(std::span(plain).first(len)), std::runtime_error) << len;
  }
  for (std::size_t len = 0; len < dyn.size(); len += 7) {
    EXPECT_THROW(deserialize_qsketch_dyn(std::span(dyn).first(len)), std::runtime_error) << len;
  }
}

TEST(Serialization, RejectsTrailingBytesAndBadMagic) {
  auto bytes = serialize(QSketch(16, 8, 1));
  bytes.push_back(0);
  EXPECT_THROW(deserialize_qsketch(bytes), std::runtime_error);
  bytes.pop_back();
  bytes[3] = '2';
  EXPECT_THROW(deserialize_qsketch(bytes), std::runtime_error);
  EXPECT_THROW(deserialize_qsketch_dyn(serialize(QSketch(16, 8, 1))), std::runtime_error);
}

TEST(Serialization, RejectsInconsistentDynHistogram) {
  QSketchDyn d(16, 4, 1);
  d.update(ElementKey{1}, 1.0);
  auto bytes = serialize(d);
  // Histogram starts after magic, m, bits, seed, timing, word count and words.
  const std::size_t hist_offset = 4 + 4 + 4 + 8 + 4 + 4 + 4 * d.registers().words().size();
  bytes[hist_offset] ^= 1;
  EXPECT_THROW(deserialize_qsketch_dyn(bytes), std::runtime_error);
}

TEST(Serialization, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "qsketch_serialization_test.bin";
  const auto bytes = serialize(QSketch(40, 7, 3));
  write_file(path, bytes);
  EXPECT_EQ(read_file(path), bytes);
  std::filesystem::remove(path);
  EXPECT_THROW(read_file(path), std::runtime_error);
}

}  // namespace
}  // namespace qsketch
