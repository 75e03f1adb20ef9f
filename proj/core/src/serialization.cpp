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

#include "qsketch/serialization.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

namespace qsketch {
namespace {

class Writer {
 public:
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void expect_magic(const std::uint8_t (&magic)[4]) {
    need(4);
    if (!std::equal(magic, magic + 4, in_.begin() + static_cast<std::ptrdiff_t>(pos_))) {
      throw std::runtime_error("sketch image: bad magic");
    }
    pos_ += 4;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void finish() const {
    if (pos_ != in_.size()) {
      throw std::runtime_error("sketch image: " + std::to_string(in_.size() - pos_) +
                               " trailing bytes");
    }
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      throw std::runtime_error("sketch image: truncated");
    }
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_registers(Writer& w, const PackedRegisters& regs, std::uint64_t seed) {
  w.u32(regs.size());
  w.u32(static_cast<std::uint32_t>(regs.bits()));
  w.u64(seed);
}

void write_words(Writer& w, const PackedRegisters& regs) {
  w.u32(static_cast<std::uint32_t>(regs.words().size()));
  for (std::uint32_t word : regs.words()) w.u32(word);
}

std::vector<std::uint32_t> read_words(Reader& r) {
  const std::uint32_t count = r.u32();
  std::vector<std::uint32_t> words;
  words.reserve(std::min<std::uint32_t>(count, 1U << 20));
  for (std::uint32_t i = 0; i < count; ++i) words.push_back(r.u32());
  return words;
}

PackedRegisters make_registers(std::uint32_t m, std::uint32_t bits, std::vector<std::uint32_t> words) {
  try {
    return PackedRegisters(m, static_cast<int>(bits), std::move(words));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("sketch image: ") + e.what());
  }
}

}  // namespace

std::vector<std::uint8_t> serialize(const QSketch& sketch) {
  Writer w;
  w.bytes(kQSketchMagic);
  write_registers(w, sketch.registers(), sketch.seed());
  write_words(w, sketch.registers());
  return w.take();
}

std::vector<std::uint8_t> serialize(const QSketchDyn& sketch) {
  Writer w;
  w.bytes(kQSketchDynMagic);
  write_registers(w, sketch.registers(), sketch.seed());
  w.u32(sketch.timing() == ChangeTiming::before_update ? 0U : 1U);
  write_words(w, sketch.registers());
  for (std::uint32_t count : sketch.histogram()) w.u32(count);
  w.f64(sketch.estimate());
  w.f64(sketch.variance_accumulator());
  return w.take();
}

QSketch deserialize_qsketch(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.expect_magic(kQSketchMagic);
  const std::uint32_t m = r.u32();
  const std::uint32_t bits = r.u32();
  const std::uint64_t seed = r.u64();
  PackedRegisters regs = make_registers(m, bits, read_words(r));
  r.finish();
  return QSketch::from_packed(std::move(regs), seed);
}

QSketchDyn deserialize_qsketch_dyn(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.expect_magic(kQSketchDynMagic);
  const std::uint32_t m = r.u32();
  const std::uint32_t bits = r.u32();
  const std::uint64_t seed = r.u64();
  const std::uint32_t timing = r.u32();
  if (timing > 1) {
    throw std::runtime_error("sketch image: unknown change timing " + std::to_string(timing));
  }
  PackedRegisters regs = make_registers(m, bits, read_words(r));
  std::vector<std::uint32_t> hist(std::size_t{1} << bits);
  for (auto& count : hist) count = r.u32();
  const double estimate = r.f64();
  const double variance = r.f64();
  r.finish();
  try {
    return QSketchDyn::restore(std::move(regs), seed,
                               timing == 0 ? ChangeTiming::before_update : ChangeTiming::after_update,
                               hist, estimate, variance);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("sketch image: ") + e.what());
  }
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace qsketch
