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

// Flat little-endian binary images of the quantized sketches. Layouts are
// documented in README.md and must stay byte-stable.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qsketch/qsketch.hpp"
#include "qsketch/qsketch_dyn.hpp"

namespace qsketch {

inline constexpr std::uint8_t kQSketchMagic[4] = {'Q', 'S', 'K', '1'};
inline constexpr std::uint8_t kQSketchDynMagic[4] = {'Q', 'S', 'D', '1'};

std::vector<std::uint8_t> serialize(const QSketch& sketch);
std::vector<std::uint8_t> serialize(const QSketchDyn& sketch);

/// Throws std::runtime_error on truncated or malformed input.
QSketch deserialize_qsketch(std::span<const std::uint8_t> bytes);
QSketchDyn deserialize_qsketch_dyn(std::span<const std::uint8_t> bytes);

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace qsketch
