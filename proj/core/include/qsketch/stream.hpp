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

// Weighted streams: synthetic generation, CSV ingestion and the exact
// ground-truth weighted cardinality.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qsketch/keyed_random.hpp"

namespace qsketch {

struct WeightedElement {
  ElementKey key;
  double weight;
};

enum class WeightDistribution { uniform, gauss, gamma, constant };

/// Parses "uniform", "gauss", "gamma" or "constant".
WeightDistribution parse_distribution(std::string_view name);
std::string_view to_string(WeightDistribution dist) noexcept;

/// Synthetic stream description. Distribution parameters, in order:
///   uniform  (low, high)    default (0, 1)
///   gauss    (mean, stddev) default (1, 0.1); non-positive draws are redrawn
///   gamma    (shape, scale) default (1, 2)
///   constant (value)        default 1
/// An empty params vector selects the defaults.
struct StreamSpec {
  WeightDistribution distribution = WeightDistribution::uniform;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::vector<double> params;
  std::uint32_t duplication = 1;
};

/// n distinct keys with i.i.d. weights. With duplication d > 1 every element
/// is emitted d times and the whole stream is shuffled. Deterministic in
/// (spec, seed). Throws std::invalid_argument for parameters that cannot
/// yield strictly positive weights.
std::vector<WeightedElement> generate(const StreamSpec& spec);

/// "distribution-#elements" label, e.g. "uniform-10k".
std::string dataset_label(const StreamSpec& spec);

struct CsvStream {
  std::vector<WeightedElement> elements;
  std::vector<std::string> warnings;
};

/// Reads "key,weight" lines; '#' starts a comment line, blank lines are
/// skipped. Throws std::runtime_error naming the line for malformed input
/// or non-positive weights. A repeated key with a different weight keeps
/// the first weight and records a warning.
CsvStream load_csv(const std::filesystem::path& path);

struct NamedStream {
  std::string name;
  std::vector<WeightedElement> elements;
};

/// Multi-stream input: every regular file in the directory is one stream,
/// in lexicographic filename order.
std::vector<NamedStream> load_csv_directory(const std::filesystem::path& dir,
                                            std::vector<std::string>* warnings = nullptr);

/// Writes a stream in the CSV format accepted by load_csv.
void write_csv(const std::filesystem::path& path, std::span<const WeightedElement> stream,
               const std::string& comment = {});
void write_csv(std::ostream& out, std::span<const WeightedElement> stream,
               const std::string& comment = {});

/// Exact sum of weights over distinct keys (first occurrence wins).
double true_cardinality(std::span<const WeightedElement> stream);

}  // namespace qsketch
