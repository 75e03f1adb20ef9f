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
#include <string_view>

namespace qsketch {

enum class EstimateFlag : std::uint8_t {
  ok,
  all_min,        // every register still at r_min (empty stream)
  all_max,        // every register saturated at r_max; estimate is a sentinel
  not_converged,  // solver hit its iteration cap
  not_saturated,  // a 64-bit baseline register is still +inf
};

std::string_view to_string(EstimateFlag flag) noexcept;

/// Point estimate of the weighted cardinality plus diagnostics.
/// converged implies flag == ok.
struct EstimateReport {
  double estimate = 0.0;
  double variance = 0.0;
  int iterations = 0;
  bool converged = false;
  EstimateFlag flag = EstimateFlag::ok;
};

}  // namespace qsketch
