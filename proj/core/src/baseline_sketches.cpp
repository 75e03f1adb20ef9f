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

#include "qsketch/baseline_sketches.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qsketch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string_view to_string(EstimateFlag flag) noexcept {
  switch (flag) {
    case EstimateFlag::ok: return "ok";
    case EstimateFlag::all_min: return "all_min";
    case EstimateFlag::all_max: return "all_max";
    case EstimateFlag::not_converged: return "not_converged";
    case EstimateFlag::not_saturated: return "not_saturated";
  }
  return "unknown";
}

EstimateReport min_sum_estimate(std::span<const double> registers) {
  EstimateReport report;
  double sum = 0.0;
  for (double r : registers) {
    if (std::isinf(r)) {
      report.flag = EstimateFlag::not_saturated;
      return report;
    }
    sum += r;
  }
  const auto m = static_cast<double>(registers.size());
  report.estimate = (m - 1.0) / sum;
  report.variance = m > 2.0 ? report.estimate * report.estimate / (m - 2.0) : kInf;
  report.converged = true;
  return report;
}

LmSketch::LmSketch(std::uint32_t m, std::uint64_t seed) : registers_(m, kInf), seed_(seed) {
  if (m == 0) {
    throw std::invalid_argument("LmSketch: m must be positive");
  }
}

LmSketch LmSketch::from_registers(std::uint64_t seed, std::vector<double> registers) {
  LmSketch sketch(static_cast<std::uint32_t>(registers.size()), seed);
  sketch.registers_ = std::move(registers);
  return sketch;
}

void LmSketch::update(ElementKey key, double weight) {
  require_positive_weight(weight);
  const IndexedUniform h(seed_, key);
  const auto m = static_cast<std::uint32_t>(registers_.size());
  for (std::uint32_t j = 0; j < m; ++j) {
    const double r = -std::log(h(j)) / weight;
    if (r < registers_[j]) {
      registers_[j] = r;
    }
  }
}

FastGmSketch::FastGmSketch(std::uint32_t m, std::uint64_t seed, bool early_stop)
    : registers_(m, kInf), seed_(seed), early_stop_(early_stop), gen_(m == 0 ? 1 : m) {
  if (m == 0) {
    throw std::invalid_argument("FastGmSketch: m must be positive");
  }
}

double FastGmSketch::r_star() const noexcept {
  return filled_ == registers_.size() ? registers_[max_index_] : kInf;
}

void FastGmSketch::rescan_max() noexcept {
  std::uint32_t best = 0;
  for (std::uint32_t j = 1; j < registers_.size(); ++j) {
    if (registers_[j] > registers_[best]) {
      best = j;
    }
  }
  max_index_ = best;
}

void FastGmSketch::update(ElementKey key, double weight) {
  gen_.begin(seed_, key, weight);
  const auto m = static_cast<std::uint32_t>(registers_.size());
  bool max_lowered = false;
  while (!gen_.exhausted()) {
    const AscendingDraw draw = gen_.next();
    if (early_stop_ && filled_ == m) {
      if (max_lowered) {
        rescan_max();
        max_lowered = false;
      }
      if (draw.value > registers_[max_index_]) {
        break;
      }
    }
    double& slot = registers_[draw.position];
    if (draw.value < slot) {
      if (std::isinf(slot)) {
        max_lowered = ++filled_ == m;
      } else if (draw.position == max_index_) {
        max_lowered = true;
      }
      slot = draw.value;
    }
  }
  if (max_lowered) {
    rescan_max();
  }
}

}  // namespace qsketch
