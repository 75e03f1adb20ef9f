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

#include "qsketch/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace qsketch {
namespace {

constexpr std::uint64_t kKeyDomain = 0x452821e638d01377ULL;
constexpr std::uint64_t kWeightDomain = 0xbe5466cf34e90c6cULL;
constexpr std::uint64_t kShuffleDomain = 0xc0ac29b7c97c50ddULL;

struct KeyHash {
  std::size_t operator()(ElementKey k) const noexcept { return static_cast<std::size_t>(mix64(k.id)); }
};

double standard_normal(ElementRandomStream& rng) {
  // Box-Muller; the sine branch is discarded to keep one normal per call.
  const double u1 = rng.next_uniform();
  const double u2 = rng.next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double standard_gamma(ElementRandomStream& rng, double shape) {
  if (shape < 1.0) {
    const double g = standard_gamma(rng, shape + 1.0);
    return g * std::pow(rng.next_uniform(), 1.0 / shape);
  }
  // Marsaglia-Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return d * v;
    }
  }
}

std::vector<double> resolved_params(const StreamSpec& spec) {
  std::vector<double> p = spec.params;
  std::vector<double> defaults;
  switch (spec.distribution) {
    case WeightDistribution::uniform: defaults = {0.0, 1.0}; break;
    case WeightDistribution::gauss: defaults = {1.0, 0.1}; break;
    case WeightDistribution::gamma: defaults = {1.0, 2.0}; break;
    case WeightDistribution::constant: defaults = {1.0}; break;
  }
  if (p.empty()) {
    return defaults;
  }
  if (p.size() != defaults.size()) {
    throw std::invalid_argument(std::string(to_string(spec.distribution)) + " takes " +
                                std::to_string(defaults.size()) + " parameter(s), got " +
                                std::to_string(p.size()));
  }
  for (double v : p) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("distribution parameters must be finite");
    }
  }
  return p;
}

void validate(WeightDistribution dist, const std::vector<double>& p) {
  bool ok = true;
  switch (dist) {
    case WeightDistribution::uniform: ok = p[0] >= 0.0 && p[1] > p[0]; break;
    case WeightDistribution::gauss: ok = p[0] > 0.0 && p[1] >= 0.0; break;
    case WeightDistribution::gamma: ok = p[0] > 0.0 && p[1] > 0.0; break;
    case WeightDistribution::constant: ok = p[0] > 0.0; break;
  }
  if (!ok) {
    throw std::invalid_argument("invalid parameters for " + std::string(to_string(dist)) +
                                " weights: they must yield strictly positive weights");
  }
}

double draw_weight(WeightDistribution dist, const std::vector<double>& p, ElementRandomStream& rng) {
  switch (dist) {
    case WeightDistribution::uniform:
      return p[0] + (p[1] - p[0]) * rng.next_uniform();
    case WeightDistribution::gauss:
      for (;;) {
        const double w = p[0] + p[1] * standard_normal(rng);
        if (w > 0.0) return w;
      }
    case WeightDistribution::gamma:
      for (;;) {
        const double w = p[1] * standard_gamma(rng, p[0]);
        if (w > 0.0) return w;
      }
    case WeightDistribution::constant:
      return p[0];
  }
  return p[0];
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

WeightDistribution parse_distribution(std::string_view name) {
  if (name == "uniform") return WeightDistribution::uniform;
  if (name == "gauss") return WeightDistribution::gauss;
  if (name == "gamma") return WeightDistribution::gamma;
  if (name == "constant") return WeightDistribution::constant;
  throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
}

std::string_view to_string(WeightDistribution dist) noexcept {
  switch (dist) {
    case WeightDistribution::uniform: return "uniform";
    case WeightDistribution::gauss: return "gauss";
    case WeightDistribution::gamma: return "gamma";
    case WeightDistribution::constant: return "constant";
  }
  return "unknown";
}

std::vector<WeightedElement> generate(const StreamSpec& spec) {
  if (spec.duplication == 0) {
    throw std::invalid_argument("duplication factor must be at least 1");
  }
  const std::vector<double> params = resolved_params(spec);
  validate(spec.distribution, params);

  const std::uint64_t key_salt = mix64(spec.seed ^ kKeyDomain);
  std::vector<WeightedElement> out;
  out.reserve(spec.n * spec.duplication);
  for (std::uint64_t i = 0; i < spec.n; ++i) {
    // mix64 is a bijection, so distinct i give distinct keys.
    const ElementKey key{mix64(i ^ key_salt)};
    ElementRandomStream rng(spec.seed ^ kWeightDomain, ElementKey{i});
    out.push_back(WeightedElement{key, draw_weight(spec.distribution, params, rng)});
  }
  if (spec.duplication > 1) {
    const std::size_t distinct = out.size();
    for (std::uint32_t d = 1; d < spec.duplication; ++d) {
      out.insert(out.end(), out.begin(), out.begin() + static_cast<std::ptrdiff_t>(distinct));
    }
    ElementRandomStream rng(spec.seed ^ kShuffleDomain, ElementKey{spec.n});
    for (std::size_t i = out.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.rand_int(0, static_cast<std::int64_t>(i - 1)));
      std::swap(out[i - 1], out[j]);
    }
  }
  return out;
}

std::string dataset_label(const StreamSpec& spec) {
  std::string count;
  const std::uint64_t n = spec.n;
  if (n >= 1000000 && n % 1000000 == 0) {
    count = std::to_string(n / 1000000) + "m";
  } else if (n >= 1000 && n % 1000 == 0) {
    count = std::to_string(n / 1000) + "k";
  } else {
    count = std::to_string(n);
  }
  return std::string(to_string(spec.distribution)) + "-" + count;
}

CsvStream load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  CsvStream result;
  std::unordered_map<ElementKey, double, KeyHash> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    const auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
      throw std::runtime_error(where() + "expected 'key,weight'");
    }
    const std::string_view key_text = trim(text.substr(0, comma));
    const std::string_view weight_text = trim(text.substr(comma + 1));
    if (key_text.empty()) {
      throw std::runtime_error(where() + "empty key");
    }
    double weight = 0.0;
    const auto [end, ec] =
        std::from_chars(weight_text.data(), weight_text.data() + weight_text.size(), weight);
    if (ec != std::errc{} || end != weight_text.data() + weight_text.size()) {
      throw std::runtime_error(where() + "malformed weight '" + std::string(weight_text) + "'");
    }
    if (!(weight > 0.0) || !std::isfinite(weight)) {
      throw std::runtime_error(where() + "weight must be positive, got " + std::string(weight_text));
    }
    const ElementKey key = ElementKey::from_bytes(key_text);
    const auto [it, inserted] = seen.emplace(key, weight);
    if (!inserted && it->second != weight) {
      std::ostringstream msg;
      msg << where() << "key '" << key_text << "' reappears with weight " << weight
          << " (first seen with " << it->second << "); keeping the first";
      result.warnings.push_back(msg.str());
      weight = it->second;
    }
    result.elements.push_back(WeightedElement{key, weight});
  }
  return result;
}

std::vector<NamedStream> load_csv_directory(const std::filesystem::path& dir,
                                            std::vector<std::string>* warnings) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error(dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<NamedStream> streams;
  for (const auto& file : files) {
    CsvStream loaded = load_csv(file);
    if (warnings != nullptr) {
      warnings->insert(warnings->end(), loaded.warnings.begin(), loaded.warnings.end());
    }
    streams.push_back(NamedStream{file.filename().string(), std::move(loaded.elements)});
  }
  return streams;
}

void write_csv(std::ostream& out, std::span<const WeightedElement> stream,
               const std::string& comment) {
  if (!comment.empty()) {
    out << "# " << comment << '\n';
  }
  char buf[32];
  for (const auto& e : stream) {
    const auto res = std::to_chars(buf, buf + sizeof buf, e.weight);
    out << std::hex << e.key.id << std::dec << ',' << std::string_view(buf, res.ptr - buf) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, std::span<const WeightedElement> stream,
               const std::string& comment) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  write_csv(out, stream, comment);
}

double true_cardinality(std::span<const WeightedElement> stream) {
  std::unordered_map<ElementKey, double, KeyHash> distinct;
  distinct.reserve(stream.size());
  for (const auto& e : stream) {
    distinct.emplace(e.key, e.weight);
  }
  // Sorted, compensated summation: the result depends only on the set of
  // distinct (key, weight) pairs, never on arrival order.
  std::vector<double> weights;
  weights.reserve(distinct.size());
  for (const auto& [key, w] : distinct) {
    weights.push_back(w);
  }
  std::sort(weights.begin(), weights.end());
  double sum = 0.0;
  double carry = 0.0;
  for (double w : weights) {
    const double t = sum + w;
    carry += std::abs(sum) >= std::abs(w) ? (sum - t) + w : (w - t) + sum;
    sum = t;
  }
  return sum + carry;
}

}  // namespace qsketch
