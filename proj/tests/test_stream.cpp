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
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <unordered_set>

#include <gtest/gtest.h>

#include "qsketch/stream.hpp"
#include "stat_oracles.hpp"

namespace qsketch {
namespace {

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("qsketch_stream_test_" + std::to_string(counter_++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

TEST(Generate, ConstantWeightsSumToCount) {
  StreamSpec spec;
  spec.distribution = WeightDistribution::constant;
  spec.n = 100;
  const auto s = generate(spec);
  ASSERT_EQ(s.size(), 100U);
  EXPECT_EQ(true_cardinality(s), 100.0);
}

TEST(Generate, KeysDistinctAndWeightsPositive) {
  for (auto dist : {WeightDistribution::uniform, WeightDistribution::gauss,
                    WeightDistribution::gamma, WeightDistribution::constant}) {
    StreamSpec spec;
    spec.distribution = dist;
    spec.n = 20000;
    spec.seed = 4;
    std::unordered_set<std::uint64_t> ids;
    for (const auto& e : generate(spec)) {
      ASSERT_GT(e.weight, 0.0);
      ASSERT_TRUE(std::isfinite(e.weight));
      ids.insert(e.key.id);
    }
    EXPECT_EQ(ids.size(), 20000U) << to_string(dist);
  }
}

TEST(Generate, MomentsMatchDistribution) {
  struct Case {
    WeightDistribution dist;
    std::vector<double> params;
    double mean;
    double variance;
  };
  const Case cases[] = {
      {WeightDistribution::uniform, {}, 0.5, 1.0 / 12.0},
      {WeightDistribution::uniform, {2.0, 5.0}, 3.5, 9.0 / 12.0},
      {WeightDistribution::gauss, {}, 1.0, 0.01},
      {WeightDistribution::gamma, {}, 2.0, 4.0},
      {WeightDistribution::gamma, {0.5, 3.0}, 1.5, 4.5},
  };
  for (const auto& c : cases) {
    StreamSpec spec;
    spec.distribution = c.dist;
    spec.params = c.params;
    spec.n = 100000;
    spec.seed = 8;
    std::vector<double> w;
    for (const auto& e : generate(spec)) w.push_back(e.weight);
    const auto st = testing::sample_stats(w);
    EXPECT_LT(std::abs(st.mean - c.mean), 3.0 * std::sqrt(c.variance / w.size()))
        << to_string(c.dist);
    EXPECT_NEAR(st.variance / c.variance, 1.0, 0.05) << to_string(c.dist);
  }
}

TEST(Generate, DeterministicInSeed) {
  StreamSpec spec;
  spec.distribution = WeightDistribution::gamma;
  spec.n = 500;
  spec.seed = 1;
  const auto a = generate(spec), b = generate(spec);
  spec.seed = 2;
  const auto c = generate(spec);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].key, b[i].key);
    EXPECT_EQ(a[i].weight, b[i].weight);
  }
  EXPECT_NE(a[0].weight, c[0].weight);
}

TEST(Generate, DuplicationKeepsTruth) {
  StreamSpec spec;
  spec.n = 1000;
  spec.seed = 3;
  const auto plain = generate(spec);
  spec.duplication = 2;
  const auto doubled = generate(spec);
  EXPECT_EQ(doubled.size(), 2000U);
  EXPECT_EQ(true_cardinality(doubled), true_cardinality(plain));
  // Shuffled: the second copy is not simply appended.
  bool reordered = false;
  for (std::size_t i = 0; i < plain.size() && !reordered; ++i) {
    reordered = !(doubled[i].key == plain[i].key);
  }
  EXPECT_TRUE(reordered);
}

TEST(Generate, RejectsBadParameters) {
  StreamSpec spec;
  spec.n = 10;
  spec.params = {1.0, 0.5};
  EXPECT_THROW(generate(spec), std::invalid_argument);
  spec.params = {-1.0, 0.0};
  EXPECT_THROW(generate(spec), std::invalid_argument);
  spec.params = {1.0};
  EXPECT_THROW(generate(spec), std::invalid_argument);
  spec.distribution = WeightDistribution::constant;
  spec.params = {0.0};
  EXPECT_THROW(generate(spec), std::invalid_argument);
  spec.params = {};
  spec.duplication = 0;
  EXPECT_THROW(generate(spec), std::invalid_argument);
  EXPECT_THROW(parse_distribution("poisson"), std::invalid_argument);
}

TEST(Generate, Labels) {
  StreamSpec spec;
  spec.n = 10000;
  EXPECT_EQ(dataset_label(spec), "uniform-10k");
  spec.distribution = WeightDistribution::gamma;
  spec.n = 250;
  EXPECT_EQ(dataset_label(spec), "gamma-250");
  spec.n = 1000000;
  EXPECT_EQ(dataset_label(spec), "gamma-1m");
}

TEST(TrueCardinality, FirstOccurrencePerKey) {
  const std::vector<WeightedElement> s{
      {ElementKey{1}, 2.0}, {ElementKey{2}, 3.0}, {ElementKey{1}, 2.0}};
  EXPECT_EQ(true_cardinality(s), 5.0);
  EXPECT_EQ(true_cardinality({}), 0.0);
}

TEST(TrueCardinality, OrderInsensitive) {
  StreamSpec spec;
  spec.distribution = WeightDistribution::gamma;
  spec.n = 5000;
  auto s = generate(spec);
  const double forward = true_cardinality(s);
  std::reverse(s.begin(), s.end());
  EXPECT_EQ(true_cardinality(s), forward);
}

TEST(LoadCsv, SumsDistinctKeys) {
  TempDir dir;
  const auto s = load_csv(dir.write("a.csv", "a,1.5\nb,2.0\n"));
  EXPECT_EQ(s.elements.size(), 2U);
  EXPECT_EQ(true_cardinality(s.elements), 3.5);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(LoadCsv, SkipsCommentsAndBlankLines) {
  TempDir dir;
  const auto s = load_csv(dir.write("a.csv", "# header\n\na, 1\n  \nb,2\n# tail\n"));
  EXPECT_EQ(true_cardinality(s.elements), 3.0);
}

TEST(LoadCsv, DuplicateKeyCountedOnce) {
  TempDir dir;
  const auto s = load_csv(dir.write("a.csv", "a,1.0\na,1.0\n"));
  EXPECT_EQ(s.elements.size(), 2U);
  EXPECT_EQ(true_cardinality(s.elements), 1.0);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(LoadCsv, InconsistentWeightWarnsAndKeepsFirst) {
  TempDir dir;
  const auto s = load_csv(dir.write("a.csv", "a,1.0\na,4.0\n"));
  ASSERT_EQ(s.warnings.size(), 1U);
  EXPECT_NE(s.warnings[0].find(":2:"), std::string::npos);
  EXPECT_EQ(s.elements[1].weight, 1.0);
  EXPECT_EQ(true_cardinality(s.elements), 1.0);
}

TEST(LoadCsv, ErrorsNameTheLine) {
  TempDir dir;
  const auto expect_error = [&](const std::string& text, const std::string& where) {
    try {
      load_csv(dir.write("bad.csv", text));
      ADD_FAILURE() << "no error for " << text;
    } catch (const std::runtime_error& e) {
      EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
  };
  expect_error("a,0\n", "bad.csv:1:");
  expect_error("a,1\nb,-2\n", "bad.csv:2:");
  expect_error("a,1\nb\n", "bad.csv:2:");
  expect_error("a,1,2\n", "bad.csv:1:");
  expect_error("a,abc\n", "bad.csv:1:");
  expect_error("a,nan\n", "bad.csv:1:");
  expect_error(",1\n", "bad.csv:1:");
  EXPECT_THROW(load_csv(dir.path() / "missing.csv"), std::runtime_error);
}

TEST(LoadCsv, WriteThenLoadPreservesTruth) {
  TempDir dir;
  StreamSpec spec;
  spec.distribution = WeightDistribution::gamma;
  spec.n = 300;
  spec.duplication = 2;
  const auto stream = generate(spec);
  const auto path = dir.path() / "s.csv";
  write_csv(path, stream, "gamma stream");
  const auto loaded = load_csv(path);
  EXPECT_TRUE(loaded.warnings.empty());
  ASSERT_EQ(loaded.elements.size(), stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    EXPECT_EQ(loaded.elements[i].weight, stream[i].weight);
  }
  EXPECT_EQ(true_cardinality(loaded.elements), true_cardinality(stream));
}

TEST(LoadCsvDirectory, OneStreamPerFileInNameOrder) {
  TempDir dir;
  dir.write("b.csv", "x,1\n");
  dir.write("a.csv", "x,2\ny,3\n");
  const auto streams = load_csv_directory(dir.path());
  ASSERT_EQ(streams.size(), 2U);
  EXPECT_EQ(streams[0].name, "a.csv");
  EXPECT_EQ(true_cardinality(streams[0].elements), 5.0);
  EXPECT_EQ(true_cardinality(streams[1].elements), 1.0);
  EXPECT_THROW(load_csv_directory(dir.path() / "a.csv"), std::runtime_error);
}

}  // namespace
}  // namespace qsketch
