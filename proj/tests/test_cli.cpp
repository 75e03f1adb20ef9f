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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qsketch/cli.hpp"
#include "qsketch/serialization.hpp"
#include "qsketch/stream.hpp"

namespace qsketch {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qsketch");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qsketch_cli_test_" + name);
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(Cli, GenWritesLoadableStream) {
  const auto path = scratch("gen.csv");
  const auto r = invoke({"gen", "--dist", "constant", "--n", "100", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(true_cardinality(load_csv(path).elements), 100.0);
  std::filesystem::remove(path);
}

TEST(Cli, GenToStdoutMatchesGenerator) {
  const auto r = invoke({"gen", "--n", "5", "--seed", "3", "--dup", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(count_lines(r.out), 1U + 10U);
  EXPECT_EQ(r.out.rfind("# uniform-5 seed 3\n", 0), 0U);
}

TEST(Cli, RunWritesAccuracyCsv) {
  const auto r = invoke({"run", "--sketch", "qsketch-dyn", "--m", "64", "--runs", "4", "--n", "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("run_index,stream,estimate,truth,rel_error,rrmse,aare,mean,stddev\n", 0), 0U);
  EXPECT_EQ(count_lines(r.out), 1U + 4U + 1U);
  EXPECT_NE(r.out.find("uniform-500"), std::string::npos);
}

TEST(Cli, RunSaveThenEstimate) {
  const auto path = scratch("sketch.bin");
  ASSERT_EQ(invoke({"run", "--sketch", "qsketch", "--m", "32", "--n", "300", "--seed", "9",
                    "--save", path.string()})
                .code,
            0);
  const QSketch saved = deserialize_qsketch(read_file(path));
  EXPECT_EQ(saved.size(), 32U);
  EXPECT_EQ(saved.seed(), 9U);
  const auto r = invoke({"estimate", "--in", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("qsketch,32,8,"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, BenchWarnsOnShortStream) {
  const auto r = invoke({"bench", "--sketch", "qsketch-dyn", "--m", "64", "--n", "1000",
                         "--repeats", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.out.find("qsketch-dyn,64,8,update,1000,1,"), std::string::npos);
}

TEST(Cli, DiagTruncationAndVariance) {
  const auto t = invoke({"diag", "--check", "truncation", "--bits", "4", "--epsilon", "0.1",
                         "--cardinality", "1", "--samples", "1000"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(t.out.rfind("bits,epsilon,cardinality,samples,", 0), 0U);
  const auto v = invoke({"diag", "--check", "variance", "--m", "32", "--runs", "100", "--n", "200"});
  ASSERT_EQ(v.code, 0) << v.err;
  EXPECT_EQ(v.out.rfind("sketch,m,bits,runs,truth,", 0), 0U);
}

TEST(Cli, ValidationErrorsExitNonZero) {
  EXPECT_EQ(invoke({"run", "--sketch", "lm", "--m", "2"}).code, 2);
  EXPECT_EQ(invoke({"run", "--sketch", "hll"}).code, 2);
  EXPECT_EQ(invoke({"run", "--runs", "0"}).code, 2);
  EXPECT_EQ(invoke({"run", "--bits", "9"}).code, 2);
  EXPECT_EQ(invoke({"diag", "--check", "truncation", "--bits", "4", "--cardinality", "1e9"}).code, 2);
  EXPECT_EQ(invoke({"diag", "--check", "variance", "--runs", "10", "--n", "10"}).code, 2);
  EXPECT_EQ(invoke({"bench", "--mode", "sideways"}).code, 2);
  EXPECT_EQ(invoke({"run", "--unknown"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"estimate", "--in", scratch("missing.bin").string()}).code, 1);
}

TEST(Cli, BadCsvReportsLine) {
  const auto path = scratch("bad.csv");
  {
    std::ofstream(path) << "a,1\nb,0\n";
  }
  const auto r = invoke({"run", "--input", path.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.csv:2:"), std::string::npos) << r.err;
  std::filesystem::remove(path);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(invoke({"--help"}).code, 0); }

}  // namespace
}  // namespace qsketch
