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

#include "qsketch/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>

#include "qsketch/harness.hpp"
#include "qsketch/serialization.hpp"

namespace qsketch::cli {
namespace {

using bench::SketchKind;
using bench::TrialConfig;

constexpr std::uint64_t kMinTimedStream = 100000;

// Stream source shared by run, bench and diag: a CSV file, a directory of
// CSV files, or a synthetic stream.
struct StreamOptions {
  std::string input;
  std::string input_dir;
  std::string dist = "uniform";
  std::uint64_t n = 10000;
  std::vector<double> params;
  std::uint32_t dup = 1;
  std::uint64_t stream_seed = 0;

  void add_to(CLI::App& cmd, bool allow_dir) {
    auto* file = cmd.add_option("--input", input, "CSV stream (key,weight per line)");
    if (allow_dir) {
      cmd.add_option("--input-dir", input_dir, "Directory of CSV streams, one stream per file")
          ->excludes(file);
    }
    cmd.add_option("--dist", dist, "Synthetic weight distribution: uniform, gauss, gamma, constant");
    cmd.add_option("--n", n, "Synthetic stream length (distinct elements)");
    cmd.add_option("--params", params, "Distribution parameters");
    cmd.add_option("--dup", dup, "Emit every synthetic element this many times");
    cmd.add_option("--stream-seed", stream_seed, "Seed of the synthetic stream");
  }

  StreamSpec spec() const {
    StreamSpec s;
    s.distribution = parse_distribution(dist);
    s.n = n;
    s.seed = stream_seed;
    s.params = params;
    s.duplication = dup;
    return s;
  }

  // Loads a single stream and its label; warnings go to err.
  std::vector<WeightedElement> load(std::string& label, std::ostream& err) const {
    if (!input.empty()) {
      CsvStream csv = load_csv(input);
      for (const auto& w : csv.warnings) err << "warning: " << w << '\n';
      label = std::filesystem::path(input).filename().string();
      return std::move(csv.elements);
    }
    const StreamSpec s = spec();
    label = dataset_label(s);
    return generate(s);
  }
};

struct SketchOptions {
  std::string sketch = "qsketch";
  std::uint32_t m = 256;
  int bits = 8;
  std::uint32_t runs = 1;
  std::uint64_t seed = 0;
  std::string timing = "before";

  void add_to(CLI::App& cmd, bool with_runs) {
    cmd.add_option("--sketch", sketch, "lm, fastgm, qsketch or qsketch-dyn");
    cmd.add_option("--m", m, "Number of registers");
    cmd.add_option("--bits", bits, "Register width for quantized sketches (4-8)");
    if (with_runs) cmd.add_option("--runs", runs, "Independent sketch seeds");
    cmd.add_option("--seed", seed, "Base sketch seed; run r uses seed + r");
    cmd.add_option("--timing", timing, "QSketch-Dyn change-probability timing: before or after")
        ->check(CLI::IsMember({"before", "after"}));
  }

  TrialConfig config() const {
    TrialConfig c;
    c.kind = bench::parse_sketch_kind(sketch);
    c.m = m;
    c.bits = bits;
    c.runs = runs;
    c.base_seed = seed;
    c.timing = timing == "after" ? ChangeTiming::after_update : ChangeTiming::before_update;
    bench::validate(c);
    return c;
  }
};

// Output destination: a file, or `out` for "-" / empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

int cmd_gen(const StreamOptions& so, const std::string& out_path, std::ostream& out) {
  const StreamSpec spec = so.spec();
  const auto stream = generate(spec);
  Sink sink(out_path, out);
  write_csv(sink.get(), stream, dataset_label(spec) + " seed " + std::to_string(spec.seed));
  return 0;
}

int cmd_run(const SketchOptions& sk, const StreamOptions& so, const std::string& out_path,
            const std::string& save_path, std::ostream& out, std::ostream& err) {
  const TrialConfig config = sk.config();
  bench::AccuracyReport report;
  if (!so.input_dir.empty()) {
    std::vector<std::string> warnings;
    const auto streams = load_csv_directory(so.input_dir, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    report = bench::run_accuracy(config, streams);
  } else {
    std::string label;
    const auto stream = so.load(label, err);
    report = bench::run_accuracy(config, stream, label);
    if (!save_path.empty()) {
      bench::Sketch sketch(config, config.base_seed);
      sketch.update(stream);
      std::visit(
          [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, QSketch> || std::is_same_v<T, QSketchDyn>) {
              write_file(save_path, serialize(s));
            } else {
              throw std::invalid_argument("--save supports qsketch and qsketch-dyn only");
            }
          },
          sketch.impl());
    }
  }
  Sink sink(out_path, out);
  bench::write_accuracy_csv(sink.get(), report);
  return 0;
}

int cmd_bench(const SketchOptions& sk, const StreamOptions& so, const std::string& mode,
              int repeats, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const TrialConfig config = sk.config();
  std::string label;
  const auto stream = so.load(label, err);
  if (stream.size() < kMinTimedStream) {
    err << "warning: stream has " << stream.size() << " elements; timings below "
        << kMinTimedStream << " are dominated by noise\n";
  }
  bench::pin_to_single_cpu();
  const bench::TimingReport report = mode == "update"
                                         ? bench::run_throughput(config, stream, repeats)
                                         : bench::run_estimation_time(config, stream, repeats);
  Sink sink(out_path, out);
  bench::write_throughput_csv(sink.get(), config, mode, stream.size(), report);
  return 0;
}

struct TruncationOptions {
  double epsilon = 0.001;
  double cardinality = 1e4;
  std::uint64_t samples = 100000;
};

int cmd_diag(const std::string& check, const SketchOptions& sk, const StreamOptions& so,
             const TruncationOptions& tr, const std::string& out_path, std::ostream& out,
             std::ostream& err) {
  if (check == "truncation") {
    const auto report =
        bench::run_truncation_diagnostic(sk.bits, tr.epsilon, tr.cardinality, tr.samples, sk.seed);
    Sink sink(out_path, out);
    bench::write_truncation_csv(sink.get(), report);
    return 0;
  }
  const TrialConfig config = sk.config();
  std::string label;
  const auto stream = so.load(label, err);
  const auto report = bench::run_variance_diagnostic(config, stream);
  Sink sink(out_path, out);
  bench::write_variance_csv(sink.get(), config, report);
  return 0;
}

int cmd_estimate(const std::string& path, std::ostream& out) {
  const auto bytes = read_file(path);
  out.precision(17);
  if (bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, kQSketchDynMagic)) {
    const QSketchDyn s = deserialize_qsketch_dyn(bytes);
    out << "sketch,m,bits,estimate,variance,flag,iterations\n"
        << "qsketch-dyn," << s.size() << ',' << s.bits() << ',' << s.estimate() << ','
        << s.variance_accumulator() << ",ok,0\n";
    return 0;
  }
  const QSketch s = deserialize_qsketch(bytes);
  const EstimateReport r = s.estimate();
  out << "sketch,m,bits,estimate,variance,flag,iterations\n"
      << "qsketch," << s.size() << ',' << s.bits() << ',' << r.estimate << ',' << r.variance
      << ',' << to_string(r.flag) << ',' << r.iterations << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted cardinality sketches: stream generation, accuracy runs, timing and diagnostics"};
  app.require_subcommand(1);

  StreamOptions gen_stream;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Write a synthetic weighted stream as CSV");
  gen->add_option("--dist", gen_stream.dist, "uniform, gauss, gamma or constant");
  gen->add_option("--n", gen_stream.n, "Distinct elements")->required();
  gen->add_option("--params", gen_stream.params, "Distribution parameters");
  gen->add_option("--dup", gen_stream.dup, "Emit every element this many times");
  gen->add_option("--seed", gen_seed, "Stream seed");
  gen->add_option("--out", gen_out, "Output CSV (default stdout)");

  SketchOptions run_sketch;
  StreamOptions run_stream;
  std::string run_out, run_save;
  auto* run_cmd = app.add_subcommand("run", "Accuracy over repeated sketch seeds");
  run_sketch.add_to(*run_cmd, true);
  run_stream.add_to(*run_cmd, true);
  run_cmd->add_option("--out", run_out, "Accuracy CSV (default stdout)");
  run_cmd->add_option("--save", run_save, "Save the run-0 sketch image (qsketch, qsketch-dyn)");

  SketchOptions bench_sketch;
  StreamOptions bench_stream;
  bench_stream.n = kMinTimedStream;
  std::string bench_mode = "update", bench_out;
  int bench_repeats = 5;
  auto* bench_cmd = app.add_subcommand("bench", "Update throughput or estimation time");
  bench_sketch.add_to(*bench_cmd, false);
  bench_stream.add_to(*bench_cmd, false);
  bench_cmd->add_option("--mode", bench_mode, "update or estimate")
      ->check(CLI::IsMember({"update", "estimate"}));
  bench_cmd->add_option("--repeats", bench_repeats,
                        "Timed repeats (update) or samples (estimate); default 5");
  bench_cmd->add_option("--out", bench_out, "Timing CSV (default stdout)");

  SketchOptions diag_sketch;
  diag_sketch.sketch = "qsketch-dyn";
  diag_sketch.runs = 300;
  StreamOptions diag_stream;
  TruncationOptions diag_trunc;
  std::string diag_check, diag_out;
  auto* diag_cmd = app.add_subcommand("diag", "Truncation or variance diagnostic");
  diag_cmd->add_option("--check", diag_check, "truncation or variance")
      ->required()
      ->check(CLI::IsMember({"truncation", "variance"}));
  diag_sketch.add_to(*diag_cmd, true);
  diag_stream.add_to(*diag_cmd, false);
  diag_cmd->add_option("--epsilon", diag_trunc.epsilon, "Truncation tolerance");
  diag_cmd->add_option("--cardinality", diag_trunc.cardinality, "Cardinality for truncation");
  diag_cmd->add_option("--samples", diag_trunc.samples, "Register observations for truncation");
  diag_cmd->add_option("--out", diag_out, "Diagnostic CSV (default stdout)");

  std::string estimate_in;
  auto* est_cmd = app.add_subcommand("estimate", "Estimate from a saved sketch image");
  est_cmd->add_option("--in", estimate_in, "Sketch file written by run --save")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      gen_stream.stream_seed = gen_seed;
      return cmd_gen(gen_stream, gen_out, out);
    }
    if (*run_cmd) return cmd_run(run_sketch, run_stream, run_out, run_save, out, err);
    if (*bench_cmd) {
      return cmd_bench(bench_sketch, bench_stream, bench_mode, bench_repeats, bench_out, out, err);
    }
    if (*diag_cmd) {
      return cmd_diag(diag_check, diag_sketch, diag_stream, diag_trunc, diag_out, out, err);
    }
    return cmd_estimate(estimate_in, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int main(int argc, char** argv) {
  return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace qsketch::cli
