// Batch experiment runner: `run` evaluates one configuration, `sweep` a grid.
//
//   e2dpca run   --data-dir orl --method e2d --direction row --r 21 --d 20
//   e2dpca sweep --data-dir orl --method e2d --direction row,column --r 1-24 --d 5,10,20
//
// The data directory falls back to $ORL_DATA_DIR; --synthetic SxKxMxN swaps in
// a generated dataset of S subjects with K images of M x N pixels.

#include <CLI11.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "e2dpca/dataset.hpp"
#include "e2dpca/error.hpp"
#include "e2dpca/experiment.hpp"
#include "e2dpca/kernels.hpp"

namespace {

using namespace e2dpca;

struct CommonArgs {
  std::string data_dir;
  std::string synthetic;
  std::string metric = "column_sum_L2";
  std::size_t train_per_subject = 5;
  std::string split_policy = "first_k";
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string output;
  std::string kernels;
  int timing_repeats = 1;
  bool summary = false;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text) {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

std::size_t to_count(const std::string& text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw Error("expected a count, got '" + text + "'");
  return v;
}

// "1,2,5-8" -> {1, 2, 5, 6, 7, 8}
std::vector<std::size_t> parse_counts(const std::string& text) {
  std::vector<std::size_t> out;
  for (const std::string& item : split_list(text)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(to_count(item));
      continue;
    }
    const std::size_t lo = to_count(item.substr(0, dash));
    const std::size_t hi = to_count(item.substr(dash + 1));
    if (hi < lo) throw Error("empty range '" + item + "'");
    for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw Error("empty list");
  return out;
}

LabeledDataset load_dataset(const CommonArgs& args) {
  if (!args.synthetic.empty()) {
    std::vector<std::size_t> dims;
    std::string item;
    for (char c : args.synthetic + "x") {
      if (c == 'x') {
        dims.push_back(to_count(item));
        item.clear();
      } else {
        item += c;
      }
    }
    if (dims.size() != 4) throw Error("--synthetic expects SUBJECTSxPERxROWSxCOLS, got '" + args.synthetic + "'");
    return synthesize(dims[0], dims[1], {dims[2], dims[3]}, args.seed);
  }
  std::optional<std::filesystem::path> given;
  if (!args.data_dir.empty()) given = args.data_dir;
  const auto dir = resolve_data_dir(given);
  if (!dir) throw Error(std::string("no dataset: pass --data-dir, --synthetic, or set ") + kDataDirEnv);
  return load_orl(*dir);
}

void emit(const CommonArgs& args, const std::vector<ExperimentResult>& results) {
  const ResultFormat format = parse_result_format(args.format);
  const std::string text = emit_results(results, format);
  if (args.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.output, std::ios::binary);
    if (!out) throw Error("cannot open " + args.output + " for writing");
    out << text;
  }
  if (args.summary) {
    std::cerr << "top accuracy per method:\n";
    for (const ExperimentResult& r : top_per_method(results)) {
      std::cerr << "  " << to_string(r.method) << " " << to_string(r.direction) << " r=" << r.r << " d=" << r.d
                << "  accuracy=" << r.accuracy << "  coefficients=" << r.feature_coefficients << "\n";
    }
  }
}

void add_common(CLI::App& cmd, CommonArgs& args) {
  cmd.add_option("--data-dir", args.data_dir, std::string("ORL root (default: $") + kDataDirEnv + ")");
  cmd.add_option("--synthetic", args.synthetic, "Use a synthetic dataset SUBJECTSxPERxROWSxCOLS instead");
  cmd.add_option("--metric", args.metric, "column_sum_L2 or frobenius")->capture_default_str();
  cmd.add_option("--train-per-subject", args.train_per_subject, "Training images per subject")->capture_default_str();
  cmd.add_option("--split-policy", args.split_policy, "first_k or seeded_random")->capture_default_str();
  cmd.add_option("--seed", args.seed, "Seed for seeded_random splits and --synthetic")->capture_default_str();
  cmd.add_option("--format", args.format, "json or csv")->capture_default_str();
  cmd.add_option("--output", args.output, "Write results here instead of stdout");
  cmd.add_option("--kernels", args.kernels, "Pin the kernel ISA: scalar or avx2");
  cmd.add_option("--timing-repeats", args.timing_repeats, "Probe-loop repetitions, fastest reported")
      ->capture_default_str();
  cmd.add_flag("--summary", args.summary, "Print the top accuracy per method to stderr");
}

SplitSpec split_spec(const CommonArgs& args) {
  return SplitSpec{args.train_per_subject, parse_split_policy(args.split_policy), args.seed};
}

void configure_kernels(const CommonArgs& args) {
  if (args.kernels == "scalar") kernels::set_isa(kernels::Isa::scalar);
  else if (args.kernels == "avx2") kernels::set_isa(kernels::Isa::avx2);
  else if (!args.kernels.empty()) throw Error("unknown kernel ISA '" + args.kernels + "'");
  std::cerr << "kernels=" << kernels::isa_name(kernels::active_isa()) << " threads=1\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PCA / 2DPCA / E2DPCA face-recognition experiments"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string run_method = "e2d";
  std::string run_direction = "row";
  std::size_t run_r = 1;
  std::size_t run_d = 1;
  auto* run = app.add_subcommand("run", "Train and evaluate one configuration");
  add_common(*run, run_args);
  run->add_option("--method", run_method, "pca, twoD or e2d")->capture_default_str();
  run->add_option("--direction", run_direction, "row or column")->capture_default_str();
  run->add_option("--r", run_r, "Stacking radius (e2d)")->capture_default_str();
  run->add_option("--d", run_d, "Retained eigenvectors")->capture_default_str();

  CommonArgs sweep_args;
  std::string sweep_methods = "e2d";
  std::string sweep_directions = "row";
  std::string sweep_rs = "1";
  std::string sweep_ds = "1";
  auto* sw = app.add_subcommand("sweep", "Evaluate the cartesian grid of the listed settings");
  add_common(*sw, sweep_args);
  sw->add_option("--method", sweep_methods, "Comma list of methods")->capture_default_str();
  sw->add_option("--direction", sweep_directions, "Comma list of directions")->capture_default_str();
  sw->add_option("--r", sweep_rs, "Radii, e.g. 1-8,21,23")->capture_default_str();
  sw->add_option("--d", sweep_ds, "Dimensions, e.g. 5,10,20")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      configure_kernels(run_args);
      const LabeledDataset ds = load_dataset(run_args);
      const ModelConfig cfg{parse_method(run_method), run_r, parse_direction(run_direction), run_d,
                            parse_metric(run_args.metric)};
      ExperimentOptions options;
      options.timing_repeats = run_args.timing_repeats;
      emit(run_args, {run_experiment(ds, split_spec(run_args), cfg, options)});
    } else {
      configure_kernels(sweep_args);
      const LabeledDataset ds = load_dataset(sweep_args);
      std::vector<Method> methods;
      for (const auto& m : split_list(sweep_methods)) methods.push_back(parse_method(m));
      std::vector<Direction> directions;
      for (const auto& d : split_list(sweep_directions)) directions.push_back(parse_direction(d));
      const auto rs = parse_counts(sweep_rs);
      const auto dims = parse_counts(sweep_ds);
      const auto grid = make_grid(methods, directions, rs, dims, parse_metric(sweep_args.metric));
      ExperimentOptions options;
      options.timing_repeats = sweep_args.timing_repeats;
      emit(sweep_args, sweep(ds, split_spec(sweep_args), grid, options));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
