#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "e2dpca/dataset.hpp"
#include "e2dpca/model.hpp"

namespace e2dpca {

/// One row of a results table. Field order here is the CSV column order.
struct ExperimentResult {
  Method method = Method::e2d;
  Direction direction = Direction::row;
  std::size_t r = 1;
  std::size_t d = 1;
  double accuracy = 0.0;  // correct / probe_count
  std::size_t feature_coefficients = 0;
  double train_time = 0.0;        // seconds: eigendecomposition plus gallery extraction
  double recognition_time = 0.0;  // seconds: extraction + NN search over every probe
  std::size_t probe_count = 0;

  bool operator==(const ExperimentResult&) const = default;
};

struct ExperimentOptions {
  TrainOptions train;
  /// The probe loop runs this many times; recognition_time is the fastest pass.
  int timing_repeats = 1;
};

ExperimentResult run_experiment(const DatasetSplit& data, const ModelConfig& cfg, const ExperimentOptions& options = {});
ExperimentResult run_experiment(const LabeledDataset& ds, const SplitSpec& split_spec, const ModelConfig& cfg,
                                const ExperimentOptions& options = {});

/// One result per config, in grid order. Configs that differ only in d share
/// one training run (the leading-d prefix of a basis is the smaller basis), and
/// each of them reports that run's train_time. A failing config aborts the
/// sweep with an Error naming it.
std::vector<ExperimentResult> sweep(const LabeledDataset& ds, const SplitSpec& split_spec,
                                    std::span<const ModelConfig> grid, const ExperimentOptions& options = {});

/// Cartesian product of the axes in method, direction, r, d order, with the
/// axes a method ignores collapsed (two_d has r = 1; pca has neither r nor direction).
std::vector<ModelConfig> make_grid(std::span<const Method> methods, std::span<const Direction> directions,
                                   std::span<const std::size_t> rs, std::span<const std::size_t> ds, Metric metric);

/// Highest-accuracy result per (method, direction); earliest wins ties.
std::vector<ExperimentResult> top_per_method(std::span<const ExperimentResult> results);

enum class ResultFormat { json, csv };
ResultFormat parse_result_format(std::string_view text);

std::string emit_results(std::span<const ExperimentResult> results, ResultFormat format);
std::vector<ExperimentResult> parse_results(std::string_view text, ResultFormat format);

std::string describe(const ModelConfig& cfg);

}  // namespace e2dpca
