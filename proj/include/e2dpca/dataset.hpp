#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "e2dpca/matrix.hpp"
#include "e2dpca/model.hpp"
#include "e2dpca/reshape.hpp"

namespace e2dpca {

/// Environment variable consulted when no data directory is given explicitly.
inline constexpr const char* kDataDirEnv = "ORL_DATA_DIR";

struct LabeledDataset {
  std::vector<Matrix> images;
  std::vector<Label> labels;  // parallel to images
  Shape shape;

  std::size_t size() const noexcept { return images.size(); }
  /// Throws DataError unless non-empty, parallel, uniformly shaped, pixels in [0, 255].
  void validate() const;
};

enum class SplitPolicy { first_k, seeded_random };

struct SplitSpec {
  std::size_t train_per_subject = 5;
  SplitPolicy policy = SplitPolicy::first_k;
  std::uint64_t seed = 0;
};

SplitPolicy parse_split_policy(std::string_view text);
std::string_view to_string(SplitPolicy policy) noexcept;

struct DatasetSplit {
  LabeledDataset train;
  LabeledDataset test;
};

/// Loads an ORL-style tree: subject folders s1..sK holding 1.pgm..J.pgm, or
/// flat files s<k>_<j>.pgm. Subjects and images must be numbered without gaps
/// and every subject must have the same image count. Order is subject
/// ascending, then image index ascending; labels are the subject numbers.
LabeledDataset load_orl(const std::filesystem::path& root);

/// `explicit_dir` when set, otherwise $ORL_DATA_DIR, otherwise nullopt.
std::optional<std::filesystem::path> resolve_data_dir(const std::optional<std::filesystem::path>& explicit_dir);

/// Per subject (in order of first appearance), the first k images go to
/// train (first_k) or a seeded Fisher-Yates shuffle picks them (seeded_random);
/// within each side, dataset order is kept.
DatasetSplit split(const LabeledDataset& ds, const SplitSpec& spec);

struct SynthesisOptions {
  double base_amplitude = 100.0;         // base pixels in 128 +/- this
  double perturbation_amplitude = 10.0;  // per-sample noise in +/- this
};

/// Labels 1..subjects; each subject is a random base image plus independent
/// per-sample perturbations, rounded to integers. Deterministic for a seed
/// across platforms: raw std::mt19937_64 output, mapped to [0, 1) by hand.
LabeledDataset synthesize(std::size_t subjects, std::size_t per_subject, Shape shape, std::uint64_t seed,
                          const SynthesisOptions& options = {});

}  // namespace e2dpca
