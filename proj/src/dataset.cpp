#include "e2dpca/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "e2dpca/error.hpp"
#include "e2dpca/pgm.hpp"

namespace fs = std::filesystem;

namespace e2dpca {
namespace {

std::optional<std::size_t> parse_index(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) return std::nullopt;
  return value;
}

// subject -> image index -> path
using Layout = std::map<std::size_t, std::map<std::size_t, fs::path>>;

struct ScannedTree {
  Layout layout;
  bool nested = true;
};

ScannedTree scan_tree(const fs::path& root) {
  ScannedTree nested;
  ScannedTree flat{{}, false};
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    const std::string name = entry.path().filename().string();
    if (name.size() < 2 || name[0] != 's') continue;
    if (entry.is_directory()) {
      const auto subject = parse_index(std::string_view(name).substr(1));
      if (!subject) continue;
      auto& images = nested.layout[*subject];
      for (const auto& file : fs::directory_iterator(entry.path())) {
        if (file.path().extension() != ".pgm") continue;
        if (const auto index = parse_index(file.path().stem().string())) images[*index] = file.path();
      }
    } else if (entry.path().extension() == ".pgm") {
      const std::string stem = entry.path().stem().string();
      const auto underscore = stem.find('_');
      if (underscore == std::string::npos) continue;
      const auto subject = parse_index(std::string_view(stem).substr(1, underscore - 1));
      const auto index = parse_index(std::string_view(stem).substr(underscore + 1));
      if (subject && index) flat.layout[*subject][*index] = entry.path();
    }
  }
  if (ec) throw Error("cannot read dataset directory " + root.string() + ": " + ec.message());
  return nested.layout.empty() ? flat : nested;
}

fs::path expected_path(const fs::path& root, bool nested, std::size_t subject, std::size_t index) {
  const std::string s = "s" + std::to_string(subject);
  if (nested) return root / s / (std::to_string(index) + ".pgm");
  return root / (s + "_" + std::to_string(index) + ".pgm");
}

LabeledDataset subset(const LabeledDataset& ds, std::span<const std::size_t> indices) {
  LabeledDataset out;
  out.shape = ds.shape;
  out.images.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    out.images.push_back(ds.images[i]);
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void LabeledDataset::validate() const {
  if (images.empty()) throw DataError("dataset is empty");
  if (images.size() != labels.size()) {
    throw DataError("dataset has " + std::to_string(images.size()) + " images but " + std::to_string(labels.size()) +
                    " labels");
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].rows() != shape.rows || images[i].cols() != shape.cols) {
      throw DataError("dataset image " + std::to_string(i) + " is " + images[i].shape_string() + ", expected " +
                      std::to_string(shape.rows) + "x" + std::to_string(shape.cols));
    }
    for (double v : images[i].data()) {
      if (v < 0.0 || v > 255.0) throw DataError("dataset image " + std::to_string(i) + " has pixel outside [0, 255]");
    }
  }
}

SplitPolicy parse_split_policy(std::string_view text) {
  if (text == "first_k" || text == "first") return SplitPolicy::first_k;
  if (text == "seeded_random" || text == "random") return SplitPolicy::seeded_random;
  throw Error("unknown split policy '" + std::string(text) + "' (expected first_k or seeded_random)");
}

std::string_view to_string(SplitPolicy policy) noexcept {
  return policy == SplitPolicy::first_k ? "first_k" : "seeded_random";
}

LabeledDataset load_orl(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error("dataset directory not found: " + root.string());
  const ScannedTree tree = scan_tree(root);
  if (tree.layout.empty()) throw Error("no s<k>/<j>.pgm or s<k>_<j>.pgm images under " + root.string());

  const std::size_t subjects = tree.layout.rbegin()->first;
  std::size_t per_subject = 0;
  for (const auto& [subject, images] : tree.layout) per_subject = std::max(per_subject, images.rbegin()->first);

  LabeledDataset ds;
  for (std::size_t s = 1; s <= subjects; ++s) {
    const auto found = tree.layout.find(s);
    if (found == tree.layout.end()) {
      throw Error("missing subject " + (tree.nested ? (root / ("s" + std::to_string(s))).string()
                                                    : expected_path(root, false, s, 1).string()));
    }
    for (std::size_t j = 1; j <= per_subject; ++j) {
      const auto image = found->second.find(j);
      if (image == found->second.end()) {
        throw Error("missing image " + expected_path(root, tree.nested, s, j).string());
      }
      Matrix pixels = read_pgm(image->second);
      if (ds.images.empty()) {
        ds.shape = {pixels.rows(), pixels.cols()};
      } else if (pixels.rows() != ds.shape.rows || pixels.cols() != ds.shape.cols) {
        throw Error("inconsistent image shape " + pixels.shape_string() + " in " + image->second.string() +
                    ", expected " + std::to_string(ds.shape.rows) + "x" + std::to_string(ds.shape.cols));
      }
      ds.images.push_back(std::move(pixels));
      ds.labels.push_back(static_cast<Label>(s));
    }
  }
  return ds;
}

std::optional<fs::path> resolve_data_dir(const std::optional<fs::path>& explicit_dir) {
  if (explicit_dir && !explicit_dir->empty()) return explicit_dir;
  if (const char* env = std::getenv(kDataDirEnv); env != nullptr && *env != '\0') return fs::path(env);
  return std::nullopt;
}

DatasetSplit split(const LabeledDataset& ds, const SplitSpec& spec) {
  ds.validate();
  std::vector<Label> order;
  std::map<Label, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto& list = members[ds.labels[i]];
    if (list.empty()) order.push_back(ds.labels[i]);
    list.push_back(i);
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (Label label : order) {
    std::vector<std::size_t> list = members[label];
    if (spec.train_per_subject < 1 || spec.train_per_subject >= list.size()) {
      throw Error("split: train_per_subject=" + std::to_string(spec.train_per_subject) + " invalid for subject " +
                  std::to_string(label) + " with " + std::to_string(list.size()) +
                  " images (need 1 <= k < images per subject)");
    }
    if (spec.policy == SplitPolicy::seeded_random) {
      for (std::size_t i = list.size() - 1; i > 0; --i) std::swap(list[i], list[rng() % (i + 1)]);
      std::sort(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(spec.train_per_subject));
      std::sort(list.begin() + static_cast<std::ptrdiff_t>(spec.train_per_subject), list.end());
    }
    train_idx.insert(train_idx.end(), list.begin(), list.begin() + static_cast<std::ptrdiff_t>(spec.train_per_subject));
    test_idx.insert(test_idx.end(), list.begin() + static_cast<std::ptrdiff_t>(spec.train_per_subject), list.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {subset(ds, train_idx), subset(ds, test_idx)};
}

LabeledDataset synthesize(std::size_t subjects, std::size_t per_subject, Shape shape, std::uint64_t seed,
                          const SynthesisOptions& options) {
  if (subjects < 1 || per_subject < 1 || shape.rows < 1 || shape.cols < 1) {
    throw Error("synthesize: subjects, per_subject and shape must all be at least 1");
  }
  if (options.perturbation_amplitude < 0.0 || options.base_amplitude < 5.0 * options.perturbation_amplitude) {
    throw Error("synthesize: base amplitude must be at least 5x the (non-negative) perturbation amplitude");
  }
  std::mt19937_64 rng(seed);
  const std::size_t pixels = shape.rows * shape.cols;
  LabeledDataset ds;
  ds.shape = shape;
  std::vector<double> base(pixels);
  for (std::size_t s = 0; s < subjects; ++s) {
    for (double& v : base) v = 128.0 + options.base_amplitude * (2.0 * unit_uniform(rng) - 1.0);
    for (std::size_t k = 0; k < per_subject; ++k) {
      std::vector<double> data(pixels);
      for (std::size_t a = 0; a < pixels; ++a) {
        const double noise = options.perturbation_amplitude * (2.0 * unit_uniform(rng) - 1.0);
        data[a] = std::clamp(std::round(base[a] + noise), 0.0, 255.0);
      }
      ds.images.emplace_back(shape.rows, shape.cols, std::move(data));
      ds.labels.push_back(static_cast<Label>(s + 1));
    }
  }
  return ds;
}

}  // namespace e2dpca
