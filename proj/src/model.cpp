#include "e2dpca/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "e2dpca/eigen.hpp"
#include "e2dpca/error.hpp"
#include "e2dpca/kernels.hpp"
#include "e2dpca/scatter.hpp"

namespace e2dpca {
namespace {

constexpr double kBasisOrthonormalityTolerance = 1e-8;

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " + b.shape_string());
  }
}

ProjectionBasis assemble(const ModelConfig& cfg, Shape shape, const std::vector<EigenPair>& pairs, Matrix mean) {
  const std::size_t p = pairs.front().vector.size();
  Matrix vectors(p, cfg.d);
  std::vector<double> values(cfg.d);
  const double scale = std::max(1.0, std::abs(pairs.front().value));
  for (std::size_t k = 0; k < cfg.d; ++k) {
    double value = pairs[k].value;
    // Rounding can leave the null part of a PSD spectrum slightly negative.
    if (value < 0.0 && value >= -1e-8 * scale) value = 0.0;
    values[k] = value;
    for (std::size_t a = 0; a < p; ++a) vectors(a, k) = pairs[k].vector[a];
  }
  return ProjectionBasis(cfg, shape, std::move(vectors), std::move(values), std::move(mean));
}

ProjectionBasis train_pca(std::span<const Matrix> images, const ModelConfig& cfg, const TrainOptions& options) {
  const Shape shape{images.front().rows(), images.front().cols()};
  const std::size_t dim = shape.rows * shape.cols;
  const std::size_t limit = std::min(images.size(), dim);
  if (cfg.d > limit) {
    throw DimensionError("train: d=" + std::to_string(cfg.d) + " exceeds the pca eigenproblem size " +
                         std::to_string(limit) + " (min of sample count and pixel count)");
  }
  Matrix mean = mean_image(images);
  const std::vector<double> mean_vec = vectorize_columns(mean);
  Matrix centered(dim, images.size());
  double largest = 0.0;
  for (std::size_t j = 0; j < images.size(); ++j) {
    const std::vector<double> v = vectorize_columns(images[j]);
    for (std::size_t a = 0; a < dim; ++a) {
      centered(a, j) = v[a] - mean_vec[a];
      largest = std::max(largest, std::abs(centered(a, j)));
    }
  }
  if (largest == 0.0) throw DataError("train: zero scatter, all training images are identical");

  std::vector<EigenPair> pairs;
  if (options.route == EigenRoute::direct) {
    pairs = sym_eig(scatter_1d(images).matrix, options.eig_tol);
  } else {
    GramOptions gram;
    gram.divisor = images.size();
    gram.max_pairs = cfg.d;
    pairs = gram_eig(centered, options.eig_tol, gram);
  }
  return assemble(cfg, shape, pairs, std::move(mean));
}

ProjectionBasis train_stacked(std::span<const Matrix> images, const ModelConfig& cfg, const TrainOptions& options) {
  const Shape shape{images.front().rows(), images.front().cols()};
  const StackConfig stack = cfg.stack();
  const Shape stacked = stacked_shape(shape, stack);
  if (cfg.d > stacked.rows) {
    throw DimensionError("train: d=" + std::to_string(cfg.d) + " exceeds the scatter dimension " +
                         std::to_string(stacked.rows) + " for r=" + std::to_string(stack.r));
  }
  std::vector<Matrix> stacked_images;
  stacked_images.reserve(images.size());
  for (const Matrix& image : images) stacked_images.push_back(stack_columns(image, stack));
  const Matrix centered = centered_concatenation(stacked_images);
  const auto data = centered.data();
  if (std::all_of(data.begin(), data.end(), [](double v) { return v == 0.0; })) {
    throw DataError("train: zero scatter, all training images are identical");
  }

  const std::size_t gram_size = centered.cols();
  bool snapshot = false;
  switch (options.route) {
    case EigenRoute::automatic: snapshot = gram_size < stacked.rows && cfg.d <= gram_size; break;
    case EigenRoute::direct: snapshot = false; break;
    case EigenRoute::snapshot:
      if (cfg.d > std::min(gram_size, stacked.rows)) {
        throw DimensionError("train: d=" + std::to_string(cfg.d) + " exceeds the snapshot eigenproblem size");
      }
      snapshot = true;
      break;
  }

  std::vector<EigenPair> pairs;
  if (snapshot) {
    GramOptions gram;
    gram.divisor = images.size();
    gram.max_pairs = cfg.d;
    pairs = gram_eig(centered, options.eig_tol, gram);
  } else {
    // Same matrix scatter_e2d builds, without stacking the images a second time.
    Matrix s(stacked.rows, stacked.rows);
    const double m = static_cast<double>(images.size());
    for (std::size_t i = 0; i < stacked.rows; ++i) {
      for (std::size_t k = i; k < stacked.rows; ++k) {
        const double v = kernels::dot(centered.row(i), centered.row(k)) / m;
        s(i, k) = v;
        s(k, i) = v;
      }
    }
    pairs = sym_eig(s, options.eig_tol);
  }
  return assemble(cfg, shape, pairs, mean_image(images));
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::pca: return "pca";
    case Method::two_d: return "twoD";
    case Method::e2d: return "e2d";
  }
  return "unknown";
}

std::string_view to_string(Metric metric) noexcept {
  return metric == Metric::column_sum_l2 ? "column_sum_L2" : "frobenius";
}

Method parse_method(std::string_view text) {
  if (text == "pca" || text == "eigenface") return Method::pca;
  if (text == "twoD" || text == "2dpca" || text == "2d") return Method::two_d;
  if (text == "e2d" || text == "e2dpca") return Method::e2d;
  throw Error("unknown method '" + std::string(text) + "' (expected pca, twoD or e2d)");
}

Metric parse_metric(std::string_view text) {
  if (text == "column_sum_L2" || text == "column_sum_l2") return Metric::column_sum_l2;
  if (text == "frobenius") return Metric::frobenius;
  throw Error("unknown metric '" + std::string(text) + "' (expected column_sum_L2 or frobenius)");
}

StackConfig ModelConfig::stack() const noexcept {
  return StackConfig{method == Method::e2d ? r : 1, direction};
}

ModelConfig ModelConfig::normalized() const noexcept {
  ModelConfig out = *this;
  if (method != Method::e2d) out.r = 1;
  if (method == Method::pca) out.direction = Direction::column;
  return out;
}

ProjectionBasis::ProjectionBasis(ModelConfig cfg, Shape original_shape, Matrix vectors,
                                 std::vector<double> eigenvalues, Matrix mean)
    : cfg_(cfg.normalized()),
      original_shape_(original_shape),
      vectors_(std::move(vectors)),
      eigenvalues_(std::move(eigenvalues)),
      mean_(std::move(mean)),
      axes_(transpose(vectors_)),
      mean_vector_(vectorize_columns(mean_)) {
  const std::size_t d = eigenvalues_.size();
  if (d == 0 || vectors_.cols() != d) {
    throw DimensionError("ProjectionBasis: " + std::to_string(d) + " eigenvalues for a " + vectors_.shape_string() +
                         " basis");
  }
  cfg_.d = d;
  if (mean_.rows() != original_shape_.rows || mean_.cols() != original_shape_.cols) {
    throw DimensionError("ProjectionBasis: mean image shape " + mean_.shape_string() +
                         " differs from the original image shape");
  }
  const std::size_t expected_rows = cfg_.method == Method::pca ? original_shape_.rows * original_shape_.cols
                                                              : stacked_shape(original_shape_, cfg_.stack()).rows;
  if (vectors_.rows() != expected_rows) {
    throw DimensionError("ProjectionBasis: basis has " + std::to_string(vectors_.rows()) + " rows, expected " +
                         std::to_string(expected_rows));
  }
  for (std::size_t k = 0; k < d; ++k) {
    if (eigenvalues_[k] < -1e-8) throw DataError("ProjectionBasis: negative eigenvalue");
    if (k > 0 && eigenvalues_[k] > eigenvalues_[k - 1]) throw DataError("ProjectionBasis: eigenvalues not descending");
    for (std::size_t l = k; l < d; ++l) {
      const double expected = k == l ? 1.0 : 0.0;
      if (std::abs(kernels::dot(axes_.row(k), axes_.row(l)) - expected) > kBasisOrthonormalityTolerance) {
        throw DataError("ProjectionBasis: basis vectors are not orthonormal");
      }
    }
  }
}

Shape ProjectionBasis::feature_shape() const {
  if (cfg_.method == Method::pca) return {dimension(), 1};
  return {stacked_shape(original_shape_, cfg_.stack()).cols, dimension()};
}

std::size_t ProjectionBasis::feature_coefficients() const {
  const Shape s = feature_shape();
  return s.rows * s.cols;
}

ProjectionBasis ProjectionBasis::truncated(std::size_t d) const {
  if (d < 1 || d > dimension()) {
    throw DimensionError("truncated: d=" + std::to_string(d) + " outside [1, " + std::to_string(dimension()) + "]");
  }
  ModelConfig cfg = cfg_;
  cfg.d = d;
  return ProjectionBasis(cfg, original_shape_, submatrix(vectors_, 0, 0, vectors_.rows(), d),
                         std::vector<double>(eigenvalues_.begin(), eigenvalues_.begin() + static_cast<std::ptrdiff_t>(d)),
                         mean_);
}

ProjectionBasis train(std::span<const Matrix> images, const ModelConfig& cfg, const TrainOptions& options) {
  if (images.empty()) throw DimensionError("train: empty training set");
  if (cfg.d < 1) throw DimensionError("train: d must be at least 1");
  for (std::size_t j = 1; j < images.size(); ++j) {
    if (images[j].rows() != images[0].rows() || images[j].cols() != images[0].cols()) {
      throw DimensionError("train: image " + std::to_string(j) + " is " + images[j].shape_string() + ", expected " +
                           images[0].shape_string());
    }
  }
  const ModelConfig normalized = cfg.normalized();
  if (normalized.method == Method::pca) return train_pca(images, normalized, options);
  return train_stacked(images, normalized, options);
}

FeatureMatrix extract(const Matrix& image, const ProjectionBasis& basis, std::optional<Label> label) {
  const Shape shape = basis.original_shape();
  if (image.rows() != shape.rows || image.cols() != shape.cols) {
    throw DimensionError("extract: image is " + image.shape_string() + ", basis expects " +
                         std::to_string(shape.rows) + "x" + std::to_string(shape.cols));
  }
  const Matrix& axes = basis.axes();
  const std::size_t d = basis.dimension();
  if (basis.config().method == Method::pca) {
    std::vector<double> x = vectorize_columns(image);
    kernels::subtract(x, basis.mean_vector(), x);
    Matrix y(d, 1);
    for (std::size_t k = 0; k < d; ++k) y(k, 0) = kernels::dot(axes.row(k), x);
    return {std::move(y), label};
  }
  const Matrix rows = stacked_columns_as_rows(image, basis.config().stack());
  Matrix y(rows.rows(), d);
  for (std::size_t j = 0; j < rows.rows(); ++j) {
    for (std::size_t k = 0; k < d; ++k) y(j, k) = kernels::dot(rows.row(j), axes.row(k));
  }
  return {std::move(y), label};
}

double distance(const FeatureMatrix& a, const FeatureMatrix& b, Metric metric) {
  require_same_shape(a.matrix, b.matrix, "distance");
  if (metric == Metric::frobenius) return std::sqrt(kernels::squared_distance(a.matrix.data(), b.matrix.data()));
  std::vector<double> column_sq(a.matrix.cols(), 0.0);
  for (std::size_t j = 0; j < a.matrix.rows(); ++j) {
    kernels::accumulate_squared_diff(a.matrix.row(j), b.matrix.row(j), column_sq);
  }
  double sum = 0.0;
  for (double v : column_sq) sum += std::sqrt(v);
  return sum;
}

Match nearest(const FeatureMatrix& probe, std::span<const FeatureMatrix> gallery, Metric metric) {
  if (gallery.empty()) throw DimensionError("classify: empty gallery");
  Match best{0, 0, 0.0};
  for (std::size_t i = 0; i < gallery.size(); ++i) {
    const double dist = distance(probe, gallery[i], metric);
    if (i == 0 || dist < best.distance) {
      if (!gallery[i].label) throw DataError("classify: gallery entry " + std::to_string(i) + " has no label");
      best = Match{i, *gallery[i].label, dist};
    }
  }
  return best;
}

Label classify(const FeatureMatrix& probe, std::span<const FeatureMatrix> gallery, Metric metric) {
  return nearest(probe, gallery, metric).label;
}

}  // namespace e2dpca
