#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "e2dpca/matrix.hpp"
#include "e2dpca/reshape.hpp"

namespace e2dpca {

using Label = int;

enum class Method { pca, two_d, e2d };
enum class Metric { column_sum_l2, frobenius };

std::string_view to_string(Method method) noexcept;
std::string_view to_string(Metric metric) noexcept;
/// "pca"/"eigenface", "twoD"/"2dpca", "e2d"/"e2dpca".
Method parse_method(std::string_view text);
/// "column_sum_L2"/"column_sum_l2", "frobenius".
Metric parse_metric(std::string_view text);

struct ModelConfig {
  Method method = Method::e2d;
  std::size_t r = 1;  // forced to 1 for two_d, ignored for pca
  Direction direction = Direction::row;
  std::size_t d = 1;
  Metric metric = Metric::column_sum_l2;

  /// Stacking actually applied: r = 1 for two_d.
  StackConfig stack() const noexcept;
  /// Canonical form: two_d gets r = 1, pca gets r = 1 and the column direction.
  ModelConfig normalized() const noexcept;
  bool operator==(const ModelConfig&) const = default;
};

/// Top-d eigenvectors (columns of `vectors`) of the scatter a method trains on.
class ProjectionBasis {
 public:
  /// Validates: d >= 1, orthonormal columns (1e-8), eigenvalues descending and >= -1e-8.
  ProjectionBasis(ModelConfig cfg, Shape original_shape, Matrix vectors, std::vector<double> eigenvalues,
                  Matrix mean);

  const ModelConfig& config() const noexcept { return cfg_; }
  Shape original_shape() const noexcept { return original_shape_; }
  /// (r*m) x d for e2d in the column direction, (m*n) x d for pca.
  const Matrix& vectors() const noexcept { return vectors_; }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  const Matrix& mean() const noexcept { return mean_; }
  std::size_t dimension() const noexcept { return eigenvalues_.size(); }

  /// Shape of extract()'s output: ceil(n/r) x d (column), ceil(m/r) x d (row), d x 1 (pca).
  Shape feature_shape() const;
  std::size_t feature_coefficients() const;

  /// The same basis keeping only the first d vectors.
  ProjectionBasis truncated(std::size_t d) const;

  /// transpose(vectors()), kept for contiguous projection.
  const Matrix& axes() const noexcept { return axes_; }
  /// Column-major vectorized mean (pca centering).
  std::span<const double> mean_vector() const noexcept { return mean_vector_; }

 private:
  ModelConfig cfg_;
  Shape original_shape_;
  Matrix vectors_;
  std::vector<double> eigenvalues_;
  Matrix mean_;
  Matrix axes_;
  std::vector<double> mean_vector_;
};

struct FeatureMatrix {
  Matrix matrix;
  std::optional<Label> label;
};

enum class EigenRoute {
  automatic,  // snapshot whenever the Gram matrix is the smaller eigenproblem (always for pca)
  direct,     // diagonalize the scatter itself
  snapshot,   // Gram matrix of the centered (stacked) samples
};

struct TrainOptions {
  double eig_tol = 1e-10;
  EigenRoute route = EigenRoute::automatic;
};

/// Trains the projection basis. Throws DimensionError when d exceeds the
/// eigenproblem size and DataError when every training image is identical.
ProjectionBasis train(std::span<const Matrix> images, const ModelConfig& cfg, const TrainOptions& options = {});

/// Y_k = B^T X_k for e2d/two_d (B the stacked raw image), or the coefficients of
/// the mean-centered vectorized image for pca.
FeatureMatrix extract(const Matrix& image, const ProjectionBasis& basis, std::optional<Label> label = {});

double distance(const FeatureMatrix& a, const FeatureMatrix& b, Metric metric);

struct Match {
  std::size_t index;
  Label label;
  double distance;
};

/// Minimum-distance gallery entry; ties go to the lowest index.
Match nearest(const FeatureMatrix& probe, std::span<const FeatureMatrix> gallery, Metric metric);
Label classify(const FeatureMatrix& probe, std::span<const FeatureMatrix> gallery, Metric metric);

}  // namespace e2dpca
