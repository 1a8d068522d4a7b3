#pragma once

#include <cstddef>
#include <span>

#include "e2dpca/matrix.hpp"
#include "e2dpca/reshape.hpp"

namespace e2dpca {

enum class ScatterKind { one_d, two_d, e2d };

struct ScatterMatrix {
  ScatterKind kind;
  StackConfig stack;  // r = 1 for two_d; unused for one_d
  Matrix matrix;      // square, symmetric, PSD
  std::size_t sample_count;
};

/// Ambient size above which scatter_1d refuses to build the dense matrix;
/// callers go through the snapshot method (gram_eig) instead.
inline constexpr std::size_t kDirectScatterMaxDimension = 4096;

Matrix mean_image(std::span<const Matrix> images);

/// [A_1 - mean, A_2 - mean, ..., A_M - mean] laid side by side (m x M*n).
/// scatter_2d is (1/M) W W^T of this matrix.
Matrix centered_concatenation(std::span<const Matrix> images);

/// (1/M) sum_j (A_j - mean)(A_j - mean)^T, m x m.
ScatterMatrix scatter_2d(std::span<const Matrix> images);

/// Scatter of the column-major vectorized images, (m*n) x (m*n).
/// Throws DimensionError when m*n exceeds kDirectScatterMaxDimension.
ScatterMatrix scatter_1d(std::span<const Matrix> images);

/// Cross-scatter (1/M) sum_j (A_j(:,i) - mean(:,i))(A_j(:,p) - mean(:,p))^T of
/// image columns i and p (zero-based).
Matrix block_of_s1d(std::span<const Matrix> images, std::size_t i, std::size_t p);

/// scatter_2d of the stacked images {stack_columns(A_j, cfg)}, (r*m) x (r*m)
/// for the column direction.
ScatterMatrix scatter_e2d(std::span<const Matrix> images, const StackConfig& cfg);

}  // namespace e2dpca
