#include "e2dpca/scatter.hpp"

#include <string>
#include <vector>

#include "e2dpca/error.hpp"
#include "e2dpca/kernels.hpp"

namespace e2dpca {
namespace {

void require_uniform(std::span<const Matrix> images, const char* op) {
  if (images.empty()) throw DimensionError(std::string(op) + ": empty image list");
  const Matrix& first = images.front();
  for (std::size_t j = 1; j < images.size(); ++j) {
    if (images[j].rows() != first.rows() || images[j].cols() != first.cols()) {
      throw DimensionError(std::string(op) + ": image " + std::to_string(j) + " is " + images[j].shape_string() +
                           ", expected " + first.shape_string());
    }
  }
}

// (1/divisor) W W^T, filled from the upper triangle.
Matrix row_gram(const Matrix& w, double divisor) {
  const std::size_t n = w.rows();
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      const double v = kernels::dot(w.row(i), w.row(k)) / divisor;
      s(i, k) = v;
      s(k, i) = v;
    }
  }
  return s;
}

}  // namespace

Matrix mean_image(std::span<const Matrix> images) {
  require_uniform(images, "mean_image");
  Matrix mean(images.front().rows(), images.front().cols());
  for (const Matrix& image : images) kernels::axpy(1.0, image.data(), mean.data());
  mean *= 1.0 / static_cast<double>(images.size());
  return mean;
}

Matrix centered_concatenation(std::span<const Matrix> images) {
  const Matrix mean = mean_image(images);
  const std::size_t m = mean.rows();
  const std::size_t n = mean.cols();
  Matrix w(m, n * images.size());
  for (std::size_t j = 0; j < images.size(); ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      kernels::subtract(images[j].row(i), mean.row(i), w.row(i).subspan(j * n, n));
    }
  }
  return w;
}

ScatterMatrix scatter_2d(std::span<const Matrix> images) {
  const Matrix w = centered_concatenation(images);
  return {ScatterKind::two_d, StackConfig{1, Direction::column}, row_gram(w, static_cast<double>(images.size())),
          images.size()};
}

ScatterMatrix scatter_1d(std::span<const Matrix> images) {
  require_uniform(images, "scatter_1d");
  const std::size_t dim = images.front().size();
  if (dim > kDirectScatterMaxDimension) {
    throw DimensionError("scatter_1d: ambient dimension " + std::to_string(dim) + " exceeds the dense limit " +
                         std::to_string(kDirectScatterMaxDimension) + "; use the snapshot method (gram_eig)");
  }
  const Matrix mean = mean_image(images);
  const std::vector<double> mean_vec = vectorize_columns(mean);
  // One column per image: dim x M, so each row holds one coordinate across samples.
  Matrix w(dim, images.size());
  for (std::size_t j = 0; j < images.size(); ++j) {
    const std::vector<double> v = vectorize_columns(images[j]);
    for (std::size_t a = 0; a < dim; ++a) w(a, j) = v[a] - mean_vec[a];
  }
  return {ScatterKind::one_d, StackConfig{images.front().cols(), Direction::column},
          row_gram(w, static_cast<double>(images.size())), images.size()};
}

Matrix block_of_s1d(std::span<const Matrix> images, std::size_t i, std::size_t p) {
  require_uniform(images, "block_of_s1d");
  const std::size_t m = images.front().rows();
  const std::size_t n = images.front().cols();
  if (i >= n || p >= n) {
    throw DimensionError("block_of_s1d: column indices (" + std::to_string(i) + "," + std::to_string(p) +
                         ") out of range for " + std::to_string(n) + " columns");
  }
  const Matrix mean = mean_image(images);
  Matrix block(m, m);
  std::vector<double> bi(m);
  std::vector<double> bp(m);
  for (const Matrix& image : images) {
    for (std::size_t a = 0; a < m; ++a) {
      bi[a] = image(a, i) - mean(a, i);
      bp[a] = image(a, p) - mean(a, p);
    }
    for (std::size_t a = 0; a < m; ++a) kernels::axpy(bi[a], bp, block.row(a));
  }
  block *= 1.0 / static_cast<double>(images.size());
  return block;
}

ScatterMatrix scatter_e2d(std::span<const Matrix> images, const StackConfig& cfg) {
  require_uniform(images, "scatter_e2d");
  std::vector<Matrix> stacked;
  stacked.reserve(images.size());
  for (const Matrix& image : images) stacked.push_back(stack_columns(image, cfg));
  ScatterMatrix s = scatter_2d(stacked);
  s.kind = ScatterKind::e2d;
  s.stack = cfg;
  return s;
}

}  // namespace e2dpca
