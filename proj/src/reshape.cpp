#include "e2dpca/reshape.hpp"

#include <algorithm>
#include <string>

#include "e2dpca/error.hpp"

namespace e2dpca {
namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// Column-direction stacking of an m x n matrix.
Matrix stack_along_columns(const Matrix& a, std::size_t r) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t groups = ceil_div(n, r);
  Matrix b(r * m, groups);
  for (std::size_t j = 0; j < groups; ++j) {
    for (std::size_t t = 0; t < r; ++t) {
      const std::size_t src = r * j + t;
      if (src >= n) break;
      for (std::size_t i = 0; i < m; ++i) b(t * m + i, j) = a(i, src);
    }
  }
  return b;
}

Matrix unstack_along_columns(const Matrix& b, std::size_t m, std::size_t n, std::size_t r) {
  Matrix a(m, n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t j = col / r;
    const std::size_t t = col % r;
    for (std::size_t i = 0; i < m; ++i) a(i, col) = b(t * m + i, j);
  }
  return a;
}

}  // namespace

std::string_view to_string(Direction direction) noexcept {
  return direction == Direction::column ? "column" : "row";
}

Direction parse_direction(std::string_view text) {
  if (text == "column" || text == "col" || text == "alternative") return Direction::column;
  if (text == "row") return Direction::row;
  throw Error("unknown direction '" + std::string(text) + "' (expected row or column)");
}

void validate(const StackConfig& cfg, Shape image) {
  const std::size_t limit = cfg.direction == Direction::column ? image.cols : image.rows;
  if (cfg.r < 1 || cfg.r > limit) {
    throw DimensionError("stacking radius r=" + std::to_string(cfg.r) + " outside [1, " + std::to_string(limit) +
                         "] for " + std::string(to_string(cfg.direction)) + " direction on a " +
                         std::to_string(image.rows) + "x" + std::to_string(image.cols) + " image");
  }
}

Shape stacked_shape(Shape image, const StackConfig& cfg) {
  validate(cfg, image);
  if (cfg.direction == Direction::column) return {cfg.r * image.rows, ceil_div(image.cols, cfg.r)};
  return {cfg.r * image.cols, ceil_div(image.rows, cfg.r)};
}

Matrix pad_columns(const Matrix& a, std::size_t r) {
  if (r < 1) throw DimensionError("pad_columns: r must be at least 1");
  const std::size_t padded = r * ceil_div(a.cols(), r);
  if (padded == a.cols()) return a;
  Matrix out(a.rows(), padded);
  for (std::size_t i = 0; i < a.rows(); ++i) std::copy(a.row(i).begin(), a.row(i).end(), out.row(i).begin());
  return out;
}

Matrix stack_columns(const Matrix& a, const StackConfig& cfg) {
  validate(cfg, {a.rows(), a.cols()});
  if (cfg.direction == Direction::column) return stack_along_columns(a, cfg.r);
  return stack_along_columns(transpose(a), cfg.r);
}

Matrix unstack_columns(const Matrix& b, std::size_t original_rows, std::size_t original_cols,
                       const StackConfig& cfg) {
  const Shape expected = stacked_shape({original_rows, original_cols}, cfg);
  if (b.rows() != expected.rows || b.cols() != expected.cols) {
    throw DimensionError("unstack_columns: " + b.shape_string() + " is not the stacked shape " +
                         std::to_string(expected.rows) + "x" + std::to_string(expected.cols) + " of a " +
                         std::to_string(original_rows) + "x" + std::to_string(original_cols) + " image with r=" +
                         std::to_string(cfg.r));
  }
  if (cfg.direction == Direction::column) return unstack_along_columns(b, original_rows, original_cols, cfg.r);
  return transpose(unstack_along_columns(b, original_cols, original_rows, cfg.r));
}

Matrix stacked_columns_as_rows(const Matrix& a, const StackConfig& cfg) {
  const Shape shape = stacked_shape({a.rows(), a.cols()}, cfg);
  Matrix out(shape.cols, shape.rows);
  const std::size_t r = cfg.r;
  if (cfg.direction == Direction::row) {
    // A stacked column of transpose(a) is r consecutive rows of a.
    const std::size_t total = a.size();
    const std::size_t chunk = r * a.cols();
    for (std::size_t j = 0; j < shape.cols; ++j) {
      const std::size_t begin = j * chunk;
      const std::size_t end = std::min(begin + chunk, total);
      std::copy(a.data().begin() + static_cast<std::ptrdiff_t>(begin),
                a.data().begin() + static_cast<std::ptrdiff_t>(end), out.row(j).begin());
    }
    return out;
  }
  const std::size_t m = a.rows();
  for (std::size_t j = 0; j < shape.cols; ++j) {
    auto dst = out.row(j);
    for (std::size_t t = 0; t < r; ++t) {
      const std::size_t src = r * j + t;
      if (src >= a.cols()) break;
      for (std::size_t i = 0; i < m; ++i) dst[t * m + i] = a(i, src);
    }
  }
  return out;
}

}  // namespace e2dpca
