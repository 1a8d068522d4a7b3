#pragma once

#include <cstddef>
#include <string_view>

#include "e2dpca/matrix.hpp"

namespace e2dpca {

enum class Direction { column, row };

std::string_view to_string(Direction direction) noexcept;
/// Accepts "column"/"row" (and the aliases "col", "alternative" for column).
Direction parse_direction(std::string_view text);

/// Stacking radius r plus the image axis it operates on. The row direction is
/// the column construction applied to the transposed image.
struct StackConfig {
  std::size_t r = 1;
  Direction direction = Direction::column;
};

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool operator==(const Shape&) const = default;
};

/// Throws DimensionError unless 1 <= r <= (cols for column, rows for row) of `image`.
void validate(const StackConfig& cfg, Shape image);

/// Shape of stack_columns' output for an image of shape `image`.
Shape stacked_shape(Shape image, const StackConfig& cfg);

/// Appends zero columns on the right until the column count is a multiple of r.
Matrix pad_columns(const Matrix& a, std::size_t r);

/// Stacks r adjacent (zero-padded) columns into one: output column j is
/// [A(:, r*j); A(:, r*j + 1); ...; A(:, r*j + r - 1)], shape (r*m) x ceil(n/r).
/// Direction::row applies the same construction to transpose(a).
Matrix stack_columns(const Matrix& a, const StackConfig& cfg);

/// Inverse of stack_columns for an original_rows x original_cols image; drops the padding.
Matrix unstack_columns(const Matrix& b, std::size_t original_rows, std::size_t original_cols, const StackConfig& cfg);

/// transpose(stack_columns(a, cfg)) without the intermediate copy: row j is the
/// j-th stacked column, laid out contiguously.
Matrix stacked_columns_as_rows(const Matrix& a, const StackConfig& cfg);

}  // namespace e2dpca
