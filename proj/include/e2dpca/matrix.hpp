#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace e2dpca {

/// Dense real matrix, row-major, at least 1x1. Entries are finite.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, double fill);
  /// Takes ownership of `data` (row-major). Throws on size mismatch or non-finite entries.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  /// Nested-list construction for small literals: Matrix{{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  /// Column vector (n x 1).
  static Matrix column(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const;

  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::vector<double> column_values(std::size_t j) const;

  bool operator==(const Matrix& other) const = default;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scale) noexcept;

  std::string shape_string() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double scale);
Matrix operator*(double scale, Matrix a);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

double frobenius_norm(const Matrix& a);
double trace(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
bool all_finite(std::span<const double> values) noexcept;

/// Column-major vectorization: the columns of `a` concatenated top to bottom.
std::vector<double> vectorize_columns(const Matrix& a);

/// Copy of rows [row0, row0 + rows) and columns [col0, col0 + cols).
Matrix submatrix(const Matrix& a, std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols);

}  // namespace e2dpca
