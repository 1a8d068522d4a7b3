#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "e2dpca/eigen.hpp"
#include "e2dpca/error.hpp"
#include "e2dpca/matrix.hpp"
#include "oracles.hpp"

using namespace e2dpca;

TEST_CASE("matrix construction and invariants") {
  const Matrix a{{1, 2, 3}, {4, 5, 6}};
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 3);
  CHECK(a(1, 2) == 6);
  CHECK(a.at(0, 1) == 2);
  CHECK_THROWS_AS(a.at(2, 0), DimensionError);
  CHECK(a.column_values(1) == std::vector<double>{2, 5});
  CHECK(a.shape_string() == "2x3");

  CHECK_THROWS_AS(Matrix(0, 3), DimensionError);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(Matrix(1, 2, std::vector<double>{1, NAN}), DataError);
  CHECK_THROWS_AS(Matrix(1, 1, INFINITY), DataError);
  CHECK(Matrix::identity(3)(2, 2) == 1.0);
  CHECK(Matrix::identity(3)(0, 2) == 0.0);
}

TEST_CASE("matmul small examples") {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{5, 6}, {7, 8}};
  CHECK(matmul(a, b) == Matrix{{19, 22}, {43, 50}});
  CHECK(matmul(Matrix::identity(2), a) == a);

  const Matrix row{{1, 2, 3}};
  const Matrix col{{4}, {5}, {6}};
  CHECK(matmul(row, col) == Matrix{{32}});
  CHECK(matmul(col, row) == Matrix{{4, 8, 12}, {5, 10, 15}, {6, 12, 18}});
}

TEST_CASE("matmul rejects mismatched shapes and names both") {
  const Matrix a(2, 3);
  const Matrix b(2, 3);
  try {
    (void)matmul(a, b);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string what = e.what();
    CHECK(what.find("2x3") != std::string::npos);
  }
}

TEST_CASE("matmul matches the triple-loop oracle") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> dim(1, 19);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = dim(rng), k = dim(rng), n = dim(rng);
    const Matrix a = oracle::random_matrix(rng, m, k, -1, 1);
    const Matrix b = oracle::random_matrix(rng, k, n, -1, 1);
    CHECK(oracle::max_abs_diff(matmul(a, b), oracle::naive_matmul(a, b)) < 1e-13);
  }
}

TEST_CASE("transpose, norms and vectorization") {
  const Matrix a{{1, 2, 3}, {4, 5, 6}};
  CHECK(transpose(a) == Matrix{{1, 4}, {2, 5}, {3, 6}});
  CHECK(transpose(transpose(a)) == a);
  CHECK(frobenius_norm(Matrix{{3, 4}}) == doctest::Approx(5.0));
  CHECK(trace(Matrix{{1, 9}, {9, 2}}) == 3.0);
  CHECK_THROWS_AS(trace(a), DimensionError);
  CHECK(vectorize_columns(a) == std::vector<double>{1, 4, 2, 5, 3, 6});
  CHECK(submatrix(a, 0, 1, 2, 2) == Matrix{{2, 3}, {5, 6}});
  CHECK_THROWS_AS(submatrix(a, 1, 1, 2, 2), DimensionError);

  std::mt19937_64 rng(2);
  const Matrix x = oracle::random_matrix(rng, 5, 7, -1, 1);
  const Matrix y = oracle::random_matrix(rng, 7, 3, -1, 1);
  CHECK(oracle::max_abs_diff(transpose(matmul(x, y)), matmul(transpose(y), transpose(x))) < 1e-13);
}

TEST_CASE("sym_eig of the identity and a diagonal") {
  for (EigenMethod method : {EigenMethod::jacobi, EigenMethod::tridiagonal_ql}) {
    const auto id = sym_eig(Matrix::identity(4), 1e-12, method);
    REQUIRE(id.size() == 4);
    for (const EigenPair& p : id) CHECK(p.value == doctest::Approx(1.0));
    CHECK(max_orthonormality_error(id) < 1e-12);

    const auto diag = sym_eig(Matrix{{1, 0}, {0, 3}}, 1e-12, method);
    CHECK(diag[0].value == doctest::Approx(3.0));
    CHECK(diag[1].value == doctest::Approx(1.0));
    CHECK(oracle::distance_up_to_sign(diag[0].vector, {0, 1}) < 1e-12);
    CHECK(oracle::distance_up_to_sign(diag[1].vector, {1, 0}) < 1e-12);
    CHECK(diag[0].vector[1] > 0);
  }
}

TEST_CASE("sym_eig of a 2x2 with known closed form") {
  // [[2,1],[1,2]] has eigenpairs 3 -> (1,1)/sqrt2 and 1 -> (1,-1)/sqrt2.
  const auto pairs = sym_eig(Matrix{{2, 1}, {1, 2}}, 1e-12);
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(pairs[0].value == doctest::Approx(3.0));
  CHECK(pairs[1].value == doctest::Approx(1.0));
  CHECK(oracle::distance_up_to_sign(pairs[0].vector, {h, h}) < 1e-12);
  CHECK(oracle::distance_up_to_sign(pairs[1].vector, {h, -h}) < 1e-12);
}

TEST_CASE("sym_eig reconstructs random symmetric matrices") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1u, 2u, 6u, 17u, 64u, 130u, 200u}) {
    const Matrix s = oracle::random_symmetric(rng, n);
    const auto pairs = sym_eig(s, 1e-12);
    REQUIRE(pairs.size() == n);
    const double scale = 1.0 + frobenius_norm(s);
    CHECK(max_residual(s, pairs) <= 1e-8 * scale);
    CHECK(max_orthonormality_error(pairs) <= 1e-8);
    CHECK(frobenius_norm(reconstruct(pairs) - s) <= 1e-8 * scale);
    for (std::size_t k = 1; k < n; ++k) CHECK(pairs[k - 1].value >= pairs[k].value);
  }
}

TEST_CASE("Jacobi and tridiagonal QL agree") {
  std::mt19937_64 rng(4);
  for (std::size_t n : {3u, 10u, 33u}) {
    const Matrix s = oracle::random_symmetric(rng, n, 5.0);
    const auto jac = sym_eig(s, 1e-13, EigenMethod::jacobi);
    const auto ql = sym_eig(s, 1e-13, EigenMethod::tridiagonal_ql);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(jac[k].value == doctest::Approx(ql[k].value).epsilon(1e-10));
      // Signs are canonical, so the vectors agree outright for simple spectra.
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(jac[k].vector[i] - ql[k].vector[i]));
      CHECK(worst < 1e-7);
    }
  }
}

TEST_CASE("sym_eig rejects bad input") {
  CHECK_THROWS_AS(sym_eig(Matrix(2, 3), 1e-10), DimensionError);
  CHECK_THROWS_AS(sym_eig(Matrix{{1, 2}, {0, 1}}, 1e-10), DataError);
}

TEST_CASE("sym_eig is deterministic and sign-canonical") {
  std::mt19937_64 rng(5);
  const Matrix s = oracle::random_symmetric(rng, 12);
  const auto a = sym_eig(s, 1e-12);
  const auto b = sym_eig(s, 1e-12);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].value == b[k].value);
    CHECK(a[k].vector == b[k].vector);
    for (double x : a[k].vector) {
      if (std::abs(x) > 1e-12) {
        CHECK(x > 0);
        break;
      }
    }
  }
}

TEST_CASE("gram_eig matches the direct scatter decomposition") {
  std::mt19937_64 rng(6);
  // Five-dimensional samples, three of them: rank of the centered scatter is 2.
  Matrix x = oracle::random_matrix(rng, 5, 3, -2, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    const double mean = (x(i, 0) + x(i, 1) + x(i, 2)) / 3.0;
    for (std::size_t j = 0; j < 3; ++j) x(i, j) -= mean;
  }
  Matrix scatter = oracle::naive_matmul(x, transpose(x));
  scatter *= 1.0 / 3.0;

  const auto direct = sym_eig(scatter, 1e-13);
  const auto snap = gram_eig(x, 1e-13);
  REQUIRE(snap.size() == 3);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(snap[k].value == doctest::Approx(direct[k].value).epsilon(1e-9));
    CHECK(oracle::distance_up_to_sign(snap[k].vector, direct[k].vector) < 1e-6);
  }
  CHECK(std::abs(snap[2].value) < 1e-9);
  CHECK(max_orthonormality_error(snap) < 1e-10);
}

TEST_CASE("gram_eig of a single nonzero sample") {
  // Samples [v, 0, 0] (uncentered) give scatter v v^T / 3 with eigenvalue |v|^2 / 3.
  const std::vector<std::vector<double>> samples{{3, 4}, {0, 0}, {0, 0}};
  const auto pairs = gram_eig(samples, 1e-12);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].value == doctest::Approx(25.0 / 3.0));
  CHECK(oracle::distance_up_to_sign(pairs[0].vector, {0.6, 0.8}) < 1e-12);
  CHECK(pairs[1].value == 0.0);
  CHECK(max_orthonormality_error(pairs) < 1e-12);
}

TEST_CASE("gram_eig options and degenerate input") {
  std::mt19937_64 rng(7);
  const Matrix x = oracle::random_matrix(rng, 6, 4, -1, 1);
  const auto all = gram_eig(x, 1e-12);
  const auto two = gram_eig(x, 1e-12, GramOptions{0, 2});
  REQUIRE(two.size() == 2);
  CHECK(two[0].value == all[0].value);

  const auto halved = gram_eig(x, 1e-12, GramOptions{8, 0});
  CHECK(halved[0].value == doctest::Approx(all[0].value / 2.0));

  const auto zero = gram_eig(Matrix(4, 3), 1e-12);
  REQUIRE(zero.size() == 3);
  for (const EigenPair& p : zero) CHECK(p.value == 0.0);
  CHECK(max_orthonormality_error(zero) < 1e-12);

  CHECK_THROWS_AS(gram_eig(std::span<const std::vector<double>>{}, 1e-12), DimensionError);
}
