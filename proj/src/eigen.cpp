#include "e2dpca/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "e2dpca/error.hpp"
#include "e2dpca/kernels.hpp"

namespace e2dpca {
namespace {

constexpr double kSignThreshold = 1e-12;

// Eigenvalues plus eigenvectors stored as the rows of a square matrix.
struct RawDecomposition {
  std::vector<double> values;
  Matrix vectors;
};

void require_symmetric(const Matrix& s) {
  if (!s.is_square()) throw DimensionError("sym_eig: matrix must be square, got " + s.shape_string());
  double asym = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      const double d = s(i, j) - s(j, i);
      asym += 2.0 * d * d;
    }
  }
  const double norm = frobenius_norm(s);
  if (std::sqrt(asym) > 1e-9 * norm) {
    throw DataError("sym_eig: matrix is not symmetric (|S - S^T|_F = " + std::to_string(std::sqrt(asym)) +
                    ", |S|_F = " + std::to_string(norm) + ")");
  }
}

Matrix symmetrized(const Matrix& s) {
  Matrix a = s;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double mid = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = mid;
      a(j, i) = mid;
    }
  }
  return a;
}

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) sum += 2.0 * a(i, j) * a(i, j);
  }
  return std::sqrt(sum);
}

// Cyclic Jacobi. Rotations are applied to whole rows of the (symmetric) working
// matrix and copied into the matching columns, so the arithmetic runs over
// contiguous memory. Eigenvectors accumulate as rows of `vt`.
RawDecomposition jacobi(Matrix a, double tol) {
  const std::size_t n = a.rows();
  Matrix vt = Matrix::identity(n);
  const double target = 1e-2 * tol * (1.0 + frobenius_norm(a));

  double off = off_diagonal_norm(a);
  int sweep = 0;
  for (; sweep < kJacobiMaxSweeps && off > target; ++sweep) {
    std::size_t rotations = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double guard = 100.0 * std::abs(apq);
        if (std::abs(app) + guard == std::abs(app) && std::abs(aqq) + guard == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        kernels::rotate(a.row(p), a.row(q), c, s);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          a(r, p) = a(p, r);
          a(r, q) = a(q, r);
        }
        kernels::rotate(vt.row(p), vt.row(q), c, s);
        ++rotations;
      }
    }
    off = off_diagonal_norm(a);
    if (rotations == 0) break;
  }
  if (off > target && sweep >= kJacobiMaxSweeps) {
    throw ConvergenceError("sym_eig: Jacobi did not converge after " + std::to_string(kJacobiMaxSweeps) +
                               " sweeps, off-diagonal norm " + std::to_string(off),
                           off);
  }

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  return {std::move(values), std::move(vt)};
}

// Householder reduction to tridiagonal form followed by the implicit QL
// iteration (the EISPACK tred2/tql2 pair). The algorithm is written against the
// transpose of the usual column-oriented working matrix: every inner loop
// walks a row, and the final eigenvectors are the rows of `w`.
RawDecomposition tridiagonal_ql(Matrix w) {
  const std::size_t n = w.rows();
  std::vector<double> d(n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) d[j] = w(j, n - 1);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = w(j, i - 1);
        w(j, i) = 0.0;
        w(i, j) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      std::fill(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(i), 0.0);

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        w(i, j) = f;
        const std::size_t tail = i - j - 1;
        auto wrow = w.row(j).subspan(j + 1, tail);
        g = e[j] + w(j, j) * f + kernels::dot(wrow, std::span<const double>(d).subspan(j + 1, tail));
        kernels::axpy(f, wrow, std::span<double>(e).subspan(j + 1, tail));
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        auto wrow = w.row(j).subspan(j, i - j);
        kernels::axpy(-f, std::span<const double>(e).subspan(j, i - j), wrow);
        kernels::axpy(-g, std::span<const double>(d).subspan(j, i - j), wrow);
        d[j] = w(j, i - 1);
        w(j, i) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    w(i, n - 1) = w(i, i);
    w(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      auto next = w.row(i + 1).subspan(0, i + 1);
      for (std::size_t k = 0; k <= i; ++k) d[k] = next[k] / h;
      for (std::size_t j = 0; j <= i; ++j) {
        auto row = w.row(j).subspan(0, i + 1);
        const double g = kernels::dot(next, row);
        kernels::axpy(-g, std::span<const double>(d).subspan(0, i + 1), row);
      }
    }
    for (std::size_t k = 0; k <= i; ++k) w(i + 1, k) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = w(j, n - 1);
    w(j, n - 1) = 0.0;
  }
  w(n - 1, n - 1) = 1.0;
  e[0] = 0.0;

  // Implicit QL on the tridiagonal (d, e).
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::ldexp(1.0, -52);
  constexpr int kMaxIterations = 60;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kMaxIterations) {
          throw ConvergenceError("sym_eig: QL iteration did not converge for eigenvalue " + std::to_string(l) +
                                     ", subdiagonal residual " + std::to_string(std::abs(e[l])),
                                 std::abs(e[l]));
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          kernels::rotate(w.row(ii), w.row(ii + 1), c, s);
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
  return {std::move(d), std::move(w)};
}

void apply_sign_convention(std::span<double> v) {
  for (double x : v) {
    if (std::abs(x) > kSignThreshold) {
      if (x < 0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

void normalize(std::span<double> v) {
  const double norm = std::sqrt(kernels::dot(v, v));
  if (norm > 0) {
    for (double& x : v) x /= norm;
  }
}

std::vector<EigenPair> to_sorted_pairs(RawDecomposition raw) {
  const std::size_t n = raw.values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw.values[a] > raw.values[b]; });
  std::vector<EigenPair> pairs;
  pairs.reserve(n);
  for (std::size_t idx : order) {
    auto row = raw.vectors.row(idx);
    EigenPair pair{raw.values[idx], std::vector<double>(row.begin(), row.end())};
    normalize(pair.vector);
    apply_sign_convention(pair.vector);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace

std::vector<EigenPair> sym_eig(const Matrix& s, double tol, EigenMethod method) {
  if (!(tol > 0.0)) throw Error("sym_eig: tolerance must be positive");
  require_symmetric(s);
  Matrix a = symmetrized(s);
  if (method == EigenMethod::automatic) {
    method = a.rows() <= kJacobiMaxDimension ? EigenMethod::jacobi : EigenMethod::tridiagonal_ql;
  }
  if (a.rows() == 1) return {EigenPair{a(0, 0), {1.0}}};
  RawDecomposition raw = method == EigenMethod::jacobi ? jacobi(std::move(a), tol) : tridiagonal_ql(std::move(a));
  return to_sorted_pairs(std::move(raw));
}

std::vector<EigenPair> gram_eig(const Matrix& samples, double tol, const GramOptions& options) {
  const std::size_t dim = samples.rows();
  const std::size_t count = samples.cols();
  const double divisor = static_cast<double>(options.divisor == 0 ? count : options.divisor);

  const Matrix by_sample = transpose(samples);
  Matrix gram(count, count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i; j < count; ++j) {
      const double g = kernels::dot(by_sample.row(i), by_sample.row(j)) / divisor;
      gram(i, j) = g;
      gram(j, i) = g;
    }
  }
  const std::vector<EigenPair> small = sym_eig(gram, tol);

  std::size_t wanted = std::min(count, dim);
  if (options.max_pairs != 0) wanted = std::min(wanted, options.max_pairs);
  const double largest = std::max(small.front().value, 0.0);
  const double cutoff = options.rank_tolerance * largest;

  std::vector<EigenPair> pairs;
  pairs.reserve(wanted);
  for (std::size_t k = 0; k < wanted; ++k) {
    const double mu = small[k].value;
    if (!(mu > cutoff) || mu <= 0.0) break;
    EigenPair pair{mu, std::vector<double>(dim)};
    const double scale = 1.0 / std::sqrt(divisor * mu);
    for (std::size_t a = 0; a < dim; ++a) pair.vector[a] = kernels::dot(samples.row(a), small[k].vector) * scale;
    // One modified Gram-Schmidt pass absorbs the rounding of the back-mapping.
    for (const EigenPair& prev : pairs) kernels::axpy(-kernels::dot(prev.vector, pair.vector), prev.vector, pair.vector);
    normalize(pair.vector);
    pairs.push_back(std::move(pair));
  }

  // Orthonormal completion for the numerically-null part of the spectrum.
  for (std::size_t candidate = 0; pairs.size() < wanted && candidate < dim; ++candidate) {
    std::vector<double> v(dim, 0.0);
    v[candidate] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const EigenPair& prev : pairs) kernels::axpy(-kernels::dot(prev.vector, v), prev.vector, v);
    }
    const double norm = std::sqrt(kernels::dot(v, v));
    if (norm < 0.5) continue;
    for (double& x : v) x /= norm;
    pairs.push_back(EigenPair{0.0, std::move(v)});
  }

  for (EigenPair& pair : pairs) apply_sign_convention(pair.vector);
  return pairs;
}

std::vector<EigenPair> gram_eig(std::span<const std::vector<double>> samples, double tol,
                                const GramOptions& options) {
  if (samples.empty()) throw DimensionError("gram_eig: empty sample list");
  const std::size_t dim = samples.front().size();
  Matrix columns(dim, samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].size() != dim) throw DimensionError("gram_eig: samples have different lengths");
    for (std::size_t a = 0; a < dim; ++a) columns(a, k) = samples[k][a];
  }
  return gram_eig(columns, tol, options);
}

Matrix reconstruct(const std::vector<EigenPair>& pairs) {
  if (pairs.empty()) throw DimensionError("reconstruct: no eigenpairs");
  const std::size_t n = pairs.front().vector.size();
  Matrix out(n, n);
  for (const EigenPair& pair : pairs) {
    for (std::size_t i = 0; i < n; ++i) kernels::axpy(pair.value * pair.vector[i], pair.vector, out.row(i));
  }
  return out;
}

double max_residual(const Matrix& s, const std::vector<EigenPair>& pairs) {
  double worst = 0.0;
  std::vector<double> r(s.rows());
  for (const EigenPair& pair : pairs) {
    for (std::size_t i = 0; i < s.rows(); ++i) r[i] = kernels::dot(s.row(i), pair.vector) - pair.value * pair.vector[i];
    worst = std::max(worst, std::sqrt(kernels::dot(r, r)));
  }
  return worst;
}

double max_orthonormality_error(const std::vector<EigenPair>& pairs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i; j < pairs.size(); ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(kernels::dot(pairs[i].vector, pairs[j].vector) - expected));
    }
  }
  return worst;
}

}  // namespace e2dpca
