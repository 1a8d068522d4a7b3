#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "e2dpca/matrix.hpp"

namespace e2dpca {

struct EigenPair {
  double value;
  std::vector<double> vector;  // unit length
};

enum class EigenMethod {
  automatic,       // Jacobi up to kJacobiMaxDimension, tridiagonal QL above
  jacobi,          // cyclic Jacobi rotations
  tridiagonal_ql,  // Householder tridiagonalization + implicit QL
};

inline constexpr std::size_t kJacobiMaxDimension = 128;
inline constexpr int kJacobiMaxSweeps = 100;

/// Full eigendecomposition of a symmetric matrix.
///
/// Pairs come back sorted by eigenvalue, largest first; equal eigenvalues keep
/// the order in which the solver produced them. Each vector is normalized and
/// its first component with magnitude above 1e-12 is positive, so repeated
/// calls on identical input return identical bytes.
///
/// Throws DimensionError for non-square input, DataError when `s` is not
/// symmetric to 1e-9 relative Frobenius, and ConvergenceError (carrying the
/// remaining off-diagonal norm) if the iteration cap is reached.
std::vector<EigenPair> sym_eig(const Matrix& s, double tol, EigenMethod method = EigenMethod::automatic);

struct GramOptions {
  /// Normalizer of the scatter (1/divisor) sum v v^T; 0 means the sample count.
  std::size_t divisor = 0;
  /// Return at most this many leading pairs; 0 means min(sample count, dimension).
  std::size_t max_pairs = 0;
  /// Gram eigenvalues at or below this fraction of the largest are treated as zero.
  double rank_tolerance = 1e-9;
};

/// Eigenpairs of the scatter (1/divisor) * X X^T of the column samples in
/// `samples` (dimension x count, already centered), obtained from the
/// count x count Gram matrix (snapshot method).
///
/// Nonzero pairs are mapped back as v = X u / sqrt(divisor * mu). Slots whose
/// eigenvalue is numerically zero are filled with an orthonormal completion
/// drawn from the standard basis and report eigenvalue 0.
std::vector<EigenPair> gram_eig(const Matrix& samples, double tol, const GramOptions& options = {});
/// Same, for samples given as a list of equal-length vectors. Throws on an empty list.
std::vector<EigenPair> gram_eig(std::span<const std::vector<double>> samples, double tol,
                                const GramOptions& options = {});

/// Reassembles V diag(lambda) V^T from the pairs.
Matrix reconstruct(const std::vector<EigenPair>& pairs);

/// Largest |S v - lambda v|_2 over the pairs.
double max_residual(const Matrix& s, const std::vector<EigenPair>& pairs);

/// Largest |v_i . v_j - delta_ij| over the pairs.
double max_orthonormality_error(const std::vector<EigenPair>& pairs);

}  // namespace e2dpca
