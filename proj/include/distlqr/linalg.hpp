#pragma once

#include <Eigen/Dense>

namespace distlqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest singular value.
double spectral_norm(const Matrix& m);

/// Largest absolute eigenvalue.
double spectral_radius(const Matrix& m);

double max_abs_asymmetry(const Matrix& m);

/// Eigendecomposition-based square root of a symmetric positive definite
/// matrix. Returns {M^{1/2}, M^{-1/2}}, both symmetric. Throws
/// NotPositiveDefinite when the smallest eigenvalue is <= 0.
struct SymmetricSqrt {
  Matrix sqrt;
  Matrix inv_sqrt;
  double eig_min = 0.0;
  double eig_max = 0.0;
};
SymmetricSqrt symmetric_sqrt(const Matrix& m, const char* label);

/// Eigenvalues of a symmetric matrix, ascending. Throws EigensolveFailure on
/// non-convergence.
Vector symmetric_eigenvalues(const Matrix& m);

}  // namespace distlqr
