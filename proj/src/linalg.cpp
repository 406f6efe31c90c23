#include "distlqr/linalg.hpp"

#include <string>

#include "distlqr/errors.hpp"

namespace distlqr {

double spectral_norm(const Matrix& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  return m.jacobiSvd().singularValues()(0);
}

double spectral_radius(const Matrix& m) {
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::EigensolveFailure, "eigenvalue iteration did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double max_abs_asymmetry(const Matrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

SymmetricSqrt symmetric_sqrt(const Matrix& m, const char* label) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::EigensolveFailure, std::string("eigensolve failed for ") + label);
  const Vector& d = es.eigenvalues();
  if (d(0) <= 0.0)
    throw Error(ErrorCode::NotPositiveDefinite,
                std::string(label) + " has eigenvalue " + std::to_string(d(0)));
  SymmetricSqrt out;
  const Matrix& v = es.eigenvectors();
  out.sqrt = v * d.cwiseSqrt().asDiagonal() * v.transpose();
  out.inv_sqrt = v * d.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  out.sqrt = 0.5 * (out.sqrt + out.sqrt.transpose()).eval();
  out.inv_sqrt = 0.5 * (out.inv_sqrt + out.inv_sqrt.transpose()).eval();
  out.eig_min = d(0);
  out.eig_max = d(d.size() - 1);
  return out;
}

Vector symmetric_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::EigensolveFailure, "symmetric eigensolve did not converge");
  return es.eigenvalues();
}

}  // namespace distlqr
