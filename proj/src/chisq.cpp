#include "distlqr/chisq.hpp"

#include <cmath>
#include <string>

#include "distlqr/errors.hpp"

namespace distlqr {

double SpectralForm::mean() const {
  double s = offset;
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    s += weights(i) * (1.0 + noncentralities(i) * noncentralities(i));
  return s;
}

double SpectralForm::variance() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double e2 = noncentralities(i) * noncentralities(i);
    s += 2.0 * weights(i) * weights(i) * (1.0 + 2.0 * e2);
  }
  return s;
}

SpectralForm spectral_reduce(const QuadraticForm& qf, const NoiseModel& noise,
                             const Tolerances& tol) {
  if (!noise.is_gaussian())
    throw Error(ErrorCode::ConfigError, "spectral reduction needs gaussian noise");
  if (noise.dim() != qf.n)
    throw Error(ErrorCode::DimensionMismatch, "noise dimension differs from the state's");

  const Eigen::Index n = qf.n;
  const Eigen::Index dim = qf.dim();
  const Matrix& s = noise.sigma_sqrt();

  // Sigma_Z^{1/2} H Sigma_Z^{1/2} with Sigma_Z = I_N (x) Sigma, blockwise.
  Matrix whitened(dim, dim);
  for (int i = 0; i < qf.N; ++i)
    for (int j = 0; j < qf.N; ++j)
      whitened.block(i * n, j * n, n, n) = s * qf.H.block(i * n, j * n, n, n) * s;
  whitened = 0.5 * (whitened + whitened.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es(whitened);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::EigensolveFailure, "eigensolve of the whitened form failed");
  const Vector& lam = es.eigenvalues();
  const double lam_max = lam(lam.size() - 1);
  if (lam(0) <= tol.spectral_floor * std::abs(lam_max))
    throw Error(ErrorCode::NotPositiveDefinite,
                "whitened form has eigenvalue " + std::to_string(lam(0)));

  // transformed linear coefficient zeta = U' Sigma_Z^{1/2} L
  Vector sl(dim);
  for (int i = 0; i < qf.N; ++i) sl.segment(i * n, n) = s * qf.L.segment(i * n, n);
  const Vector zeta = es.eigenvectors().transpose() * sl;

  SpectralForm sf;
  sf.weights = lam;
  sf.noncentralities = zeta.cwiseQuotient(lam);
  sf.offset = qf.c - zeta.dot(sf.noncentralities);
  sf.dof = dim;
  return sf;
}

}  // namespace distlqr
