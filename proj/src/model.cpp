#include "distlqr/model.hpp"

#include <cmath>
#include <string>

#include "distlqr/errors.hpp"

namespace distlqr {

namespace {

void check_spd(const Matrix& m, const char* label, double sym_tol) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch, std::string(label) + " is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (max_abs_asymmetry(m) > sym_tol * scale)
    throw Error(ErrorCode::NotPositiveDefinite, std::string(label) + " is not symmetric");
  const Vector ev = symmetric_eigenvalues(m);
  if (ev(0) <= 0.0)
    throw Error(ErrorCode::NotPositiveDefinite,
                std::string(label) + " has eigenvalue " + std::to_string(ev(0)));
}

}  // namespace

void SystemSpec::validate(const Tolerances& tol) const {
  const Eigen::Index nn = A.rows();
  const Eigen::Index pp = B.cols();
  if (A.cols() != nn) throw Error(ErrorCode::DimensionMismatch, "A must be square");
  if (B.rows() != nn) throw Error(ErrorCode::DimensionMismatch, "B must have n rows");
  if (K.rows() != pp || K.cols() != nn)
    throw Error(ErrorCode::DimensionMismatch, "K must be p x n");
  if (x0.size() != nn) throw Error(ErrorCode::DimensionMismatch, "x0 must have length n");
  if (Q.rows() != nn) throw Error(ErrorCode::DimensionMismatch, "Q must be n x n");
  if (R.rows() != pp) throw Error(ErrorCode::DimensionMismatch, "R must be p x p");
  check_spd(Q, "Q", tol.symmetry_abs);
  check_spd(R, "R", tol.symmetry_abs);
  if (!(gamma > 0.0 && gamma < 1.0))
    throw Error(ErrorCode::ConfigError, "gamma must lie in (0, 1)");
}

Matrix lyapunov_fixed_point(const Matrix& A_cl, const Matrix& Q_cl, double gamma,
                            const Tolerances& tol) {
  Matrix P = Q_cl;
  const double q_norm = Q_cl.norm();
  // Contraction rate rho(sqrt(gamma) A_cl)^2 per sweep; cap generously.
  const int max_iter = 200000;
  for (int it = 0; it < max_iter; ++it) {
    Matrix next = Q_cl + gamma * A_cl.transpose() * P * A_cl;
    next = 0.5 * (next + next.transpose()).eval();
    const double resid = (next - P).norm();
    P = std::move(next);
    if (resid <= tol.lyapunov_fp_stop * P.norm()) return P;
    if (!std::isfinite(resid) || P.norm() > 1e150 * std::max(1.0, q_norm))
      throw Error(ErrorCode::NonStabilizing, "fixed-point iteration diverged");
  }
  throw Error(ErrorCode::NonStabilizing, "fixed-point iteration did not converge");
}

Matrix lyapunov_direct(const Matrix& A_cl, const Matrix& Q_cl, double gamma) {
  const Eigen::Index n = A_cl.rows();
  // vec(P) solves (I - gamma A_cl' (x) A_cl') vec(P) = vec(Q_cl)
  Matrix At = A_cl.transpose();
  Matrix sys = Matrix::Identity(n * n, n * n);
  for (Eigen::Index bi = 0; bi < n; ++bi)
    for (Eigen::Index bj = 0; bj < n; ++bj)
      sys.block(bi * n, bj * n, n, n) -= gamma * At(bi, bj) * At;
  Eigen::Map<const Vector> q_vec(Q_cl.data(), n * n);
  Vector p_vec = sys.partialPivLu().solve(q_vec);
  Matrix P = Eigen::Map<Matrix>(p_vec.data(), n, n);
  return 0.5 * (P + P.transpose()).eval();
}

ClosedLoopAnalysis solve_lyapunov(const SystemSpec& spec, const Tolerances& tol,
                                  LyapunovMethod method) {
  spec.validate(tol);
  ClosedLoopAnalysis cl;
  cl.gamma = spec.gamma;
  cl.A_cl = spec.A + spec.B * spec.K;
  cl.Q_cl = spec.Q + spec.K.transpose() * spec.R * spec.K;
  cl.Q_cl = 0.5 * (cl.Q_cl + cl.Q_cl.transpose()).eval();

  cl.spectral_radius_cl = spectral_radius(cl.A_cl);
  cl.norm_cl = spectral_norm(cl.A_cl);
  const double rho_scaled = std::sqrt(spec.gamma) * cl.spectral_radius_cl;
  if (rho_scaled > 1.0 - tol.stabilizability_margin)
    throw Error(ErrorCode::NonStabilizing,
                "rho(sqrt(gamma) A_cl) = " + std::to_string(rho_scaled));

  if (method == LyapunovMethod::Auto)
    method = cl.A_cl.rows() <= 64 ? LyapunovMethod::Direct : LyapunovMethod::FixedPoint;
  cl.P = method == LyapunovMethod::Direct ? lyapunov_direct(cl.A_cl, cl.Q_cl, spec.gamma)
                                          : lyapunov_fixed_point(cl.A_cl, cl.Q_cl, spec.gamma, tol);

  const double resid = (cl.P - cl.Q_cl - spec.gamma * cl.A_cl.transpose() * cl.P * cl.A_cl).norm();
  if (resid > tol.lyapunov_residual * cl.P.norm())
    throw Error(ErrorCode::NonStabilizing,
                "residual " + std::to_string(resid) + " exceeds tolerance");

  SymmetricSqrt s = symmetric_sqrt(cl.P, "P");
  cl.P_sqrt = std::move(s.sqrt);
  cl.P_inv_sqrt = std::move(s.inv_sqrt);
  cl.p_eig_min = s.eig_min;
  cl.p_eig_max = s.eig_max;
  cl.A_weighted = cl.P_sqrt * cl.A_cl * cl.P_inv_sqrt;
  cl.weighted_gain = spectral_norm(cl.A_weighted);
  return cl;
}

double weighted_identity_residual(const ClosedLoopAnalysis& cl) {
  const Eigen::Index n = cl.n();
  Matrix lhs = (Matrix::Identity(n, n) - cl.P_inv_sqrt * cl.Q_cl * cl.P_inv_sqrt) / cl.gamma;
  Matrix rhs = cl.A_weighted.transpose() * cl.A_weighted;
  return spectral_norm(lhs - rhs);
}

double weighted_gain_eig_route(const ClosedLoopAnalysis& cl) {
  const Vector ev = symmetric_eigenvalues(cl.P_inv_sqrt * cl.Q_cl * cl.P_inv_sqrt);
  const double inner = (1.0 - ev(0)) / cl.gamma;
  return std::sqrt(std::max(0.0, inner));
}

double geometric_sum(double r, long long m) {
  if (m <= 0) return 0.0;
  if (r == 0.0) return 0.0;
  if (std::abs(r - 1.0) < 1e-14) return double(m);
  return r * (1.0 - std::pow(r, double(m))) / (1.0 - r);
}

DominanceCertificate certify_dominance(const ClosedLoopAnalysis& cl, int N) {
  if (N < 1) throw Error(ErrorCode::ConfigError, "horizon must be >= 1");
  DominanceCertificate cert;
  cert.N = N;
  cert.phi.resize(N);
  const double g = cl.weighted_gain;
  for (int i = 1; i <= N; ++i)
    cert.phi(i - 1) = geometric_sum(g, i) + geometric_sum(cl.gamma * g, N - i);
  cert.phi_max = cert.phi.maxCoeff();
  cert.holds = cert.phi_max < 1.0;
  return cert;
}

}  // namespace distlqr
