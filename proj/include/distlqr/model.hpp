#pragma once

#include "distlqr/linalg.hpp"

namespace distlqr {

/// Numerical knobs shared by the solvers and certificates. Defaults are the
/// library's contract; everything here can be overridden from a run config.
struct Tolerances {
  double lyapunov_fp_stop = 1e-12;       // fixed-point stop, relative residual
  double lyapunov_residual = 1e-10;      // accepted solution, relative residual
  double stabilizability_margin = 1e-9;  // require rho(sqrt(gamma) A_cl) <= 1 - margin
  double symmetry_abs = 1e-10;           // symmetry check for Q, R (relative to norm)
  double spectral_floor = 1e-12;         // relative eigenvalue floor in spectral_reduce
  double cdf_floor = 1e-6;               // ignore log-CDF curvature below this mass
  double curvature_tol = 1e-6;           // base curvature tolerance (exact-CDF estimator)
};

/// Discounted LQR problem data under a fixed linear state feedback u = K x.
struct SystemSpec {
  Matrix A;      // n x n state transition
  Matrix B;      // n x p input map
  Matrix Q;      // n x n state cost, symmetric positive definite
  Matrix R;      // p x p input cost, symmetric positive definite
  double gamma;  // discount factor in (0, 1)
  Matrix K;      // p x n feedback gain
  Vector x0;     // initial state

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index p() const { return B.cols(); }

  /// Throws DimensionMismatch / NotPositiveDefinite / ConfigError when the
  /// invariants do not hold.
  void validate(const Tolerances& tol = {}) const;
};

/// Everything derived from a SystemSpec that later stages reuse: the closed
/// loop A_cl = A + B K, the stage cost Q_cl = Q + K' R K, the fixed point P of
/// P = Q_cl + gamma A_cl' P A_cl, and the closed loop conjugated by P^{1/2},
/// whose spectral norm drives the dominance certificate.
struct ClosedLoopAnalysis {
  Matrix A_cl;
  Matrix Q_cl;
  Matrix P;
  Matrix P_sqrt;
  Matrix P_inv_sqrt;
  Matrix A_weighted;  // P^{1/2} A_cl P^{-1/2}
  double gamma = 0.0;
  double weighted_gain = 0.0;  // ||A_weighted||, spectral
  double spectral_radius_cl = 0.0;
  double norm_cl = 0.0;
  double p_eig_min = 0.0;
  double p_eig_max = 0.0;  // == spectral norm of P

  Eigen::Index n() const { return P.rows(); }
};

/// Per-index dominance ratios of the weighted return matrix. The block rows
/// are strictly diagonally dominant, hence the matrix positive definite, when
/// every ratio is below one.
struct DominanceCertificate {
  int N = 0;
  Vector phi;          // ratios for block rows 1..N
  double phi_max = 0;
  bool holds = false;  // phi_max < 1
};

enum class LyapunovMethod { Auto, FixedPoint, Direct };

/// Solves P = Q_cl + gamma A_cl' P A_cl and assembles the derived quantities.
/// Auto picks the dense vectorized solve for n <= 64 and the fixed-point
/// iteration beyond. Throws NonStabilizing when rho(sqrt(gamma) A_cl) is not
/// safely below one.
ClosedLoopAnalysis solve_lyapunov(const SystemSpec& spec, const Tolerances& tol = {},
                                  LyapunovMethod method = LyapunovMethod::Auto);

/// The two solver routes on their own, for cross-checking.
Matrix lyapunov_fixed_point(const Matrix& A_cl, const Matrix& Q_cl, double gamma,
                            const Tolerances& tol = {});
Matrix lyapunov_direct(const Matrix& A_cl, const Matrix& Q_cl, double gamma);

/// || (1/gamma)(I - P^{-1/2} Q_cl P^{-1/2}) - A_w' A_w ||, spectral. Both
/// sides are algebraically equal; the residual is a solver self-test.
double weighted_identity_residual(const ClosedLoopAnalysis& cl);

/// weighted_gain recomputed through the eigenvalue route
/// sqrt((1/gamma)(1 - lambda_min(P^{-1/2} Q_cl P^{-1/2}))); agrees with the
/// singular-value route to rounding.
double weighted_gain_eig_route(const ClosedLoopAnalysis& cl);

/// Dominance ratios for horizon N, by exact geometric-sum closed forms:
/// phi_i = sum_{j=1}^{i} g^j + sum_{j=1}^{N-i} (gamma g)^j with
/// g = weighted_gain. A failing certificate is a result, not an error.
DominanceCertificate certify_dominance(const ClosedLoopAnalysis& cl, int N);

/// sum_{j=1}^{m} r^j without term-by-term accumulation.
double geometric_sum(double r, long long m);

}  // namespace distlqr
