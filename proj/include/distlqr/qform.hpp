#pragma once

#include <vector>

#include "distlqr/model.hpp"

namespace distlqr {

/// Quadratic-form representation of the truncated return: with the N noise
/// vectors stacked as Z, the return equals Z' H Z + 2 L' Z + c. Block (i,j)
/// of H is gamma^i P A_cl^{i-j} for i >= j (transposed above the diagonal),
/// block i of L is gamma^i P A_cl^i x0, and c = x0' P x0.
struct QuadraticForm {
  Matrix H;  // (N n) x (N n), symmetric by construction
  Vector L;  // N n
  double c = 0.0;
  int N = 0;
  Eigen::Index n = 0;

  Eigen::Index dim() const { return H.rows(); }
};

/// Eigenvalue certificate for H: the exact extreme eigenvalues next to the
/// dominance-based inclusion bounds
///   bound_lo = min_i gamma^i ||P|| (1 - phi_i),
///   bound_hi = max_i gamma^i ||P|| (1 + phi_i).
/// The positive-definiteness verdict is always taken from the eigensolve;
/// the bounds are reported alongside and are only claimed valid when the
/// dominance certificate holds. bound_lo_scaled replaces ||P|| with
/// lambda_min(P) in the lower bound and is reported as a diagnostic.
struct SpectrumCertificate {
  double eig_min = 0.0;
  double eig_max = 0.0;
  double bound_lo = 0.0;
  double bound_hi = 0.0;
  double bound_lo_scaled = 0.0;
  bool positive_definite = false;
  bool dominance_holds = false;
};

struct Interval {
  double center = 0.0;
  double radius = 0.0;
  double lo() const { return center - radius; }
  double hi() const { return center + radius; }
};

QuadraticForm build_qform(const ClosedLoopAnalysis& cl, const Vector& x0, int N);

/// z' H z + 2 L' z + c.
double evaluate(const QuadraticForm& qf, const Vector& z);

/// The truncated return evaluated directly from its four-term definition:
///   x0' P x0 + 2 sum_k gamma^{k+1} w_k' P A_cl^{k+1} x0
///   + sum_k gamma^{k+1} w_k' P w_k
///   + 2 sum_{k>=1} gamma^{k+1} w_k' P sum_{tau<k} A_cl^{k-tau} w_tau.
/// Independent of build_qform/evaluate on purpose; the two agree for every
/// draw, which is what the equivalence tests pin down.
double simulate_return(const SystemSpec& spec, const ClosedLoopAnalysis& cl,
                       const std::vector<Vector>& noise_draw);

/// Dense symmetric eigensolve of H plus the dominance bounds. qf and cert
/// must come from the same (cl, N).
SpectrumCertificate certify_pd(const QuadraticForm& qf, const DominanceCertificate& cert,
                               const ClosedLoopAnalysis& cl);

/// Leading principal minors of H for scalar systems, by the closed form
/// Delta_i = P^i gamma^{i(i+1)/2} (1 - gamma A_cl^2)^{i-1}. Positive for
/// every |A_cl| < 1 regardless of the dominance certificate.
Vector scalar_minors(const ClosedLoopAnalysis& cl, int N);

/// H conjugated by the inverse of Psi = diag(P^{1/2}, ..., P^{1/2}); same
/// eigenvalues as H up to the congruence H = Psi Hhat Psi.
Matrix weighted_qform(const QuadraticForm& qf, const ClosedLoopAnalysis& cl);

/// Block-Gershgorin inclusion intervals [gamma^i (1 - phi_i),
/// gamma^i (1 + phi_i)] for the weighted form; every eigenvalue of
/// weighted_qform lies in their union.
std::vector<Interval> block_gershgorin(const QuadraticForm& qf, const ClosedLoopAnalysis& cl);

}  // namespace distlqr
