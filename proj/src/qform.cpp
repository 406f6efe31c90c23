#include "distlqr/qform.hpp"

#include <cmath>
#include <limits>

#include "distlqr/errors.hpp"

namespace distlqr {

namespace {

std::vector<Matrix> closed_loop_powers(const Matrix& A_cl, int N) {
  std::vector<Matrix> pow(N + 1);
  pow[0] = Matrix::Identity(A_cl.rows(), A_cl.cols());
  for (int k = 1; k <= N; ++k) pow[k] = pow[k - 1] * A_cl;
  return pow;
}

}  // namespace

QuadraticForm build_qform(const ClosedLoopAnalysis& cl, const Vector& x0, int N) {
  if (N < 1) throw Error(ErrorCode::ConfigError, "horizon must be >= 1");
  const Eigen::Index n = cl.n();
  if (x0.size() != n) throw Error(ErrorCode::DimensionMismatch, "x0 must have length n");

  QuadraticForm qf;
  qf.N = N;
  qf.n = n;
  qf.H.setZero(N * n, N * n);
  qf.L.resize(N * n);
  const auto pow = closed_loop_powers(cl.A_cl, N);

  double gi = 1.0;
  for (int i = 1; i <= N; ++i) {
    gi *= cl.gamma;
    qf.H.block((i - 1) * n, (i - 1) * n, n, n) = gi * cl.P;
    for (int j = 1; j < i; ++j) {
      Matrix blk = gi * cl.P * pow[i - j];
      qf.H.block((i - 1) * n, (j - 1) * n, n, n) = blk;
      qf.H.block((j - 1) * n, (i - 1) * n, n, n) = blk.transpose();
    }
    qf.L.segment((i - 1) * n, n) = gi * cl.P * pow[i] * x0;
  }
  qf.c = x0.dot(cl.P * x0);
  return qf;
}

double evaluate(const QuadraticForm& qf, const Vector& z) {
  if (z.size() != qf.dim())
    throw Error(ErrorCode::DimensionMismatch, "argument must have length N*n");
  return z.dot(qf.H * z) + 2.0 * qf.L.dot(z) + qf.c;
}

double simulate_return(const SystemSpec& spec, const ClosedLoopAnalysis& cl,
                       const std::vector<Vector>& noise_draw) {
  const Eigen::Index n = cl.n();
  const int N = int(noise_draw.size());
  if (N < 1) throw Error(ErrorCode::DimensionMismatch, "noise draw is empty");
  for (const auto& w : noise_draw)
    if (w.size() != n) throw Error(ErrorCode::DimensionMismatch, "noise vector has wrong length");

  const Vector& x = spec.x0;
  double total = x.dot(cl.P * x);

  double gk1 = 1.0;  // gamma^{k+1}
  for (int k = 0; k < N; ++k) {
    gk1 *= cl.gamma;
    // A_cl^{k+1} x by repeated application
    Vector ax = x;
    for (int m = 0; m <= k; ++m) ax = cl.A_cl * ax;
    total += 2.0 * gk1 * noise_draw[k].dot(cl.P * ax);
    total += gk1 * noise_draw[k].dot(cl.P * noise_draw[k]);
    if (k >= 1) {
      Vector mix = Vector::Zero(n);
      for (int tau = 0; tau <= k - 1; ++tau) {
        Vector v = noise_draw[tau];
        for (int m = 0; m < k - tau; ++m) v = cl.A_cl * v;
        mix += v;
      }
      total += 2.0 * gk1 * noise_draw[k].dot(cl.P * mix);
    }
  }
  return total;
}

SpectrumCertificate certify_pd(const QuadraticForm& qf, const DominanceCertificate& cert,
                               const ClosedLoopAnalysis& cl) {
  if (cert.N != qf.N)
    throw Error(ErrorCode::DimensionMismatch, "certificate horizon differs from the form's");
  if (qf.n != cl.n())
    throw Error(ErrorCode::DimensionMismatch, "analysis dimension differs from the form's");

  SpectrumCertificate out;
  const Vector ev = symmetric_eigenvalues(qf.H);
  out.eig_min = ev(0);
  out.eig_max = ev(ev.size() - 1);
  out.positive_definite = out.eig_min > 0.0;
  out.dominance_holds = cert.holds;

  const double p_norm = cl.p_eig_max;
  double lo = std::numeric_limits<double>::infinity();
  double lo_scaled = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double gi = 1.0;
  for (int i = 1; i <= qf.N; ++i) {
    gi *= cl.gamma;
    const double phi = cert.phi(i - 1);
    lo = std::min(lo, gi * p_norm * (1.0 - phi));
    lo_scaled = std::min(lo_scaled, gi * cl.p_eig_min * (1.0 - phi));
    hi = std::max(hi, gi * p_norm * (1.0 + phi));
  }
  out.bound_lo = lo;
  out.bound_lo_scaled = lo_scaled;
  out.bound_hi = hi;
  return out;
}

Vector scalar_minors(const ClosedLoopAnalysis& cl, int N) {
  if (cl.n() != 1) throw Error(ErrorCode::NotScalarSystem, "scalar_minors needs n == 1");
  if (N < 1) throw Error(ErrorCode::ConfigError, "horizon must be >= 1");
  const double p = cl.P(0, 0);
  const double a = cl.A_cl(0, 0);
  const double factor = 1.0 - cl.gamma * a * a;
  Vector minors(N);
  for (int i = 1; i <= N; ++i)
    minors(i - 1) = std::pow(p, i) * std::pow(cl.gamma, 0.5 * i * (i + 1)) *
                    std::pow(factor, i - 1);
  return minors;
}

Matrix weighted_qform(const QuadraticForm& qf, const ClosedLoopAnalysis& cl) {
  if (qf.n != cl.n())
    throw Error(ErrorCode::DimensionMismatch, "analysis dimension differs from the form's");
  const Eigen::Index n = qf.n;
  Matrix h_hat(qf.dim(), qf.dim());
  for (int i = 0; i < qf.N; ++i)
    for (int j = 0; j < qf.N; ++j)
      h_hat.block(i * n, j * n, n, n) =
          cl.P_inv_sqrt * qf.H.block(i * n, j * n, n, n) * cl.P_inv_sqrt;
  return h_hat;
}

std::vector<Interval> block_gershgorin(const QuadraticForm& qf, const ClosedLoopAnalysis& cl) {
  const DominanceCertificate cert = certify_dominance(cl, qf.N);
  std::vector<Interval> intervals(qf.N);
  double gi = 1.0;
  for (int i = 0; i < qf.N; ++i) {
    gi *= cl.gamma;
    intervals[i] = {gi, gi * cert.phi(i)};
  }
  return intervals;
}

}  // namespace distlqr
