#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "distlqr/noise.hpp"
#include "distlqr/qform.hpp"

namespace distlqr {

/// Weighted non-central chi-square representation of the Gaussian-case
/// return: S(Z) has the law of sum_i weights_i (Y_i + eta_i)^2 + offset with
/// Y_i i.i.d. standard normal. Weights are the eigenvalues of
/// Sigma_Z^{1/2} H Sigma_Z^{1/2}; offset = c - L' H^{-1} L expressed through
/// the same eigenbasis.
struct SpectralForm {
  Vector weights;          // all > 0
  Vector noncentralities;  // eta, sign-free up to orthogonal convention
  double offset = 0.0;
  Eigen::Index dof = 0;    // N * n

  /// offset + sum_i weights_i (1 + eta_i^2); equals trace(H Sigma_Z) + c.
  double mean() const;
  /// sum_i 2 weights_i^2 (1 + 2 eta_i^2).
  double variance() const;
};

SpectralForm spectral_reduce(const QuadraticForm& qf, const NoiseModel& noise,
                             const Tolerances& tol = {});

/// Gamma-mixture expansion of the spectral form's law: density and CDF are
/// series sum_k a_k f(q; alpha + k, 2 beta) in gamma densities/CDFs of a
/// common scale. With beta = min_i weights_i all mixing coefficients are
/// nonnegative and sum to one, so 1 - sum_{k<=K} a_k bounds the CDF
/// truncation error exactly.
///
/// Coefficients follow the classical recursion
///   a_0 = exp(-sum eta_i^2 / 2) prod_i (beta / lambda_i)^{1/2},
///   a_k = (1/2k) sum_{r=1}^{k} b_r a_{k-r},
///   b_r = sum_i c_i^r + r beta sum_i (eta_i^2 / lambda_i) c_i^{r-1},
/// with c_i = 1 - beta / lambda_i. Coefficients are held scaled by
/// exp(log_scale) so extreme noncentrality cannot underflow a_0.
class RubenSeries {
 public:
  /// Builds coefficients until the tail bound drops below tol; throws
  /// SeriesNotConverged when max_terms coefficients do not suffice and
  /// BetaOutOfRange unless 0 < beta and |1 - beta/lambda_i| < 1 for all i.
  RubenSeries(const SpectralForm& sf, double beta, double tol, std::size_t max_terms = 10000);

  double pdf(double g) const;
  double cdf(double g) const;

  double beta() const { return beta_; }
  double alpha() const { return alpha_; }
  double offset() const { return offset_; }
  double tail_bound() const { return tail_bound_; }
  std::size_t terms() const { return coeffs_.size(); }
  /// k-th mixing coefficient a_k = coeff_scaled(k) * exp(log_scale()).
  double coeff_scaled(std::size_t k) const { return coeffs_[k]; }
  double log_scale() const { return log_scale_; }

  /// Smallest q with cdf(q) >= p, by bisection.
  double quantile(double p) const;

 private:
  double beta_ = 0.0;
  double alpha_ = 0.0;
  double offset_ = 0.0;
  double tail_bound_ = 0.0;
  double log_scale_ = 0.0;
  std::vector<double> coeffs_;       // scaled mixing coefficients
  std::vector<double> suffix_;       // suffix_[j] = sum_{k>=j} coeffs_[k]
  double coeff_total_ = 0.0;         // sum of scaled coefficients
};

/// Convenience wrappers matching the one-shot call shape; they build the
/// series each call, so reuse a RubenSeries when evaluating many points.
double ruben_pdf(const SpectralForm& sf, double beta, double tol, double g,
                 std::size_t max_terms = 10000);
double ruben_cdf(const SpectralForm& sf, double beta, double tol, double g,
                 std::size_t max_terms = 10000);

enum class SamplePath { Fast, Slow };

struct SampleOptions {
  SamplePath path = SamplePath::Fast;
  int threads = 1;
  std::size_t chunk = 65536;  // fixed so results do not depend on threads
};

/// M i.i.d. draws of the truncated return. Deterministic given seed; the
/// fast path evaluates the assembled quadratic form, the slow path the
/// four-term definition, on identical noise.
std::vector<double> sample_return(const SystemSpec& spec, const ClosedLoopAnalysis& cl,
                                  const NoiseModel& noise, int N, std::size_t M,
                                  std::uint64_t seed, const SampleOptions& opts = {});

/// Right-continuous empirical CDF over a sorted copy of the samples.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples);

  double operator()(double g) const;
  double quantile(double p) const;
  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

/// sup_g |F(g) - Fn(g)| against a continuous CDF, scanned at every jump when
/// stride == 1. stride > 1 scans every stride-th order statistic; the result
/// is then an upper bound off by at most stride / size.
double ks_distance(const EmpiricalCdf& ecdf, const std::function<double(double)>& cdf,
                   std::size_t stride = 1);

/// Exact two-sample Kolmogorov-Smirnov distance.
double ks_distance(const EmpiricalCdf& a, const EmpiricalCdf& b);

}  // namespace distlqr
