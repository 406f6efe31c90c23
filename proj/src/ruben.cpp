#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "distlqr/chisq.hpp"
#include "distlqr/errors.hpp"

namespace distlqr {

namespace {

constexpr double kRescaleAbove = 1e280;
constexpr double kRescaleFactor = 0x1.0p-512;
constexpr double kLogRescale = 512 * 0.69314718055994530941723212145818;  // 512 ln 2
constexpr std::size_t kTile = 256;

// Peak-region halfwidth for the gamma term ladder u_j = e^{-x} x^{a+j} / G(a+j+1):
// beyond 14 standard deviations (~sqrt(x)) plus a fixed pad the terms are
// below 1e-40 of the peak.
std::pair<std::ptrdiff_t, std::ptrdiff_t> term_window(double x, double alpha,
                                                      std::ptrdiff_t j_max) {
  const double half = 14.0 * std::sqrt(x) + 32.0;
  const double center = x - alpha;
  const auto lo = std::ptrdiff_t(std::max(0.0, std::floor(center - half)));
  const auto hi = std::ptrdiff_t(std::min(double(j_max), std::ceil(center + half)));
  return {lo, hi};
}

}  // namespace

RubenSeries::RubenSeries(const SpectralForm& sf, double beta, double tol,
                         std::size_t max_terms) {
  const Eigen::Index m = sf.weights.size();
  if (m < 1) throw Error(ErrorCode::DimensionMismatch, "spectral form is empty");
  if (!(tol > 0.0)) throw Error(ErrorCode::ConfigError, "tolerance must be positive");
  if (max_terms < 1) throw Error(ErrorCode::ConfigError, "max_terms must be >= 1");
  if (!(beta > 0.0)) throw Error(ErrorCode::BetaOutOfRange, "beta must be positive");
  for (Eigen::Index i = 0; i < m; ++i)
    if (!(std::abs(1.0 - beta / sf.weights(i)) < 1.0))
      throw Error(ErrorCode::BetaOutOfRange,
                  "|1 - beta/weight| >= 1 at weight " + std::to_string(sf.weights(i)));

  beta_ = beta;
  alpha_ = 0.5 * double(sf.dof);
  offset_ = sf.offset;

  std::vector<double> ci(m), w2(m), cpow(m);
  double log_a0 = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    ci[i] = 1.0 - beta / sf.weights(i);
    const double eta2 = sf.noncentralities(i) * sf.noncentralities(i);
    w2[i] = eta2 * beta / sf.weights(i);
    cpow[i] = 1.0;  // c_i^{r-1} entering the b_r update
    log_a0 += -0.5 * eta2 + 0.5 * std::log(beta / sf.weights(i));
  }

  // Scaled coefficients: a_k = coeffs_[k] * exp(log_scale_).
  if (log_a0 > -600.0) {
    coeffs_.push_back(std::exp(log_a0));
    log_scale_ = 0.0;
  } else {
    coeffs_.push_back(1.0);
    log_scale_ = log_a0;
  }

  double covered = coeffs_[0] * std::exp(log_scale_);
  std::vector<double> b(1, 0.0);  // b[0] unused
  std::vector<double> partial(kTile);

  while (covered < 1.0 - tol) {
    const std::size_t k0 = coeffs_.size();
    if (k0 > max_terms)
      throw Error(ErrorCode::SeriesNotConverged,
                  "tail " + std::to_string(std::max(0.0, 1.0 - covered)) + " above " +
                      std::to_string(tol) + " after " + std::to_string(max_terms) + " terms");
    const std::size_t k1 = std::min(k0 + kTile - 1, max_terms);
    const std::size_t nt = k1 - k0 + 1;

    // extend b_r = sum_i c_i^r + r sum_i w2_i c_i^{r-1} for r in [k0, k1]
    for (std::size_t r = b.size(); r <= k1; ++r) {
      double s1 = 0.0, s2 = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double prev = cpow[i];
        if (prev == 0.0) continue;
        s2 += w2[i] * prev;
        double cur = prev * ci[i];
        if (cur < 1e-300) cur = 0.0;
        cpow[i] = cur;
        s1 += cur;
      }
      b.push_back(s1 + double(r) * s2);
    }

    // history contribution, vectorizable over the tile
    std::fill(partial.begin(), partial.begin() + nt, 0.0);
    for (std::size_t s = 0; s < k0; ++s) {
      const double as = coeffs_[s];
      if (as == 0.0) continue;
      const double* bp = b.data() + (k0 - s);
      for (std::size_t t = 0; t < nt; ++t) partial[t] += as * bp[t];
    }
    // in-tile feedback
    double scale = std::exp(log_scale_);
    for (std::size_t k = k0; k <= k1; ++k) {
      double acc = partial[k - k0];
      for (std::size_t s = k0; s < k; ++s) acc += coeffs_[s] * b[k - s];
      const double ak = acc * 0.5 / double(k);
      coeffs_.push_back(ak);
      covered += ak * scale;
      if (ak > kRescaleAbove) {
        for (auto& v : coeffs_) v *= kRescaleFactor;
        log_scale_ += kLogRescale;
        scale = std::exp(log_scale_);
        // redo the remaining tile entries against rescaled history
        partial.assign(partial.size(), 0.0);
        for (std::size_t kk = coeffs_.size(); kk <= k1; ++kk) {
          double a2 = 0.0;
          for (std::size_t s = 0; s < kk; ++s) a2 += coeffs_[s] * b[kk - s];
          coeffs_.push_back(a2 * 0.5 / double(kk));
          covered += coeffs_.back() * scale;
        }
        break;
      }
      if (covered >= 1.0 - tol) break;
    }
  }

  tail_bound_ = std::max(0.0, 1.0 - covered);
  coeff_total_ = 0.0;
  suffix_.assign(coeffs_.size() + 1, 0.0);
  for (std::size_t k = coeffs_.size(); k-- > 0;) {
    suffix_[k] = suffix_[k + 1] + coeffs_[k];
  }
  coeff_total_ = suffix_[0];
}

double RubenSeries::cdf(double g) const {
  const double q = g - offset_;
  if (!(q > 0.0)) return 0.0;
  const double x = q / (2.0 * beta_);
  const double scale = std::exp(log_scale_);
  const double anchor = boost::math::gamma_p(alpha_, x);  // P(alpha, x)

  // Exact rewrite of sum_k a_k P(alpha+k, x): with the downward identity
  // P(alpha+k, x) = P(alpha, x) - sum_{j<k} u_j, u_j = e^{-x} x^{alpha+j} /
  // Gamma(alpha+j+1), the double sum collapses onto suffix sums of the
  // coefficients. The u ladder is a bump of width ~sqrt(x) around x - alpha;
  // terms outside the window are below 1e-40 of its peak.
  const auto [j_lo, j_hi] = term_window(x, alpha_, std::ptrdiff_t(coeffs_.size()) - 2);
  double correction = 0.0;
  if (j_hi >= j_lo) {
    const double log_u =
        -x + (alpha_ + double(j_lo)) * std::log(x) - std::lgamma(alpha_ + double(j_lo) + 1.0);
    double u = std::exp(log_u);
    for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) {
      correction += u * suffix_[j + 1];
      u *= x / (alpha_ + double(j) + 1.0);
    }
  }
  const double value = (anchor * coeff_total_ - correction) * scale;
  return std::clamp(value, 0.0, 1.0);
}

double RubenSeries::pdf(double g) const {
  const double q = g - offset_;
  if (!(q > 0.0)) return 0.0;
  const double x = q / (2.0 * beta_);
  const double scale = std::exp(log_scale_);

  // sum_k a_k f(q; alpha+k, 2 beta) = (1/q) sum_k a_k (alpha+k) u_k
  const auto [k_lo, k_hi] = term_window(x, alpha_, std::ptrdiff_t(coeffs_.size()) - 1);
  if (k_hi < k_lo) return 0.0;
  const double log_u =
      -x + (alpha_ + double(k_lo)) * std::log(x) - std::lgamma(alpha_ + double(k_lo) + 1.0);
  double u = std::exp(log_u);
  double acc = 0.0;
  for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
    acc += coeffs_[k] * (alpha_ + double(k)) * u;
    u *= x / (alpha_ + double(k) + 1.0);
  }
  return std::max(0.0, acc * scale / q);
}

double RubenSeries::quantile(double p) const {
  if (!(p > 0.0)) return offset_;
  if (p >= 1.0) p = 1.0 - 1e-12;
  double lo = offset_;
  double width = 2.0 * beta_ * std::max(1.0, alpha_ + double(terms()));
  double hi = offset_ + width;
  while (cdf(hi) < p && std::isfinite(hi)) hi = offset_ + (hi - offset_) * 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ruben_pdf(const SpectralForm& sf, double beta, double tol, double g,
                 std::size_t max_terms) {
  return RubenSeries(sf, beta, tol, max_terms).pdf(g);
}

double ruben_cdf(const SpectralForm& sf, double beta, double tol, double g,
                 std::size_t max_terms) {
  return RubenSeries(sf, beta, tol, max_terms).cdf(g);
}

}  // namespace distlqr
