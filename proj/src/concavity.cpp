#include "distlqr/concavity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "distlqr/errors.hpp"

namespace distlqr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RngAdapter {
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }
  result_type operator()() { return rng->next_u64(); }
  Rng* rng;
};

void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 10) throw Error(ErrorCode::GridTooCoarse, "need at least 10 grid points");
  const double h = grid[1] - grid[0];
  if (!(h > 0.0)) throw Error(ErrorCode::ConfigError, "grid must be strictly increasing");
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double hi = grid[i + 1] - grid[i];
    if (!(hi > 0.0) || std::abs(hi - h) > 1e-6 * h)
      throw Error(ErrorCode::ConfigError, "grid spacing must be uniform");
  }
}

/// Second differences of log F over the grid; smoothing uses full centered
/// windows only, so boundary indices stay NaN instead of picking up
/// asymmetric-window bias.
std::vector<double> second_differences(const std::vector<double>& log_cdf,
                                       const std::vector<double>& cdf, double h, double floor,
                                       int window) {
  const std::size_t g = log_cdf.size();
  const int k = window > 1 ? window / 2 : 0;
  std::vector<double> smooth(g, kNaN);
  for (std::size_t i = k; i + k < g; ++i) {
    double acc = 0.0;
    bool ok = true;
    for (int d = -k; d <= k; ++d) {
      const double v = log_cdf[i + d];
      if (!std::isfinite(v)) { ok = false; break; }
      acc += v;
    }
    smooth[i] = ok ? acc / double(2 * k + 1) : kNaN;
  }
  std::vector<double> d2(g - 2, kNaN);
  for (std::size_t i = 1; i + 1 < g; ++i) {
    if (cdf[i - 1] <= floor) continue;
    const double a = smooth[i - 1], b = smooth[i], c = smooth[i + 1];
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) continue;
    d2[i - 1] = (c - 2.0 * b + a) / (h * h);
  }
  return d2;
}

double max_defined(const std::vector<double>& v) {
  double mx = 0.0;
  bool any = false;
  for (double x : v)
    if (std::isfinite(x)) {
      mx = any ? std::max(mx, x) : x;
      any = true;
    }
  return any ? mx : 0.0;
}

}  // namespace

const char* estimator_name(CurvatureEstimator e) {
  switch (e) {
    case CurvatureEstimator::Ruben: return "ruben";
    case CurvatureEstimator::Empirical: return "empirical";
    case CurvatureEstimator::Smoothed: return "smoothed";
  }
  return "unknown";
}

bool sublevel_contains(const QuadraticForm& qf, const Vector& z, double g) {
  return evaluate(qf, z) <= g;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < 2) throw Error(ErrorCode::GridTooCoarse, "need at least 2 grid points");
  if (!(hi > lo)) throw Error(ErrorCode::ConfigError, "grid range is empty");
  std::vector<double> grid(points);
  const double h = (hi - lo) / double(points - 1);
  for (int i = 0; i < points; ++i) grid[i] = lo + h * i;
  return grid;
}

LogConcavityReport log_cdf_curvature(const std::function<double(double)>& cdf,
                                     const std::vector<double>& grid,
                                     const CurvatureOptions& opts) {
  check_grid(grid);
  LogConcavityReport rep;
  rep.grid = grid;
  rep.estimator = estimator_name(CurvatureEstimator::Ruben);
  const double h = grid[1] - grid[0];
  std::vector<double> f(grid.size()), lf(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f[i] = cdf(grid[i]);
    lf[i] = f[i] > 0.0 ? std::log(f[i]) : -std::numeric_limits<double>::infinity();
  }
  rep.log_cdf = lf;
  rep.second_diff = second_differences(lf, f, h, opts.cdf_floor, /*window=*/1);
  rep.max_second_diff = max_defined(rep.second_diff);
  rep.curvature_tol = opts.curvature_tol;
  rep.pass = rep.max_second_diff <= rep.curvature_tol;
  return rep;
}

LogConcavityReport log_cdf_curvature(const EmpiricalCdf& ecdf, const std::vector<double>& grid,
                                     CurvatureEstimator estimator, const CurvatureOptions& opts) {
  check_grid(grid);
  if (estimator == CurvatureEstimator::Ruben)
    throw Error(ErrorCode::ConfigError, "the exact estimator needs a CDF, not samples");
  if (ecdf.size() < 10000)
    throw Error(ErrorCode::InsufficientSamples, "sample-based curvature needs >= 1e4 samples");

  LogConcavityReport rep;
  rep.grid = grid;
  rep.estimator = estimator_name(estimator);
  const double h = grid[1] - grid[0];
  const std::size_t g = grid.size();
  const std::size_t m = ecdf.size();
  const int window = estimator == CurvatureEstimator::Smoothed ? opts.smooth_window : 1;

  // bin counts over (-inf, grid[0]], (grid[0], grid[1]], ...
  std::vector<std::size_t> cum(g);
  const auto& xs = ecdf.sorted();
  for (std::size_t i = 0; i < g; ++i)
    cum[i] = std::upper_bound(xs.begin(), xs.end(), grid[i]) - xs.begin();

  auto from_cum = [&](const std::vector<std::size_t>& c) {
    std::vector<double> f(g), lf(g);
    for (std::size_t i = 0; i < g; ++i) {
      f[i] = double(c[i]) / double(m);
      lf[i] = f[i] > 0.0 ? std::log(f[i]) : -std::numeric_limits<double>::infinity();
    }
    return std::pair{std::move(f), std::move(lf)};
  };

  auto [f, lf] = from_cum(cum);
  rep.log_cdf = lf;
  rep.second_diff = second_differences(lf, f, h, opts.cdf_floor, window);
  rep.max_second_diff = max_defined(rep.second_diff);

  // 3x the worst-case bootstrap standard error of the second differences,
  // from multinomial resamples of the bin counts.
  std::vector<double> counts(g + 1);
  counts[0] = double(cum[0]);
  for (std::size_t i = 1; i < g; ++i) counts[i] = double(cum[i] - cum[i - 1]);
  counts[g] = double(m - cum[g - 1]);

  Rng rng(opts.bootstrap_seed);
  RngAdapter urbg{&rng};
  std::vector<double> mean(g - 2, 0.0), m2(g - 2, 0.0);
  std::vector<std::size_t> count_n(g - 2, 0);
  std::vector<std::size_t> cum_b(g);
  for (int rep_i = 0; rep_i < opts.bootstrap; ++rep_i) {
    // sequential binomial thinning = one multinomial draw
    std::size_t remaining = m;
    double prob_left = 1.0;
    std::size_t acc = 0;
    for (std::size_t i = 0; i < g; ++i) {
      const double p = prob_left > 0.0 ? std::min(1.0, counts[i] / double(m) / prob_left) : 0.0;
      std::size_t draw = 0;
      if (remaining > 0 && p > 0.0)
        draw = std::binomial_distribution<std::size_t>(remaining, p)(urbg);
      acc += draw;
      remaining -= draw;
      prob_left -= counts[i] / double(m);
      cum_b[i] = acc;
    }
    auto [fb, lfb] = from_cum(cum_b);
    const auto d2b = second_differences(lfb, fb, h, opts.cdf_floor, window);
    for (std::size_t i = 0; i < d2b.size(); ++i) {
      if (!std::isfinite(d2b[i])) continue;
      ++count_n[i];
      const double delta = d2b[i] - mean[i];
      mean[i] += delta / double(count_n[i]);
      m2[i] += delta * (d2b[i] - mean[i]);
    }
  }
  double worst_se = 0.0;
  for (std::size_t i = 0; i < m2.size(); ++i)
    if (count_n[i] > 1 && std::isfinite(rep.second_diff[i]))
      worst_se = std::max(worst_se, std::sqrt(m2[i] / double(count_n[i] - 1)));

  rep.curvature_tol = std::max(opts.curvature_tol, 3.0 * worst_se);
  rep.pass = rep.max_second_diff <= rep.curvature_tol;
  return rep;
}

LogConcavityReport counterexample_probe(const SystemSpec& spec, const ClosedLoopAnalysis& cl,
                                        const NoiseModel& noise, int N, std::size_t M,
                                        std::uint64_t seed, const CurvatureOptions& opts) {
  EmpiricalCdf ecdf(sample_return(spec, cl, noise, N, M, seed));
  const double lo = ecdf.quantile(opts.quantile_lo);
  const double hi = ecdf.quantile(opts.quantile_hi);
  const auto grid = uniform_grid(lo, hi, opts.grid_points);
  auto rep = log_cdf_curvature(ecdf, grid, CurvatureEstimator::Smoothed, opts);
  rep.noise_kind = noise_kind_name(noise.kind());
  return rep;
}

}  // namespace distlqr
