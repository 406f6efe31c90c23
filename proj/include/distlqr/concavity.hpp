#pragma once

#include <functional>
#include <string>
#include <vector>

#include "distlqr/chisq.hpp"

namespace distlqr {

enum class CurvatureEstimator { Ruben, Empirical, Smoothed };

const char* estimator_name(CurvatureEstimator e);

struct CurvatureOptions {
  int grid_points = 400;
  double quantile_lo = 0.001;
  double quantile_hi = 0.999;
  double cdf_floor = 1e-6;     // skip curvature where the CDF mass is below this
  double curvature_tol = 1e-6; // base tolerance; exact-CDF estimators use it directly
  int smooth_window = 5;       // moving-average width for the smoothed estimator
  int bootstrap = 200;         // resamples behind the statistical tolerance
  std::uint64_t bootstrap_seed = 17;
};

/// Grid scan of the second difference of log F. pass means no second
/// difference above the effective tolerance wherever the CDF exceeds
/// cdf_floor; the verdict is "no violation detected on this grid", not an
/// analytic proof.
struct LogConcavityReport {
  std::vector<double> grid;
  std::vector<double> log_cdf;      // log F at the grid points (raw)
  std::vector<double> second_diff;  // size G-2, NaN where not evaluated
  double max_second_diff = 0.0;
  double curvature_tol = 0.0;  // effective scalar tolerance used for the verdict
  bool pass = false;
  std::string noise_kind;
  std::string estimator;
};

/// Membership in the sub-level set {z : S(z) <= g}; convex and compact for
/// positive definite forms.
bool sublevel_contains(const QuadraticForm& qf, const Vector& z, double g);

std::vector<double> uniform_grid(double lo, double hi, int points);

/// Curvature report from an exact CDF evaluator (series-based).
LogConcavityReport log_cdf_curvature(const std::function<double(double)>& cdf,
                                     const std::vector<double>& grid,
                                     const CurvatureOptions& opts = {});

/// Curvature report from samples. The smoothed estimator applies a centered
/// moving average to log F before differencing; both sample estimators widen
/// the tolerance to 3x the largest bootstrap standard error of the second
/// difference, so the verdict tracks sampling noise.
LogConcavityReport log_cdf_curvature(const EmpiricalCdf& ecdf, const std::vector<double>& grid,
                                     CurvatureEstimator estimator,
                                     const CurvatureOptions& opts = {});

/// Negative control: runs the sample-based detector on an arbitrary (usually
/// non-log-concave) disturbance so tests can confirm the detector is able to
/// fail.
LogConcavityReport counterexample_probe(const SystemSpec& spec, const ClosedLoopAnalysis& cl,
                                        const NoiseModel& noise, int N, std::size_t M,
                                        std::uint64_t seed, const CurvatureOptions& opts = {});

}  // namespace distlqr
