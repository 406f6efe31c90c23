#pragma once

#include <string>
#include <vector>

#include "distlqr/config.hpp"

namespace distlqr {

struct CommandResult {
  std::vector<std::string> files;
};

/// One row per horizon: dominance ratio, exact extreme eigenvalues of H and
/// the certificate bounds. Scalar systems get the closed-form minors too.
CommandResult cmd_analyze(const RunConfig& cfg, const std::string& out_dir);

/// Density grid for the Gaussian case: series PDF next to a Monte Carlo
/// histogram on a common grid.
CommandResult cmd_pdf(const RunConfig& cfg, const std::string& out_dir);

/// Log-concavity curvature reports for every configured noise model; the
/// Gaussian model is additionally checked against the exact series CDF.
CommandResult cmd_logconcavity(const RunConfig& cfg, const std::string& out_dir);

/// Raw return samples.
CommandResult cmd_sample(const RunConfig& cfg, const std::string& out_dir);

/// Kolmogorov-Smirnov distances between the return at each horizon and at a
/// reference horizon, with the geometrically rescaled column.
CommandResult cmd_decay(const RunConfig& cfg, const std::string& out_dir);

}  // namespace distlqr
