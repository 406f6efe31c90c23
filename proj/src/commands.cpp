#include "distlqr/commands.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "distlqr/errors.hpp"

namespace distlqr {

namespace {

namespace fs = std::filesystem;

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmtb(bool b) { return b ? "true" : "false"; }

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const RunConfig& cfg) : out_(path) {
    if (!out_) throw Error(ErrorCode::IoError, "cannot open " + path);
    out_ << "# effective_config: " << cfg.effective.dump() << "\n";
  }

  void meta(const std::string& key, const std::string& value) {
    out_ << "# " << key << ": " << value << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  out << doc.dump(2) << "\n";
}

std::string out_path(const std::string& out_dir, const std::string& name) {
  fs::create_directories(out_dir);
  return (fs::path(out_dir) / name).string();
}

double beta_for(const SeriesConfig& series, const SpectralForm& sf) {
  return series.beta_min_weight ? sf.weights.minCoeff() : series.beta;
}

int reference_horizon(const RunConfig& cfg) {
  if (cfg.decay.n_ref > 0) return cfg.decay.n_ref;
  int n_ref = 0;
  for (int n : cfg.horizons) n_ref = std::max(n_ref, n);
  return n_ref;
}

std::uint64_t horizon_seed(std::uint64_t seed, int n) {
  std::uint64_t s = seed ^ (0x517cc1b727220a95ULL * std::uint64_t(n));
  return splitmix64(s);
}

json report_to_json(const LogConcavityReport& rep) {
  json j;
  j["noise_kind"] = rep.noise_kind;
  j["estimator"] = rep.estimator;
  j["pass"] = rep.pass;
  j["max_second_diff"] = rep.max_second_diff;
  j["curvature_tol"] = rep.curvature_tol;
  j["grid"] = rep.grid;
  j["second_diff"] = json::array();
  for (double d : rep.second_diff)
    j["second_diff"].push_back(std::isfinite(d) ? json(d) : json());
  return j;
}

}  // namespace

CommandResult cmd_analyze(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.horizons.empty()) throw Error(ErrorCode::ConfigError, "analyze needs horizons");
  const ClosedLoopAnalysis cl = solve_lyapunov(cfg.system, cfg.tolerances);
  const bool scalar = cl.n() == 1;

  const std::string csv_path = out_path(out_dir, "analyze.csv");
  const std::string json_path = out_path(out_dir, "analyze.json");
  CsvWriter csv(csv_path, cfg);
  csv.meta("lambda_bar", fmt6(cl.weighted_gain));
  std::vector<std::string> header = {"N",  "phi_max",          "eig_min",
                                     "eig_max", "lb",          "ub",
                                     "assumption_holds", "positive_definite"};
  if (scalar) header.push_back("delta_min");
  csv.row(header);

  json out;
  out["effective_config"] = cfg.effective;
  out["lambda_bar"] = cl.weighted_gain;
  out["lyapunov_norm"] = cl.p_eig_max;
  out["rows"] = json::array();

  for (int n : cfg.horizons) {
    const DominanceCertificate cert = certify_dominance(cl, n);
    const QuadraticForm qf = build_qform(cl, cfg.system.x0, n);
    const SpectrumCertificate sc = certify_pd(qf, cert, cl);
    std::vector<std::string> cells = {std::to_string(n), fmt6(cert.phi_max),
                                      fmt6(sc.eig_min),  fmt6(sc.eig_max),
                                      fmt6(sc.bound_lo), fmt6(sc.bound_hi),
                                      fmtb(cert.holds),  fmtb(sc.positive_definite)};
    json row;
    row["N"] = n;
    row["phi_max"] = cert.phi_max;
    row["phi"] = vector_to_json(cert.phi);
    row["eig_min"] = sc.eig_min;
    row["eig_max"] = sc.eig_max;
    row["lb"] = sc.bound_lo;
    row["ub"] = sc.bound_hi;
    row["lb_scaled"] = sc.bound_lo_scaled;
    row["assumption_holds"] = cert.holds;
    row["positive_definite"] = sc.positive_definite;
    if (scalar) {
      const Vector minors = scalar_minors(cl, n);
      cells.push_back(fmt6(minors.minCoeff()));
      row["delta"] = vector_to_json(minors);
      row["delta_min"] = minors.minCoeff();
    }
    csv.row(cells);
    out["rows"].push_back(std::move(row));
  }
  write_json(json_path, out);
  return {{csv_path, json_path}};
}

CommandResult cmd_pdf(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.horizons.empty()) throw Error(ErrorCode::ConfigError, "pdf needs a horizon");
  const NoiseModel& noise = cfg.single_noise();
  if (!noise.is_gaussian())
    throw Error(ErrorCode::ConfigError,
                "series unavailable for non-gaussian noise; use the sample command");
  const int n_horizon = cfg.horizons.front();
  const ClosedLoopAnalysis cl = solve_lyapunov(cfg.system, cfg.tolerances);
  const QuadraticForm qf = build_qform(cl, cfg.system.x0, n_horizon);
  const SpectralForm sf = spectral_reduce(qf, noise, cfg.tolerances);
  const double beta = beta_for(cfg.series, sf);
  const RubenSeries series(sf, beta, cfg.series.tol, cfg.series.max_terms);

  const double sd = std::sqrt(sf.variance());
  if (sd < 1e-9 * std::max(1.0, std::abs(sf.mean())))
    std::cerr << "warning: degenerate return distribution, mass collapses toward "
              << fmt6(qf.c) << "\n";

  SampleOptions sopts;
  sopts.path = cfg.mc.path;
  sopts.threads = cfg.threads;
  const std::vector<double> samples =
      sample_return(cfg.system, cl, noise, n_horizon, cfg.mc.samples, cfg.mc.seed, sopts);
  const EmpiricalCdf ecdf(samples);

  const double lo = ecdf.quantile(cfg.grid.quantile_lo);
  const double hi = ecdf.quantile(cfg.grid.quantile_hi);
  const auto grid = uniform_grid(lo, hi, cfg.grid.points);
  const double h = grid[1] - grid[0];

  // histogram density with cells centered on the grid points
  std::vector<double> hist(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = grid[i] - 0.5 * h;
    const double b = grid[i] + 0.5 * h;
    hist[i] = (ecdf(b) - ecdf(a)) / h;
  }

  const std::string csv_path = out_path(out_dir, "pdf.csv");
  const std::string json_path = out_path(out_dir, "pdf.json");
  CsvWriter csv(csv_path, cfg);
  csv.meta("seed", std::to_string(cfg.mc.seed));
  csv.meta("samples", std::to_string(cfg.mc.samples));
  csv.meta("beta", fmt6(series.beta()));
  csv.meta("terms", std::to_string(series.terms()));
  csv.meta("tail_bound", fmt6(series.tail_bound()));
  csv.row({"g", "pdf_ruben", "pdf_mc_histogram"});

  json out;
  out["effective_config"] = cfg.effective;
  out["seed"] = cfg.mc.seed;
  out["samples"] = cfg.mc.samples;
  out["beta"] = series.beta();
  out["terms"] = series.terms();
  out["tail_bound"] = series.tail_bound();
  out["offset"] = series.offset();
  out["mean_analytic"] = sf.mean();
  out["rows"] = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double pdf = series.pdf(grid[i]);
    csv.row({fmt6(grid[i]), fmt6(pdf), fmt6(hist[i])});
    out["rows"].push_back({{"g", grid[i]}, {"pdf_ruben", pdf}, {"pdf_mc_histogram", hist[i]}});
  }
  write_json(json_path, out);
  return {{csv_path, json_path}};
}

CommandResult cmd_logconcavity(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.horizons.empty()) throw Error(ErrorCode::ConfigError, "logconcavity needs a horizon");
  if (cfg.noises.empty()) throw Error(ErrorCode::ConfigError, "logconcavity needs noise models");
  const int n_horizon = cfg.horizons.front();
  const ClosedLoopAnalysis cl = solve_lyapunov(cfg.system, cfg.tolerances);
  const CurvatureOptions opts = cfg.curvature_options();

  SampleOptions sopts;
  sopts.path = cfg.mc.path;
  sopts.threads = cfg.threads;

  std::vector<LogConcavityReport> reports;
  for (const auto& noise : cfg.noises) {
    const std::vector<double> samples =
        sample_return(cfg.system, cl, noise, n_horizon, cfg.mc.samples, cfg.mc.seed, sopts);
    const EmpiricalCdf ecdf(samples);
    const auto grid = uniform_grid(ecdf.quantile(opts.quantile_lo),
                                   ecdf.quantile(opts.quantile_hi), opts.grid_points);
    auto rep = log_cdf_curvature(ecdf, grid, CurvatureEstimator::Smoothed, opts);
    rep.noise_kind = noise_kind_name(noise.kind());
    reports.push_back(std::move(rep));

    if (noise.is_gaussian()) {
      const QuadraticForm qf = build_qform(cl, cfg.system.x0, n_horizon);
      const SpectralForm sf = spectral_reduce(qf, noise, cfg.tolerances);
      const RubenSeries series(sf, beta_for(cfg.series, sf), cfg.series.tol,
                               cfg.series.max_terms);
      auto exact = log_cdf_curvature([&](double g) { return series.cdf(g); }, grid, opts);
      exact.noise_kind = noise_kind_name(noise.kind());
      reports.push_back(std::move(exact));
    }
  }

  const std::string csv_path = out_path(out_dir, "logconcavity.csv");
  const std::string json_path = out_path(out_dir, "logconcavity.json");
  CsvWriter csv(csv_path, cfg);
  csv.row({"noise_kind", "estimator", "g", "d2_log_cdf"});
  json out;
  out["effective_config"] = cfg.effective;
  out["reports"] = json::array();
  bool all_pass = true;
  for (const auto& rep : reports) {
    all_pass = all_pass && rep.pass;
    out["reports"].push_back(report_to_json(rep));
    for (std::size_t i = 0; i + 2 < rep.grid.size(); ++i)
      if (std::isfinite(rep.second_diff[i]))
        csv.row({rep.noise_kind, rep.estimator, fmt6(rep.grid[i + 1]), fmt6(rep.second_diff[i])});
  }
  out["all_pass"] = all_pass;
  write_json(json_path, out);
  return {{csv_path, json_path}};
}

CommandResult cmd_sample(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.horizons.empty()) throw Error(ErrorCode::ConfigError, "sample needs a horizon");
  const NoiseModel& noise = cfg.single_noise();
  const int n_horizon = cfg.horizons.front();
  const ClosedLoopAnalysis cl = solve_lyapunov(cfg.system, cfg.tolerances);
  SampleOptions sopts;
  sopts.path = cfg.mc.path;
  sopts.threads = cfg.threads;
  const std::vector<double> samples =
      sample_return(cfg.system, cl, noise, n_horizon, cfg.mc.samples, cfg.mc.seed, sopts);

  const std::string csv_path = out_path(out_dir, "samples.csv");
  CsvWriter csv(csv_path, cfg);
  csv.meta("seed", std::to_string(cfg.mc.seed));
  csv.meta("samples", std::to_string(cfg.mc.samples));
  csv.meta("horizon", std::to_string(n_horizon));
  csv.meta("path", cfg.mc.path == SamplePath::Fast ? "fast" : "slow");
  csv.row({"value"});
  char buf[32];
  for (double v : samples) {
    // full precision so the dump is bit-reproducible
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    csv.row({buf});
  }
  return {{csv_path}};
}

CommandResult cmd_decay(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.horizons.empty()) throw Error(ErrorCode::ConfigError, "decay needs horizons");
  const NoiseModel& noise = cfg.single_noise();
  const ClosedLoopAnalysis cl = solve_lyapunov(cfg.system, cfg.tolerances);
  const int n_ref = reference_horizon(cfg);
  SampleOptions sopts;
  sopts.path = cfg.mc.path;
  sopts.threads = cfg.threads;

  const EmpiricalCdf ref(sample_return(cfg.system, cl, noise, n_ref, cfg.mc.samples,
                                       horizon_seed(cfg.mc.seed, n_ref), sopts));

  const std::string csv_path = out_path(out_dir, "decay.csv");
  const std::string json_path = out_path(out_dir, "decay.json");
  CsvWriter csv(csv_path, cfg);
  csv.meta("n_ref", std::to_string(n_ref));
  csv.meta("seed", std::to_string(cfg.mc.seed));
  csv.meta("samples", std::to_string(cfg.mc.samples));
  csv.row({"N", "ks", "ks_scaled"});

  json out;
  out["effective_config"] = cfg.effective;
  out["n_ref"] = n_ref;
  out["rows"] = json::array();
  for (int n : cfg.horizons) {
    const EmpiricalCdf en(sample_return(cfg.system, cl, noise, n, cfg.mc.samples,
                                        horizon_seed(cfg.mc.seed, n), sopts));
    const double ks = ks_distance(en, ref);
    const double scaled = ks * std::pow(cfg.system.gamma, -double(n));
    csv.row({std::to_string(n), fmt6(ks), fmt6(scaled)});
    out["rows"].push_back({{"N", n}, {"ks", ks}, {"ks_scaled", scaled}});
  }
  write_json(json_path, out);
  return {{csv_path, json_path}};
}

}  // namespace distlqr
