#include "distlqr/config.hpp"

#include <set>

#include "distlqr/errors.hpp"

namespace distlqr {

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in " + where);
}

double number(const json& j, const std::string& label) {
  if (!j.is_number()) throw Error(ErrorCode::ConfigError, label + " must be a number");
  return j.get<double>();
}

NoiseModel parse_noise(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "noise must be an object");
  const std::string kind_name = j.value("kind", "");
  const NoiseKind kind = noise_kind_from_name(kind_name);
  switch (kind) {
    case NoiseKind::Gaussian:
      reject_unknown_keys(j, {"kind", "sigma"}, "noise");
      if (!j.contains("sigma"))
        throw Error(ErrorCode::ConfigError, "gaussian noise needs 'sigma'");
      return NoiseModel::gaussian(matrix_from_json(j.at("sigma"), "noise.sigma"));
    case NoiseKind::GaussianMixture: {
      reject_unknown_keys(j, {"kind", "dim", "delta", "sigma"}, "noise");
      for (const char* k : {"dim", "delta", "sigma"})
        if (!j.contains(k))
          throw Error(ErrorCode::ConfigError, std::string("mixture noise needs '") + k + "'");
      return NoiseModel::gaussian_mixture(j.at("dim").get<Eigen::Index>(),
                                          number(j.at("delta"), "noise.delta"),
                                          number(j.at("sigma"), "noise.sigma"));
    }
    default:
      reject_unknown_keys(j, {"kind", "scale"}, "noise");
      if (!j.contains("scale"))
        throw Error(ErrorCode::ConfigError, kind_name + " noise needs 'scale'");
      return NoiseModel::scalar_family(kind, vector_from_json(j.at("scale"), "noise.scale"));
  }
}

json noise_to_json(const NoiseModel& m) {
  json j;
  j["kind"] = noise_kind_name(m.kind());
  switch (m.kind()) {
    case NoiseKind::Gaussian: j["sigma"] = matrix_to_json(m.sigma()); break;
    case NoiseKind::GaussianMixture:
      j["dim"] = m.dim();
      j["delta"] = m.mixture_delta();
      j["sigma"] = m.mixture_sigma();
      break;
    default: j["scale"] = vector_to_json(m.scale());
  }
  return j;
}

}  // namespace

Matrix matrix_from_json(const json& j, const std::string& label) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw Error(ErrorCode::ConfigError, label + " must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw Error(ErrorCode::ConfigError, label + " rows have inconsistent lengths");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = number(j[r][c], label + " entry");
  }
  return m;
}

Vector vector_from_json(const json& j, const std::string& label) {
  if (!j.is_array() || j.empty() || j[0].is_array())
    throw Error(ErrorCode::ConfigError, label + " must be a flat array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = number(j[i], label + " entry");
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

const NoiseModel& RunConfig::single_noise() const {
  if (noises.size() != 1)
    throw Error(ErrorCode::ConfigError, "this command needs exactly one noise model");
  return noises.front();
}

CurvatureOptions RunConfig::curvature_options() const {
  CurvatureOptions opts;
  opts.grid_points = grid.points;
  opts.quantile_lo = grid.quantile_lo;
  opts.quantile_hi = grid.quantile_hi;
  opts.cdf_floor = tolerances.cdf_floor;
  opts.curvature_tol = tolerances.curvature_tol;
  opts.smooth_window = curvature.smooth_window;
  opts.bootstrap = curvature.bootstrap;
  return opts;
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  reject_unknown_keys(doc,
                      {"system", "noise", "horizons", "mc", "series", "grid", "decay",
                       "curvature", "tolerances", "threads"},
                      "config");
  RunConfig cfg;

  if (!doc.contains("system")) throw Error(ErrorCode::ConfigError, "config needs 'system'");
  const json& sys = doc.at("system");
  reject_unknown_keys(sys, {"A", "B", "Q", "R", "gamma", "K", "x0"}, "system");
  for (const char* k : {"A", "B", "Q", "R", "gamma", "K", "x0"})
    if (!sys.contains(k))
      throw Error(ErrorCode::ConfigError, std::string("system needs '") + k + "'");
  cfg.system.A = matrix_from_json(sys.at("A"), "system.A");
  cfg.system.B = matrix_from_json(sys.at("B"), "system.B");
  cfg.system.Q = matrix_from_json(sys.at("Q"), "system.Q");
  cfg.system.R = matrix_from_json(sys.at("R"), "system.R");
  cfg.system.K = matrix_from_json(sys.at("K"), "system.K");
  cfg.system.x0 = vector_from_json(sys.at("x0"), "system.x0");
  cfg.system.gamma = number(sys.at("gamma"), "system.gamma");

  if (doc.contains("noise")) {
    const json& noise = doc.at("noise");
    if (noise.is_array())
      for (const auto& item : noise) cfg.noises.push_back(parse_noise(item));
    else
      cfg.noises.push_back(parse_noise(noise));
  }

  if (doc.contains("horizons")) {
    for (const auto& item : doc.at("horizons")) {
      if (!item.is_number_integer() || item.get<int>() < 1)
        throw Error(ErrorCode::ConfigError, "horizons must be positive integers");
      cfg.horizons.push_back(item.get<int>());
    }
  }

  if (doc.contains("mc")) {
    const json& mc = doc.at("mc");
    reject_unknown_keys(mc, {"samples", "seed", "path"}, "mc");
    if (mc.contains("samples")) {
      if (!mc.at("samples").is_number_integer() || mc.at("samples").get<long long>() < 1)
        throw Error(ErrorCode::ConfigError, "mc.samples must be a positive integer");
      cfg.mc.samples = mc.at("samples").get<std::size_t>();
    }
    if (mc.contains("seed")) cfg.mc.seed = mc.at("seed").get<std::uint64_t>();
    if (mc.contains("path")) {
      const std::string p = mc.at("path").get<std::string>();
      if (p == "fast") cfg.mc.path = SamplePath::Fast;
      else if (p == "slow") cfg.mc.path = SamplePath::Slow;
      else throw Error(ErrorCode::ConfigError, "mc.path must be 'fast' or 'slow'");
    }
  }

  if (doc.contains("series")) {
    const json& s = doc.at("series");
    reject_unknown_keys(s, {"beta_policy", "tol", "max_terms"}, "series");
    if (s.contains("beta_policy")) {
      const json& bp = s.at("beta_policy");
      if (bp.is_string() && bp.get<std::string>() == "min-weight") {
        cfg.series.beta_min_weight = true;
      } else if (bp.is_number()) {
        cfg.series.beta_min_weight = false;
        cfg.series.beta = bp.get<double>();
        if (!(cfg.series.beta > 0.0))
          throw Error(ErrorCode::ConfigError, "explicit beta must be positive");
      } else {
        throw Error(ErrorCode::ConfigError, "series.beta_policy must be 'min-weight' or a number");
      }
    }
    if (s.contains("tol")) cfg.series.tol = number(s.at("tol"), "series.tol");
    if (s.contains("max_terms")) cfg.series.max_terms = s.at("max_terms").get<std::size_t>();
  }

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    reject_unknown_keys(g, {"points", "quantile_lo", "quantile_hi"}, "grid");
    if (g.contains("points")) cfg.grid.points = g.at("points").get<int>();
    if (g.contains("quantile_lo")) cfg.grid.quantile_lo = number(g.at("quantile_lo"), "grid.quantile_lo");
    if (g.contains("quantile_hi")) cfg.grid.quantile_hi = number(g.at("quantile_hi"), "grid.quantile_hi");
    if (cfg.grid.points < 2) throw Error(ErrorCode::ConfigError, "grid.points must be >= 2");
    if (!(cfg.grid.quantile_lo < cfg.grid.quantile_hi))
      throw Error(ErrorCode::ConfigError, "grid quantiles must be ordered");
  }

  if (doc.contains("decay")) {
    const json& d = doc.at("decay");
    reject_unknown_keys(d, {"n_ref"}, "decay");
    if (d.contains("n_ref")) cfg.decay.n_ref = d.at("n_ref").get<int>();
  }

  if (doc.contains("curvature")) {
    const json& c = doc.at("curvature");
    reject_unknown_keys(c, {"smooth_window", "bootstrap"}, "curvature");
    if (c.contains("smooth_window")) cfg.curvature.smooth_window = c.at("smooth_window").get<int>();
    if (c.contains("bootstrap")) cfg.curvature.bootstrap = c.at("bootstrap").get<int>();
  }

  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    reject_unknown_keys(t,
                        {"lyapunov_fp_stop", "lyapunov_residual", "stabilizability_margin",
                         "symmetry_abs", "spectral_floor", "cdf_floor", "curvature_tol"},
                        "tolerances");
    auto load = [&](const char* key, double& field) {
      if (t.contains(key)) field = number(t.at(key), std::string("tolerances.") + key);
    };
    load("lyapunov_fp_stop", cfg.tolerances.lyapunov_fp_stop);
    load("lyapunov_residual", cfg.tolerances.lyapunov_residual);
    load("stabilizability_margin", cfg.tolerances.stabilizability_margin);
    load("symmetry_abs", cfg.tolerances.symmetry_abs);
    load("spectral_floor", cfg.tolerances.spectral_floor);
    load("cdf_floor", cfg.tolerances.cdf_floor);
    load("curvature_tol", cfg.tolerances.curvature_tol);
  }

  if (doc.contains("threads")) {
    cfg.threads = doc.at("threads").get<int>();
    if (cfg.threads < 1) throw Error(ErrorCode::ConfigError, "threads must be >= 1");
  }

  cfg.system.validate(cfg.tolerances);
  for (const auto& noise : cfg.noises)
    if (noise.dim() != cfg.system.n())
      throw Error(ErrorCode::ConfigError, "noise dimension differs from the state dimension");

  // materialized effective config
  json eff;
  eff["system"] = {{"A", matrix_to_json(cfg.system.A)}, {"B", matrix_to_json(cfg.system.B)},
                   {"Q", matrix_to_json(cfg.system.Q)}, {"R", matrix_to_json(cfg.system.R)},
                   {"gamma", cfg.system.gamma},         {"K", matrix_to_json(cfg.system.K)},
                   {"x0", vector_to_json(cfg.system.x0)}};
  if (!cfg.noises.empty()) {
    if (cfg.noises.size() == 1) {
      eff["noise"] = noise_to_json(cfg.noises[0]);
    } else {
      eff["noise"] = json::array();
      for (const auto& m : cfg.noises) eff["noise"].push_back(noise_to_json(m));
    }
  }
  eff["horizons"] = cfg.horizons;
  eff["mc"] = {{"samples", cfg.mc.samples},
               {"seed", cfg.mc.seed},
               {"path", cfg.mc.path == SamplePath::Fast ? "fast" : "slow"}};
  eff["series"] = {{"beta_policy", cfg.series.beta_min_weight ? json("min-weight")
                                                              : json(cfg.series.beta)},
                   {"tol", cfg.series.tol},
                   {"max_terms", cfg.series.max_terms}};
  eff["grid"] = {{"points", cfg.grid.points},
                 {"quantile_lo", cfg.grid.quantile_lo},
                 {"quantile_hi", cfg.grid.quantile_hi}};
  eff["decay"] = {{"n_ref", cfg.decay.n_ref}};
  eff["curvature"] = {{"smooth_window", cfg.curvature.smooth_window},
                      {"bootstrap", cfg.curvature.bootstrap}};
  eff["tolerances"] = {{"lyapunov_fp_stop", cfg.tolerances.lyapunov_fp_stop},
                       {"lyapunov_residual", cfg.tolerances.lyapunov_residual},
                       {"stabilizability_margin", cfg.tolerances.stabilizability_margin},
                       {"symmetry_abs", cfg.tolerances.symmetry_abs},
                       {"spectral_floor", cfg.tolerances.spectral_floor},
                       {"cdf_floor", cfg.tolerances.cdf_floor},
                       {"curvature_tol", cfg.tolerances.curvature_tol}};
  eff["threads"] = cfg.threads;
  cfg.effective = std::move(eff);
  return cfg;
}

json merge_config(json base, const json& overlay) {
  if (!overlay.is_object() || !base.is_object()) return overlay;
  for (const auto& [key, value] : overlay.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object())
      base[key] = merge_config(base[key], value);
    else
      base[key] = value;
  }
  return base;
}

}  // namespace distlqr
