#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "distlqr/chisq.hpp"
#include "distlqr/concavity.hpp"

namespace distlqr {

using json = nlohmann::json;

struct McConfig {
  std::size_t samples = 1000000;
  std::uint64_t seed = 42;
  SamplePath path = SamplePath::Fast;
};

struct SeriesConfig {
  bool beta_min_weight = true;  // beta = smallest spectral weight
  double beta = 0.0;            // explicit beta when beta_min_weight is false
  double tol = 1e-6;
  std::size_t max_terms = 10000;
};

struct GridConfig {
  int points = 400;
  double quantile_lo = 0.001;
  double quantile_hi = 0.999;
};

struct DecayConfig {
  int n_ref = 0;  // 0 means the largest horizon
};

struct CurvatureConfig {
  int smooth_window = 5;
  int bootstrap = 200;
};

/// Parsed and validated run configuration. `effective` is the fully
/// materialized JSON document (defaults filled in) echoed into every output.
struct RunConfig {
  SystemSpec system;
  std::vector<NoiseModel> noises;
  std::vector<int> horizons;
  McConfig mc;
  SeriesConfig series;
  GridConfig grid;
  DecayConfig decay;
  CurvatureConfig curvature;
  Tolerances tolerances;
  int threads = 1;
  json effective;

  const NoiseModel& single_noise() const;
  CurvatureOptions curvature_options() const;
};

/// Strict parse: unknown keys anywhere in the document are rejected.
RunConfig parse_config(const json& doc);

/// Built-in configurations; names: example1, example2, example3.
json preset_config(const std::string& name);

/// Deep merge, overlay wins; objects merge recursively, everything else
/// replaces.
json merge_config(json base, const json& overlay);

Matrix matrix_from_json(const json& j, const std::string& label);
Vector vector_from_json(const json& j, const std::string& label);
json matrix_to_json(const Matrix& m);
json vector_to_json(const Vector& v);

}  // namespace distlqr
