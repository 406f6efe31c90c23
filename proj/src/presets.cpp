#include "distlqr/config.hpp"
#include "distlqr/errors.hpp"

namespace distlqr {

namespace {

json identity(int n) {
  Matrix m = Matrix::Identity(n, n);
  return matrix_to_json(m);
}

/// Three-state data-center cooling model under a fixed stabilizing gain.
json example1() {
  Matrix a(3, 3);
  a << 1.01, 0.01, 0.00,
       0.01, 1.01, 0.01,
       0.00, 0.01, 1.01;
  Matrix k(3, 3);
  k << 56.19, 0.7692, 0.0027,
       0.7692, 56.20, 0.7692,
       0.0027, 0.7692, 56.19;
  k *= -0.015;

  json cfg;
  cfg["system"] = {{"A", matrix_to_json(a)}, {"B", identity(3)},   {"Q", identity(3)},
                   {"R", identity(3)},       {"gamma", 0.6},       {"K", matrix_to_json(k)},
                   {"x0", {3.0, 3.0, 3.0}}};
  cfg["noise"] = {{"kind", "gaussian"}, {"sigma", identity(3)}};
  cfg["horizons"] = {2, 3, 5, 10, 15, 20, 25};
  cfg["mc"] = {{"samples", 1000000}, {"seed", 20240601}};
  return cfg;
}

/// Same plant with a correlated disturbance covariance; single horizon for
/// the density command.
json example2() {
  json cfg = example1();
  Matrix sigma(3, 3);
  sigma << 1.0, 0.5, 0.3,
           0.5, 2.0, 0.4,
           0.3, 0.4, 2.0;
  cfg["noise"] = {{"kind", "gaussian"}, {"sigma", matrix_to_json(sigma)}};
  cfg["horizons"] = {20};
  cfg["grid"] = {{"points", 200}, {"quantile_lo", 0.0005}, {"quantile_hi", 0.9995}};
  // the spectral weights span ~5 orders of magnitude here; the mixture
  // series needs on the order of 1e6 coefficients
  cfg["series"] = {{"beta_policy", "min-weight"}, {"tol", 1e-6}, {"max_terms", 2000000}};
  return cfg;
}

/// Two-state vehicle steering model; five log-concave disturbance families
/// with unit scales for the CDF-curvature reproduction.
json example3() {
  Matrix a(2, 2);
  a << 1.0, 0.2,
       0.0, 1.0;
  Matrix b(2, 1);
  b << 0.06,
       0.20;
  Matrix q = 10.0 * Matrix::Identity(2, 2);
  Matrix r(1, 1);
  r << 1.0;
  Matrix k(1, 2);
  k << -2.11, -2.56;

  json cfg;
  cfg["system"] = {{"A", matrix_to_json(a)}, {"B", matrix_to_json(b)},
                   {"Q", matrix_to_json(q)}, {"R", matrix_to_json(r)},
                   {"gamma", 0.6},           {"K", matrix_to_json(k)},
                   {"x0", {0.0, 0.0}}};
  cfg["noise"] = json::array({json{{"kind", "gaussian"}, {"sigma", identity(2)}},
                              json{{"kind", "uniform"}, {"scale", {1.0, 1.0}}},
                              json{{"kind", "laplace"}, {"scale", {1.0, 1.0}}},
                              json{{"kind", "logistic"}, {"scale", {1.0, 1.0}}},
                              json{{"kind", "triangular"}, {"scale", {1.0, 1.0}}}});
  cfg["horizons"] = {20};
  cfg["mc"] = {{"samples", 1000000}, {"seed", 20240603}};
  cfg["series"] = {{"beta_policy", "min-weight"}, {"tol", 1e-6}, {"max_terms", 400000}};
  return cfg;
}

}  // namespace

json preset_config(const std::string& name) {
  if (name == "example1") return example1();
  if (name == "example2") return example2();
  if (name == "example3") return example3();
  throw Error(ErrorCode::ConfigError, "unknown preset '" + name + "'");
}

}  // namespace distlqr
