#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "distlqr/errors.hpp"
#include "distlqr/model.hpp"
#include "distlqr/rng.hpp"

using namespace distlqr;

namespace {

SystemSpec scalar_spec(double a, double b, double q, double r, double k, double gamma,
                       double x0 = 1.0) {
  SystemSpec s;
  s.A = Matrix::Constant(1, 1, a);
  s.B = Matrix::Constant(1, 1, b);
  s.Q = Matrix::Constant(1, 1, q);
  s.R = Matrix::Constant(1, 1, r);
  s.K = Matrix::Constant(1, 1, k);
  s.gamma = gamma;
  s.x0 = Vector::Constant(1, x0);
  return s;
}

SystemSpec example1_spec() {
  SystemSpec s;
  s.A.resize(3, 3);
  s.A << 1.01, 0.01, 0.0,
         0.01, 1.01, 0.01,
         0.0, 0.01, 1.01;
  s.B = Matrix::Identity(3, 3);
  s.Q = Matrix::Identity(3, 3);
  s.R = Matrix::Identity(3, 3);
  s.K.resize(3, 3);
  s.K << 56.19, 0.7692, 0.0027,
         0.7692, 56.20, 0.7692,
         0.0027, 0.7692, 56.19;
  s.K *= -0.015;
  s.gamma = 0.6;
  s.x0 = Vector::Constant(3, 3.0);
  return s;
}

/// Random spec with n <= max_n, K = 0 and A scaled so rho(sqrt(gamma) A)
/// lands at a chosen target.
SystemSpec random_stable_spec(Rng& rng, int max_n, double target_rho) {
  const int n = 1 + int(rng.next_u64() % max_n);
  SystemSpec s;
  s.A.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.A(i, j) = 2.0 * rng.uniform() - 1.0;
  s.B = Matrix::Identity(n, n);
  s.Q = Matrix::Identity(n, n);
  s.R = Matrix::Identity(n, n);
  s.K = Matrix::Zero(n, n);
  s.gamma = 0.3 + 0.6 * rng.uniform();
  const double rho = spectral_radius(s.A);
  if (rho > 0.0) s.A *= target_rho / (std::sqrt(s.gamma) * rho);
  s.x0.resize(n);
  for (int i = 0; i < n; ++i) s.x0(i) = 2.0 * rng.uniform() - 1.0;
  return s;
}

}  // namespace

TEST_CASE("zero closed loop gives P = Q_cl and zero gain") {
  const auto cl = solve_lyapunov(scalar_spec(0.0, 1.0, 1.0, 1.0, 0.0, 0.5));
  CHECK(cl.A_cl(0, 0) == doctest::Approx(0.0));
  CHECK(cl.P(0, 0) == doctest::Approx(1.0));
  CHECK(cl.weighted_gain == doctest::Approx(0.0));
}

TEST_CASE("scalar geometric-series fixed point") {
  // A=1, B=1, K=-0.5 -> A_cl=0.5, Q_cl=1.25, P = 1.25 + 0.125 P = 10/7
  const auto spec = scalar_spec(1.0, 1.0, 1.0, 1.0, -0.5, 0.5);
  const auto cl = solve_lyapunov(spec);
  CHECK(cl.P(0, 0) == doctest::Approx(10.0 / 7.0).epsilon(1e-12));
  const Matrix fp = lyapunov_fixed_point(cl.A_cl, cl.Q_cl, spec.gamma);
  CHECK(fp(0, 0) == doctest::Approx(10.0 / 7.0).epsilon(1e-10));
}

TEST_CASE("example system matches the published contraction factor") {
  const auto cl = solve_lyapunov(example1_spec());
  CHECK(std::abs(cl.weighted_gain - 0.1692) < 5e-4);
  CHECK(weighted_gain_eig_route(cl) == doctest::Approx(cl.weighted_gain).epsilon(1e-8));
}

TEST_CASE("solver routes agree on random stabilizing instances") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const auto spec = random_stable_spec(rng, 6, 0.2 + 0.7 * rng.uniform());
    const auto cl = solve_lyapunov(spec);
    const Matrix direct = lyapunov_direct(cl.A_cl, cl.Q_cl, spec.gamma);
    const Matrix fixed = lyapunov_fixed_point(cl.A_cl, cl.Q_cl, spec.gamma);
    const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
    CHECK((direct - fixed).cwiseAbs().maxCoeff() / scale < 1e-9);

    // per-solve residual contract
    const double resid =
        (cl.P - cl.Q_cl - spec.gamma * cl.A_cl.transpose() * cl.P * cl.A_cl).norm();
    CHECK(resid <= 1e-10 * cl.P.norm());

    // dual gain routes
    CHECK(weighted_gain_eig_route(cl) == doctest::Approx(cl.weighted_gain).epsilon(1e-8));

    // I - P^{-1/2} Q_cl P^{-1/2} must be positive semidefinite
    const Matrix inner =
        Matrix::Identity(cl.n(), cl.n()) - cl.P_inv_sqrt * cl.Q_cl * cl.P_inv_sqrt;
    CHECK(symmetric_eigenvalues(0.5 * (inner + inner.transpose()))(0) >= -1e-12);
  }
}

TEST_CASE("identity residual is tiny") {
  SUBCASE("zero closed loop: exact") {
    const auto cl = solve_lyapunov(scalar_spec(0.0, 1.0, 1.0, 1.0, 0.0, 0.5));
    CHECK(weighted_identity_residual(cl) == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("example system") {
    const auto cl = solve_lyapunov(example1_spec());
    const double rhs = spectral_norm(cl.A_weighted.transpose() * cl.A_weighted);
    CHECK(weighted_identity_residual(cl) <= 1e-9 * rhs + 1e-12);
  }
  SUBCASE("random 2x2 with identity stage cost") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
      const auto spec = random_stable_spec(rng, 2, 0.2 + 0.7 * rng.uniform());
      const auto cl = solve_lyapunov(spec);
      const double rhs = spectral_norm(cl.A_weighted.transpose() * cl.A_weighted);
      CHECK(weighted_identity_residual(cl) <= 1e-9 * rhs + 1e-12);
    }
  }
}

TEST_CASE("non-stabilizing systems are rejected") {
  // rho(sqrt(0.5) * 1.5) > 1
  try {
    (void)solve_lyapunov(scalar_spec(1.5, 1.0, 1.0, 1.0, 0.0, 0.5));
    FAIL("expected NonStabilizing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonStabilizing);
  }
}

TEST_CASE("invalid problem data is rejected") {
  auto spec = scalar_spec(0.5, 1.0, 1.0, 1.0, 0.0, 0.5);
  SUBCASE("indefinite Q") {
    spec.Q(0, 0) = -1.0;
    CHECK_THROWS_AS((void)solve_lyapunov(spec), const Error&);
  }
  SUBCASE("gamma out of range") {
    spec.gamma = 1.0;
    CHECK_THROWS_AS((void)solve_lyapunov(spec), const Error&);
  }
  SUBCASE("dimension mismatch") {
    spec.x0 = Vector::Zero(2);
    CHECK_THROWS_AS((void)solve_lyapunov(spec), const Error&);
  }
}

TEST_CASE("dominance ratios: closed form equals term accumulation") {
  const auto cl = solve_lyapunov(example1_spec());
  for (int n : {1, 2, 7, 20}) {
    const auto cert = certify_dominance(cl, n);
    const double g = cl.weighted_gain;
    for (int i = 1; i <= n; ++i) {
      double acc = 0.0;
      for (int j = 1; j <= i; ++j) acc += std::pow(g, j);
      for (int j = 1; j <= n - i; ++j) acc += std::pow(cl.gamma * g, j);
      CHECK(cert.phi(i - 1) == doctest::Approx(acc).epsilon(1e-12));
    }
  }
}

TEST_CASE("dominance ratios vanish for a zero closed loop") {
  const auto cl = solve_lyapunov(scalar_spec(0.0, 1.0, 1.0, 1.0, 0.0, 0.5));
  const auto cert = certify_dominance(cl, 12);
  CHECK(cert.phi.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(cert.holds);
}

TEST_CASE("geometric sums handle the r = 1 edge") {
  CHECK(geometric_sum(1.0, 5) == doctest::Approx(5.0));
  CHECK(geometric_sum(0.5, 3) == doctest::Approx(0.5 + 0.25 + 0.125));
  CHECK(geometric_sum(0.5, 0) == 0.0);
}

TEST_CASE("ratios increase with the gain and the maximum with the horizon") {
  // synthetic analysis object: only gamma and weighted_gain matter here
  ClosedLoopAnalysis cl;
  cl.gamma = 0.6;
  const int n = 9;
  Vector prev = Vector::Constant(n, -1.0);
  for (double g : {0.0, 0.05, 0.1, 0.2, 0.4}) {
    cl.weighted_gain = g;
    const auto cert = certify_dominance(cl, n);
    for (int i = 0; i < n; ++i) CHECK(cert.phi(i) >= prev(i) - 1e-15);
    prev = cert.phi;
  }
  cl.weighted_gain = 0.1692;
  double prev_max = 0.0;
  for (int horizon : {2, 3, 5, 10, 15, 20, 25}) {
    const auto cert = certify_dominance(cl, horizon);
    CHECK(cert.phi_max >= prev_max - 1e-15);
    prev_max = cert.phi_max;
  }
}

TEST_CASE("published dominance maxima for the example system") {
  const auto cl = solve_lyapunov(example1_spec());
  const std::pair<int, double> rows[] = {{2, 0.2708}, {10, 0.3167}};
  for (const auto& [n, expected] : rows) {
    const auto cert = certify_dominance(cl, n);
    CHECK(std::abs(cert.phi_max - expected) < 5e-4);
    CHECK(cert.holds);
  }
}
