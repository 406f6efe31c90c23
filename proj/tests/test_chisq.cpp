#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "distlqr/chisq.hpp"
#include "distlqr/errors.hpp"
#include "test_support.hpp"

using namespace distlqr;
using namespace distlqr::testing;

namespace {

Matrix sigma2x2() {
  Matrix s(2, 2);
  s << 1.0, 0.3,
       0.3, 0.8;
  return s;
}

double trace_prod(const Matrix& a, const Matrix& b) { return (a * b).trace(); }

Matrix kron_block(const Matrix& s, int blocks) {
  const Eigen::Index n = s.rows();
  Matrix big = Matrix::Zero(blocks * n, blocks * n);
  for (int i = 0; i < blocks; ++i) big.block(i * n, i * n, n, n) = s;
  return big;
}

}  // namespace

TEST_CASE("single-coordinate reduction by hand") {
  // S(z) = h z^2 + 2 l z + c with z ~ N(0, s2):
  // h (z + l/h)^2 + c - l^2/h  =>  weight s2 h, eta l/(s h), offset c - l^2/h
  const double h = 2.0, l = 0.7, c = 3.0, s2 = 1.5;
  QuadraticForm qf;
  qf.H = Matrix::Constant(1, 1, h);
  qf.L = Vector::Constant(1, l);
  qf.c = c;
  qf.N = 1;
  qf.n = 1;
  const auto sf = spectral_reduce(qf, NoiseModel::gaussian(Matrix::Constant(1, 1, s2)));
  CHECK(sf.weights(0) == doctest::Approx(s2 * h));
  CHECK(std::abs(sf.noncentralities(0)) == doctest::Approx(l / (std::sqrt(s2) * h)));
  CHECK(sf.offset == doctest::Approx(c - l * l / h));
  CHECK(sf.dof == 1);
}

TEST_CASE("no linear term: weights are the eigenvalues of H") {
  const auto spec = example3_spec();  // x0 = 0 kills L
  const auto cl = solve_lyapunov(spec);
  const auto qf = build_qform(cl, spec.x0, 4);
  REQUIRE(qf.L.cwiseAbs().maxCoeff() == 0.0);
  const auto sf = spectral_reduce(qf, NoiseModel::gaussian(Matrix::Identity(2, 2)));
  const Vector ev = symmetric_eigenvalues(qf.H);
  for (int i = 0; i < ev.size(); ++i) CHECK(sf.weights(i) == doctest::Approx(ev(i)));
  CHECK(sf.noncentralities.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(sf.offset == doctest::Approx(qf.c));
}

TEST_CASE("moment identities against the direct formulas") {
  Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const auto spec = random_stable_spec(rng, 3, 0.2 + 0.6 * rng.uniform());
    const auto cl = solve_lyapunov(spec);
    const int horizon = 1 + int(rng.next_u64() % 6);
    const auto qf = build_qform(cl, spec.x0, horizon);
    Matrix s = Matrix::Random(spec.n(), spec.n());
    s = (s * s.transpose() + 0.5 * Matrix::Identity(spec.n(), spec.n())).eval();
    const auto sf = spectral_reduce(qf, NoiseModel::gaussian(s));

    const Matrix sz = kron_block(s, horizon);
    const double mean_direct = trace_prod(qf.H, sz) + qf.c;
    const double var_direct =
        2.0 * trace_prod(qf.H * sz, qf.H * sz) + 4.0 * qf.L.dot(sz * qf.L);
    CHECK(sf.mean() == doctest::Approx(mean_direct).epsilon(1e-8));
    CHECK(sf.variance() == doctest::Approx(var_direct).epsilon(1e-8));
    CHECK(sf.weights.minCoeff() > 0.0);
  }
}

TEST_CASE("whitened-form positivity tracks the eigensolve verdict") {
  Rng rng(57);
  int pd_count = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = random_stable_spec(rng, 3, 0.2 + 0.75 * rng.uniform());
    const auto cl = solve_lyapunov(spec);
    const int horizon = 1 + int(rng.next_u64() % 8);
    const auto qf = build_qform(cl, spec.x0, horizon);
    const auto sc = certify_pd(qf, certify_dominance(cl, horizon), cl);
    if (!sc.positive_definite) continue;
    ++pd_count;
    const auto sf = spectral_reduce(qf, NoiseModel::gaussian(
                                            Matrix::Identity(spec.n(), spec.n())));
    CHECK(sf.weights.minCoeff() > 0.0);
  }
  CHECK(pd_count > 30);
}

TEST_CASE("central case collapses to a single gamma term") {
  SpectralForm sf;
  sf.weights = Vector::Constant(6, 0.8);
  sf.noncentralities = Vector::Zero(6);
  sf.offset = 2.0;
  sf.dof = 6;
  const RubenSeries series(sf, 0.8, 1e-10);
  CHECK(series.terms() == 1);
  CHECK(series.coeff_scaled(0) * std::exp(series.log_scale()) == doctest::Approx(1.0));
  CHECK(series.tail_bound() <= 1e-12);

  // chi-square with 6 dof, scaled by the weight
  for (double q : {0.5, 2.0, 5.0, 11.0}) {
    const double expected_cdf = boost::math::gamma_p(3.0, q / (2.0 * 0.8));
    const double expected_pdf =
        boost::math::gamma_p_derivative(3.0, q / (2.0 * 0.8)) / (2.0 * 0.8);
    CHECK(series.cdf(sf.offset + q) == doctest::Approx(expected_cdf).epsilon(1e-8));
    CHECK(series.pdf(sf.offset + q) == doctest::Approx(expected_pdf).epsilon(1e-8));
  }
}

TEST_CASE("windowed evaluation equals the direct truncated sum") {
  const auto spec = scalar_spec(0.5, 1.0, 1.0, 1.0, 0.0, 0.5);
  const auto cl = solve_lyapunov(spec);
  const auto qf = build_qform(cl, spec.x0, 4);
  const auto sf = spectral_reduce(qf, NoiseModel::gaussian(Matrix::Constant(1, 1, 1.3)));
  const RubenSeries series(sf, sf.weights.minCoeff(), 1e-9);
  REQUIRE(series.terms() < 2000);

  const double scale = std::exp(series.log_scale());
  for (double p : {0.02, 0.2, 0.5, 0.8, 0.99}) {
    const double g = series.quantile(p);
    const double x = (g - series.offset()) / (2.0 * series.beta());
    double cdf_direct = 0.0, pdf_direct = 0.0;
    for (std::size_t k = 0; k < series.terms(); ++k) {
      const double ak = series.coeff_scaled(k) * scale;
      cdf_direct += ak * boost::math::gamma_p(series.alpha() + double(k), x);
      pdf_direct += ak *
                    boost::math::gamma_p_derivative(series.alpha() + double(k), x) /
                    (2.0 * series.beta());
    }
    CHECK(series.cdf(g) == doctest::Approx(cdf_direct).epsilon(1e-10));
    CHECK(series.pdf(g) == doctest::Approx(pdf_direct).epsilon(1e-10));
  }
}

TEST_CASE("series CDF: support edge, monotonicity, range, quantile inverse") {
  const auto spec = example3_spec();
  const auto cl = solve_lyapunov(spec);
  const auto qf = build_qform(cl, spec.x0, 3);
  const auto sf = spectral_reduce(qf, NoiseModel::gaussian(Matrix::Identity(2, 2)));
  const RubenSeries series(sf, sf.weights.minCoeff(), 1e-8, 200000);

  CHECK(series.cdf(sf.offset) == 0.0);
  CHECK(series.cdf(sf.offset - 5.0) == 0.0);
  CHECK(series.pdf(sf.offset) == 0.0);

  double prev = -1.0;
  const double hi = series.quantile(1.0 - 1e-9);
  for (int i = 0; i <= 120; ++i) {
    const double g = sf.offset + (hi - sf.offset) * double(i) / 120.0;
    const double f = series.cdf(g);
    CHECK(f >= prev - 1e-12);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    prev = f;
  }
  for (double p : {0.1, 0.5, 0.9}) {
    CHECK(series.cdf(series.quantile(p)) == doctest::Approx(p).epsilon(1e-6));
  }
}

TEST_CASE("density integrates to one") {
  const auto spec = example3_spec();
  const auto cl = solve_lyapunov(spec);
  const auto qf = build_qform(cl, spec.x0, 3);
  const auto sf = spectral_reduce(qf, NoiseModel::gaussian(Matrix::Identity(2, 2)));
  const RubenSeries series(sf, sf.weights.minCoeff(), 1e-8, 200000);

  const double lo = series.offset();
  const double hi = series.quantile(1.0 - 1e-8);
  const int steps = 20000;
  const double h = (hi - lo) / steps;
  double integral = 0.5 * (series.pdf(lo) + series.pdf(hi));
  for (int i = 1; i < steps; ++i) integral += series.pdf(lo + i * h);
  integral *= h;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("distributional identity: form samples vs spectral samples") {
  const auto spec = example1_spec();
  const auto cl = solve_lyapunov(spec);
  const int horizon = 4;
  const auto qf = build_qform(cl, spec.x0, horizon);
  Matrix sigma(3, 3);
  sigma << 1.0, 0.5, 0.3,
           0.5, 2.0, 0.4,
           0.3, 0.4, 2.0;
  const auto noise = NoiseModel::gaussian(sigma);
  const auto sf = spectral_reduce(qf, noise);

  const std::size_t m = 200000;
  const std::vector<double> form_vals = sample_return(spec, cl, noise, horizon, m, 5150);
  Rng rng(6021);
  std::vector<double> spectral_vals(m);
  for (auto& v : spectral_vals) {
    double acc = sf.offset;
    for (Eigen::Index i = 0; i < sf.dof; ++i) {
      const double y = rng.normal() + sf.noncentralities(i);
      acc += sf.weights(i) * y * y;
    }
    v = acc;
  }
  const double ks = ks_distance(EmpiricalCdf(form_vals), EmpiricalCdf(spectral_vals));
  CHECK(ks < 0.01);  // two-sample 99% band at this size is ~0.0052
}

TEST_CASE("series CDF matches sampled returns") {
  const auto spec = example3_spec();
  const auto cl = solve_lyapunov(spec);
  const int horizon = 5;
  const auto qf = build_qform(cl, spec.x0, horizon);
  const auto noise = NoiseModel::gaussian(sigma2x2());
  const auto sf = spectral_reduce(qf, noise);
  const RubenSeries series(sf, sf.weights.minCoeff(), 1e-7, 400000);

  const std::size_t m = 200000;
  const EmpiricalCdf ecdf(sample_return(spec, cl, noise, horizon, m, 99));
  const double ks = ks_distance(ecdf, [&](double g) { return series.cdf(g); });
  CHECK(ks < 0.008);  // one-sample 99% band is ~0.0036
}

TEST_CASE("sampler determinism and the two evaluation paths") {
  const auto spec = example1_spec();
  const auto cl = solve_lyapunov(spec);
  const auto noise = NoiseModel::gaussian(Matrix::Identity(3, 3));

  SampleOptions fast;
  const auto a = sample_return(spec, cl, noise, 6, 30000, 424242, fast);
  const auto b = sample_return(spec, cl, noise, 6, 30000, 424242, fast);
  CHECK(a == b);  // bitwise

  SampleOptions threaded = fast;
  threaded.threads = 3;
  const auto c = sample_return(spec, cl, noise, 6, 30000, 424242, threaded);
  CHECK(a == c);  // thread count cannot change the stream

  SampleOptions slow = fast;
  slow.path = SamplePath::Slow;
  const auto d = sample_return(spec, cl, noise, 6, 30000, 424242, slow);
  REQUIRE(d.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(a[i] - d[i]) <= 1e-9 * (1.0 + std::abs(a[i])));

  const auto other_seed = sample_return(spec, cl, noise, 6, 30000, 7, fast);
  CHECK(a != other_seed);
}

TEST_CASE("sample mean within three standard errors of the analytic mean") {
  const auto spec = example1_spec();
  const auto cl = solve_lyapunov(spec);
  Matrix sigma(3, 3);
  sigma << 1.0, 0.5, 0.3,
           0.5, 2.0, 0.4,
           0.3, 0.4, 2.0;
  const auto noise = NoiseModel::gaussian(sigma);
  const int horizon = 8;
  const auto qf = build_qform(cl, spec.x0, horizon);
  const auto sf = spectral_reduce(qf, noise);

  const std::size_t m = 400000;
  const auto vals = sample_return(spec, cl, noise, horizon, m, 321);
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= double(m);
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= double(m - 1);
  const double se = std::sqrt(var / double(m));
  CHECK(std::abs(mean - sf.mean()) <= 3.0 * se);
}

TEST_CASE("empirical CDF basics") {
  const EmpiricalCdf ecdf({1.0, 2.0, 3.0});
  CHECK(ecdf(2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(ecdf(0.5) == 0.0);
  CHECK(ecdf(3.5) == 1.0);
  CHECK(ks_distance(ecdf, ecdf) == 0.0);
  CHECK_THROWS_AS(EmpiricalCdf({}), const Error&);
}

TEST_CASE("shifted-argument edge: zero-variance limit concentrates near c") {
  const auto spec = example1_spec();
  const auto cl = solve_lyapunov(spec);
  const auto noise = NoiseModel::gaussian(1e-12 * Matrix::Identity(3, 3));
  const auto vals = sample_return(spec, cl, noise, 5, 2000, 11);
  const auto qf = build_qform(cl, spec.x0, 5);
  for (double v : vals) CHECK(v == doctest::Approx(qf.c).epsilon(1e-4));
}

TEST_CASE("invalid inputs") {
  const auto spec = example3_spec();
  const auto cl = solve_lyapunov(spec);
  const auto qf = build_qform(cl, spec.x0, 3);

  SUBCASE("beta out of range") {
    const auto sf = spectral_reduce(qf, NoiseModel::gaussian(Matrix::Identity(2, 2)));
    CHECK_THROWS_AS(RubenSeries(sf, -1.0, 1e-6), const Error&);
    CHECK_THROWS_AS(RubenSeries(sf, 2.1 * sf.weights.minCoeff(), 1e-6), const Error&);
    try {
      RubenSeries s(sf, 3.0 * sf.weights.maxCoeff(), 1e-6);
      FAIL("expected BetaOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BetaOutOfRange);
    }
  }
  SUBCASE("series cap reached") {
    const auto sf = spectral_reduce(qf, NoiseModel::gaussian(sigma2x2()));
    try {
      RubenSeries s(sf, sf.weights.minCoeff(), 1e-8, 10);
      FAIL("expected SeriesNotConverged");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SeriesNotConverged);
    }
  }
  SUBCASE("spectral reduction wants gaussian noise") {
    CHECK_THROWS_AS(
        (void)spectral_reduce(qf, NoiseModel::scalar_family(NoiseKind::Uniform,
                                                            Vector::Constant(2, 1.0))),
        const Error&);
  }
  SUBCASE("covariance must be SPD") {
    Matrix bad(2, 2);
    bad << 1.0, 2.0,
           2.0, 1.0;  // eigenvalues 3, -1
    try {
      (void)NoiseModel::gaussian(bad);
      FAIL("expected CovarianceNotSPD");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CovarianceNotSPD);
    }
  }
}

TEST_CASE("one-shot wrappers agree with the series object") {
  const auto spec = scalar_spec(0.3, 1.0, 1.0, 1.0, 0.0, 0.5);
  const auto cl = solve_lyapunov(spec);
  const auto qf = build_qform(cl, spec.x0, 3);
  const auto sf = spectral_reduce(qf, NoiseModel::gaussian(Matrix::Constant(1, 1, 1.0)));
  const double beta = sf.weights.minCoeff();
  const RubenSeries series(sf, beta, 1e-8);
  const double g = sf.offset + 2.0;
  CHECK(ruben_pdf(sf, beta, 1e-8, g) == doctest::Approx(series.pdf(g)));
  CHECK(ruben_cdf(sf, beta, 1e-8, g) == doctest::Approx(series.cdf(g)));
}
