#include "distlqr/noise.hpp"

#include <cmath>

#include "distlqr/errors.hpp"

namespace distlqr {

const char* noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Uniform: return "uniform";
    case NoiseKind::Laplace: return "laplace";
    case NoiseKind::Logistic: return "logistic";
    case NoiseKind::Triangular: return "triangular";
    case NoiseKind::GaussianMixture: return "gaussian_mixture";
  }
  return "unknown";
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "uniform") return NoiseKind::Uniform;
  if (name == "laplace") return NoiseKind::Laplace;
  if (name == "logistic") return NoiseKind::Logistic;
  if (name == "triangular") return NoiseKind::Triangular;
  if (name == "gaussian_mixture") return NoiseKind::GaussianMixture;
  throw Error(ErrorCode::ConfigError, "unknown noise kind '" + name + "'");
}

NoiseModel NoiseModel::gaussian(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols())
    throw Error(ErrorCode::CovarianceNotSPD, "covariance must be square");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if (max_abs_asymmetry(sigma) > 1e-10 * scale)
    throw Error(ErrorCode::CovarianceNotSPD, "covariance is not symmetric");
  NoiseModel m;
  m.kind_ = NoiseKind::Gaussian;
  m.dim_ = sigma.rows();
  m.sigma_ = 0.5 * (sigma + sigma.transpose());
  try {
    m.sigma_sqrt_ = symmetric_sqrt(m.sigma_, "covariance").sqrt;
  } catch (const Error&) {
    throw Error(ErrorCode::CovarianceNotSPD, "covariance has a nonpositive eigenvalue");
  }
  return m;
}

NoiseModel NoiseModel::scalar_family(NoiseKind kind, const Vector& scale) {
  if (kind == NoiseKind::Gaussian || kind == NoiseKind::GaussianMixture)
    throw Error(ErrorCode::ConfigError, "scalar_family expects a scalar-product kind");
  if (scale.size() < 1 || (scale.array() <= 0.0).any())
    throw Error(ErrorCode::ConfigError, "scales must be positive");
  NoiseModel m;
  m.kind_ = kind;
  m.dim_ = scale.size();
  m.scale_ = scale;
  return m;
}

NoiseModel NoiseModel::gaussian_mixture(Eigen::Index dim, double delta, double s) {
  if (dim < 1) throw Error(ErrorCode::ConfigError, "dimension must be >= 1");
  if (s <= 0.0) throw Error(ErrorCode::ConfigError, "component sigma must be positive");
  NoiseModel m;
  m.kind_ = NoiseKind::GaussianMixture;
  m.dim_ = dim;
  m.delta_ = delta;
  m.mix_sigma_ = s;
  return m;
}

const Matrix& NoiseModel::sigma() const {
  if (kind_ != NoiseKind::Gaussian)
    throw Error(ErrorCode::ConfigError, "covariance only defined for gaussian noise");
  return sigma_;
}

const Matrix& NoiseModel::sigma_sqrt() const {
  if (kind_ != NoiseKind::Gaussian)
    throw Error(ErrorCode::ConfigError, "covariance only defined for gaussian noise");
  return sigma_sqrt_;
}

void NoiseModel::draw(Rng& rng, Vector& out) const {
  out.resize(dim_);
  switch (kind_) {
    case NoiseKind::Gaussian: {
      Vector w(dim_);
      for (Eigen::Index i = 0; i < dim_; ++i) w(i) = rng.normal();
      out.noalias() = sigma_sqrt_ * w;
      return;
    }
    case NoiseKind::Uniform:
      for (Eigen::Index i = 0; i < dim_; ++i)
        out(i) = scale_(i) * (2.0 * rng.uniform() - 1.0);
      return;
    case NoiseKind::Laplace:
      for (Eigen::Index i = 0; i < dim_; ++i) {
        const double u = rng.uniform_pos() - 0.5;
        out(i) = -scale_(i) * std::copysign(std::log1p(-2.0 * std::abs(u)), u);
      }
      return;
    case NoiseKind::Logistic:
      for (Eigen::Index i = 0; i < dim_; ++i) {
        const double u = rng.uniform_pos();
        out(i) = scale_(i) * std::log(u / (1.0 - u));
      }
      return;
    case NoiseKind::Triangular:
      for (Eigen::Index i = 0; i < dim_; ++i)
        out(i) = scale_(i) * (rng.uniform() - rng.uniform());
      return;
    case NoiseKind::GaussianMixture:
      for (Eigen::Index i = 0; i < dim_; ++i) {
        const double center = (rng.next_u64() & 1) ? delta_ : -delta_;
        out(i) = center + mix_sigma_ * rng.normal();
      }
      return;
  }
}

}  // namespace distlqr
