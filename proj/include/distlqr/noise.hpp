#pragma once

#include <string>

#include "distlqr/linalg.hpp"
#include "distlqr/rng.hpp"

namespace distlqr {

enum class NoiseKind {
  Gaussian,
  Uniform,
  Laplace,
  Logistic,
  Triangular,
  GaussianMixture,  // two symmetric components; not log-concave once separated
};

const char* noise_kind_name(NoiseKind k);
NoiseKind noise_kind_from_name(const std::string& name);

/// i.i.d. disturbance law. Gaussian carries a full covariance; the scalar
/// families apply per-coordinate scales to independent coordinates. All
/// kinds except GaussianMixture have log-concave densities.
class NoiseModel {
 public:
  static NoiseModel gaussian(const Matrix& sigma);
  static NoiseModel scalar_family(NoiseKind kind, const Vector& scale);
  /// 0.5 N(-delta, s^2) + 0.5 N(+delta, s^2) per coordinate.
  static NoiseModel gaussian_mixture(Eigen::Index dim, double delta, double s);

  NoiseKind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  bool is_gaussian() const { return kind_ == NoiseKind::Gaussian; }
  bool log_concave() const { return kind_ != NoiseKind::GaussianMixture; }

  const Matrix& sigma() const;
  /// Symmetric square root of the covariance (Gaussian only).
  const Matrix& sigma_sqrt() const;
  const Vector& scale() const { return scale_; }
  double mixture_delta() const { return delta_; }
  double mixture_sigma() const { return mix_sigma_; }

  /// One disturbance vector.
  void draw(Rng& rng, Vector& out) const;

 private:
  NoiseModel() = default;

  NoiseKind kind_ = NoiseKind::Gaussian;
  Eigen::Index dim_ = 0;
  Matrix sigma_;
  Matrix sigma_sqrt_;
  Vector scale_;
  double delta_ = 0.0;
  double mix_sigma_ = 0.0;
};

}  // namespace distlqr
