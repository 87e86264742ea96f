#pragma once

#include "fracgauge/geometry.hpp"

namespace fracgauge {

/// Order alpha in (0,2) and dimension n >= 2 with alpha < n.
struct FracParams {
  double alpha = 1.0;
  int n = 2;
};

/// Throws std::invalid_argument on an inadmissible (alpha, n).
void validate(const FracParams& params);

/// c_{alpha,n} = Gamma((n-alpha)/2) / (2^alpha pi^{n/2} Gamma(alpha/2)).
double riesz_constant(const FracParams& params);
double riesz_kernel(const FracParams& params, Point x, Point y);

/// kappa_{n,alpha} = Gamma(n/2) / (2^alpha pi^{n/2} Gamma(alpha/2)^2).
double green_ball_constant(const FracParams& params);

/// int_0^{r0} t^{alpha/2-1} (1+t)^{-n/2} dt, the radial factor of the ball
/// Green function. Accepts r0 = +inf.
double green_ball_profile(const FracParams& params, double r0);

/// Green function of the unit ball. Throws std::domain_error when x or y is
/// outside the open ball and std::invalid_argument when x == y.
double green_exact_ball(const FracParams& params, Point x, Point y);

/// delta(x)^{a/2} delta(y)^{a/2} / (|x-y|^{n-a} (|x-y| + delta(x) + delta(y))^a).
double green_model(const FracParams& params, const Domain& domain, Point x, Point y);

/// Gamma(n/2) sin(pi alpha/2) / pi^{n/2+1}.
double poisson_ball_constant(const FracParams& params);

/// Poisson kernel of the unit ball, |x| < 1 < |z|.
double poisson_exact_ball(const FracParams& params, Point x, Point z);

/// delta(x)^{a/2} / (delta(z)^{a/2} (1 + delta(z))^{a/2} |x-z|^n) for the unit
/// disk, the two-sided comparand of the ball Poisson kernel.
double poisson_comparand(const FracParams& params, Point x, Point z);

enum class AMode { Literature, Calibrated };

/// Normalising constant of the fractional Laplacian,
/// alpha 2^{alpha-1} Gamma((n+alpha)/2) / (pi^{n/2} Gamma(1-alpha/2)).
double fractional_laplacian_constant(const FracParams& params);

inline constexpr int kPhiDirections = 256;

/// (1/alpha) * int_{S^1} R(theta)^{-alpha} dtheta, i.e. phi without the
/// leading constant. Planar domains only.
double phi_unscaled(const FracParams& params, const Domain& domain, Point x);

/// A * phi_unscaled(x).
inline double phi(const FracParams& params, const Domain& domain, Point x, double A) {
  return A * phi_unscaled(params, domain, x);
}

/// Pointwise Green kernel: exact ball formula or the two-sided model.
struct KernelBackend {
  enum class Kind { ExactBall, Model };

  Kind kind = Kind::ExactBall;
  FracParams params;
  Domain domain = Domain::unit_disk();

  /// Cached green_ball_constant(params); filled by make_backend.
  double ball_constant = 0.0;

  /// Throws std::invalid_argument if kind is ExactBall on a non-disk domain.
  void check() const;
  double operator()(Point x, Point y) const;
};

KernelBackend make_backend(KernelBackend::Kind kind, const FracParams& params, const Domain& domain);

/// ExactBall on the unit disk, Model otherwise.
KernelBackend default_backend(const FracParams& params, const Domain& domain);

}  // namespace fracgauge
