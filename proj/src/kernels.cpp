#include "fracgauge/kernels.hpp"

#include "fracgauge/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fracgauge {

namespace {

constexpr double kPi = std::numbers::pi;

void require_distinct(Point x, Point y, const char* who) {
  if (x.x == y.x && x.y == y.y) throw std::invalid_argument(std::string(who) + ": x == y");
}

struct Directions {
  std::array<double, kPhiDirections> c{};
  std::array<double, kPhiDirections> s{};
  Directions() {
    for (int k = 0; k < kPhiDirections; ++k) {
      const double th = (k + 0.5) * 2.0 * kPi / kPhiDirections;
      c[k] = std::cos(th);
      s[k] = std::sin(th);
    }
  }
};

const Directions& directions() {
  static const Directions d;
  return d;
}

double green_ball_with(const FracParams& p, double kappa, Point x, Point y) {
  const double x2 = norm_squared(x);
  const double y2 = norm_squared(y);
  if (!(x2 < 1.0) || !(y2 < 1.0)) throw std::domain_error("green_exact_ball: point outside the unit ball");
  require_distinct(x, y, "green_exact_ball");
  const double d2 = norm_squared(x - y);
  const double r0 = (1.0 - x2) * (1.0 - y2) / d2;
  return kappa * std::pow(d2, 0.5 * (p.alpha - p.n)) * green_ball_profile(p, r0);
}

}  // namespace

void validate(const FracParams& params) {
  if (params.n < 2) throw std::invalid_argument("dimension n must be at least 2");
  if (!(params.alpha > 0.0 && params.alpha < 2.0)) throw std::invalid_argument("alpha must lie in (0, 2)");
  if (!(params.alpha < params.n)) throw std::invalid_argument("alpha must be below n");
}

double riesz_constant(const FracParams& p) {
  validate(p);
  const double n = p.n;
  return std::tgamma(0.5 * (n - p.alpha)) / (std::pow(2.0, p.alpha) * std::pow(kPi, 0.5 * n) * std::tgamma(0.5 * p.alpha));
}

double riesz_kernel(const FracParams& p, Point x, Point y) {
  require_distinct(x, y, "riesz_kernel");
  return riesz_constant(p) * std::pow(distance(x, y), p.alpha - p.n);
}

double green_ball_constant(const FracParams& p) {
  validate(p);
  const double ga = std::tgamma(0.5 * p.alpha);
  return std::tgamma(0.5 * p.n) / (std::pow(2.0, p.alpha) * std::pow(kPi, 0.5 * p.n) * ga * ga);
}

double green_ball_profile(const FracParams& p, double r0) {
  if (!(r0 >= 0.0)) throw std::invalid_argument("green_ball_profile: r0 must be nonnegative");
  const double a = 0.5 * p.alpha;
  const double b = 0.5 * p.n - a;
  if (std::isinf(r0)) return std::beta(a, b);
  // t = s/(1-s) maps the integral onto B(s0; a, n/2 - a).
  const double s0 = r0 / (1.0 + r0);
  if (s0 <= 0.5) return incomplete_beta(s0, a, b);
  return std::beta(a, b) - incomplete_beta(1.0 / (1.0 + r0), b, a);
}

double green_exact_ball(const FracParams& p, Point x, Point y) {
  return green_ball_with(p, green_ball_constant(p), x, y);
}

double green_model(const FracParams& p, const Domain& domain, Point x, Point y) {
  validate(p);
  require_distinct(x, y, "green_model");
  const double dx = distance_to_boundary(domain, x);
  const double dy = distance_to_boundary(domain, y);
  const double r = distance(x, y);
  const double a = p.alpha;
  return std::pow(dx * dy, 0.5 * a) / (std::pow(r, p.n - a) * std::pow(r + dx + dy, a));
}

double poisson_ball_constant(const FracParams& p) {
  validate(p);
  return std::tgamma(0.5 * p.n) * std::sin(0.5 * kPi * p.alpha) / std::pow(kPi, 0.5 * p.n + 1.0);
}

double poisson_exact_ball(const FracParams& p, Point x, Point z) {
  const double x2 = norm_squared(x);
  const double z2 = norm_squared(z);
  if (!(x2 < 1.0) || !(z2 > 1.0)) throw std::domain_error("poisson_exact_ball: need |x| < 1 < |z|");
  return poisson_ball_constant(p) * std::pow((1.0 - x2) / (z2 - 1.0), 0.5 * p.alpha) *
         std::pow(distance(x, z), -static_cast<double>(p.n));
}

double poisson_comparand(const FracParams& p, Point x, Point z) {
  const double rx = norm(x);
  const double rz = norm(z);
  if (!(rx < 1.0) || !(rz > 1.0)) throw std::domain_error("poisson_comparand: need |x| < 1 < |z|");
  const double dx = 1.0 - rx;
  const double dz = rz - 1.0;
  const double a = 0.5 * p.alpha;
  return std::pow(dx, a) / (std::pow(dz, a) * std::pow(1.0 + dz, a) * std::pow(distance(x, z), p.n));
}

double fractional_laplacian_constant(const FracParams& p) {
  validate(p);
  const double n = p.n;
  return p.alpha * std::pow(2.0, p.alpha - 1.0) * std::tgamma(0.5 * (n + p.alpha)) /
         (std::pow(kPi, 0.5 * n) * std::tgamma(1.0 - 0.5 * p.alpha));
}

double phi_unscaled(const FracParams& p, const Domain& domain, Point x) {
  validate(p);
  if (p.n != 2) throw std::invalid_argument("phi_unscaled: planar domains only");
  if (!contains(domain, x)) throw std::domain_error("phi: point outside domain");
  const Directions& d = directions();
  double sum = 0.0;
  for (int k = 0; k < kPhiDirections; ++k) {
    sum += std::pow(ray_exit_distance(domain, x, {d.c[k], d.s[k]}), -p.alpha);
  }
  return sum * (2.0 * kPi / kPhiDirections) / p.alpha;
}

void KernelBackend::check() const {
  validate(params);
  if (kind == Kind::ExactBall && domain.kind() != Domain::Kind::UnitDisk) {
    throw std::invalid_argument("ExactBall backend requires the unit disk");
  }
}

double KernelBackend::operator()(Point x, Point y) const {
  if (kind == Kind::ExactBall) {
    return ball_constant > 0.0 ? green_ball_with(params, ball_constant, x, y) : green_exact_ball(params, x, y);
  }
  return green_model(params, domain, x, y);
}

KernelBackend make_backend(KernelBackend::Kind kind, const FracParams& params, const Domain& domain) {
  KernelBackend b;
  b.kind = kind;
  b.params = params;
  b.domain = domain;
  b.check();
  if (kind == KernelBackend::Kind::ExactBall) b.ball_constant = green_ball_constant(params);
  return b;
}

KernelBackend default_backend(const FracParams& params, const Domain& domain) {
  const auto kind =
      domain.kind() == Domain::Kind::UnitDisk ? KernelBackend::Kind::ExactBall : KernelBackend::Kind::Model;
  return make_backend(kind, params, domain);
}

}  // namespace fracgauge
