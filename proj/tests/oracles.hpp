#pragma once

// Reference computations that share no code path with the library.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// int_0^{r0} t^{a/2-1} (1+t)^{-n/2} dt by Gauss-Kronrod after t = s^{2/a}.
inline double green_profile_gk(double alpha, int n, double r0) {
  const double a = 0.5 * alpha;
  const double smax = std::pow(r0, a);
  auto f = [&](double s) {
    const double t = std::pow(s, 1.0 / a);
    // t^{a-1} dt = t^{a-1} (1/a) s^{1/a - 1} ds = (1/a) ds
    return std::pow(1.0 + t, -0.5 * n) / a;
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, smax, 15, 1e-12, &err);
}

// The same integral as a regularized incomplete Beta function.
inline double green_profile_ibeta(double alpha, int n, double r0) {
  const double a = 0.5 * alpha;
  const double b = 0.5 * n - a;
  return boost::math::beta(a, b) * boost::math::ibeta(a, b, r0 / (1.0 + r0));
}

inline double green_ball(double alpha, double x1, double y1, double x2, double y2) {
  const int n = 2;
  const double ga = boost::math::tgamma(0.5 * alpha);
  const double kappa = boost::math::tgamma(0.5 * n) / (std::pow(2.0, alpha) * pi * ga * ga);
  const double d2 = (x1 - x2) * (x1 - x2) + (y1 - y2) * (y1 - y2);
  const double r0 = (1.0 - x1 * x1 - y1 * y1) * (1.0 - x2 * x2 - y2 * y2) / d2;
  return kappa * std::pow(d2, 0.5 * (alpha - n)) * green_profile_ibeta(alpha, n, r0);
}

// Cell average (1/|Q|) int_Q G(x, y) dy over an axis-aligned square Q that
// contains x and lies inside the unit disk. Q is cut into four rectangles
// with a corner at x; each is split along its diagonal and a Duffy map
// removes the point singularity.
inline double cell_average_duffy(double alpha, double x, double y, double x0, double x1, double y0, double y1) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto triangle = [&](double ax, double ay, double bx, double by) {
    // Triangle (x,y), (x+ax, y+ay), (x+bx, y+by); y = x + u (a + v (b - a)), u, v in [0,1].
    const double jac = std::abs(ax * by - ay * bx);
    auto inner = [&](double u) {
      auto g = [&](double v) {
        const double px = x + u * (ax + v * (bx - ax));
        const double py = y + u * (ay + v * (by - ay));
        return green_ball(alpha, x, y, px, py) * u * jac;
      };
      return GK::integrate(g, 0.0, 1.0, 8, 1e-12);
    };
    // u^{alpha-1} behaviour at u = 0: substitute u = w^{1/alpha}.
    auto outer = [&](double w) {
      const double u = std::pow(w, 1.0 / alpha);
      return inner(u) * std::pow(u, 1.0 - alpha) / alpha;
    };
    return GK::integrate(outer, 0.0, 1.0, 8, 1e-12);
  };
  double total = 0.0;
  const double cx[2] = {x0 - x, x1 - x};
  const double cy[2] = {y0 - y, y1 - y};
  for (double dx : cx) {
    for (double dy : cy) {
      total += triangle(dx, 0.0, dx, dy) + triangle(dx, dy, 0.0, dy);
    }
  }
  return total / ((x1 - x0) * (y1 - y0));
}

// int_{|z|>1} |x - z|^{-2-alpha} dz in polar coordinates about the origin.
inline double phi_integral_disk(double alpha, double r) {
  boost::math::quadrature::tanh_sinh<double> ts;
  // Map rho in (1, inf) to s = 1/rho in (0, 1); |x - z|^2 = rho^2 (1 + s^2 r^2 - 2 s r cos t).
  auto f = [&](double s) {
    if (s <= 0.0) return 0.0;
    auto ang = [&](double t) { return std::pow(1.0 + s * s * r * r - 2.0 * s * r * std::cos(t), -0.5 * (2.0 + alpha)); };
    const double a = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(ang, 0.0, pi, 10, 1e-13);
    return 2.0 * a * std::pow(s, alpha - 1.0);
  };
  return ts.integrate(f, 0.0, 1.0);
}

}  // namespace oracle
