#include "fracgauge/kernels.hpp"
#include "fracgauge/special.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

using namespace fracgauge;

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const GaussRule& g = gauss_legendre(7);
  double s = 0.0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) s += g.weights[k] * std::pow(g.nodes[k], 12);
  CHECK(s == doctest::Approx(2.0 / 13).epsilon(1e-14));
  CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("incomplete beta against boost") {
  for (double a : {0.25, 0.5, 0.75, 1.0, 1.5}) {
    for (double b : {0.25, 0.5, 1.0, 2.0}) {
      for (double x : {0.0, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0}) {
        const double ref = boost::math::beta(a, b) * boost::math::ibeta(a, b, x);
        CHECK(incomplete_beta(x, a, b) == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("green profile matches two independent routes") {
  for (double alpha : {0.3, 0.5, 1.0, 1.5, 1.9}) {
    for (double r0 : {1e-6, 0.01, 0.5, 1.0, 3.0, 100.0, 1e6}) {
      const FracParams p{alpha, 2};
      const double v = green_ball_profile(p, r0);
      CHECK(v == doctest::Approx(oracle::green_profile_ibeta(alpha, 2, r0)).epsilon(1e-10));
      if (r0 <= 100.0) CHECK(v == doctest::Approx(oracle::green_profile_gk(alpha, 2, r0)).epsilon(1e-10));
    }
  }
}

TEST_CASE("riesz kernel") {
  const FracParams p{1.0, 2};
  CHECK(riesz_kernel(p, {0, 0}, {1, 0}) == doctest::Approx(1.0 / (2.0 * oracle::pi)));
  CHECK(riesz_kernel(p, {0, 0}, {2, 0}) == doctest::Approx(0.5 * riesz_kernel(p, {0, 0}, {1, 0})));
  const FracParams q{0.7, 2};
  CHECK(riesz_kernel(q, {0.1, 0.2}, {0.5, -0.3}) == riesz_kernel(q, {0.5, -0.3}, {0.1, 0.2}));
  CHECK(riesz_kernel(q, {0, 0}, {0.6, 0}) == doctest::Approx(std::pow(3.0, 0.7 - 2) * riesz_kernel(q, {0, 0}, {0.2, 0})));
  CHECK_THROWS_AS(riesz_kernel(p, {0.1, 0.1}, {0.1, 0.1}), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate({0.0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(validate({2.0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(validate({1.0, 1}), std::invalid_argument);
  CHECK_NOTHROW(validate({1.999, 2}));
}

TEST_CASE("exact ball Green function") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-0.7, 0.7);
  for (double alpha : {0.5, 1.0, 1.5}) {
    const FracParams p{alpha, 2};
    for (int k = 0; k < 200; ++k) {
      const Point x{U(rng), U(rng)}, y{U(rng), U(rng)};
      const double g = green_exact_ball(p, x, y);
      CHECK(g > 0.0);
      CHECK(g == doctest::Approx(green_exact_ball(p, y, x)).epsilon(1e-12));
      CHECK(g == doctest::Approx(oracle::green_ball(alpha, x.x, x.y, y.x, y.y)).epsilon(1e-10));
    }
    // Vanishes at the boundary like delta^{alpha/2}.
    const double decay = green_exact_ball(p, {0, 0}, {1.0 - 1e-10, 0}) / green_exact_ball(p, {0, 0}, {1.0 - 1e-6, 0});
    CHECK(decay == doctest::Approx(std::pow(1e-4, 0.5 * alpha)).epsilon(1e-3));
    // Riesz singularity on the diagonal.
    const double r = 1e-6;
    CHECK(green_exact_ball(p, {0.1, 0}, {0.1 + r, 0}) ==
          doctest::Approx(riesz_kernel(p, {0.1, 0}, {0.1 + r, 0})).epsilon(1e-3));
  }
  CHECK_THROWS_AS(green_exact_ball({1.0, 2}, {0.2, 0}, {0.2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(green_exact_ball({1.0, 2}, {1.2, 0}, {0.2, 0}), std::domain_error);
}

TEST_CASE("exact-to-model ratio at a sample pair is finite") {
  const FracParams p{1.0, 2};
  const double ratio = green_exact_ball(p, {0, 0}, {0.5, 0}) / green_model(p, Domain::unit_disk(), {0, 0}, {0.5, 0});
  CHECK(std::isfinite(ratio));
  CHECK(ratio > 0.0);
  MESSAGE("exact/model at (0,0),(0.5,0), alpha 1: " << ratio);
}

TEST_CASE("model kernel") {
  const Domain disk = Domain::unit_disk();
  const FracParams p{1.0, 2};
  // delta = 0.75 at both points, |x-y| = 0.5
  CHECK(green_model(p, disk, {-0.25, 0}, {0.25, 0}) == doctest::Approx(0.75 / (0.5 * 2.0)));
  CHECK(green_model(p, disk, {0.1, 0.3}, {-0.4, 0.2}) ==
        doctest::Approx(green_model(p, disk, {-0.4, 0.2}, {0.1, 0.3})).epsilon(1e-14));
  const double a = green_model(p, disk, {0, 0}, {1 - 1e-4, 0});
  const double b = green_model(p, disk, {0, 0}, {1 - 4e-4, 0});
  CHECK(b / a == doctest::Approx(2.0).epsilon(1e-3));
  CHECK_THROWS_AS(green_model(p, disk, {0.2, 0}, {0.2, 0}), std::invalid_argument);
}

TEST_CASE("backend selection") {
  const FracParams p{1.0, 2};
  CHECK_THROWS_AS(make_backend(KernelBackend::Kind::ExactBall, p, Domain::box({0, 1}, {0, 1})), std::invalid_argument);
  const KernelBackend b = default_backend(p, Domain::box({0, 1}, {0, 1}));
  CHECK(b.kind == KernelBackend::Kind::Model);
  const KernelBackend d = default_backend(p, Domain::unit_disk());
  CHECK(d({0.1, 0}, {0.3, 0.2}) == doctest::Approx(green_exact_ball(p, {0.1, 0}, {0.3, 0.2})).epsilon(1e-15));
}

TEST_CASE("Poisson kernel: total mass one at the centre") {
  // Radial integral split at r = 2: r = 1 + u^k removes the (r - 1)^{-alpha/2}
  // singularity on (1, 2), and s = 1/r maps (2, inf) to (0, 1/2). Shells with
  // r - 1 below machine epsilon are not representable; their share of the mass
  // is about eps^{1 - alpha/2}, which sets the tolerance.
  for (double alpha : {0.5, 1.0, 1.5}) {
    const FracParams p{alpha, 2};
    boost::math::quadrature::tanh_sinh<double> ts;
    const double k = 1.0 / (1.0 - 0.5 * alpha);
    auto near = [&](double u) {
      const double r = 1.0 + std::pow(u, k);
      if (r <= 1.0) return 0.0;
      return poisson_exact_ball(p, {0, 0}, {r, 0}) * r * k * std::pow(u, k - 1.0);
    };
    auto far = [&](double s) {
      if (s < 1e-100) return 0.0;
      const double r = 1.0 / s;
      return poisson_exact_ball(p, {0, 0}, {r, 0}) * r / (s * s);
    };
    const double mass = 2.0 * oracle::pi * (ts.integrate(near, 0.0, 1.0) + ts.integrate(far, 0.0, 0.5));
    const double tol = 1e-9 + 4.0 * std::pow(std::numeric_limits<double>::epsilon(), 1.0 - 0.5 * alpha);
    CHECK(std::abs(mass - 1.0) <= tol);
    CHECK(poisson_exact_ball(p, {0, 0}, {0, 1.7}) == doctest::Approx(poisson_exact_ball(p, {0, 0}, {1.7, 0})));
  }
  CHECK_THROWS_AS(poisson_exact_ball({1.0, 2}, {0, 0}, {0.5, 0}), std::domain_error);
}

TEST_CASE("Poisson kernel against its comparand") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const FracParams p{1.0, 2};
  double lo = 1e300, hi = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const double rx = std::sqrt(U(rng)) * 0.999, tx = 6.283 * U(rng);
    const double rz = 1.0 + 5.0 * U(rng) * U(rng) + 1e-6, tz = 6.283 * U(rng);
    const Point x{rx * std::cos(tx), rx * std::sin(tx)}, z{rz * std::cos(tz), rz * std::sin(tz)};
    const double q = poisson_exact_ball(p, x, z) / poisson_comparand(p, x, z);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  MESSAGE("P / comparand in [" << lo << ", " << hi << "]");
  CHECK(lo > 0.0);
  CHECK(hi < 10.0 * lo);
}

TEST_CASE("phi") {
  const Domain disk = Domain::unit_disk();
  for (double alpha : {0.5, 1.0, 1.5}) {
    const FracParams p{alpha, 2};
    CHECK(phi_unscaled(p, disk, {0, 0}) == doctest::Approx(2.0 * oracle::pi / alpha));
    CHECK(phi(p, disk, {0, 0}, 3.0) == doctest::Approx(3.0 * 2.0 * oracle::pi / alpha));
    for (double r : {0.3, 0.7, 0.95}) {
      CHECK(phi_unscaled(p, disk, {r, 0}) == doctest::Approx(oracle::phi_integral_disk(alpha, r)).epsilon(1e-8));
    }
    // alpha phi delta^alpha bounded above and below.
    double lo = 1e300, hi = 0.0;
    for (double r = 0.0; r < 0.9999; r += 0.01) {
      const double v = alpha * phi_unscaled(p, disk, {r, 0}) * std::pow(1.0 - r, alpha);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo > 0.0);
    CHECK(hi <= 2.0 * oracle::pi * (1.0 + 1e-12));
  }
  CHECK_THROWS_AS(phi_unscaled({1.0, 2}, disk, {1.0, 0}), std::domain_error);
}

TEST_CASE("fractional Laplacian constant") {
  // alpha = 1, n = 2: 1 * 1 * Gamma(3/2) / (pi Gamma(1/2)) = 1/(2 pi)
  CHECK(fractional_laplacian_constant({1.0, 2}) == doctest::Approx(1.0 / (2.0 * oracle::pi)));
}
