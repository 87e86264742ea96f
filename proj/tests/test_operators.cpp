#include "fracgauge/operators.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <map>
#include <random>
#include <stdexcept>

using namespace fracgauge;

namespace {

const KernelMatrix& disk(double alpha, int res = 16) {
  static std::map<std::pair<double, int>, KernelMatrix> cache;
  const auto key = std::make_pair(alpha, res);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const Mesh m = build_mesh(Domain::unit_disk(), res);
    it = cache.emplace(key, assemble_green_matrix(default_backend({alpha, 2}, m.domain), m)).first;
  }
  return it->second;
}

WeightVector random_weights(std::size_t n, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  WeightVector w;
  for (std::size_t i = 0; i < n; ++i) w.mass.push_back(scale * U(rng));
  return w;
}

WeightVector scaled(WeightVector w, double s) {
  for (double& m : w.mass) m *= s;
  return w;
}

double top_eigenvalue_oracle(const KernelMatrix& K, const WeightVector& w) {
  const Eigen::VectorXd s = w.view().cwiseSqrt();
  const Eigen::MatrixXd M = s.asDiagonal() * K.entries * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double sup(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("apply_T") {
  const KernelMatrix& K = disk(1.0);
  const std::size_t n = K.size();
  const SchrodingerOp zero(K, WeightVector{std::vector<double>(n, 0.0)});
  CHECK(apply_T(zero, Eigen::VectorXd::Ones(n)).isZero(0.0));
  const SchrodingerOp op(K, random_weights(n, 1e-3, 1));
  const Eigen::VectorXd f = Eigen::VectorXd::Random(n), g = Eigen::VectorXd::Random(n);
  CHECK(sup(apply_T(op, f + g) - apply_T(op, f) - apply_T(op, g)) <= 1e-12 * sup(apply_T(op, f)));
  CHECK_THROWS_AS(apply_T(op, Eigen::VectorXd::Ones(3)), std::invalid_argument);
  CHECK_THROWS_AS(SchrodingerOp(K, WeightVector{std::vector<double>(n, -1.0)}), std::invalid_argument);
}

TEST_CASE("T 1 is close to one for omega = phi dx") {
  const KernelMatrix& K = disk(1.0, 32);
  const SchrodingerOp op(K, phi_weights(K, AMode::Calibrated));
  const Eigen::VectorXd t = apply_T(op, Eigen::VectorXd::Ones(K.size()));
  for (std::size_t i = 0; i < K.size(); ++i) {
    if (K.mesh.delta[i] >= 0.1) CHECK(t[i] == doctest::Approx(1.0).epsilon(0.03));
  }
}

TEST_CASE("operator_norm") {
  const KernelMatrix& K = disk(1.0);
  const std::size_t n = K.size();
  SUBCASE("single atom") {
    WeightVector w{std::vector<double>(n, 0.0)};
    w.mass[7] = 0.3;
    CHECK(operator_norm(SchrodingerOp(K, w)) == doctest::Approx(K.entries(7, 7) * 0.3).epsilon(1e-12));
  }
  SUBCASE("against a dense eigensolver and under scaling") {
    for (std::uint64_t seed : {1, 2, 3}) {
      const WeightVector w = random_weights(n, 0.01, seed);
      const double q = operator_norm(SchrodingerOp(K, w));
      CHECK(q == doctest::Approx(top_eigenvalue_oracle(K, w)).epsilon(1e-9));
      CHECK(operator_norm(SchrodingerOp(K, scaled(w, 2.5))) == doctest::Approx(2.5 * q).epsilon(1e-9));
    }
  }
  SUBCASE("omega = phi dx, alpha 1.5") {
    const KernelMatrix& K15 = disk(1.5, 32);
    const double q = operator_norm(SchrodingerOp(K15, phi_weights(K15, AMode::Calibrated)));
    MESSAGE("discrete |T| for phi dx, alpha 1.5, resolution 32: " << q);
    CHECK(q < 1.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(operator_norm(SchrodingerOp(K, WeightVector{std::vector<double>(n, 0.0)})), std::invalid_argument);
    try {
      operator_norm(SchrodingerOp(K, random_weights(n, 0.01, 4)), 1e-300, 3);
      FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
      CHECK(e.last_estimate() > 0.0);
    }
  }
}

TEST_CASE("iterated kernels") {
  const KernelMatrix& K = disk(1.0);
  const SchrodingerOp op(K, random_weights(K.size(), 0.01, 9));
  CHECK(iterated_kernel(op, 1).isApprox(K.entries, 0.0));
  const Eigen::MatrixXd G2 = iterated_kernel(op, 2);
  CHECK((G2 - G2.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * G2.cwiseAbs().maxCoeff());
  CHECK((G2.array() >= 0.0).all());
  CHECK_THROWS_AS(iterated_kernel(op, 0), std::invalid_argument);

  // sum_j G_j nu over the same number of terms as the solver.
  const WeightVector nu{K.mesh.cell_area};
  const SolveReport r = neumann_solve(op, nu, 1e-12, 1000);
  REQUIRE(r.converged);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(K.size());
  for (int j = 1; j <= r.terms_used; ++j) s += iterated_kernel(op, j) * nu.view();
  CHECK(sup(s - r.values) <= 1e-10 * sup(r.values));
}

TEST_CASE("neumann_solve") {
  const KernelMatrix& K = disk(1.0);
  const std::size_t n = K.size();
  const WeightVector nu{K.mesh.cell_area};
  SUBCASE("omega = 0") {
    const SolveReport r = neumann_solve(SchrodingerOp(K, WeightVector{std::vector<double>(n, 0.0)}), nu);
    CHECK(r.converged);
    CHECK(r.terms_used == 1);
    CHECK(sup(r.values - K.entries * nu.view()) <= 1e-14 * sup(r.values));
  }
  SUBCASE("agrees with a dense solve") {
    const WeightVector w = random_weights(n, 0.02, 5);
    const SchrodingerOp op(K, w);
    const SolveReport r = neumann_solve(op, nu, 1e-12, 10000);
    REQUIRE(r.converged);
    const double q = r.t_norm_estimate;
    CHECK(r.last_increment_sup <= 1e-12 * (1.0 - q) / q);
    CHECK(r.residual_sup <= 1e-11);
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - K.entries * w.view().asDiagonal();
    const Eigen::VectorXd direct = A.partialPivLu().solve(K.entries * nu.view());
    CHECK(sup(r.values - direct) <= 1e-8);
  }
  SUBCASE("divergence is declared when |T| exceeds one") {
    const WeightVector phi = phi_weights(K, AMode::Calibrated);
    const double q = operator_norm(SchrodingerOp(K, phi));
    const SchrodingerOp op(K, scaled(phi, 1.05 / q));
    const SolveReport r = neumann_solve(op, phi, 1e-10, 10000);
    CHECK_FALSE(r.converged);
    CHECK(r.terms_used < 10000);
    CHECK(r.t_norm_estimate > 1.0);
  }
  SUBCASE("invalid arguments") {
    const SchrodingerOp op(K, random_weights(n, 0.01, 5));
    CHECK_THROWS_AS(neumann_solve(op, nu, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(neumann_solve(op, WeightVector{{1.0}}), std::invalid_argument);
  }
}

TEST_CASE("solution invariants") {
  const KernelMatrix& K = disk(1.0);
  const std::size_t n = K.size();
  const WeightVector nu{K.mesh.cell_area};
  const WeightVector w = random_weights(n, 0.03, 21);
  const SchrodingerOp op(K, w);
  const SolveReport r = neumann_solve(op, nu, 1e-12);
  REQUIRE(r.converged);

  SUBCASE("energy norm bound") {
    const double q = r.t_norm_estimate;
    const Eigen::VectorXd mu = r.values.cwiseProduct(w.view()) + nu.view();
    const double lhs = std::sqrt(mu.dot(K.entries * mu));
    const double rhs = std::sqrt(nu.view().dot(K.entries * nu.view())) / (1.0 - q);
    CHECK(lhs <= rhs * (1.0 + 1e-6));
  }
  SUBCASE("minimality: iterates from a supersolution decrease to u0") {
    Eigen::VectorXd u = r.values.array() + 1.0;
    const Eigen::VectorXd Gnu = K.entries * nu.view();
    double prev = sup(u - r.values);
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd next = apply_T(op, u) + Gnu;
      CHECK((next.array() <= u.array() + 1e-14).all());
      CHECK((next.array() >= r.values.array() - 1e-12).all());
      u = next;
    }
    CHECK(sup(u - r.values) < prev);
  }
  SUBCASE("monotone in omega") {
    const SolveReport half = neumann_solve(SchrodingerOp(K, scaled(w, 0.5)), nu, 1e-12);
    CHECK((half.values.array() <= r.values.array()).all());
  }
  SUBCASE("u0 >= G1") { CHECK((r.values.array() >= (K.entries * nu.view()).array()).all()); }
}

TEST_CASE("discrete Schur test") {
  // Scale phi dx so that T1 <= 1 entrywise; then |T| <= 1.
  const KernelMatrix& K = disk(1.5);
  const WeightVector phi = phi_weights(K, AMode::Calibrated);
  const Eigen::VectorXd t1 = apply_T(SchrodingerOp(K, phi), Eigen::VectorXd::Ones(K.size()));
  const SchrodingerOp op(K, scaled(phi, 1.0 / t1.maxCoeff()));
  CHECK((apply_T(op, Eigen::VectorXd::Ones(K.size())).array() <= 1.0 + 1e-12).all());
  CHECK(operator_norm(op) <= 1.0 + 1e-8);
}

TEST_CASE("gauge") {
  const KernelMatrix& K = disk(1.0, 32);
  const std::size_t n = K.size();
  const SolveReport one = gauge(SchrodingerOp(K, WeightVector{std::vector<double>(n, 0.0)}));
  CHECK((one.values.array() == 1.0).all());
  for (double g : {0.25, 0.5}) {
    const SchrodingerOp op(K, phi_weights(K, AMode::Calibrated, g));
    const SolveReport r = gauge(op);
    REQUIRE(r.converged);
    CHECK(r.residual_sup <= 1e-9);
    double s = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (K.mesh.delta[i] >= 0.1) {
        s += r.values[i];
        ++count;
      }
    }
    CHECK(s / count == doctest::Approx(1.0 / (1.0 - g)).epsilon(0.03));
  }
}

TEST_CASE("fubini_check") {
  const KernelMatrix& K = disk(1.0);
  const std::size_t n = K.size();
  const WeightVector leb{K.mesh.cell_area};
  CHECK(fubini_check(SchrodingerOp(K, WeightVector{std::vector<double>(n, 0.0)}), leb, 5) == 0.0);
  for (std::uint64_t seed : {31, 32, 33}) {
    const SchrodingerOp op(K, random_weights(n, 0.03, seed));
    CHECK(fubini_check(op, leb, 40) <= 1e-10);
  }
  const SchrodingerOp op(K, phi_weights(K, AMode::Calibrated, 0.5));
  const SolveReport r = neumann_solve(op, leb);
  CHECK(fubini_check(op, leb, r.terms_used) <= 1e-10);
  CHECK_THROWS_AS(fubini_check(op, leb, 0), std::invalid_argument);
}

TEST_CASE("SolveReport JSON fields") {
  SolveReport r;
  r.values = Eigen::VectorXd::Constant(2, 0.5);
  r.terms_used = 3;
  const auto j = to_json(r);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"values", "terms_used", "last_increment_sup", "t_norm_estimate", "converged",
                                         "residual_sup"});
  CHECK(j["values"].size() == 2);
}
