#include "fracgauge/sobolev.hpp"

#include "fracgauge/operators.hpp"
#include "fracgauge/parallel.hpp"

#include <cmath>

namespace fracgauge {

nlohmann::ordered_json to_json(const EnergyReport& r) {
  return {{"gagliardo", r.gagliardo}, {"phi_term", r.phi_term}, {"total", r.total}};
}

EnergyReport gagliardo_energy(const FracParams& params, const Mesh& mesh, const Eigen::VectorXd& u, double A) {
  validate(params);
  const std::size_t n = mesh.size();
  if (static_cast<std::size_t>(u.size()) != n) throw std::invalid_argument("gagliardo_energy: u has the wrong size");
  const double expo = -0.5 * (params.n + params.alpha);

  // Per-row partial sums, reduced in row order for a thread-independent result.
  std::vector<double> row(n, 0.0);
  parallel_for(n, 32, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = u[static_cast<Eigen::Index>(i)] - u[static_cast<Eigen::Index>(j)];
        if (d == 0.0) continue;
        s += d * d * std::pow(norm_squared(mesh.nodes[i] - mesh.nodes[j]), expo) * mesh.cell_area[j];
      }
      row[i] = s * mesh.cell_area[i];
    }
  });
  EnergyReport r;
  for (double s : row) r.gagliardo += s;
  r.gagliardo *= 0.5 * A;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[static_cast<Eigen::Index>(i)];
    if (ui == 0.0) continue;
    r.phi_term += ui * ui * A * phi_unscaled(params, mesh.domain, mesh.nodes[i]) * mesh.cell_area[i];
  }
  r.total = r.gagliardo + r.phi_term;
  return r;
}

double green_energy(const KernelMatrix& K, const WeightVector& mu) {
  if (mu.size() != K.size()) throw std::invalid_argument("green_energy: size mismatch");
  const auto m = mu.view();
  return m.dot(K.entries * m);
}

double embedding_constant(const KernelMatrix& K, const WeightVector& omega, double tol, int max_iter) {
  if (omega.size() != K.size()) throw std::invalid_argument("embedding_constant: size mismatch");
  const Eigen::VectorXd s = omega.view().cwiseSqrt();
  if (s.isZero(0.0)) throw std::invalid_argument("embedding_constant: omega is zero");
  Eigen::VectorXd y = s;
  y /= y.norm();
  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd My = s.cwiseProduct(K.entries * s.cwiseProduct(y));
    const double rq = y.dot(My);
    if (rq < 0.0) throw std::runtime_error("embedding_constant: negative Rayleigh quotient, G is not positive semidefinite");
    const double prev = estimate;
    estimate = rq;
    if (it > 0 && std::abs(estimate - prev) <= tol * estimate) return estimate;
    const double nrm = My.norm();
    if (nrm == 0.0) return 0.0;
    y = My / nrm;
  }
  throw NonConvergence("embedding_constant: power iteration did not converge", estimate);
}

CoercivityReport coercivity_check(const FracParams& params, const Mesh& mesh, const WeightVector& omega,
                                  const Eigen::VectorXd& u, double A, double beta2) {
  if (omega.size() != mesh.size()) throw std::invalid_argument("coercivity_check: omega has the wrong size");
  const EnergyReport e = gagliardo_energy(params, mesh, u, A);
  double potential = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double ui = u[static_cast<Eigen::Index>(i)];
    potential += ui * ui * omega.mass[i];
  }
  return {e.total - potential, (1.0 - beta2) * e.total};
}

}  // namespace fracgauge
