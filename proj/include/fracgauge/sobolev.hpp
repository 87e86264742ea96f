#pragma once

#include "fracgauge/quadrature.hpp"

#include <json.hpp>

namespace fracgauge {

struct EnergyReport {
  double gagliardo = 0.0;
  double phi_term = 0.0;
  double total = 0.0;
};

nlohmann::ordered_json to_json(const EnergyReport& report);

/// gagliardo = (A/2) sum_{i != j} (u_i - u_j)^2 |x_i - x_j|^{-n-alpha} a_i a_j,
/// phi_term = sum_i u_i^2 phi(x_i) a_i with phi = A * phi_unscaled.
EnergyReport gagliardo_energy(const FracParams& params, const Mesh& mesh, const Eigen::VectorXd& u, double A);

/// mu^T G mu.
double green_energy(const KernelMatrix& K, const WeightVector& mu);

/// beta^2 = sup_g (g omega)^T G (g omega) / sum g_i^2 omega_i, the top
/// eigenvalue of D^{1/2} G D^{1/2}, by power iteration on that symmetric
/// matrix. Errors as operator_norm.
double embedding_constant(const KernelMatrix& K, const WeightVector& omega, double tol = 1e-12,
                          int max_iter = 20000);

struct CoercivityReport {
  double B_value = 0.0;
  double lower = 0.0;
};

/// B(u,u) = total energy - sum u_i^2 omega_i and its floor (1 - beta2) * total.
CoercivityReport coercivity_check(const FracParams& params, const Mesh& mesh, const WeightVector& omega,
                                  const Eigen::VectorXd& u, double A, double beta2);

}  // namespace fracgauge
