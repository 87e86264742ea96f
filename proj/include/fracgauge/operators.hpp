#pragma once

#include "fracgauge/quadrature.hpp"

#include <json.hpp>

#include <stdexcept>

namespace fracgauge {

/// T f = G(f omega). Holds a reference to G, which must outlive the operator.
class SchrodingerOp {
 public:
  /// Throws std::invalid_argument on a size mismatch or a negative mass.
  SchrodingerOp(const KernelMatrix& G, WeightVector omega);

  const KernelMatrix& G() const { return *G_; }
  const WeightVector& omega() const { return omega_; }
  std::size_t size() const { return omega_.size(); }
  bool omega_is_zero() const;

 private:
  const KernelMatrix* G_;
  WeightVector omega_;
};

Eigen::VectorXd apply_T(const SchrodingerOp& op, const Eigen::VectorXd& f);

/// Thrown when an iterative estimate does not settle within its budget.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate_(last_estimate) {}
  double last_estimate() const { return last_estimate_; }

 private:
  double last_estimate_;
};

/// ||T|| on L^2(omega) by power iteration on T from the all-ones vector, with
/// the L^2(omega) Rayleigh quotient as the estimate. Stops once the relative
/// change of the estimate drops below tol. Throws NonConvergence after
/// max_iter steps, std::invalid_argument if omega is zero, and
/// std::runtime_error on a negative Rayleigh quotient.
double operator_norm(const SchrodingerOp& op, double tol = 1e-12, int max_iter = 20000);

/// G_1 = G, G_j = G_{j-1} D G.
Eigen::MatrixXd iterated_kernel(const SchrodingerOp& op, int j);

struct SolveReport {
  Eigen::VectorXd values;
  int terms_used = 0;
  double last_increment_sup = 0.0;
  double t_norm_estimate = 0.0;
  bool converged = false;
  double residual_sup = 0.0;
};

nlohmann::ordered_json to_json(const SolveReport& report);

/// Partial sums of sum_j T^j G nu. Converged once the sup of the latest term
/// is at most tol (1-q)/max(q, eps), q = ||T||. Divergence is declared, with
/// converged = false, when the term sup fails to shrink by a factor
/// 1 - 1e-6 for 5 consecutive terms or max_terms is reached.
SolveReport neumann_solve(const SchrodingerOp& op, const WeightVector& nu, double tol = 1e-10,
                          int max_terms = 10000);

/// 1 + neumann_solve(op, omega); residual_sup is sup |u - 1 - G(u omega)|.
SolveReport gauge(const SchrodingerOp& op, double tol = 1e-10, int max_terms = 10000);

/// Relative gap in  int u1 dnu = nu(Omega) + int u0 domega  with both series
/// truncated after the same number of terms; u0 = sum T^j G nu and
/// u1 = 1 + sum T^j G omega. With nu the Lebesgue weights this is the
/// classical relation between the gauge and the torsion-type solution.
double fubini_check(const SchrodingerOp& op, const WeightVector& nu, int terms);

}  // namespace fracgauge
