#pragma once

#include "fracgauge/operators.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace fracgauge {

struct RatioRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Extremes of green_exact_ball / green_model over `samples` pairs drawn
/// uniformly from the unit disk (mt19937_64 seeded with `seed`).
RatioRange check_green_equivalence(const FracParams& params, int samples, std::uint64_t seed);

/// Extremes of (G 1)_i / delta_i^{alpha/2} over the mesh, G 1 taken against
/// the Lebesgue cell weights.
RatioRange g1_envelope(const KernelMatrix& K);

/// Lebesgue measure on the mesh: mass_i = cell_area_i.
WeightVector lebesgue_weights(const Mesh& mesh);

/// max |(G phi)_i - 1| over nodes with delta_i >= interior_margin.
double check_gphi(const KernelMatrix& K, AMode mode, double interior_margin);

struct BoundFitReport {
  double fitted_C_upper = 0.0;
  double fitted_c_lower = 0.0;
  double C1_envelope = 0.0;
  double c1_envelope = 0.0;
  int violations = 0;
  std::vector<double> bound;
  std::vector<double> margins;
};

nlohmann::ordered_json to_json(const BoundFitReport& report);

/// Smallest C and largest c with
///   c1 m e^{c Tm/m} <= u0 <= C1 m e^{C Tm/m},  m = delta^{alpha/2},
/// where C1, c1 are the extremes of G1/m. `solve` must be the converged
/// solution for nu = Lebesgue. Throws std::invalid_argument otherwise.
BoundFitReport fit_exponential_bounds(const SchrodingerOp& op, const SolveReport& solve);

struct ExteriorRule {
  std::vector<Point> z;
  std::vector<double> w;
};

/// Quadrature on |z| > 1 after s = 1/|z|, graded at both ends of s in (0,1).
ExteriorRule exterior_rule(int radial, int angular);

struct PoissonFitReport {
  double C3 = 0.0;
  double C4 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double poisson_mass_min = 0.0;
  double poisson_mass_max = 0.0;
};

nlohmann::ordered_json to_json(const PoissonFitReport& report);

/// Fits the constants of
///   c3 I(c4) <= u1 <= C3 I(C4),  I(c)(x) = int e^{c E(x,z)} P(x,z) dz,
///   E(x,z) = int G(x,y) P(y,z)/P(x,z) domega(y).
/// C3 and c3 come from the omega-free case (1/max and 1/min of int P dz), then
/// C4 is the smallest and c4 the largest exponent constant that make the
/// inequality hold at every node. Unit disk only; the gauge must be converged.
PoissonFitReport gauge_poisson_bounds(const SchrodingerOp& op, const SolveReport& gauge_report,
                                      int radial = 64, int angular = 128);

struct CounterexampleReport {
  std::vector<double> term_means;  // interior mean of T^j G omega, j = 0..J
  double partial_sum_mean = 0.0;   // interior mean of 1 + sum_{j<J} T^j G omega
  double t_norm = 0.0;
  double interior_margin = 0.0;
  int J = 0;
  bool alpha_in_theorem_range = false;
};

nlohmann::ordered_json to_json(const CounterexampleReport& report);

/// omega = phi dx with constant per `mode`.
CounterexampleReport run_counterexample(const KernelMatrix& K, AMode mode, int J, double interior_margin = 0.1);

/// Hardy-inequality constant alpha Gamma((n+alpha)/2) /
/// (2^{2-alpha} pi^{(n-2)/2} Gamma(1-alpha/2) Gamma((alpha+1)/2)^2).
/// Throws std::invalid_argument unless 1 < alpha < 2.
double hardy_constant(double alpha, int n);

/// Mean of v over nodes with delta_i >= margin.
double interior_mean(const Mesh& mesh, const Eigen::VectorXd& v, double margin);

}  // namespace fracgauge
