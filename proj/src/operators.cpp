#include "fracgauge/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracgauge {

namespace {

constexpr double kPlateauRatio = 1.0 - 1e-6;
constexpr int kPlateauRun = 5;

double sup_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

SchrodingerOp::SchrodingerOp(const KernelMatrix& G, WeightVector omega) : G_(&G), omega_(std::move(omega)) {
  if (omega_.size() != G.size()) throw std::invalid_argument("SchrodingerOp: omega and G sizes differ");
  for (double m : omega_.mass) {
    if (!std::isfinite(m) || m < 0.0) throw std::invalid_argument("SchrodingerOp: omega must be nonnegative");
  }
}

bool SchrodingerOp::omega_is_zero() const {
  return std::all_of(omega_.mass.begin(), omega_.mass.end(), [](double m) { return m == 0.0; });
}

Eigen::VectorXd apply_T(const SchrodingerOp& op, const Eigen::VectorXd& f) {
  if (static_cast<std::size_t>(f.size()) != op.size()) throw std::invalid_argument("apply_T: dimension mismatch");
  const Eigen::VectorXd fw = f.cwiseProduct(op.omega().view());
  return op.G().entries * fw;
}

double operator_norm(const SchrodingerOp& op, double tol, int max_iter) {
  if (op.omega_is_zero()) throw std::invalid_argument("operator_norm: omega is zero");
  const Eigen::VectorXd w = op.omega().view();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(op.size()));
  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double vv = v.cwiseProduct(w).dot(v);
    const Eigen::VectorXd Tv = apply_T(op, v);
    const double rq = Tv.cwiseProduct(w).dot(v) / vv;
    if (rq < 0.0) throw std::runtime_error("operator_norm: negative Rayleigh quotient, G is not positive semidefinite");
    const double prev = estimate;
    estimate = rq;
    if (it > 0 && std::abs(estimate - prev) <= tol * estimate) return estimate;
    const double scale = std::sqrt(Tv.cwiseProduct(w).dot(Tv));
    if (scale == 0.0) return 0.0;
    v = Tv / scale;
  }
  throw NonConvergence("operator_norm: power iteration did not converge", estimate);
}

Eigen::MatrixXd iterated_kernel(const SchrodingerOp& op, int j) {
  if (j < 1) throw std::invalid_argument("iterated_kernel: j must be at least 1");
  const Eigen::MatrixXd& G = op.G().entries;
  const Eigen::VectorXd w = op.omega().view();
  Eigen::MatrixXd Gj = G;
  for (int k = 1; k < j; ++k) Gj = (Gj * w.asDiagonal()) * G;
  // Round-off in the products leaves a tiny asymmetry; G_j is symmetric.
  const Eigen::MatrixXd sym = 0.5 * (Gj + Gj.transpose());
  return sym;
}

nlohmann::ordered_json to_json(const SolveReport& r) {
  nlohmann::ordered_json j;
  j["values"] = std::vector<double>(r.values.data(), r.values.data() + r.values.size());
  j["terms_used"] = r.terms_used;
  j["last_increment_sup"] = r.last_increment_sup;
  j["t_norm_estimate"] = r.t_norm_estimate;
  j["converged"] = r.converged;
  j["residual_sup"] = r.residual_sup;
  return j;
}

SolveReport neumann_solve(const SchrodingerOp& op, const WeightVector& nu, double tol, int max_terms) {
  if (!(tol > 0.0)) throw std::invalid_argument("neumann_solve: tol must be positive");
  if (max_terms < 1) throw std::invalid_argument("neumann_solve: max_terms must be positive");
  if (nu.size() != op.size()) throw std::invalid_argument("neumann_solve: nu has the wrong size");

  SolveReport r;
  const Eigen::VectorXd Gnu = op.G().entries * nu.view();
  r.values = Gnu;
  r.terms_used = 1;
  r.last_increment_sup = sup_norm(Gnu);
  if (op.omega_is_zero()) {
    r.converged = true;
    r.residual_sup = 0.0;
    return r;
  }

  double q = 0.0;
  try {
    q = operator_norm(op);
  } catch (const NonConvergence& e) {
    q = e.last_estimate();
  }
  r.t_norm_estimate = q;
  const double threshold = q < 1.0 ? tol * (1.0 - q) / std::max(q, std::numeric_limits<double>::epsilon()) : -1.0;

  Eigen::VectorXd term = Gnu;
  double prev_sup = sup_norm(term);
  int plateau = 0;
  if (prev_sup <= threshold) r.converged = true;
  while (!r.converged && r.terms_used < max_terms) {
    term = apply_T(op, term);
    r.values += term;
    ++r.terms_used;
    const double s = sup_norm(term);
    r.last_increment_sup = s;
    if (s <= threshold) {
      r.converged = true;
      break;
    }
    plateau = (prev_sup > 0.0 && s / prev_sup >= kPlateauRatio) ? plateau + 1 : 0;
    if (plateau >= kPlateauRun) break;
    prev_sup = s;
  }
  r.residual_sup = sup_norm(r.values - apply_T(op, r.values) - Gnu);
  return r;
}

SolveReport gauge(const SchrodingerOp& op, double tol, int max_terms) {
  SolveReport r = neumann_solve(op, op.omega(), tol, max_terms);
  r.values.array() += 1.0;
  r.residual_sup = sup_norm(r.values.array() - 1.0 - apply_T(op, r.values).array());
  return r;
}

double fubini_check(const SchrodingerOp& op, const WeightVector& nu, int terms) {
  if (terms < 1) throw std::invalid_argument("fubini_check: terms must be positive");
  if (nu.size() != op.size()) throw std::invalid_argument("fubini_check: nu has the wrong size");
  const Eigen::MatrixXd& G = op.G().entries;
  Eigen::VectorXd a = G * nu.view();
  Eigen::VectorXd b = G * op.omega().view();
  Eigen::VectorXd u0 = a;
  Eigen::VectorXd v1 = b;
  for (int k = 1; k < terms; ++k) {
    a = apply_T(op, a);
    b = apply_T(op, b);
    u0 += a;
    v1 += b;
  }
  const double nu_total = nu.total();
  const double lhs = nu_total + integrate(v1, nu);
  const double rhs = nu_total + integrate(u0, op.omega());
  return std::abs(lhs - rhs) / rhs;
}

}  // namespace fracgauge
