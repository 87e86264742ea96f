#include "fracgauge/verify.hpp"

#include "fracgauge/parallel.hpp"
#include "fracgauge/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace fracgauge {

namespace {

constexpr double kGrade = 4.0;
constexpr int kBisectionSteps = 60;

Eigen::VectorXd boundary_weight(const Mesh& mesh, double alpha) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(mesh.size()));
  for (std::size_t i = 0; i < mesh.size(); ++i) m[static_cast<Eigen::Index>(i)] = std::pow(mesh.delta[i], 0.5 * alpha);
  return m;
}

Point sample_disk(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double r = std::sqrt(U(rng));
  const double t = 2.0 * std::numbers::pi * U(rng);
  return {r * std::cos(t), r * std::sin(t)};
}

// sum_k W(i,k) exp(c E(i,k)) for row i.
double exp_moment(const Eigen::MatrixXd& W, const Eigen::MatrixXd& E, Eigen::Index i, double c) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < W.cols(); ++k) s += W(i, k) * std::exp(c * E(i, k));
  return s;
}

}  // namespace

RatioRange check_green_equivalence(const FracParams& params, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("check_green_equivalence: samples must be positive");
  validate(params);
  const Domain disk = Domain::unit_disk();
  std::mt19937_64 rng(seed);
  RatioRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_disk(rng);
    const Point y = sample_disk(rng);
    if (x.x == y.x && x.y == y.y) continue;
    const double ratio = green_exact_ball(params, x, y) / green_model(params, disk, x, y);
    r.lo = std::min(r.lo, ratio);
    r.hi = std::max(r.hi, ratio);
  }
  return r;
}

WeightVector lebesgue_weights(const Mesh& mesh) { return WeightVector{mesh.cell_area}; }

RatioRange g1_envelope(const KernelMatrix& K) {
  const Eigen::VectorXd G1 = K.entries * lebesgue_weights(K.mesh).view();
  const Eigen::VectorXd m = boundary_weight(K.mesh, K.backend.params.alpha);
  const Eigen::VectorXd q = G1.cwiseQuotient(m);
  return {q.minCoeff(), q.maxCoeff()};
}

double interior_mean(const Mesh& mesh, const Eigen::VectorXd& v, double margin) {
  double s = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    if (mesh.delta[i] >= margin) {
      s += v[static_cast<Eigen::Index>(i)];
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("interior_mean: no node satisfies the margin");
  return s / count;
}

double check_gphi(const KernelMatrix& K, AMode mode, double interior_margin) {
  const Eigen::VectorXd g = K.entries * phi_weights(K, mode).view();
  double dev = -1.0;
  for (std::size_t i = 0; i < K.mesh.size(); ++i) {
    if (K.mesh.delta[i] >= interior_margin) dev = std::max(dev, std::abs(g[static_cast<Eigen::Index>(i)] - 1.0));
  }
  if (dev < 0.0) throw std::invalid_argument("check_gphi: no node satisfies the margin");
  return dev;
}

nlohmann::ordered_json to_json(const BoundFitReport& r) {
  return {{"fitted_C_upper", r.fitted_C_upper}, {"fitted_c_lower", r.fitted_c_lower},
          {"C1_envelope", r.C1_envelope},       {"c1_envelope", r.c1_envelope},
          {"violations", r.violations},         {"margins", r.margins}};
}

BoundFitReport fit_exponential_bounds(const SchrodingerOp& op, const SolveReport& solve) {
  if (!solve.converged) throw std::invalid_argument("fit_exponential_bounds: solve did not converge");
  const KernelMatrix& K = op.G();
  if (static_cast<std::size_t>(solve.values.size()) != K.size()) {
    throw std::invalid_argument("fit_exponential_bounds: solution has the wrong size");
  }
  const Mesh& mesh = K.mesh;
  const Eigen::VectorXd m = boundary_weight(mesh, K.backend.params.alpha);
  const Eigen::VectorXd Tm = apply_T(op, m);
  const Eigen::VectorXd G1 = K.entries * lebesgue_weights(mesh).view();
  const Eigen::VectorXd ratio = G1.cwiseQuotient(m);
  const Eigen::VectorXd& u0 = solve.values;

  BoundFitReport r;
  r.C1_envelope = ratio.maxCoeff();
  r.c1_envelope = ratio.minCoeff();
  double C = 0.0;
  double c = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < u0.size(); ++i) {
    if (u0[i] < G1[i] || u0[i] < r.c1_envelope * m[i] * (1.0 - 1e-12)) ++r.violations;
    if (Tm[i] <= 0.0) continue;
    const double s = m[i] / Tm[i];
    C = std::max(C, std::log(u0[i] / (r.C1_envelope * m[i])) * s);
    c = std::min(c, std::log(u0[i] / (r.c1_envelope * m[i])) * s);
  }
  r.fitted_C_upper = C;
  r.fitted_c_lower = std::isfinite(c) ? std::max(c, 0.0) : 0.0;
  r.bound.resize(static_cast<std::size_t>(u0.size()));
  r.margins.resize(static_cast<std::size_t>(u0.size()));
  for (Eigen::Index i = 0; i < u0.size(); ++i) {
    const double b = r.C1_envelope * m[i] * std::exp(C * Tm[i] / m[i]);
    r.bound[static_cast<std::size_t>(i)] = b;
    r.margins[static_cast<std::size_t>(i)] = b - u0[i];
  }
  return r;
}

ExteriorRule exterior_rule(int radial, int angular) {
  if (radial < 1 || angular < 1) throw std::invalid_argument("exterior_rule: sizes must be positive");
  const GaussRule& g = gauss_legendre(radial);
  ExteriorRule rule;
  const double dth = 2.0 * std::numbers::pi / angular;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    const double t = 0.5 * (g.nodes[k] + 1.0);
    const double p = std::pow(t, kGrade);
    const double q = std::pow(1.0 - t, kGrade);
    const double s = p / (p + q);
    const double ds = kGrade * std::pow(t, kGrade - 1.0) * std::pow(1.0 - t, kGrade - 1.0) / ((p + q) * (p + q));
    const double r = 1.0 / s;
    // dz = r dr dtheta = s^{-3} ds dtheta
    const double wr = 0.5 * g.weights[k] * ds / (s * s * s);
    for (int a = 0; a < angular; ++a) {
      const double th = (a + 0.5) * dth;
      rule.z.push_back({r * std::cos(th), r * std::sin(th)});
      rule.w.push_back(wr * dth);
    }
  }
  return rule;
}

nlohmann::ordered_json to_json(const PoissonFitReport& r) {
  return {{"C3", r.C3}, {"C4", r.C4}, {"c3", r.c3}, {"c4", r.c4},
          {"poisson_mass_min", r.poisson_mass_min}, {"poisson_mass_max", r.poisson_mass_max}};
}

PoissonFitReport gauge_poisson_bounds(const SchrodingerOp& op, const SolveReport& gauge_report, int radial,
                                      int angular) {
  const KernelMatrix& K = op.G();
  if (K.mesh.domain.kind() != Domain::Kind::UnitDisk) {
    throw std::invalid_argument("gauge_poisson_bounds: the exact Poisson kernel needs the unit disk");
  }
  if (!gauge_report.converged) throw std::invalid_argument("gauge_poisson_bounds: gauge did not converge");
  const FracParams& params = K.backend.params;
  const Mesh& mesh = K.mesh;
  const ExteriorRule rule = exterior_rule(radial, angular);
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const auto nz = static_cast<Eigen::Index>(rule.z.size());

  Eigen::MatrixXd P(n, nz);
  parallel_for(static_cast<std::size_t>(nz), 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) {
        P(i, static_cast<Eigen::Index>(k)) = poisson_exact_ball(params, mesh.nodes[static_cast<std::size_t>(i)], rule.z[k]);
      }
    }
  });
  // E = G (omega P) / P elementwise; W = w_k P.
  Eigen::MatrixXd E = K.entries * (op.omega().view().asDiagonal() * P);
  E.array() /= P.array();
  Eigen::MatrixXd& W = P;
  for (Eigen::Index k = 0; k < nz; ++k) W.col(k) *= rule.w[static_cast<std::size_t>(k)];

  const Eigen::VectorXd mass = W.rowwise().sum();
  const Eigen::VectorXd& u = gauge_report.values;
  PoissonFitReport r;
  r.poisson_mass_min = mass.minCoeff();
  r.poisson_mass_max = mass.maxCoeff();
  r.C3 = 1.0 / r.poisson_mass_min;
  r.c3 = 1.0 / r.poisson_mass_max;

  std::vector<double> upper(static_cast<std::size_t>(n), 0.0);
  std::vector<double> lower(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  parallel_for(static_cast<std::size_t>(n), 16, [&](std::size_t begin, std::size_t end) {
    for (std::size_t ii = begin; ii < end; ++ii) {
      const auto i = static_cast<Eigen::Index>(ii);
      const double target = u[i];
      if (E.row(i).maxCoeff() <= 0.0) {
        lower[ii] = std::numeric_limits<double>::infinity();
        continue;
      }
      // Upper: smallest c with C3 I(c) >= u.
      if (r.C3 * exp_moment(W, E, i, 0.0) < target) {
        double lo = 0.0, hi = 1.0;
        while (r.C3 * exp_moment(W, E, i, hi) < target) {
          lo = hi;
          hi *= 2.0;
        }
        for (int s = 0; s < kBisectionSteps; ++s) {
          const double mid = 0.5 * (lo + hi);
          (r.C3 * exp_moment(W, E, i, mid) < target ? lo : hi) = mid;
        }
        upper[ii] = hi;
      }
      // Lower: largest c with c3 I(c) <= u.
      double lo = 0.0, hi = 1.0;
      while (r.c3 * exp_moment(W, E, i, hi) <= target && hi < 1e12) {
        lo = hi;
        hi *= 2.0;
      }
      for (int s = 0; s < kBisectionSteps; ++s) {
        const double mid = 0.5 * (lo + hi);
        (r.c3 * exp_moment(W, E, i, mid) <= target ? lo : hi) = mid;
      }
      lower[ii] = lo;
    }
  });
  r.C4 = *std::max_element(upper.begin(), upper.end());
  const double c4 = *std::min_element(lower.begin(), lower.end());
  r.c4 = std::isfinite(c4) ? c4 : 0.0;
  return r;
}

nlohmann::ordered_json to_json(const CounterexampleReport& r) {
  return {{"J", r.J},
          {"interior_margin", r.interior_margin},
          {"alpha_in_theorem_range", r.alpha_in_theorem_range},
          {"t_norm", r.t_norm},
          {"term_means", r.term_means},
          {"partial_sum_mean", r.partial_sum_mean}};
}

CounterexampleReport run_counterexample(const KernelMatrix& K, AMode mode, int J, double interior_margin) {
  if (J < 1) throw std::invalid_argument("run_counterexample: J must be positive");
  const SchrodingerOp op(K, phi_weights(K, mode));
  CounterexampleReport r;
  r.J = J;
  r.interior_margin = interior_margin;
  const double alpha = K.backend.params.alpha;
  r.alpha_in_theorem_range = alpha > 1.0 && alpha < 2.0;
  try {
    r.t_norm = operator_norm(op);
  } catch (const NonConvergence& e) {
    r.t_norm = e.last_estimate();
  }
  Eigen::VectorXd term = K.entries * op.omega().view();
  Eigen::VectorXd partial = Eigen::VectorXd::Ones(term.size());
  for (int j = 0; j <= J; ++j) {
    r.term_means.push_back(interior_mean(K.mesh, term, interior_margin));
    if (j == J) break;
    partial += term;
    term = apply_T(op, term);
  }
  r.partial_sum_mean = interior_mean(K.mesh, partial, interior_margin);
  return r;
}

double hardy_constant(double alpha, int n) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("hardy_constant: alpha must lie in (1, 2)");
  if (n < 2) throw std::invalid_argument("hardy_constant: n must be at least 2");
  const double nn = n;
  const double log_value = std::log(alpha) + std::lgamma(0.5 * (nn + alpha)) - (2.0 - alpha) * std::log(2.0) -
                           0.5 * (nn - 2.0) * std::log(std::numbers::pi) - std::lgamma(1.0 - 0.5 * alpha) -
                           2.0 * std::lgamma(0.5 * (alpha + 1.0));
  return std::exp(log_value);
}

}  // namespace fracgauge
