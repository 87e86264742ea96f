#include "fracgauge/quadrature.hpp"

#include "fracgauge/parallel.hpp"
#include "fracgauge/special.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fracgauge {

namespace {

constexpr int kSectorAngles = 16;
constexpr int kRadialPoints = 30;
constexpr double kInf = std::numeric_limits<double>::infinity();

double checked(double v) {
  if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("density must be finite and nonnegative");
  return v;
}

// Integral of G(x, y) over the clipped cell containing x, in polar
// coordinates about x. For the exact ball kernel the Riesz part
// c0 rho^{alpha-2} is integrated in closed form and the remainder, which is
// smooth in rho, by Gauss-Legendre. For the model kernel the substitution
// rho = R u^{1/alpha} absorbs the rho^{alpha-1} behaviour of G * rho.
double self_cell_integral(const KernelBackend& G, const Domain& domain, const Rect& cell, Point x) {
  const double alpha = G.params.alpha;
  const bool exact = G.kind == KernelBackend::Kind::ExactBall;
  const double c0 = exact ? green_ball_constant(G.params) * green_ball_profile(G.params, kInf) : 0.0;
  const std::array<Point, 4> corner{Point{cell.x1, cell.y0}, Point{cell.x1, cell.y1}, Point{cell.x0, cell.y1},
                                    Point{cell.x0, cell.y0}};
  std::array<double, 5> ang{};
  for (int k = 0; k < 4; ++k) ang[k] = std::atan2(corner[k].y - x.y, corner[k].x - x.x);
  for (int k = 1; k < 4; ++k) {
    while (ang[k] < ang[k - 1]) ang[k] += 2.0 * std::numbers::pi;
  }
  ang[4] = ang[0] + 2.0 * std::numbers::pi;

  const GaussRule& ga = gauss_legendre(kSectorAngles);
  const GaussRule& gu = gauss_legendre(kRadialPoints);
  double total = 0.0;
  for (int s = 0; s < 4; ++s) {
    const double half = 0.5 * (ang[s + 1] - ang[s]);
    const double mid = 0.5 * (ang[s + 1] + ang[s]);
    for (std::size_t a = 0; a < ga.nodes.size(); ++a) {
      const double th = mid + half * ga.nodes[a];
      const Point dir{std::cos(th), std::sin(th)};
      const double R = std::min(ray_exit_distance(cell, x, dir), ray_exit_distance(domain, x, dir));
      double radial = 0.0;
      if (exact) {
        radial = c0 * std::pow(R, alpha) / alpha;
        for (std::size_t k = 0; k < gu.nodes.size(); ++k) {
          const double rho = 0.5 * R * (gu.nodes[k] + 1.0);
          radial += 0.5 * R * gu.weights[k] * (G(x, x + rho * dir) - c0 * std::pow(rho, alpha - 2.0)) * rho;
        }
      } else {
        for (std::size_t k = 0; k < gu.nodes.size(); ++k) {
          const double u = 0.5 * (gu.nodes[k] + 1.0);
          const double rho = R * std::pow(u, 1.0 / alpha);
          radial += 0.5 * gu.weights[k] * G(x, x + rho * dir) * std::pow(rho, 2.0 - alpha);
        }
        radial *= std::pow(R, alpha) / alpha;
      }
      total += half * ga.weights[a] * radial;
    }
  }
  return total;
}

}  // namespace

double WeightVector::total() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

WeightVector discretize_density(const Mesh& mesh, const Density& density) {
  WeightVector w;
  w.mass.resize(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) w.mass[i] = checked(density(mesh.nodes[i])) * mesh.cell_area[i];
  return w;
}

WeightVector discretize_density_cellwise(const Mesh& mesh, const Density& density, double boundary_exponent) {
  WeightVector w;
  w.mass.assign(mesh.size(), 0.0);
  parallel_for(mesh.size(), 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double di = mesh.delta[i];
      auto cell_sum = [&](const Rect& r) {
        double s = 0.0;
        for (const auto& q : region_quadrature(mesh.domain, r)) {
          const double factor = boundary_exponent == 0.0
                                    ? 1.0
                                    : std::pow(distance_to_boundary(mesh.domain, q.p) / di, boundary_exponent);
          s += q.w * checked(density(q.p)) * factor;
        }
        return s;
      };
      double m = cell_sum(mesh.cells[i]);
      for (const Rect& r : mesh.attached[i]) m += cell_sum(r);
      w.mass[i] = m;
    }
  });
  return w;
}

WeightVector snap_atoms(const Mesh& mesh, const std::vector<Atom>& atoms) {
  WeightVector w;
  w.mass.assign(mesh.size(), 0.0);
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.mass) || a.mass < 0.0) throw std::invalid_argument("atom mass must be finite and nonnegative");
    if (!contains(mesh.domain, a.position)) throw std::invalid_argument("atom outside the domain");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const double d = norm_squared(mesh.nodes[i] - a.position);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    w.mass[best] += a.mass;
  }
  return w;
}

KernelMatrix assemble_green_matrix(const KernelBackend& backend, const Mesh& mesh) {
  backend.check();
  if (mesh.size() == 0) throw std::invalid_argument("assemble_green_matrix: empty mesh");
  if (backend.domain.kind() != mesh.domain.kind() || backend.domain.bounds()[0].lo != mesh.domain.bounds()[0].lo ||
      backend.domain.bounds()[0].hi != mesh.domain.bounds()[0].hi ||
      backend.domain.bounds()[1].lo != mesh.domain.bounds()[1].lo ||
      backend.domain.bounds()[1].hi != mesh.domain.bounds()[1].hi) {
    throw std::invalid_argument("assemble_green_matrix: backend and mesh use different domains");
  }
  const std::size_t n = mesh.size();
  KernelMatrix K{Eigen::MatrixXd(n, n), backend, mesh};
  Eigen::MatrixXd& E = K.entries;

  // Column j of the column-major storage holds G(x_i, x_j) for i < j.
  parallel_for(n, 16, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      for (std::size_t i = 0; i < j; ++i) E(i, j) = backend(mesh.nodes[i], mesh.nodes[j]);
      const Point x = mesh.nodes[j];
      double diag = self_cell_integral(backend, mesh.domain, mesh.cells[j], x);
      for (const Rect& r : mesh.attached[j]) {
        for (const auto& q : region_quadrature(mesh.domain, r)) diag += q.w * backend(x, q.p);
      }
      E(j, j) = diag / mesh.cell_area[j];
    }
  });
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) E(j, i) = E(i, j);
  }
  return K;
}

double integrate(const std::vector<double>& values, const WeightVector& weights) {
  if (values.size() != weights.size()) throw std::invalid_argument("integrate: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * weights.mass[i];
  return s;
}

double integrate(const Eigen::VectorXd& values, const WeightVector& weights) {
  if (static_cast<std::size_t>(values.size()) != weights.size()) throw std::invalid_argument("integrate: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) s += values[static_cast<Eigen::Index>(i)] * weights.mass[i];
  return s;
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  static_assert(std::endian::native == std::endian::little, "matrix dump assumes a little-endian host");
  if (m.rows() != m.cols()) throw std::invalid_argument("write_matrix: matrix must be square");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const std::uint64_t n = static_cast<std::uint64_t>(m.rows());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * n * n));
  if (!out) throw std::runtime_error("short write to " + path);
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n == 0 || n > (1u << 20)) throw std::runtime_error("bad matrix header in " + path);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(n, n);
  in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * n * n));
  if (!in) throw std::runtime_error("truncated matrix in " + path);
  return rm;
}

WeightVector phi_weights_unscaled(const FracParams& params, const Mesh& mesh) {
  const Domain& domain = mesh.domain;
  return discretize_density_cellwise(
      mesh, [&](Point y) { return phi_unscaled(params, domain, y); }, 0.5 * params.alpha);
}

std::size_t center_node(const Mesh& mesh) {
  const Point c = mesh.domain.centroid();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double d = norm_squared(mesh.nodes[i] - c);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double phi_constant(AMode mode, const KernelMatrix& K, const WeightVector& unscaled) {
  if (mode == AMode::Literature) return fractional_laplacian_constant(K.backend.params);
  const std::size_t c = center_node(K.mesh);
  const double g = K.entries.row(static_cast<Eigen::Index>(c)).dot(unscaled.view());
  if (!(g > 0.0)) throw std::runtime_error("phi_constant: G phi vanishes at the centre node");
  return 1.0 / g;
}

WeightVector phi_weights(const KernelMatrix& K, AMode mode, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("phi_weights: gamma must be nonnegative");
  WeightVector w = phi_weights_unscaled(K.backend.params, K.mesh);
  const double scale = gamma * phi_constant(mode, K, w);
  for (double& m : w.mass) m *= scale;
  return w;
}

}  // namespace fracgauge
