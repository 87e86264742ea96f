#pragma once

#include "fracgauge/geometry.hpp"
#include "fracgauge/kernels.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fracgauge {

/// Discrete measure: mass carried by each mesh node.
struct WeightVector {
  std::vector<double> mass;

  std::size_t size() const { return mass.size(); }
  double total() const;
  Eigen::Map<const Eigen::VectorXd> view() const { return {mass.data(), static_cast<Eigen::Index>(mass.size())}; }
};

using Density = std::function<double(Point)>;

/// mass_i = density(node_i) * cell_area_i. Throws std::invalid_argument on a
/// negative or non-finite density value.
WeightVector discretize_density(const Mesh& mesh, const Density& density);

/// mass_i = integral over the node region of density(y) * (delta(y)/delta_i)^e.
/// With e = alpha/2 this integrates densities that blow up at the boundary
/// against the boundary behaviour of the Green kernel rather than sampling
/// them at the node.
WeightVector discretize_density_cellwise(const Mesh& mesh, const Density& density, double boundary_exponent);

struct Atom {
  Point position;
  double mass = 0.0;
};

/// Each atom is moved to the nearest node (lowest index on ties) and masses
/// at the same node are summed. Throws on negative mass or exterior atoms.
WeightVector snap_atoms(const Mesh& mesh, const std::vector<Atom>& atoms);

/// Dense discrete Green operator on a mesh.
struct KernelMatrix {
  Eigen::MatrixXd entries;
  KernelBackend backend;
  Mesh mesh;

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
};

/// Off-diagonal entries are point evaluations G(x_i, x_j). The diagonal is the
/// cell average (1/|cell_i|) * integral of G(x_i, y) over the node region,
/// done in polar coordinates about x_i on the clipped own cell and by
/// region quadrature on attached cells. Rows are split across
/// thread_count() workers; the result does not depend on the worker count.
KernelMatrix assemble_green_matrix(const KernelBackend& backend, const Mesh& mesh);

/// Sum_i values_i * mass_i.
double integrate(const std::vector<double>& values, const WeightVector& weights);
double integrate(const Eigen::VectorXd& values, const WeightVector& weights);

/// Raw dump: N as little-endian uint64 followed by N*N row-major doubles.
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::string& path);

/// Unscaled weights of phi dx, i.e. A = 1.
WeightVector phi_weights_unscaled(const FracParams& params, const Mesh& mesh);

/// Index of the node closest to the domain centroid (lowest index on ties).
std::size_t center_node(const Mesh& mesh);

/// Constant A for phi: the fractional-Laplacian constant in Literature mode,
/// or the value making (G phi)(x_c) = 1 at center_node in Calibrated mode.
double phi_constant(AMode mode, const KernelMatrix& K, const WeightVector& unscaled);

/// Weights of gamma * phi dx with the constant chosen by `mode`.
WeightVector phi_weights(const KernelMatrix& K, AMode mode, double gamma = 1.0);

}  // namespace fracgauge
