#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace fracgauge {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm_squared(Point a) { return dot(a, a); }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  double area() const { return (x1 - x0) * (y1 - y0); }
  Point center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
};

/// Bounded planar region: the open unit disk or an open axis-aligned box.
/// Lengths are dimensionless.
class Domain {
 public:
  enum class Kind { UnitDisk, Box };

  static Domain unit_disk();
  /// Throws std::invalid_argument unless lo < hi on both axes.
  static Domain box(Interval x, Interval y);

  Kind kind() const { return kind_; }
  /// Box bounds; for the disk this is the bounding square [-1,1]^2.
  const std::array<Interval, 2>& bounds() const { return bounds_; }
  Point centroid() const;
  double measure() const;

 private:
  Domain(Kind kind, std::array<Interval, 2> bounds) : kind_(kind), bounds_(bounds) {}
  Kind kind_;
  std::array<Interval, 2> bounds_;
};

bool contains(const Domain& domain, Point x);

/// Euclidean distance from an interior point to the boundary.
/// Throws std::domain_error if x is not in the open domain.
double distance_to_boundary(const Domain& domain, Point x);

/// Length of the longest segment x + s*dir, s in [0,t), staying inside the
/// domain. `dir` must be a unit vector.
double ray_exit_distance(const Domain& domain, Point x, Point dir);

/// Distance of the ray exit point along dir from x, restricted to a rectangle
/// that contains x. Used for polar integration over a clipped cell.
double ray_exit_distance(const Rect& rect, Point x, Point dir);

struct QuadraturePoint {
  Point p;
  double w = 0.0;
};

/// Quadrature rule for rect ∩ domain. Points near the domain boundary are
/// graded so that integrands behaving like dist(y, ∂Ω)^{-s}, s < 1, are
/// integrated accurately. Returns an empty rule when the intersection has no
/// interior.
std::vector<QuadraturePoint> region_quadrature(const Domain& domain, const Rect& rect);

/// Cartesian cell decomposition of a domain.
///
/// Cell side is h = (longest bounding-box extent) / resolution, with the grid
/// anchored at the lower-left corner of the bounding box. A grid cell carries a
/// node iff its centre is interior; grid cells whose centre lies outside but
/// which still overlap the domain are attached to the nearest included
/// neighbour, so the node regions tile the domain. Nodes are the centroids of
/// their clipped own cells and are ordered row-major (y outer, x inner).
struct Mesh {
  Domain domain = Domain::unit_disk();
  int resolution = 0;
  double h = 0.0;
  std::vector<Point> nodes;
  std::vector<double> cell_area;
  std::vector<double> delta;
  std::vector<Rect> cells;
  std::vector<std::vector<Rect>> attached;

  std::size_t size() const { return nodes.size(); }
  double total_area() const;
};

/// Throws std::invalid_argument if resolution < 4 or no cell centre is
/// interior.
Mesh build_mesh(const Domain& domain, int resolution);

}  // namespace fracgauge
