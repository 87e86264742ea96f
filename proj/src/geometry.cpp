#include "fracgauge/geometry.hpp"

#include "fracgauge/special.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fracgauge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Grading exponent for the boundary-adjacent piece: 1 - r = c * t^4 turns
// dist^{-s} (s <= 3/4) into a bounded integrand in t.
constexpr double kGrade = 4.0;
constexpr int kInteriorOrder = 4;
constexpr int kPieceOrder = 8;
constexpr int kGradedOrder = 24;
constexpr int kArcOrder = 8;

double clamp_to(double v, Interval iv) { return std::min(std::max(v, iv.lo), iv.hi); }

double distance_to_rect(Point p, const Rect& r) {
  const double dx = p.x - clamp_to(p.x, {r.x0, r.x1});
  const double dy = p.y - clamp_to(p.y, {r.y0, r.y1});
  return std::hypot(dx, dy);
}

std::array<Point, 4> corners(const Rect& r) {
  return {Point{r.x0, r.y0}, Point{r.x1, r.y0}, Point{r.x1, r.y1}, Point{r.x0, r.y1}};
}

bool point_in_rect(Point p, const Rect& r) {
  return p.x >= r.x0 && p.x <= r.x1 && p.y >= r.y0 && p.y <= r.y1;
}

bool rect_inside(const Domain& domain, const Rect& rect) {
  if (domain.kind() == Domain::Kind::Box) {
    const auto& b = domain.bounds();
    return rect.x0 >= b[0].lo && rect.x1 <= b[0].hi && rect.y0 >= b[1].lo && rect.y1 <= b[1].hi;
  }
  for (Point c : corners(rect)) {
    if (norm_squared(c) >= 1.0) return false;
  }
  return true;
}

// Angular intervals of the circle |y| = r lying inside the rectangle.
std::vector<std::pair<double, double>> arcs_in_rect(double r, const Rect& rect) {
  std::vector<double> angles{0.0, kTwoPi};
  auto wrap = [](double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
  };
  for (double xv : {rect.x0, rect.x1}) {
    if (std::abs(xv) < r) {
      const double t = std::acos(xv / r);
      angles.push_back(wrap(t));
      angles.push_back(wrap(-t));
    }
  }
  for (double yv : {rect.y0, rect.y1}) {
    if (std::abs(yv) < r) {
      const double t = std::asin(yv / r);
      angles.push_back(wrap(t));
      angles.push_back(wrap(std::numbers::pi - t));
    }
  }
  std::sort(angles.begin(), angles.end());
  std::vector<std::pair<double, double>> arcs;
  for (std::size_t k = 0; k + 1 < angles.size(); ++k) {
    const double a = angles[k];
    const double b = angles[k + 1];
    if (b - a < 1e-15) continue;
    const double m = 0.5 * (a + b);
    if (point_in_rect({r * std::cos(m), r * std::sin(m)}, rect)) {
      if (!arcs.empty() && std::abs(arcs.back().second - a) < 1e-15) {
        arcs.back().second = b;
      } else {
        arcs.emplace_back(a, b);
      }
    }
  }
  return arcs;
}

void append_tensor(std::vector<QuadraturePoint>& out, const Rect& r, int order) {
  const GaussRule& g = gauss_legendre(order);
  const double hx = 0.5 * (r.x1 - r.x0);
  const double hy = 0.5 * (r.y1 - r.y0);
  const Point c = r.center();
  for (std::size_t j = 0; j < g.nodes.size(); ++j) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      out.push_back({{c.x + hx * g.nodes[i], c.y + hy * g.nodes[j]}, hx * hy * g.weights[i] * g.weights[j]});
    }
  }
}

// Map t in (0,1) onto (0,1), clustering towards the flagged ends.
struct GradedNode {
  double s;
  double ds;
};

GradedNode graded(double t, bool lo, bool hi) {
  if (lo && hi) {
    const double p = std::pow(t, kGrade);
    const double q = std::pow(1.0 - t, kGrade);
    const double den = p + q;
    const double ds = kGrade * std::pow(t, kGrade - 1.0) * std::pow(1.0 - t, kGrade - 1.0) / (den * den);
    return {p / den, ds};
  }
  if (lo) return {std::pow(t, kGrade), kGrade * std::pow(t, kGrade - 1.0)};
  if (hi) return {1.0 - std::pow(1.0 - t, kGrade), kGrade * std::pow(1.0 - t, kGrade - 1.0)};
  return {t, 1.0};
}

std::vector<QuadraturePoint> disk_region(const Rect& rect) {
  std::vector<QuadraturePoint> out;
  const double rmin = distance_to_rect({0.0, 0.0}, rect);
  if (rmin >= 1.0) return out;
  double rmax = 0.0;
  for (Point c : corners(rect)) rmax = std::max(rmax, norm(c));
  const double diag = std::hypot(rect.x1 - rect.x0, rect.y1 - rect.y0);
  if (rmax <= 1.0 - diag) {
    append_tensor(out, rect, kInteriorOrder);
    return out;
  }
  const double rtop = std::min(rmax, 1.0);
  std::vector<double> breaks{rmin, rtop};
  for (double v : {std::abs(rect.x0), std::abs(rect.x1), std::abs(rect.y0), std::abs(rect.y1)}) {
    if (v > rmin && v < rtop) breaks.push_back(v);
  }
  for (Point c : corners(rect)) {
    const double v = norm(c);
    if (v > rmin && v < rtop) breaks.push_back(v);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               breaks.end());

  const GaussRule& arc_rule = gauss_legendre(kArcOrder);
  auto add_circle = [&](double r, double wr) {
    for (auto [a, b] : arcs_in_rect(r, rect)) {
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      for (std::size_t k = 0; k < arc_rule.nodes.size(); ++k) {
        const double th = mid + half * arc_rule.nodes[k];
        out.push_back({{r * std::cos(th), r * std::sin(th)}, wr * r * half * arc_rule.weights[k]});
      }
    }
  };

  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p];
    const double b = breaks[p + 1];
    if (b - a <= 0.0) continue;
    const bool touches_boundary = (p + 2 == breaks.size()) && rmax >= 1.0;
    // Arc lengths behave like a square root of r - a where a circle first
    // meets a cell edge, so pieces get a quadratic grading at both ends
    // (s = t^2 / (t^2 + (1-t)^2)). The outer half of the boundary piece uses
    // 1 - r = c t^4 instead, which also absorbs delta^{-s} weights.
    const double top = touches_boundary ? 0.5 * (a + 1.0) : b;
    const GaussRule& g = gauss_legendre(kGradedOrder);
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      const double t = 0.5 * (g.nodes[k] + 1.0);
      const double p2 = t * t, q2 = (1.0 - t) * (1.0 - t), den = p2 + q2;
      const double r = a + (top - a) * p2 / den;
      add_circle(r, 0.5 * g.weights[k] * (top - a) * 2.0 * t * (1.0 - t) / (den * den));
    }
    if (touches_boundary) {
      const double span = 1.0 - top;
      for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double t = 0.5 * (g.nodes[k] + 1.0);
        const double r = 1.0 - span * std::pow(t, kGrade);
        add_circle(r, 0.5 * g.weights[k] * span * kGrade * std::pow(t, kGrade - 1.0));
      }
    }
  }
  return out;
}

std::vector<QuadraturePoint> box_region(const Domain& domain, const Rect& rect) {
  std::vector<QuadraturePoint> out;
  const auto& b = domain.bounds();
  const Rect r{std::max(rect.x0, b[0].lo), std::min(rect.x1, b[0].hi), std::max(rect.y0, b[1].lo),
               std::min(rect.y1, b[1].hi)};
  if (r.x1 <= r.x0 || r.y1 <= r.y0) return out;
  const bool lx = r.x0 == b[0].lo, hx = r.x1 == b[0].hi;
  const bool ly = r.y0 == b[1].lo, hy = r.y1 == b[1].hi;
  const double size = std::max(r.x1 - r.x0, r.y1 - r.y0);
  const double margin = std::min({r.x0 - b[0].lo, b[0].hi - r.x1, r.y0 - b[1].lo, b[1].hi - r.y1});
  if (!(lx || hx || ly || hy)) {
    append_tensor(out, r, margin > size ? kInteriorOrder : kPieceOrder);
    return out;
  }
  const GaussRule& gx = gauss_legendre((lx || hx) ? kGradedOrder : kPieceOrder);
  const GaussRule& gy = gauss_legendre((ly || hy) ? kGradedOrder : kPieceOrder);
  for (std::size_t j = 0; j < gy.nodes.size(); ++j) {
    const GradedNode ny = graded(0.5 * (gy.nodes[j] + 1.0), ly, hy);
    for (std::size_t i = 0; i < gx.nodes.size(); ++i) {
      const GradedNode nx = graded(0.5 * (gx.nodes[i] + 1.0), lx, hx);
      const double w = 0.25 * gx.weights[i] * gy.weights[j] * nx.ds * ny.ds * (r.x1 - r.x0) * (r.y1 - r.y0);
      out.push_back({{r.x0 + nx.s * (r.x1 - r.x0), r.y0 + ny.s * (r.y1 - r.y0)}, w});
    }
  }
  return out;
}

}  // namespace

Domain Domain::unit_disk() { return Domain(Kind::UnitDisk, {Interval{-1.0, 1.0}, Interval{-1.0, 1.0}}); }

Domain Domain::box(Interval x, Interval y) {
  for (const Interval& iv : {x, y}) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
      throw std::invalid_argument("box bounds need lo < hi on every axis");
    }
  }
  return Domain(Kind::Box, {x, y});
}

Point Domain::centroid() const {
  if (kind_ == Kind::UnitDisk) return {0.0, 0.0};
  return {0.5 * (bounds_[0].lo + bounds_[0].hi), 0.5 * (bounds_[1].lo + bounds_[1].hi)};
}

double Domain::measure() const {
  if (kind_ == Kind::UnitDisk) return std::numbers::pi;
  return bounds_[0].length() * bounds_[1].length();
}

bool contains(const Domain& domain, Point x) {
  if (domain.kind() == Domain::Kind::UnitDisk) return norm_squared(x) < 1.0;
  const auto& b = domain.bounds();
  return x.x > b[0].lo && x.x < b[0].hi && x.y > b[1].lo && x.y < b[1].hi;
}

double distance_to_boundary(const Domain& domain, Point x) {
  if (!contains(domain, x)) throw std::domain_error("distance_to_boundary: point outside domain");
  if (domain.kind() == Domain::Kind::UnitDisk) return 1.0 - norm(x);
  const auto& b = domain.bounds();
  return std::min({x.x - b[0].lo, b[0].hi - x.x, x.y - b[1].lo, b[1].hi - x.y});
}

double ray_exit_distance(const Domain& domain, Point x, Point dir) {
  if (!contains(domain, x)) throw std::domain_error("ray_exit_distance: point outside domain");
  if (domain.kind() == Domain::Kind::UnitDisk) {
    // |x + t d|^2 = 1  =>  t^2 + 2 b t + c = 0 with c < 0
    const double b = dot(x, dir);
    const double c = norm_squared(x) - 1.0;
    const double disc = std::sqrt(b * b - c);
    return b <= 0.0 ? disc - b : -c / (b + disc);
  }
  const auto& bb = domain.bounds();
  return ray_exit_distance(Rect{bb[0].lo, bb[0].hi, bb[1].lo, bb[1].hi}, x, dir);
}

double ray_exit_distance(const Rect& rect, Point x, Point dir) {
  double t = std::numeric_limits<double>::infinity();
  if (dir.x > 0.0) t = std::min(t, (rect.x1 - x.x) / dir.x);
  if (dir.x < 0.0) t = std::min(t, (rect.x0 - x.x) / dir.x);
  if (dir.y > 0.0) t = std::min(t, (rect.y1 - x.y) / dir.y);
  if (dir.y < 0.0) t = std::min(t, (rect.y0 - x.y) / dir.y);
  return t;
}

std::vector<QuadraturePoint> region_quadrature(const Domain& domain, const Rect& rect) {
  if (domain.kind() == Domain::Kind::UnitDisk) return disk_region(rect);
  return box_region(domain, rect);
}

double Mesh::total_area() const {
  double s = 0.0;
  for (double a : cell_area) s += a;
  return s;
}

Mesh build_mesh(const Domain& domain, int resolution) {
  if (resolution < 4) throw std::invalid_argument("build_mesh: resolution must be at least 4");
  const auto& bb = domain.bounds();
  const double extent = std::max(bb[0].length(), bb[1].length());
  const double h = extent / resolution;
  const int nx = static_cast<int>(std::ceil(bb[0].length() / h - 1e-9));
  const int ny = static_cast<int>(std::ceil(bb[1].length() / h - 1e-9));

  Mesh mesh;
  mesh.domain = domain;
  mesh.resolution = resolution;
  mesh.h = h;

  auto cell_rect = [&](int ix, int iy) {
    return Rect{bb[0].lo + ix * h, bb[0].lo + (ix + 1) * h, bb[1].lo + iy * h, bb[1].lo + (iy + 1) * h};
  };

  std::vector<int> index(static_cast<std::size_t>(nx) * ny, -1);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const Rect r = cell_rect(ix, iy);
      if (!contains(domain, r.center())) continue;
      index[static_cast<std::size_t>(iy) * nx + ix] = static_cast<int>(mesh.nodes.size());
      Point node = r.center();
      double area = r.area();
      if (!rect_inside(domain, r)) {
        area = 0.0;
        Point moment{0.0, 0.0};
        for (const auto& q : region_quadrature(domain, r)) {
          area += q.w;
          moment = moment + q.w * q.p;
        }
        node = (1.0 / area) * moment;
      }
      mesh.nodes.push_back(node);
      mesh.cell_area.push_back(area);
      mesh.cells.push_back(r);
    }
  }
  if (mesh.nodes.empty()) {
    throw std::invalid_argument("build_mesh: resolution " + std::to_string(resolution) + " produced no interior node");
  }
  mesh.attached.resize(mesh.nodes.size());

  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (index[static_cast<std::size_t>(iy) * nx + ix] >= 0) continue;
      const Rect r = cell_rect(ix, iy);
      double overlap = 0.0;
      for (const auto& q : region_quadrature(domain, r)) overlap += q.w;
      if (overlap <= 0.0) continue;
      int target = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
          const int j = index[static_cast<std::size_t>(jy) * nx + jx];
          if (j < 0) continue;
          const double d = distance(mesh.cells[j].center(), r.center());
          if (d < best - 1e-12 || (std::abs(d - best) <= 1e-12 && j < target)) {
            best = d;
            target = j;
          }
        }
      }
      if (target < 0) {
        for (std::size_t j = 0; j < mesh.nodes.size(); ++j) {
          const double d = distance(mesh.cells[j].center(), r.center());
          if (d < best) {
            best = d;
            target = static_cast<int>(j);
          }
        }
      }
      mesh.attached[target].push_back(r);
      mesh.cell_area[target] += overlap;
    }
  }

  mesh.delta.reserve(mesh.nodes.size());
  for (Point p : mesh.nodes) mesh.delta.push_back(distance_to_boundary(domain, p));
  return mesh;
}

}  // namespace fracgauge
