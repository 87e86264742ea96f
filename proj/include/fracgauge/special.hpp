#pragma once

#include <vector>

namespace fracgauge {

/// Gauss–Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule; safe to call from several threads.
const GaussRule& gauss_legendre(int n);

/// Lower incomplete Beta integral B(x; a, b) = ∫_0^x s^{a-1} (1-s)^{b-1} ds
/// (not regularized), for a, b > 0 and 0 <= x <= 1.
double incomplete_beta(double x, double a, double b);

}  // namespace fracgauge
