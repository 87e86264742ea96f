#include "fracgauge/special.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace fracgauge {

namespace {

GaussRule make_rule(int n) {
  GaussRule rule;
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime<double>(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    if (z == 0.0) {
      rule.nodes.push_back(0.0);
      rule.weights.push_back(w);
    } else {
      rule.nodes.push_back(-z);
      rule.weights.push_back(w);
      rule.nodes.push_back(z);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

// x^a * sum_k (1-b)_k x^k / (k! (a+k)), used for x <= 1/2 only.
double beta_series(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  double sum = 0.0;
  double coef = 1.0;
  for (int k = 0; k < 500; ++k) {
    const double term = coef / (a + k);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    coef *= (k + 1 - b) / (k + 1) * x;
    if (coef == 0.0) break;
  }
  return std::pow(x, a) * sum;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<GaussRule>(make_rule(n))).first;
  }
  return *it->second;
}

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be positive");
  if (!(x >= 0.0) || x > 1.0) throw std::invalid_argument("incomplete_beta: x outside [0, 1]");
  if (x <= 0.5) return beta_series(x, a, b);
  return std::beta(a, b) - beta_series(1.0 - x, b, a);
}

}  // namespace fracgauge
