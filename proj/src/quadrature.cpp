#include "polymoments/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace polymoments {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = mid - half * x;
    rule.nodes[hi] = mid + half * x;
    rule.weights[lo] = half * w;
    rule.weights[hi] = half * w;
  }
  return rule;
}

double integrate(const std::function<double(double)>& f, const QuadratureRule& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(rule.nodes[i]);
  return sum;
}

double integrate_product(const std::function<double(std::span<const double>)>& f, const QuadratureRule& rule,
                         int k) {
  if (k < 1) throw std::invalid_argument("integrate_product: dimension must be >= 1");
  const std::size_t n = rule.nodes.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  std::vector<double> x(static_cast<std::size_t>(k));
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      x[j] = rule.nodes[idx[j]];
      w *= rule.weights[idx[j]];
    }
    sum += w * f(x);
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == n) idx[j++] = 0;
    if (j == idx.size()) break;
  }
  return sum;
}

}  // namespace polymoments
