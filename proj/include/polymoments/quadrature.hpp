#pragma once

#include <functional>
#include <span>
#include <vector>

namespace polymoments {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree <= 2n - 1.
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

double integrate(const std::function<double(double)>& f, const QuadratureRule& rule);

/// Tensor-product rule of `rule` in k dimensions applied to f.
double integrate_product(const std::function<double(std::span<const double>)>& f, const QuadratureRule& rule,
                         int k);

}  // namespace polymoments
