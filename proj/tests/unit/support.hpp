#pragma once

#include <cmath>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "polymoments/generator.hpp"
#include "polymoments/polybasis.hpp"

namespace support {

using namespace polymoments;

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }
inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline Polynomial poly(int dim, std::initializer_list<std::pair<std::vector<int>, double>> terms) {
  Polynomial p(dim);
  for (const auto& [alpha, c] : terms) p.add_term(MultiIndex(alpha), c);
  return p;
}

/// b = 0, a = 2y(1 - y)
inline GeneratorSpec jacobi() {
  GeneratorSpec s = GeneratorSpec::zero(1);
  s.diffusion[0][0] = poly(1, {{{1}, 2.0}, {{2}, -2.0}});
  return s;
}

/// b = 0, a = identity
inline GeneratorSpec brownian(int d) {
  GeneratorSpec s = GeneratorSpec::zero(d);
  for (int i = 0; i < d; ++i) s.diffusion[i][i] = Polynomial::constant(d, 1.0);
  return s;
}

/// Sparse polynomial with small integer coefficients, so that sums and products
/// of a few of them are exact in double precision.
inline Polynomial random_poly(std::mt19937_64& rng, int dim, int max_degree, int range = 3) {
  std::uniform_int_distribution<int> coef(-range, range);
  std::bernoulli_distribution keep(0.5);
  Polynomial p(dim);
  for (const auto& alpha : enumerate_basis(dim, max_degree))
    if (keep(rng)) p.add_term(alpha, coef(rng));
  return p;
}

inline GeneratorSpec random_spec(std::mt19937_64& rng, int dim, bool with_jumps) {
  GeneratorSpec s = GeneratorSpec::zero(dim);
  for (int i = 0; i < dim; ++i) s.drift[i] = random_poly(rng, dim, 1);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      s.diffusion[i][j] = random_poly(rng, dim, 2);
      s.diffusion[j][i] = s.diffusion[i][j];
    }
  if (with_jumps) {
    std::uniform_int_distribution<int> order(2, 3);
    std::uniform_int_distribution<int> var(0, dim - 1);
    const int n = std::uniform_int_distribution<int>(1, 2)(rng);
    for (int m = 0; m < n; ++m) {
      std::vector<int> beta(static_cast<std::size_t>(dim), 0);
      const int o = order(rng);
      for (int l = 0; l < o; ++l) ++beta[static_cast<std::size_t>(var(rng))];
      MultiIndex b(beta);
      bool duplicate = false;
      for (const auto& jm : s.jumps) duplicate = duplicate || jm.beta == b;
      if (!duplicate) s.jumps.push_back({b, random_poly(rng, dim, o)});
    }
  }
  return s;
}

inline std::vector<double> random_point(std::mt19937_64& rng, int dim, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> y(static_cast<std::size_t>(dim));
  for (auto& v : y) v = u(rng);
  return y;
}

}  // namespace support
