#pragma once

#include <span>

#include <Eigen/Dense>

#include "polymoments/generator.hpp"

namespace polymoments {

/// Coefficients of a polynomial of degree <= k in the graded-lex basis.
struct CoeffVector {
  int k = 0;
  Eigen::VectorXd values;
};

/// Entry j is E[h_j(X_T)]; the constant monomial entry is 1.
struct MomentVector {
  int k = 0;
  Eigen::VectorXd values;
};

/// exp(t A) by scaling and squaring with the degree-13 Pade approximant.
/// Throws std::invalid_argument for non-square A or t < 0, std::domain_error for
/// non-finite entries.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a, double t = 1.0);

/// E[p(X_T) | X_0 = y] = H(y)^T exp(T G_k) a.
double conditional_moment(const DualMatrix& dual, const CoeffVector& a, std::span<const double> y, double horizon);
double conditional_moment(const GeneratorSpec& spec, int k, const CoeffVector& a, std::span<const double> y,
                          double horizon);

/// E[H(X_T) | X_0 = y0] = exp(T G_k^T) H(y0).
MomentVector moment_vector(const DualMatrix& dual, std::span<const double> y0, double horizon);
MomentVector moment_vector(const GeneratorSpec& spec, int k, std::span<const double> y0, double horizon);

}  // namespace polymoments
