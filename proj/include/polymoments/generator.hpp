#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polymoments/polybasis.hpp"

namespace polymoments {

/// y -> integral of (z - y)^beta N(y, dz), required to be a polynomial of degree <= |beta|.
struct JumpMoment {
  MultiIndex beta;
  Polynomial mu;
};

/// Polynomial operator of Levy type on R^d:
///   L p = sum_i b_i d_i p + 1/2 sum_ij a_ij d_i d_j p + jump part,
/// with the jump part expanded through the moment polynomials mu_beta.
struct GeneratorSpec {
  int dim = 1;
  std::vector<Polynomial> drift;                   // b_i, degree <= 1
  std::vector<std::vector<Polynomial>> diffusion;  // a_ij = (sigma sigma^T)_ij, degree <= 2, symmetric
  std::vector<JumpMoment> jumps;                   // |beta| >= 2

  /// b = 0, a = 0, no jumps.
  static GeneratorSpec zero(int dim);
};

struct GeneratorViolation {
  enum class Kind { kShape, kDegree, kSymmetry, kJumpOrder };
  Kind kind;
  std::string field;  // e.g. "drift[0]", "diffusion[0][1]"
  int found_degree = 0;
  int allowed_degree = 0;
  std::string message;
};

/// nullopt when every degree and symmetry condition holds; otherwise the first
/// offending field in the order drift, diffusion, jumps.
std::optional<GeneratorViolation> validate_generator(const GeneratorSpec& spec);

/// L p. Throws DegreeIncrease when deg(L p) > deg(p), which is how a spec that is
/// not degree-preserving shows up. Only the array shapes are checked up front.
Polynomial apply_generator(const GeneratorSpec& spec, const Polynomial& p);

/// Matrix of L restricted to polynomials of degree <= k in the graded-lex monomial
/// basis; column j holds the coefficients of L h_j.
struct DualMatrix {
  int k = 0;
  std::vector<MultiIndex> basis;
  Eigen::MatrixXd entries;
};

DualMatrix build_dual_matrix(const GeneratorSpec& spec, int k);

}  // namespace polymoments
