#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace polymoments {

/// Exponent vector of a monomial y^alpha in d variables.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);
  static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0)); }
  static MultiIndex unit(int dim, int i);

  int dim() const { return static_cast<int>(exponents_.size()); }
  int total_degree() const { return degree_; }
  int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const { return exponents_; }

  MultiIndex operator+(const MultiIndex& other) const;

  std::string to_string() const;

  bool operator==(const MultiIndex& other) const { return exponents_ == other.exponents_; }

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// Graded-lexicographic order: lower total degree first; within a degree the
/// exponent vectors are compared lexicographically, larger leading exponent first.
/// For d = 2: 1, y0, y1, y0^2, y0 y1, y1^2, ...
struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

/// Degree reported for the zero polynomial.
inline constexpr int kZeroPolynomialDegree = std::numeric_limits<int>::min();

/// Real polynomial in `dim` variables, stored as a sparse monomial map.
/// Zero coefficients are never stored (pruning threshold is exactly 0.0).
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, double, GradedLexLess>;

  explicit Polynomial(int dim);
  static Polynomial constant(int dim, double c);
  static Polynomial monomial(const MultiIndex& alpha, double c = 1.0);
  /// y_i
  static Polynomial variable(int dim, int i);

  int dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Max total degree over stored terms, kZeroPolynomialDegree for the zero polynomial.
  int degree() const;
  double coefficient(const MultiIndex& alpha) const;

  /// Adds c * y^alpha, dropping the term if the sum becomes exactly zero.
  void add_term(const MultiIndex& alpha, double c);

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double s) const;
  Polynomial& operator+=(const Polynomial& other);

  bool operator==(const Polynomial& other) const { return dim_ == other.dim_ && terms_ == other.terms_; }

  std::string to_string() const;

 private:
  int dim_;
  Terms terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

/// All exponent vectors of total degree <= k in d variables, graded-lex ordered.
/// Size is C(d + k, d). Throws std::invalid_argument for d < 1 or k < 0.
std::vector<MultiIndex> enumerate_basis(int d, int k);

/// Number of monomials of degree <= k in d variables.
std::size_t basis_size(int d, int k);

Polynomial poly_mul(const Polynomial& p, const Polynomial& q);

/// Exact partial derivative with respect to y_i.
Polynomial poly_partial(const Polynomial& p, int i);

double poly_eval(const Polynomial& p, std::span<const double> y);

/// Coefficient vector of p in the given basis. Throws if p has a term outside it.
Eigen::VectorXd to_coefficients(const Polynomial& p, const std::vector<MultiIndex>& basis);
Polynomial from_coefficients(const Eigen::VectorXd& a, const std::vector<MultiIndex>& basis);

/// H(y) = (h_1(y), ..., h_N(y)) for the monomial basis.
Eigen::VectorXd evaluate_basis(const std::vector<MultiIndex>& basis, std::span<const double> y);

/// Flattened polynomial for repeated evaluation in inner loops.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);

  int dim() const { return dim_; }
  double operator()(std::span<const double> y) const;

 private:
  int dim_ = 0;
  std::vector<double> coefficients_;
  std::vector<int> exponents_;  // row-major, one row of length dim_ per term
};

}  // namespace polymoments
