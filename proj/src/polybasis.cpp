#include "polymoments/polybasis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "polymoments/errors.hpp"

namespace polymoments {

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw std::invalid_argument("negative exponent in multi-index");
    degree_ += e;
  }
}

MultiIndex MultiIndex::unit(int dim, int i) {
  std::vector<int> e(static_cast<std::size_t>(dim), 0);
  e.at(static_cast<std::size_t>(i)) = 1;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (dim() != other.dim()) throw DimensionMismatch("multi-index dimension mismatch");
  std::vector<int> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
  return MultiIndex(std::move(e));
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (i) os << ',';
    os << exponents_[i];
  }
  os << ')';
  return os.str();
}

bool GradedLexLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
  if (a.total_degree() != b.total_degree()) return a.total_degree() < b.total_degree();
  // larger leading exponent sorts first
  return std::lexicographical_compare(b.exponents().begin(), b.exponents().end(), a.exponents().begin(),
                                      a.exponents().end());
}

Polynomial::Polynomial(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("polynomial dimension must be >= 1");
}

Polynomial Polynomial::constant(int dim, double c) {
  Polynomial p(dim);
  p.add_term(MultiIndex::zero(dim), c);
  return p;
}

Polynomial Polynomial::monomial(const MultiIndex& alpha, double c) {
  Polynomial p(alpha.dim());
  p.add_term(alpha, c);
  return p;
}

Polynomial Polynomial::variable(int dim, int i) {
  if (i < 0 || i >= dim) throw DimensionMismatch("variable index out of range");
  return monomial(MultiIndex::unit(dim, i));
}

int Polynomial::degree() const {
  if (terms_.empty()) return kZeroPolynomialDegree;
  // graded ordering: the last key has maximal degree
  return terms_.rbegin()->first.total_degree();
}

double Polynomial::coefficient(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const MultiIndex& alpha, double c) {
  if (alpha.dim() != dim_) throw DimensionMismatch("term dimension does not match polynomial");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.dim_ != dim_) throw DimensionMismatch("polynomial dimension mismatch");
  for (const auto& [alpha, c] : other.terms_) add_term(alpha, c);
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial r(*this);
  r += other;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other * -1.0; }

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(dim_);
  for (const auto& [alpha, c] : terms_) r.add_term(alpha, c * s);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& other) const { return poly_mul(*this, other); }

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [alpha, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (int i = 0; i < alpha.dim(); ++i) {
      if (alpha[i] == 0) continue;
      os << "*y" << i;
      if (alpha[i] > 1) os << '^' << alpha[i];
    }
  }
  return os.str();
}

std::size_t basis_size(int d, int k) {
  if (d < 1) throw std::invalid_argument("basis dimension must be >= 1");
  if (k < 0) throw std::invalid_argument("basis degree must be >= 0");
  // C(d + k, d) computed incrementally; each partial product is an exact binomial
  std::size_t n = 1;
  for (int i = 1; i <= d; ++i) n = n * static_cast<std::size_t>(k + i) / static_cast<std::size_t>(i);
  return n;
}

namespace {

void compositions(int remaining, std::size_t pos, std::vector<int>& current, std::vector<MultiIndex>& out) {
  if (pos + 1 == current.size()) {
    current[pos] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[pos] = e;
    compositions(remaining - e, pos + 1, current, out);
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_basis(int d, int k) {
  std::vector<MultiIndex> out;
  out.reserve(basis_size(d, k));
  std::vector<int> current(static_cast<std::size_t>(d), 0);
  for (int degree = 0; degree <= k; ++degree) compositions(degree, 0, current, out);
  return out;
}

Polynomial poly_mul(const Polynomial& p, const Polynomial& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("poly_mul: dimension mismatch");
  Polynomial r(p.dim());
  for (const auto& [a, ca] : p.terms())
    for (const auto& [b, cb] : q.terms()) r.add_term(a + b, ca * cb);
  return r;
}

Polynomial poly_partial(const Polynomial& p, int i) {
  if (i < 0 || i >= p.dim()) throw DimensionMismatch("poly_partial: variable index out of range");
  Polynomial r(p.dim());
  for (const auto& [alpha, c] : p.terms()) {
    if (alpha[i] == 0) continue;
    std::vector<int> e = alpha.exponents();
    const int power = e[static_cast<std::size_t>(i)]--;
    r.add_term(MultiIndex(std::move(e)), c * power);
  }
  return r;
}

double poly_eval(const Polynomial& p, std::span<const double> y) {
  if (static_cast<int>(y.size()) != p.dim()) throw DimensionMismatch("poly_eval: point dimension mismatch");
  double sum = 0.0;
  for (const auto& [alpha, c] : p.terms()) {
    double m = c;
    for (int i = 0; i < alpha.dim(); ++i)
      for (int e = 0; e < alpha[i]; ++e) m *= y[static_cast<std::size_t>(i)];
    sum += m;
  }
  return sum;
}

Eigen::VectorXd to_coefficients(const Polynomial& p, const std::vector<MultiIndex>& basis) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  std::size_t matched = 0;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].dim() != p.dim()) throw DimensionMismatch("to_coefficients: dimension mismatch");
    const double c = p.coefficient(basis[j]);
    if (c != 0.0) {
      a[static_cast<Eigen::Index>(j)] = c;
      ++matched;
    }
  }
  if (matched != p.terms().size())
    throw std::invalid_argument("to_coefficients: polynomial has terms outside the basis");
  return a;
}

Polynomial from_coefficients(const Eigen::VectorXd& a, const std::vector<MultiIndex>& basis) {
  if (static_cast<std::size_t>(a.size()) != basis.size() || basis.empty())
    throw DimensionMismatch("from_coefficients: length does not match basis");
  Polynomial p(basis.front().dim());
  for (std::size_t j = 0; j < basis.size(); ++j) p.add_term(basis[j], a[static_cast<Eigen::Index>(j)]);
  return p;
}

Eigen::VectorXd evaluate_basis(const std::vector<MultiIndex>& basis, std::span<const double> y) {
  Eigen::VectorXd h(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].dim() != static_cast<int>(y.size()))
      throw DimensionMismatch("evaluate_basis: point dimension mismatch");
    double m = 1.0;
    for (int i = 0; i < basis[j].dim(); ++i)
      for (int e = 0; e < basis[j][i]; ++e) m *= y[static_cast<std::size_t>(i)];
    h[static_cast<Eigen::Index>(j)] = m;
  }
  return h;
}

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) : dim_(p.dim()) {
  for (const auto& [alpha, c] : p.terms()) {
    coefficients_.push_back(c);
    for (int i = 0; i < dim_; ++i) exponents_.push_back(alpha[i]);
  }
}

double CompiledPolynomial::operator()(std::span<const double> y) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < coefficients_.size(); ++t) {
    double m = coefficients_[t];
    const int* e = exponents_.data() + t * static_cast<std::size_t>(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int r = 0; r < e[i]; ++r) m *= y[static_cast<std::size_t>(i)];
    sum += m;
  }
  return sum;
}

}  // namespace polymoments
