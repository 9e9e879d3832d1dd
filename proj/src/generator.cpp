#include "polymoments/generator.hpp"

#include <stdexcept>

#include "polymoments/errors.hpp"

namespace polymoments {

GeneratorSpec GeneratorSpec::zero(int dim) {
  GeneratorSpec spec;
  spec.dim = dim;
  spec.drift.assign(static_cast<std::size_t>(dim), Polynomial(dim));
  spec.diffusion.assign(static_cast<std::size_t>(dim),
                        std::vector<Polynomial>(static_cast<std::size_t>(dim), Polynomial(dim)));
  return spec;
}

namespace {

std::optional<GeneratorViolation> check_shape(const GeneratorSpec& spec) {
  auto shape = [](std::string field, std::string message) {
    return GeneratorViolation{GeneratorViolation::Kind::kShape, std::move(field), 0, 0, std::move(message)};
  };
  const auto d = static_cast<std::size_t>(spec.dim);
  if (spec.dim < 1) return shape("dim", "dimension must be >= 1");
  if (spec.drift.size() != d) return shape("drift", "expected " + std::to_string(d) + " drift polynomials");
  for (std::size_t i = 0; i < d; ++i)
    if (spec.drift[i].dim() != spec.dim)
      return shape("drift[" + std::to_string(i) + "]", "polynomial dimension does not match dim");
  if (spec.diffusion.size() != d) return shape("diffusion", "expected a " + std::to_string(d) + "x" +
                                                                std::to_string(d) + " array");
  for (std::size_t i = 0; i < d; ++i) {
    if (spec.diffusion[i].size() != d)
      return shape("diffusion[" + std::to_string(i) + "]", "row has wrong length");
    for (std::size_t j = 0; j < d; ++j)
      if (spec.diffusion[i][j].dim() != spec.dim)
        return shape("diffusion[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                     "polynomial dimension does not match dim");
  }
  for (std::size_t n = 0; n < spec.jumps.size(); ++n) {
    const auto& jm = spec.jumps[n];
    if (jm.beta.dim() != spec.dim || jm.mu.dim() != spec.dim)
      return shape("jumps[" + std::to_string(n) + "]", "dimension does not match dim");
  }
  return std::nullopt;
}

}  // namespace

std::optional<GeneratorViolation> validate_generator(const GeneratorSpec& spec) {
  if (auto v = check_shape(spec)) return v;
  const auto d = static_cast<std::size_t>(spec.dim);
  for (std::size_t i = 0; i < d; ++i) {
    const int deg = spec.drift[i].degree();
    if (deg > 1)
      return GeneratorViolation{GeneratorViolation::Kind::kDegree, "drift[" + std::to_string(i) + "]", deg, 1,
                                "drift must have degree <= 1"};
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const std::string field = "diffusion[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      const int deg = spec.diffusion[i][j].degree();
      if (deg > 2)
        return GeneratorViolation{GeneratorViolation::Kind::kDegree, field, deg, 2,
                                  "diffusion must have degree <= 2"};
      if (j > i && !(spec.diffusion[i][j] == spec.diffusion[j][i]))
        return GeneratorViolation{GeneratorViolation::Kind::kSymmetry, field, 0, 0,
                                  "diffusion must be symmetric"};
    }
  for (std::size_t n = 0; n < spec.jumps.size(); ++n) {
    const auto& jm = spec.jumps[n];
    const std::string field = "jumps[" + std::to_string(n) + "]";
    const int order = jm.beta.total_degree();
    if (order < 2)
      return GeneratorViolation{GeneratorViolation::Kind::kJumpOrder, field, order, 2,
                                "jump moments are only meaningful for |beta| >= 2"};
    const int deg = jm.mu.degree();
    if (deg > order)
      return GeneratorViolation{GeneratorViolation::Kind::kDegree, field + ".mu", deg, order,
                                "jump moment polynomial must have degree <= |beta|"};
  }
  return std::nullopt;
}

namespace {

double binomial(int n, int r) {
  double b = 1.0;
  for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return b;
}

// sum over beta <= alpha with |beta| >= 2 of C(alpha, beta) y^(alpha - beta) mu_beta(y)
Polynomial jump_part(const GeneratorSpec& spec, const MultiIndex& alpha) {
  Polynomial out(spec.dim);
  for (const auto& jm : spec.jumps) {
    const auto& beta = jm.beta;
    bool dominated = true;
    double coeff = 1.0;
    std::vector<int> rest(static_cast<std::size_t>(spec.dim));
    for (int i = 0; i < spec.dim && dominated; ++i) {
      if (beta[i] > alpha[i]) {
        dominated = false;
        break;
      }
      coeff *= binomial(alpha[i], beta[i]);
      rest[static_cast<std::size_t>(i)] = alpha[i] - beta[i];
    }
    if (!dominated || beta.total_degree() < 2) continue;
    out += Polynomial::monomial(MultiIndex(std::move(rest)), coeff) * jm.mu;
  }
  return out;
}

}  // namespace

Polynomial apply_generator(const GeneratorSpec& spec, const Polynomial& p) {
  if (auto v = check_shape(spec)) throw DimensionMismatch("generator spec: " + v->field + ": " + v->message);
  if (p.dim() != spec.dim) throw DimensionMismatch("apply_generator: polynomial dimension mismatch");

  Polynomial out(spec.dim);
  const auto d = static_cast<std::size_t>(spec.dim);
  for (std::size_t i = 0; i < d; ++i) {
    const Polynomial di = poly_partial(p, static_cast<int>(i));
    if (di.is_zero()) continue;
    out += spec.drift[i] * di;
    for (std::size_t j = 0; j < d; ++j) {
      if (spec.diffusion[i][j].is_zero()) continue;
      out += spec.diffusion[i][j] * poly_partial(di, static_cast<int>(j)) * 0.5;
    }
  }
  if (!spec.jumps.empty())
    for (const auto& [alpha, c] : p.terms()) out += jump_part(spec, alpha) * c;

  if (out.degree() > p.degree()) throw DegreeIncrease(p.degree(), out.degree());
  return out;
}

DualMatrix build_dual_matrix(const GeneratorSpec& spec, int k) {
  DualMatrix dm;
  dm.k = k;
  dm.basis = enumerate_basis(spec.dim, k);
  const auto n = static_cast<Eigen::Index>(dm.basis.size());
  dm.entries = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Polynomial image = apply_generator(spec, Polynomial::monomial(dm.basis[static_cast<std::size_t>(j)]));
    dm.entries.col(j) = to_coefficients(image, dm.basis);
  }
  return dm;
}

}  // namespace polymoments
