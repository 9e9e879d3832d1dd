#include "polymoments/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "polymoments/errors.hpp"

namespace polymoments {

namespace {

// Higham (2005): Pade [13/13] coefficients and the 1-norm bound below which no scaling is needed.
constexpr double kPade13[] = {64764752532480000.0,
                              32382376266240000.0,
                              7771770303897600.0,
                              1187353796428800.0,
                              129060195264000.0,
                              10559470521600.0,
                              670442572800.0,
                              33522128640.0,
                              1323241920.0,
                              40840800.0,
                              960960.0,
                              16380.0,
                              182.0,
                              1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a, double t) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix must be square");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("expm: t must be finite and >= 0");
  if (!a.allFinite()) throw std::domain_error("expm: matrix has non-finite entries");

  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
  if (n == 0) return ident;

  Eigen::MatrixXd x = a * t;
  const double norm1 = x.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return ident;

  int squarings = 0;
  if (norm1 > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  x /= std::ldexp(1.0, squarings);

  const Eigen::MatrixXd x2 = x * x;
  const Eigen::MatrixXd x4 = x2 * x2;
  const Eigen::MatrixXd x6 = x4 * x2;
  const auto& b = kPade13;

  Eigen::MatrixXd inner = b[13] * x6 + b[11] * x4 + b[9] * x2;
  const Eigen::MatrixXd u = x * (x6 * inner + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * ident);
  inner = b[12] * x6 + b[10] * x4 + b[8] * x2;
  const Eigen::MatrixXd v = x6 * inner + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * ident;

  Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

namespace {

void check_horizon(double horizon) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("moment horizon must be finite and >= 0");
}

}  // namespace

double conditional_moment(const DualMatrix& dual, const CoeffVector& a, std::span<const double> y,
                          double horizon) {
  check_horizon(horizon);
  if (a.k != dual.k || static_cast<std::size_t>(a.values.size()) != dual.basis.size())
    throw DimensionMismatch("conditional_moment: coefficient vector does not match the degree-k basis");
  const Eigen::VectorXd h = evaluate_basis(dual.basis, y);
  if (horizon == 0.0) return h.dot(a.values);
  return h.dot(expm(dual.entries, horizon) * a.values);
}

double conditional_moment(const GeneratorSpec& spec, int k, const CoeffVector& a, std::span<const double> y,
                          double horizon) {
  return conditional_moment(build_dual_matrix(spec, k), a, y, horizon);
}

MomentVector moment_vector(const DualMatrix& dual, std::span<const double> y0, double horizon) {
  check_horizon(horizon);
  const Eigen::VectorXd h = evaluate_basis(dual.basis, y0);
  if (horizon == 0.0) return {dual.k, h};
  return {dual.k, expm(dual.entries.transpose(), horizon) * h};
}

MomentVector moment_vector(const GeneratorSpec& spec, int k, std::span<const double> y0, double horizon) {
  return moment_vector(build_dual_matrix(spec, k), y0, horizon);
}

}  // namespace polymoments
