#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace polymoments {

/// Initial forward variance curve x -> lambda_0(x), in annualized variance units.
class ForwardCurve {
 public:
  struct Flat {
    double level;
  };
  /// c + (b - c) exp(-gamma x)
  struct Exponential {
    double b;
    double gamma;
    double c;
  };
  /// Linear interpolation, flat extrapolation on both sides.
  struct Tabulated {
    std::vector<double> x;
    std::vector<double> y;
  };

  static ForwardCurve flat(double level);
  static ForwardCurve exponential(double b, double gamma, double c = 0.0);
  static ForwardCurve tabulated(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  /// (1/delta) * integral over [t, t + delta], exact for every form.
  double average(double t, double delta) const;

  const std::variant<Flat, Exponential, Tabulated>& form() const { return form_; }

 private:
  explicit ForwardCurve(std::variant<Flat, Exponential, Tabulated> f) : form_(std::move(f)) {}
  std::variant<Flat, Exponential, Tabulated> form_;
};

/// Volatility kernel K of the forward variance dynamics.
class KernelSpec {
 public:
  /// omega exp(-gamma x), gamma > 0
  struct Exponential {
    double omega;
    double gamma;
  };
  /// c x^(H - 1/2), 0 < H < 1/2
  struct Rough {
    double hurst;
    double scale;
  };

  static KernelSpec exponential(double omega, double gamma);
  static KernelSpec rough(double hurst, double scale = 1.0);

  double operator()(double x) const;
  bool is_bounded() const { return std::holds_alternative<Exponential>(form_); }
  /// integral_0^t K(x_i + s) K(x_j + s) ds. Closed form for exponential kernels,
  /// graded composite Gauss-Legendre (nodes_per_panel per panel) for rough ones.
  double pair_integral(double t, double xi, double xj, int nodes_per_panel = 64) const;

  const std::variant<Exponential, Rough>& form() const { return form_; }

 private:
  explicit KernelSpec(std::variant<Exponential, Rough> f) : form_(f) {}
  std::variant<Exponential, Rough> form_;
};

struct VixQuery {
  double t = 0.0;                      // option maturity, years
  double delta = 30.0 / 365.0;         // averaging window, years
  int k = 1;                           // moment order
};

/// The k-fold window average f -> (1/delta^k) * integral over [0, delta]^k of f.
/// Every VIX moment formula below is a pairing of this functional with some
/// function on [0, delta]^k.
class VixAverage {
 public:
  VixAverage(double delta, int k);

  double delta() const { return delta_; }
  int order() const { return k_; }
  /// Tensor-product Gauss-Legendre with n_nodes per axis.
  double apply(const std::function<double(std::span<const double>)>& f, int n_nodes = 16) const;

 private:
  double delta_;
  int k_;
};

VixAverage vix_pairing_weight(double delta, int k);

/// Time integrals of the pair potential: either each kernel's own pair_integral
/// (closed form for exponential kernels) or plain Gauss-Legendre in time for all kernels.
enum class PairTimeIntegral { kKernel, kGaussLegendre };

struct BergomiQuadrature {
  int n_nodes = 32;          // Gauss-Legendre nodes per window axis
  int time_nodes = 64;       // nodes per panel (rough) or per time integral
  PairTimeIntegral pair_time_integral = PairTimeIntegral::kKernel;
  int max_order = 5;
  int max_nodes = 48;
};

/// E[(VIX_t^2)^k | lambda_0] = (1/delta^k) int_{[0,delta]^k} prod_i lambda_0(x_i + t)
///   * exp(sum_l sum_{i<j} int_0^t K_l(x_i + s) K_l(x_j + s) ds) dx
/// for the lognormal forward variance model driven by the given kernels.
/// Throws std::invalid_argument when k or n_nodes exceed the budget caps.
double bergomi_vix_moment(const std::vector<KernelSpec>& kernels, const ForwardCurve& curve, const VixQuery& q,
                          const BergomiQuadrature& opts = {});

/// (omega^2 / 2 gamma) (1 - e^{-2 gamma t}) e^{-gamma (x_i + x_j)}
double classical_bergomi_pair_factor(double omega, double gamma, double t, double xi, double xj);

/// c^2 * integral_0^t ((x_i + s)(x_j + s))^(H - 1/2) ds.
double rough_pair_exponent(double hurst, double scale, double t, double xi, double xj, int nodes_per_panel = 64);

struct MomentBounds {
  double lower;
  double upper;
};

/// k-th moments of the two lognormal variables bracketing VIX_t^2 under a single
/// rough kernel c x^(H-1/2): both have mean VIX_{0,t}^2; log-variances
/// c^2 ((t + delta)^{2H} - delta^{2H}) / 2H (lower) and c^2 t^{2H} / 2H (upper).
MomentBounds rough_lognormal_bounds(double hurst, double scale, const ForwardCurve& curve, const VixQuery& q);

/// lambda_0(t)^k exp(c^2 k (k - 1) t^{2H} / 4H). Heuristic spot-variance moment for
/// the rough kernel; not backed by a proof, only by the lognormal oracle.
double rough_spot_moment(double hurst, double scale, const ForwardCurve& curve, double t, int k);

/// E[VIX_t^{2k}] for the Volterra geometric Brownian motion with K = omega e^{-gamma x}
/// and lambda_0 = b e^{-gamma x}:
///   (b (1 - e^{-gamma delta}))^k (gamma delta)^{-k} exp(-(k gamma - k (k - 1) omega^2 / 2) t).
double volterra_vix_moment_closed(double b, double gamma, double omega, const VixQuery& q);

}  // namespace polymoments
