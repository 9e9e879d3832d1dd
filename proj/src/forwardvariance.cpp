#include "polymoments/forwardvariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polymoments/quadrature.hpp"

namespace polymoments {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

// (1 - e^{-x}) / x, accurate near 0
double expm1_ratio(double x) { return x == 0.0 ? 1.0 : -std::expm1(-x) / x; }

}  // namespace

ForwardCurve ForwardCurve::flat(double level) {
  require(std::isfinite(level) && level >= 0.0, "flat forward curve must be finite and >= 0");
  return ForwardCurve(Flat{level});
}

ForwardCurve ForwardCurve::exponential(double b, double gamma, double c) {
  require(std::isfinite(b) && std::isfinite(gamma) && std::isfinite(c), "exponential curve parameters must be finite");
  require(b >= 0.0 && c >= 0.0, "exponential curve needs b >= 0 and c >= 0");
  require(gamma >= 0.0, "exponential curve needs gamma >= 0");
  return ForwardCurve(Exponential{b, gamma, c});
}

ForwardCurve ForwardCurve::tabulated(std::vector<double> x, std::vector<double> y) {
  require(!x.empty() && x.size() == y.size(), "tabulated curve needs matching, non-empty abscissae and values");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(std::isfinite(x[i]) && std::isfinite(y[i]), "tabulated curve entries must be finite");
    require(y[i] >= 0.0, "tabulated curve values must be >= 0");
    if (i > 0) require(x[i] > x[i - 1], "tabulated abscissae must be strictly increasing");
  }
  return ForwardCurve(Tabulated{std::move(x), std::move(y)});
}

double ForwardCurve::operator()(double x) const {
  return std::visit(Overloaded{
                        [](const Flat& f) { return f.level; },
                        [x](const Exponential& e) { return e.c + (e.b - e.c) * std::exp(-e.gamma * x); },
                        [x](const Tabulated& tab) {
                          if (x <= tab.x.front()) return tab.y.front();
                          if (x >= tab.x.back()) return tab.y.back();
                          const auto it = std::upper_bound(tab.x.begin(), tab.x.end(), x);
                          const auto i = static_cast<std::size_t>(it - tab.x.begin());
                          const double w = (x - tab.x[i - 1]) / (tab.x[i] - tab.x[i - 1]);
                          return tab.y[i - 1] + w * (tab.y[i] - tab.y[i - 1]);
                        },
                    },
                    form_);
}

double ForwardCurve::average(double t, double delta) const {
  require(delta > 0.0, "averaging window must be > 0");
  return std::visit(
      Overloaded{
          [](const Flat& f) { return f.level; },
          [t, delta](const Exponential& e) {
            return e.c + (e.b - e.c) * std::exp(-e.gamma * t) * expm1_ratio(e.gamma * delta);
          },
          [this, t, delta](const Tabulated& tab) {
            // exact integral of the piecewise-linear interpolant over [t, t + delta]
            std::vector<double> cuts{t};
            for (double xi : tab.x)
              if (xi > t && xi < t + delta) cuts.push_back(xi);
            cuts.push_back(t + delta);
            double sum = 0.0;
            for (std::size_t i = 1; i < cuts.size(); ++i)
              sum += 0.5 * ((*this)(cuts[i - 1]) + (*this)(cuts[i])) * (cuts[i] - cuts[i - 1]);
            return sum / delta;
          },
      },
      form_);
}

KernelSpec KernelSpec::exponential(double omega, double gamma) {
  require(std::isfinite(omega) && std::isfinite(gamma), "exponential kernel parameters must be finite");
  require(gamma > 0.0, "exponential kernel needs gamma > 0");
  return KernelSpec(Exponential{omega, gamma});
}

KernelSpec KernelSpec::rough(double hurst, double scale) {
  require(hurst > 0.0 && hurst < 0.5, "rough kernel needs 0 < H < 1/2");
  require(std::isfinite(scale), "rough kernel scale must be finite");
  return KernelSpec(Rough{hurst, scale});
}

double KernelSpec::operator()(double x) const {
  return std::visit(Overloaded{
                        [x](const Exponential& e) { return e.omega * std::exp(-e.gamma * x); },
                        [x](const Rough& r) { return r.scale * std::pow(x, r.hurst - 0.5); },
                    },
                    form_);
}

double KernelSpec::pair_integral(double t, double xi, double xj, int nodes_per_panel) const {
  return std::visit(Overloaded{
                        [&](const Exponential& e) { return classical_bergomi_pair_factor(e.omega, e.gamma, t, xi, xj); },
                        [&](const Rough& r) { return rough_pair_exponent(r.hurst, r.scale, t, xi, xj, nodes_per_panel); },
                    },
                    form_);
}

VixAverage::VixAverage(double delta, int k) : delta_(delta), k_(k) {
  require(delta > 0.0, "VIX window must be > 0");
  require(k >= 1, "VIX moment order must be >= 1");
}

double VixAverage::apply(const std::function<double(std::span<const double>)>& f, int n_nodes) const {
  const QuadratureRule rule = gauss_legendre(n_nodes, 0.0, delta_);
  return integrate_product(f, rule, k_) / std::pow(delta_, k_);
}

VixAverage vix_pairing_weight(double delta, int k) { return VixAverage(delta, k); }

double classical_bergomi_pair_factor(double omega, double gamma, double t, double xi, double xj) {
  require(gamma > 0.0, "classical Bergomi pair factor needs gamma > 0");
  return omega * omega / (2.0 * gamma) * -std::expm1(-2.0 * gamma * t) * std::exp(-gamma * (xi + xj));
}

double rough_pair_exponent(double hurst, double scale, double t, double xi, double xj, int nodes_per_panel) {
  require(hurst > 0.0 && hurst < 0.5, "rough kernel needs 0 < H < 1/2");
  require(xi >= 0.0 && xj >= 0.0 && t >= 0.0, "rough pair exponent needs x_i, x_j, t >= 0");
  require(nodes_per_panel >= 1, "need at least one node per panel");
  if (t == 0.0) return 0.0;
  const double c2 = scale * scale;
  const double p = hurst - 0.5;
  const double near = std::min(xi, xj);
  const double far = std::max(xi, xj);
  if (far == 0.0) return c2 * std::pow(t, 2.0 * hurst) / (2.0 * hurst);

  const QuadratureRule ref = gauss_legendre(nodes_per_panel);
  auto panel = [&](double lo, double hi, auto&& f) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t i = 0; i < ref.nodes.size(); ++i) s += ref.weights[i] * f(mid + half * ref.nodes[i]);
    return half * s;
  };
  auto integrand = [&](double s) { return std::pow((near + s) * (far + s), p); };

  double sum = 0.0;
  double start = 0.0;
  double shift = near;
  if (near == 0.0) {
    // s^p is singular at 0: on [0, min(far, t)] substitute s = u^m with m = 1 / (H + 1/2),
    // which turns s^p ds into the constant m du
    const double m = 1.0 / (hurst + 0.5);
    const double end = std::min(far, t);
    sum += panel(0.0, std::pow(end, 1.0 / m), [&](double u) { return m * std::pow(far + std::pow(u, m), p); });
    start = end;
    shift = 0.0;
  }
  // geometric panels: each panel is as long as its distance to the nearest singularity
  while (start < t) {
    const double stop = std::min(t, 2.0 * start + shift);
    sum += panel(start, stop, integrand);
    start = stop;
  }
  return c2 * sum;
}

double bergomi_vix_moment(const std::vector<KernelSpec>& kernels, const ForwardCurve& curve, const VixQuery& q,
                          const BergomiQuadrature& opts) {
  require(q.k >= 1, "VIX moment order must be >= 1");
  require(q.t >= 0.0 && q.delta > 0.0, "VIX query needs t >= 0 and delta > 0");
  require(opts.n_nodes >= 1 && opts.time_nodes >= 1, "quadrature needs at least one node");
  if (q.k > opts.max_order) throw std::invalid_argument("quadrature budget exceeded: moment order above cap");
  if (opts.n_nodes > opts.max_nodes) throw std::invalid_argument("quadrature budget exceeded: node count above cap");

  const QuadratureRule rule = gauss_legendre(opts.n_nodes, 0.0, q.delta);
  const std::size_t n = rule.nodes.size();

  std::vector<double> weight(n);
  for (std::size_t a = 0; a < n; ++a) weight[a] = rule.weights[a] / q.delta * curve(rule.nodes[a] + q.t);

  // pair exponents summed over kernels, symmetric in (a, b)
  std::vector<double> pair(n * n, 0.0);
  if (q.k >= 2) {
    const QuadratureRule time_rule = gauss_legendre(opts.time_nodes, 0.0, q.t);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        double e = 0.0;
        for (const auto& kernel : kernels) {
          if (opts.pair_time_integral == PairTimeIntegral::kKernel) {
            e += kernel.pair_integral(q.t, rule.nodes[a], rule.nodes[b], opts.time_nodes);
          } else if (q.t > 0.0) {
            e += integrate([&](double s) { return kernel(rule.nodes[a] + s) * kernel(rule.nodes[b] + s); },
                           time_rule);
          }
        }
        pair[a * n + b] = e;
        pair[b * n + a] = e;
      }
  }

  // depth-first walk over the k-fold product grid, carrying the partial weight and exponent
  const auto k = static_cast<std::size_t>(q.k);
  std::vector<std::size_t> idx(k);
  auto walk = [&](auto&& self, std::size_t level, double w, double exponent) -> double {
    if (level == k) return w * std::exp(exponent);
    double sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      double e = exponent;
      for (std::size_t i = 0; i < level; ++i) e += pair[idx[i] * n + a];
      idx[level] = a;
      sum += self(self, level + 1, w * weight[a], e);
    }
    return sum;
  };
  return walk(walk, 0, 1.0, 0.0);
}

MomentBounds rough_lognormal_bounds(double hurst, double scale, const ForwardCurve& curve, const VixQuery& q) {
  require(hurst > 0.0 && hurst < 0.5, "rough kernel needs 0 < H < 1/2");
  require(q.k >= 1 && q.t >= 0.0 && q.delta > 0.0, "invalid VIX query");
  const double forward = curve.average(q.t, q.delta);
  const double two_h = 2.0 * hurst;
  const double c2 = scale * scale;
  const double var_upper = c2 * std::pow(q.t, two_h) / two_h;
  const double var_lower = c2 * (std::pow(q.t + q.delta, two_h) - std::pow(q.delta, two_h)) / two_h;
  // lognormal with mu = ln(F) - var/2: E[X^k] = exp(k mu + k^2 var / 2) = F^k exp(k (k - 1) var / 2)
  const double kk = q.k * (q.k - 1) / 2.0;
  const double fk = std::pow(forward, q.k);
  return {fk * std::exp(kk * var_lower), fk * std::exp(kk * var_upper)};
}

double rough_spot_moment(double hurst, double scale, const ForwardCurve& curve, double t, int k) {
  require(hurst > 0.0 && hurst < 0.5, "rough kernel needs 0 < H < 1/2");
  require(t >= 0.0 && k >= 0, "rough spot moment needs t >= 0 and k >= 0");
  return std::pow(curve(t), k) *
         std::exp(scale * scale * k * (k - 1) * std::pow(t, 2.0 * hurst) / (4.0 * hurst));
}

double volterra_vix_moment_closed(double b, double gamma, double omega, const VixQuery& q) {
  require(gamma > 0.0 && q.delta > 0.0, "Volterra closed form needs gamma > 0 and delta > 0");
  require(q.k >= 1 && q.t >= 0.0, "invalid VIX query");
  const double k = q.k;
  return std::pow(b * expm1_ratio(gamma * q.delta), k) *
         std::exp(-(k * gamma - k * (k - 1.0) / 2.0 * omega * omega) * q.t);
}

}  // namespace polymoments
