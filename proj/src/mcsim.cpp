#include "polymoments/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"
#include "polymoments/errors.hpp"
#include "polymoments/quadrature.hpp"
#include "polymoments/rng.hpp"

namespace polymoments {

namespace {

void check_config(const SimConfig& cfg) {
  if (cfg.n_paths < 1) throw std::invalid_argument("simulation needs n_paths >= 1");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulation needs dt > 0");
  if (cfg.substeps < 1) throw std::invalid_argument("simulation needs substeps >= 1");
}

}  // namespace

McEstimate summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cannot summarize an empty sample");
  const auto n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return {mean, sd / std::sqrt(static_cast<double>(n)), n};
}

McEstimate power_moment(std::span<const double> samples, int k) {
  std::vector<double> powered(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) powered[i] = std::pow(samples[i], k);
  return summarize(powered);
}

// ---------------------------------------------------------------------------

namespace {

// symbolic product of two factor entries; nullopt when it is not a polynomial we can resolve
std::optional<Polynomial> entry_product(const FactorEntry& a, const FactorEntry& b, int dim) {
  const bool a_zero = a.poly.is_zero();
  const bool b_zero = b.poly.is_zero();
  if (a_zero || b_zero) return Polynomial(dim);
  if (!a.is_sqrt && !b.is_sqrt) return a.poly * b.poly;
  if (a.is_sqrt && b.is_sqrt && a.poly == b.poly) return a.poly;
  return std::nullopt;
}

}  // namespace

std::optional<std::string> check_diffusion_model(const DiffusionModel& model) {
  const auto& g = model.generator;
  if (!g.jumps.empty()) return "generator has jump moments; only pure diffusions can be simulated";
  if (auto v = validate_generator(g)) return "generator: " + v->field + ": " + v->message;
  const auto d = static_cast<std::size_t>(g.dim);
  if (model.sigma.size() != d) return "sigma must have one row per state variable";
  const std::size_t m = model.sigma.front().size();
  for (std::size_t i = 0; i < d; ++i) {
    if (model.sigma[i].size() != m) return "sigma rows must have equal length";
    for (const auto& e : model.sigma[i])
      if (e.poly.dim() != g.dim) return "sigma entry dimension does not match the generator";
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Polynomial aij(g.dim);
      for (std::size_t c = 0; c < m; ++c) {
        auto prod = entry_product(model.sigma[i][c], model.sigma[j][c], g.dim);
        if (!prod)
          return "sigma sigma^T entry (" + std::to_string(i) + "," + std::to_string(j) +
                 ") mixes square-root and polynomial factors and cannot be verified";
        aij += *prod;
      }
      if (!(aij == g.diffusion[i][j]))
        return "sigma sigma^T differs from diffusion[" + std::to_string(i) + "][" + std::to_string(j) +
               "]: " + aij.to_string() + " vs " + g.diffusion[i][j].to_string();
    }
  if (model.box) {
    if (model.box->lower.size() != d || model.box->upper.size() != d) return "state box has wrong dimension";
    for (std::size_t i = 0; i < d; ++i)
      if (!(model.box->lower[i] <= model.box->upper[i])) return "state box lower bound exceeds upper bound";
  }
  return std::nullopt;
}

Samples simulate_diffusion(const DiffusionModel& model, std::span<const double> y0, double horizon,
                           const SimConfig& cfg) {
  check_config(cfg);
  if (auto err = check_diffusion_model(model)) throw std::invalid_argument("simulate_diffusion: " + *err);
  const int d = model.generator.dim;
  if (static_cast<int>(y0.size()) != d) throw DimensionMismatch("simulate_diffusion: y0 dimension mismatch");
  if (!(horizon >= 0.0)) throw std::invalid_argument("simulate_diffusion: horizon must be >= 0");

  const auto dd = static_cast<std::size_t>(d);
  const std::size_t m = model.sigma.front().size();
  std::vector<CompiledPolynomial> drift;
  for (const auto& b : model.generator.drift) drift.emplace_back(b);
  std::vector<CompiledPolynomial> sigma;
  std::vector<char> sigma_sqrt;
  std::vector<char> sigma_zero;
  for (const auto& row : model.sigma)
    for (const auto& e : row) {
      sigma.emplace_back(e.poly);
      sigma_sqrt.push_back(e.is_sqrt);
      sigma_zero.push_back(e.poly.is_zero());
    }

  const auto steps = static_cast<std::int64_t>(std::max(1.0, std::ceil(horizon / cfg.dt - 1e-9)));
  const double h = horizon / static_cast<double>(steps);
  const double sub_sd = std::sqrt(h / cfg.substeps);

  Samples out(static_cast<Eigen::Index>(cfg.n_paths), d);
  detail::parallel_for(cfg.n_paths, cfg.threads, [&](std::uint64_t path) {
    PathStream rng(cfg.seed, path);
    std::vector<double> y(y0.begin(), y0.end());
    std::vector<double> next(dd);
    std::vector<double> dw(m);
    std::vector<double> sig(dd * m);
    for (std::int64_t s = 0; s < steps && horizon > 0.0; ++s) {
      std::fill(dw.begin(), dw.end(), 0.0);
      for (int r = 0; r < cfg.substeps; ++r)
        for (std::size_t c = 0; c < m; ++c) dw[c] += sub_sd * rng.normal();
      for (std::size_t e = 0; e < dd * m; ++e) {
        if (sigma_zero[e]) {
          sig[e] = 0.0;
          continue;
        }
        double v = sigma[e](y);
        if (sigma_sqrt[e]) {
          if (v < 0.0) {
            if (!cfg.clamp) throw NumericalError("negative argument under square root in sigma; enable clamping");
            v = 0.0;
          }
          v = std::sqrt(v);
        }
        sig[e] = v;
      }
      for (std::size_t i = 0; i < dd; ++i) {
        double v = y[i] + drift[i](y) * h;
        for (std::size_t c = 0; c < m; ++c) v += sig[i * m + c] * dw[c];
        next[i] = v;
      }
      if (cfg.clamp && model.box)
        for (std::size_t i = 0; i < dd; ++i) next[i] = std::clamp(next[i], model.box->lower[i], model.box->upper[i]);
      y.swap(next);
    }
    for (std::size_t i = 0; i < dd; ++i) out(static_cast<Eigen::Index>(path), static_cast<Eigen::Index>(i)) = y[i];
  });
  return out;
}

McEstimate mc_moment(const Samples& samples, const Polynomial& p) {
  if (samples.rows() == 0) throw std::invalid_argument("mc_moment: empty sample");
  if (samples.cols() != p.dim()) throw DimensionMismatch("mc_moment: sample dimension mismatch");
  const CompiledPolynomial cp(p);
  std::vector<double> values(static_cast<std::size_t>(samples.rows()));
  for (Eigen::Index r = 0; r < samples.rows(); ++r)
    values[static_cast<std::size_t>(r)] = cp(std::span<const double>(samples.row(r).data(), samples.cols()));
  return summarize(values);
}

// ---------------------------------------------------------------------------

BergomiGrid bergomi_grid(const std::vector<KernelSpec>& kernels, const ForwardCurve& curve, double t,
                         double delta, int n_x) {
  if (n_x < 2) throw std::invalid_argument("Bergomi sampler needs n_x >= 2");
  if (!(t >= 0.0) || !(delta > 0.0)) throw std::invalid_argument("Bergomi sampler needs t >= 0 and delta > 0");
  const auto n = static_cast<Eigen::Index>(n_x);
  BergomiGrid grid;
  grid.x.resize(static_cast<std::size_t>(n_x));
  grid.forward.resize(static_cast<std::size_t>(n_x));
  for (int j = 0; j < n_x; ++j) {
    grid.x[static_cast<std::size_t>(j)] = delta * j / (n_x - 1);
    grid.forward[static_cast<std::size_t>(j)] = curve(t + grid.x[static_cast<std::size_t>(j)]);
  }

  grid.covariance = Eigen::MatrixXd::Zero(n, n);
  if (t > 0.0) {
    const QuadratureRule unit = gauss_legendre(64, 0.0, 1.0);
    for (const auto& kernel : kernels) {
      // s = t u^m clusters nodes at s = 0 where a rough kernel is singular; m = 1/2H
      // makes the diagonal integrand at x = 0 constant in u
      double m = 1.0;
      if (const auto* r = std::get_if<KernelSpec::Rough>(&kernel.form())) m = 1.0 / (2.0 * r->hurst);
      std::vector<double> s(unit.nodes.size());
      std::vector<double> w(unit.nodes.size());
      for (std::size_t q = 0; q < s.size(); ++q) {
        s[q] = t * std::pow(unit.nodes[q], m);
        w[q] = unit.weights[q] * t * m * std::pow(unit.nodes[q], m - 1.0);
      }
      std::vector<double> kv(s.size() * static_cast<std::size_t>(n_x));
      for (int j = 0; j < n_x; ++j)
        for (std::size_t q = 0; q < s.size(); ++q)
          kv[static_cast<std::size_t>(j) * s.size() + q] = kernel(s[q] + grid.x[static_cast<std::size_t>(j)]);
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b <= a; ++b) {
          double sum = 0.0;
          const double* ka = kv.data() + static_cast<std::size_t>(a) * s.size();
          const double* kb = kv.data() + static_cast<std::size_t>(b) * s.size();
          for (std::size_t q = 0; q < s.size(); ++q) sum += w[q] * ka[q] * kb[q];
          grid.covariance(a, b) += sum;
          if (a != b) grid.covariance(b, a) += sum;
        }
    }
  }

  const double trace = grid.covariance.trace();
  if (trace == 0.0) {
    grid.factor = Eigen::MatrixXd::Zero(n, n);
    return grid;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(grid.covariance);
  if (llt.info() != Eigen::Success) {
    grid.covariance.diagonal().array() += 1e-12 * trace;
    llt.compute(grid.covariance);
    if (llt.info() != Eigen::Success) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(grid.covariance, Eigen::EigenvaluesOnly);
      throw CholeskyFailure(eig.eigenvalues().minCoeff());
    }
  }
  grid.factor = llt.matrixL();
  return grid;
}

namespace {

void sample_curve(const BergomiGrid& grid, PathStream& rng, std::vector<double>& z, std::vector<double>& out) {
  const auto n = static_cast<Eigen::Index>(grid.x.size());
  for (auto& v : z) v = rng.normal();
  for (Eigen::Index a = 0; a < n; ++a) {
    double g = 0.0;
    for (Eigen::Index b = 0; b <= a; ++b) g += grid.factor(a, b) * z[static_cast<std::size_t>(b)];
    const auto ua = static_cast<std::size_t>(a);
    out[ua] = grid.forward[ua] * std::exp(g - 0.5 * grid.covariance(a, a));
  }
}

}  // namespace

std::vector<double> simulate_bergomi_vix(const std::vector<KernelSpec>& kernels, const ForwardCurve& curve,
                                         double t, double delta, int n_x, const SimConfig& cfg) {
  check_config(cfg);
  const BergomiGrid grid = bergomi_grid(kernels, curve, t, delta, n_x);
  std::vector<double> vix2(cfg.n_paths);
  detail::parallel_for(cfg.n_paths, cfg.threads, [&](std::uint64_t path) {
    PathStream rng(cfg.seed, path);
    std::vector<double> z(grid.x.size());
    std::vector<double> lam(grid.x.size());
    sample_curve(grid, rng, z, lam);
    double sum = 0.5 * (lam.front() + lam.back());
    for (std::size_t j = 1; j + 1 < lam.size(); ++j) sum += lam[j];
    vix2[path] = sum / static_cast<double>(lam.size() - 1);
  });
  return vix2;
}

Samples simulate_bergomi_curves(const std::vector<KernelSpec>& kernels, const ForwardCurve& curve, double t,
                                double delta, int n_x, const SimConfig& cfg) {
  check_config(cfg);
  const BergomiGrid grid = bergomi_grid(kernels, curve, t, delta, n_x);
  Samples out(static_cast<Eigen::Index>(cfg.n_paths), n_x);
  detail::parallel_for(cfg.n_paths, cfg.threads, [&](std::uint64_t path) {
    PathStream rng(cfg.seed, path);
    std::vector<double> z(grid.x.size());
    std::vector<double> lam(grid.x.size());
    sample_curve(grid, rng, z, lam);
    for (int j = 0; j < n_x; ++j) out(static_cast<Eigen::Index>(path), j) = lam[static_cast<std::size_t>(j)];
  });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double pair_potential(const std::vector<double>& kx) {
  double v = 0.0;
  for (std::size_t i = 0; i < kx.size(); ++i)
    for (std::size_t j = i + 1; j < kx.size(); ++j) v += kx[i] * kx[j];
  return v;
}

}  // namespace

PdmpEstimate simulate_volterra_pdmp(const KernelSpec& kernel, const ForwardCurve& curve, double t, double delta,
                                    int k, const SimConfig& cfg) {
  check_config(cfg);
  if (k < 1) throw std::invalid_argument("PDMP moment order must be >= 1");
  if (!(t >= 0.0) || !(delta > 0.0)) throw std::invalid_argument("PDMP needs t >= 0 and delta > 0");
  if (!kernel.is_bounded()) throw std::invalid_argument("PDMP representation requires a bounded kernel");

  PdmpEstimate result;
  if (cfg.exact_mode && k == 1) {
    result.estimate = {curve.average(t, delta), 0.0, cfg.n_paths};
    result.min_weight = result.max_weight = 1.0;
    return result;
  }

  const auto kk = static_cast<std::size_t>(k);
  std::vector<double> values(cfg.n_paths);
  std::vector<double> weights(cfg.n_paths);
  std::vector<std::uint64_t> jumps(cfg.n_paths);
  detail::parallel_for(cfg.n_paths, cfg.threads, [&](std::uint64_t path) {
    PathStream rng(cfg.seed, path);
    std::vector<double> x(kk);
    std::vector<double> kx(kk);
    for (auto& xi : x) xi = delta * rng.uniform();
    double elapsed = 0.0;
    double log_weight = 0.0;
    std::uint64_t n_jumps = 0;

    auto segment_integral = [&](double len) {
      double s = 0.0;
      for (std::size_t i = 0; i < kk; ++i)
        for (std::size_t j = i + 1; j < kk; ++j) s += kernel.pair_integral(len, x[i], x[j]);
      return s;
    };
    auto advance = [&](double len) {
      log_weight += segment_integral(len);
      for (auto& xi : x) xi += len;
      elapsed += len;
    };

    while (elapsed < t) {
      for (std::size_t i = 0; i < kk; ++i) kx[i] = kernel(x[i]);
      const double bound = pair_potential(kx);
      if (bound <= 0.0) {
        advance(t - elapsed);
        break;
      }
      const double wait = rng.exponential() / bound;
      if (elapsed + wait >= t) {
        advance(t - elapsed);
        break;
      }
      advance(wait);
      for (std::size_t i = 0; i < kk; ++i) kx[i] = kernel(x[i]);
      const double intensity = pair_potential(kx);
      if (intensity > bound * (1.0 + 1e-12))
        throw NumericalError("PDMP thinning bound violated: intensity " + std::to_string(intensity) +
                             " exceeds bound " + std::to_string(bound));
      if (rng.uniform() * bound >= intensity) continue;
      // pick the pair (i, j) with probability K(x_i) K(x_j) / V_k(x) by a cumulative scan
      const double target = rng.uniform() * intensity;
      double acc = 0.0;
      std::size_t pi = 0;
      std::size_t pj = 1;
      bool chosen = false;
      for (std::size_t i = 0; i < kk && !chosen; ++i)
        for (std::size_t j = i + 1; j < kk; ++j) {
          acc += kx[i] * kx[j];
          pi = i;
          pj = j;
          if (target < acc) {
            chosen = true;
            break;
          }
        }
      x[pi] = 0.0;
      x[pj] = 0.0;
      ++n_jumps;
    }

    double payoff = 1.0;
    for (double xi : x) payoff *= curve(xi);
    const double weight = std::exp(log_weight);
    values[path] = weight * payoff;
    weights[path] = weight;
    jumps[path] = n_jumps;
  });

  result.estimate = summarize(values);
  result.min_weight = *std::min_element(weights.begin(), weights.end());
  result.max_weight = *std::max_element(weights.begin(), weights.end());
  for (auto j : jumps) result.jumps += j;
  result.values = std::move(values);
  return result;
}

// ---------------------------------------------------------------------------

SignatureEstimate simulate_brownian_signature(int d, int depth, double t, int n_steps, const SimConfig& cfg) {
  check_config(cfg);
  if (n_steps < 1) throw std::invalid_argument("signature simulation needs n_steps >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("signature simulation needs t >= 0");

  const TruncatedTensor shape(d, depth);
  std::size_t total = 0;
  for (int n = 0; n <= depth; ++n) total += shape.level(n).size();

  std::vector<double> flat(cfg.n_paths * total);
  const double sd = std::sqrt(t / n_steps);
  detail::parallel_for(cfg.n_paths, cfg.threads, [&](std::uint64_t path) {
    PathStream rng(cfg.seed, path);
    TruncatedTensor s = TruncatedTensor::unit(d, depth);
    std::vector<double> inc(static_cast<std::size_t>(d));
    for (int step = 0; step < n_steps; ++step) {
      for (auto& v : inc) v = sd * rng.normal();
      multiply_by_segment_exp(s, inc);
    }
    double* dst = flat.data() + path * total;
    for (int n = 0; n <= depth; ++n)
      for (double v : s.level(n)) *dst++ = v;
  });

  SignatureEstimate est{TruncatedTensor(d, depth), TruncatedTensor(d, depth), cfg.n_paths};
  std::vector<double> column(cfg.n_paths);
  std::size_t offset = 0;
  for (int n = 0; n <= depth; ++n) {
    auto mean = est.mean.level(n);
    auto se = est.std_error.level(n);
    for (std::size_t i = 0; i < mean.size(); ++i, ++offset) {
      for (std::uint64_t p = 0; p < cfg.n_paths; ++p) column[p] = flat[p * total + offset];
      const McEstimate e = summarize(column);
      mean[i] = e.mean;
      se[i] = e.std_error;
    }
  }
  return est;
}

}  // namespace polymoments
