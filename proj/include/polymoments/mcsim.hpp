#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polymoments/forwardvariance.hpp"
#include "polymoments/generator.hpp"
#include "polymoments/signature.hpp"

namespace polymoments {

struct SimConfig {
  std::uint64_t n_paths = 10000;
  double dt = 0.01;
  std::uint64_t seed = 0;
  /// Truncate square-root arguments at 0 and clamp the state to its box.
  bool clamp = true;
  /// Each Euler step uses the sum of this many finer Brownian increments, so runs
  /// with (dt, m) and (dt / 2, m / 2) are driven by the same Brownian path.
  int substeps = 1;
  /// Replace sampling by exact averaging where no randomness is left (Volterra k = 1).
  bool exact_mode = false;
  /// Worker threads. Results do not depend on this value.
  unsigned threads = 1;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_paths = 0;
};

/// Mean and standard error (sample standard deviation / sqrt(n)), summed in index order.
McEstimate summarize(std::span<const double> values);

// ---------------------------------------------------------------------------
// Euler-Maruyama for polynomial diffusions

/// Entry of a diffusion factor sigma: either a polynomial or the square root of one.
struct FactorEntry {
  Polynomial poly;
  bool is_sqrt = false;
};

/// Box constraint applied to the state after each step when clamping is on.
struct StateBox {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct DiffusionModel {
  GeneratorSpec generator;
  std::vector<std::vector<FactorEntry>> sigma;  // d x m
  std::optional<StateBox> box;
};

/// nullopt if sigma sigma^T equals the generator's diffusion term for term, and the
/// generator has no jump part; otherwise a description of the first mismatch.
/// Products of two square-root entries are only resolvable when the radicands agree.
std::optional<std::string> check_diffusion_model(const DiffusionModel& model);

/// Terminal values, one row per path.
using Samples = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Samples simulate_diffusion(const DiffusionModel& model, std::span<const double> y0, double horizon,
                           const SimConfig& cfg);

/// p evaluated on every sample row.
McEstimate mc_moment(const Samples& samples, const Polynomial& p);

// ---------------------------------------------------------------------------
// Exact lognormal sampler for the (rough) Bergomi forward variance curve

struct BergomiGrid {
  std::vector<double> x;       // n_x points on [0, delta]
  Eigen::MatrixXd covariance;  // Cov(G_x, G_x')
  Eigen::MatrixXd factor;      // lower triangular, factor * factor^T = covariance (+ jitter)
  std::vector<double> forward; // lambda_0(t + x)
};

/// Covariance sum_l int_0^t K_l(s + x) K_l(s + x') ds by 64-point Gauss-Legendre in
/// time (after s = t u^{1/2H} for rough kernels), Cholesky-factored with one jitter
/// retry of 1e-12 * trace. Throws CholeskyFailure if that does not suffice.
BergomiGrid bergomi_grid(const std::vector<KernelSpec>& kernels, const ForwardCurve& curve, double t,
                         double delta, int n_x);

/// Samples of VIX_t^2 = trapezoid average of lambda_t over the grid, where
/// lambda_t(x) = lambda_0(t + x) exp(G_x - Var(G_x) / 2).
std::vector<double> simulate_bergomi_vix(const std::vector<KernelSpec>& kernels, const ForwardCurve& curve,
                                         double t, double delta, int n_x, const SimConfig& cfg);

/// Full sampled curves lambda_t(x_j), one row per path.
Samples simulate_bergomi_curves(const std::vector<KernelSpec>& kernels, const ForwardCurve& curve, double t,
                                double delta, int n_x, const SimConfig& cfg);

/// Mean and standard error of the k-th power of each sample.
McEstimate power_moment(std::span<const double> samples, int k);

// ---------------------------------------------------------------------------
// Feynman-Kac PDMP representation of Volterra GBM VIX moments

struct PdmpEstimate {
  McEstimate estimate;
  std::vector<double> values;   // per-path weighted payoff
  double min_weight = 0.0;
  double max_weight = 0.0;
  std::uint64_t jumps = 0;
};

/// E[(VIX_t^2)^k] = E[exp(int_0^t V_k(X_s) ds) prod_i lambda_0(X_t,i)], X_0 ~ U([0, delta]^k),
/// X drifting at unit speed and jumping pairs (i, j) to 0 at rate K(x_i) K(x_j).
/// Jump times by thinning against V_k at the start of each segment, which bounds V_k
/// along the segment for kernels with |K| decreasing. Throws NumericalError if an
/// intensity above the bound is observed. Requires a bounded kernel.
PdmpEstimate simulate_volterra_pdmp(const KernelSpec& kernel, const ForwardCurve& curve, double t, double delta,
                                    int k, const SimConfig& cfg);

// ---------------------------------------------------------------------------
// Brownian signature

struct SignatureEstimate {
  TruncatedTensor mean;
  TruncatedTensor std_error;
  std::uint64_t n_paths = 0;
};

/// Average signature of d-dimensional Brownian paths on [0, t], sampled on n_steps
/// uniform steps and interpolated piecewise linearly.
SignatureEstimate simulate_brownian_signature(int d, int depth, double t, int n_steps, const SimConfig& cfg);

}  // namespace polymoments
