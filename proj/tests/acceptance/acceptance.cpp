// Acceptance suite: one line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "polymoments/cli.hpp"
#include "polymoments/errors.hpp"
#include "polymoments/forwardvariance.hpp"
#include "polymoments/generator.hpp"
#include "polymoments/mcsim.hpp"
#include "polymoments/moments.hpp"
#include "polymoments/quadrature.hpp"
#include "polymoments/rng.hpp"
#include "polymoments/signature.hpp"

using namespace polymoments;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds, 0 for none
  std::function<Outcome()> run;
};

/// MC runs made through the command line code path, replayed by criterion 10.
std::vector<std::pair<std::string, json>> g_mc_runs;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

json compare_run(const std::string& name, const json& cfg) {
  g_mc_runs.emplace_back(name, cfg);
  return json::parse(cli::execute(cfg, {cli::Mode::kCompare, cli::Format::kJson, 1, false}).output);
}

Polynomial poly1(std::initializer_list<std::pair<int, double>> terms) {
  Polynomial p(1);
  for (auto [e, c] : terms) p.add_term(MultiIndex({e}), c);
  return p;
}

GeneratorSpec jacobi() {
  auto s = GeneratorSpec::zero(1);
  s.diffusion[0][0] = poly1({{1, 2.0}, {2, -2.0}});
  return s;
}

Polynomial random_poly(std::mt19937_64& rng, int dim, int max_degree) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::bernoulli_distribution keep(0.6);
  Polynomial p(dim);
  for (const auto& a : enumerate_basis(dim, max_degree))
    if (keep(rng)) p.add_term(a, coef(rng));
  return p;
}

GeneratorSpec random_spec(std::mt19937_64& rng, int dim) {
  auto s = GeneratorSpec::zero(dim);
  for (int i = 0; i < dim; ++i) s.drift[i] = random_poly(rng, dim, 1);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) s.diffusion[i][j] = s.diffusion[j][i] = random_poly(rng, dim, 2);
  if (std::bernoulli_distribution(0.5)(rng)) {
    std::vector<int> beta(static_cast<std::size_t>(dim), 0);
    beta[0] = 2;
    s.jumps.push_back({MultiIndex(beta), random_poly(rng, dim, 2)});
  }
  return s;
}

const double kVixWindow = 30.0 / 365.0;

// ---------------------------------------------------------------------------

Outcome jacobi_moment_formula() {
  Outcome o;
  const double exact = 0.5 - 0.25 * std::exp(-2.0);
  const std::vector<double> y0{0.5};
  const double got = conditional_moment(jacobi(), 2, {2, Eigen::Vector3d(0, 0, 1)}, y0, 1.0);
  const double err = std::abs(got - exact);
  o.pass = err <= 1e-10;

  const auto out = compare_run("jacobi", json::parse(R"({
    "command": "moments", "seed": 20240501,
    "generator": {"dim": 1, "drift": [[]],
                  "diffusion": [[[{"alpha": [1], "c": 2.0}, {"alpha": [2], "c": -2.0}]]]},
    "k": 2, "y0": [0.5], "T": 1.0, "coefficients": [0, 0, 1],
    "mc": {"n_paths": 100000, "dt": 0.0025, "clamp": true,
           "sigma": [[{"sqrt": [{"alpha": [1], "c": 2.0}, {"alpha": [2], "c": -2.0}]}]],
           "box": {"lower": [0.0], "upper": [1.0]}}
  })"));
  const auto& row = out["comparison"].back();
  const double z = row["z"].get<double>();
  o.pass = o.pass && std::abs(z) <= 3.0 && row["analytic"].get<double>() == got;
  o.detail = "|formula - ODE| = " + fmt(err) + ", EM mean " + fmt(row["mc_mean"].get<double>()) + " z = " + fmt(z);
  return o;
}

Outcome adjointness() {
  Outcome o;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 3;
    const int k = 1 + (trial / 3) % 4;
    const auto dual = build_dual_matrix(random_spec(rng, d), k);
    const auto n = static_cast<Eigen::Index>(dual.basis.size());
    const Eigen::VectorXd a = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
    std::vector<double> y(static_cast<std::size_t>(d));
    for (auto& v : y) v = u(rng);
    const double t = 0.5 * (u(rng) + 1.0) * 2.0;
    const double lhs = (expm(dual.entries, t) * a).dot(evaluate_basis(dual.basis, y));
    const double rhs = a.dot(expm(dual.entries.transpose(), t) * evaluate_basis(dual.basis, y));
    const double rel = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    worst = std::max(worst, rel);
  }
  o.pass = worst <= 1e-9;
  o.detail = "worst relative gap " + fmt(worst) + " over 100 specs";
  return o;
}

Outcome degree_non_increase() {
  Outcome o;
  auto bad = GeneratorSpec::zero(1);
  bad.drift[0] = poly1({{2, 1.0}});
  bool rejected = false;
  try {
    build_dual_matrix(bad, 2);
  } catch (const DegreeIncrease&) {
    rejected = true;
  }
  std::mt19937_64 rng(3);
  long long nonzero_forbidden = 0, checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    const int k = 1 + (trial / 3) % 4;
    const auto dual = build_dual_matrix(random_spec(rng, d), k);
    for (std::size_t j = 0; j < dual.basis.size(); ++j)
      for (std::size_t i = 0; i < dual.basis.size(); ++i)
        if (dual.basis[i].total_degree() > dual.basis[j].total_degree()) {
          ++checked;
          if (dual.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0) ++nonzero_forbidden;
        }
  }
  o.pass = rejected && nonzero_forbidden == 0;
  o.detail = std::string(rejected ? "degree-2 drift rejected" : "degree-2 drift NOT rejected") + ", " +
             std::to_string(nonzero_forbidden) + " nonzero of " + std::to_string(checked) + " forbidden entries";
  return o;
}

Outcome classical_bergomi() {
  Outcome o;
  const double omega = 2.0, gamma = 1.0, t = 0.5, lam = 0.04;
  const auto curve = ForwardCurve::flat(lam);
  const std::vector<KernelSpec> kernels{KernelSpec::exponential(omega, gamma)};
  BergomiQuadrature gl_time;
  gl_time.pair_time_integral = PairTimeIntegral::kGaussLegendre;
  const auto rule = gauss_legendre(BergomiQuadrature{}.n_nodes, 0.0, kVixWindow);
  double worst = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const VixQuery q{t, kVixWindow, k};
    // closed-form pair factors inside the same tensor rule
    const double closed = integrate_product(
                              [&](std::span<const double> x) {
                                double prod = 1.0, expo = 0.0;
                                for (std::size_t i = 0; i < x.size(); ++i) {
                                  prod *= curve(x[i] + t);
                                  for (std::size_t j = i + 1; j < x.size(); ++j)
                                    expo += classical_bergomi_pair_factor(omega, gamma, t, x[i], x[j]);
                                }
                                return prod * std::exp(expo);
                              },
                              rule, k) /
                          std::pow(kVixWindow, k);
    for (const auto& opts : {BergomiQuadrature{}, gl_time}) {
      const double quad = bergomi_vix_moment(kernels, curve, q, opts);
      worst = std::max(worst, std::abs(quad - closed) / closed);
    }
  }
  o.pass = worst <= 1e-10;
  o.detail = "quadrature vs closed form " + fmt(worst) + " rel";

  const auto out = compare_run("bergomi-classical", json::parse(R"({
    "command": "vix-bergomi", "seed": 404,
    "curve": {"form": "flat", "level": 0.04},
    "kernels": [{"form": "exponential", "omega": 1.0, "gamma": 1.0}],
    "t": 0.5, "k": [1, 2, 3],
    "mc": {"n_paths": 100000, "n_x": 64}
  })"));
  std::string zs;
  for (const auto& row : out["comparison"]) {
    const double z = row["z"].get<double>();
    o.pass = o.pass && std::abs(z) <= 3.0;
    zs += (zs.empty() ? "" : " ") + fmt(z);
  }
  o.detail += ", MC z = [" + zs + "]";
  return o;
}

Outcome rough_bergomi() {
  Outcome o;
  const auto curve = ForwardCurve::flat(0.04);
  int bracket_fail = 0, bracket_checked = 0;
  double worst_k1 = 0.0;
  double worst_z = 0.0;
  for (double h : {0.05, 0.1, 0.3})
    for (double t : {0.1, 0.5}) {
      for (double c : {1.0, 0.5})
        for (int k = 1; k <= 4; ++k) {
          const VixQuery q{t, kVixWindow, k};
          const double m = bergomi_vix_moment({KernelSpec::rough(h, c)}, curve, q);
          const auto b = rough_lognormal_bounds(h, c, curve, q);
          ++bracket_checked;
          const double slack = 1e-14 * b.upper;  // k=1 collapses the bracket to a point
          if (!(b.lower - slack <= m && m <= b.upper + slack)) ++bracket_fail;
          if (k == 1) worst_k1 = std::max(worst_k1, std::abs(m - curve.average(t, kVixWindow)));
        }
      json cfg = json::parse(R"({
        "command": "vix-bergomi", "curve": {"form": "flat", "level": 0.04},
        "k": [1, 2, 3], "mc": {"n_paths": 100000, "n_x": 64}
      })");
      cfg["seed"] = 500 + static_cast<int>(h * 100) + static_cast<int>(t * 10);
      cfg["kernels"] = json::array({{{"form", "rough"}, {"H", h}, {"c", 0.5}}});
      cfg["t"] = t;
      const auto out = compare_run("rough-H" + fmt(h) + "-t" + fmt(t), cfg);
      for (const auto& row : out["comparison"]) worst_z = std::max(worst_z, std::abs(row["z"].get<double>()));
    }
  o.pass = bracket_fail == 0 && worst_k1 <= 1e-10 && worst_z <= 3.0;
  o.detail = std::to_string(bracket_checked - bracket_fail) + "/" + std::to_string(bracket_checked) +
             " bracketed, k=1 gap " + fmt(worst_k1) + ", max MC |z| " + fmt(worst_z);
  return o;
}

Outcome rough_spot() {
  Outcome o;
  const auto curve = ForwardCurve::flat(0.04);
  const double c = 0.15, t = 0.5;
  const std::uint64_t n = 1000000;
  double worst_z = 0.0;
  for (double h : {0.1, 0.25}) {
    const double v = c * c * std::pow(t, 2 * h) / (2 * h);
    const double sd = std::sqrt(v);
    std::vector<double> draws(n);
    for (std::uint64_t i = 0; i < n; ++i) draws[i] = curve(t) * std::exp(sd * PathStream(606, i).normal() - v / 2);
    for (int k = 2; k <= 4; ++k) {
      const auto e = power_moment(draws, k);
      const double z = (e.mean - rough_spot_moment(h, c, curve, t, k)) / e.std_error;
      worst_z = std::max(worst_z, std::abs(z));
    }
  }
  o.pass = worst_z <= 3.0;
  o.detail = "max |z| " + fmt(worst_z) + " over H in {0.1, 0.25}, k in {2, 3, 4}";
  return o;
}

Outcome volterra() {
  Outcome o;
  double worst_z = 0.0;
  bool unit_weights = true;
  for (double delta : {0.25, kVixWindow})
    for (double t : {0.25, 0.5}) {
      json cfg = json::parse(R"({
        "command": "vix-volterra",
        "curve": {"form": "exponential", "b": 0.04, "gamma": 2.0, "c": 0.0},
        "kernel": {"form": "exponential", "omega": 0.5, "gamma": 2.0},
        "k": [1, 2], "mc": {"n_paths": 100000}
      })");
      cfg["seed"] = 700 + static_cast<int>(t * 100) + static_cast<int>(delta * 1000);
      cfg["t"] = t;
      cfg["delta"] = delta;
      const auto out = compare_run("volterra-t" + fmt(t) + "-d" + fmt(delta), cfg);
      for (const auto& row : out["comparison"]) worst_z = std::max(worst_z, std::abs(row["z"].get<double>()));
      const auto& k1 = out["result"]["mc"]["moments"][0];
      unit_weights = unit_weights && k1["min_weight"] == 1.0 && k1["max_weight"] == 1.0;
    }
  o.pass = worst_z <= 3.0 && unit_weights;
  o.detail = "max |z| " + fmt(worst_z) + (unit_weights ? ", k=1 weights all 1" : ", k=1 weights NOT all 1");
  return o;
}

Outcome expected_signature() {
  Outcome o;
  double worst = 0.0;
  bool odd_zero = true;
  for (double t : {0.5, 1.0, 2.0}) {
    const int d = 2, depth = 6;
    const auto closed = expected_signature_bm(d, depth, t);
    for (int n = 0; n <= depth; ++n)
      for (std::size_t i = 0; i < closed.level(n).size(); ++i) {
        const double dual = expected_word_coefficient(word_from_index(i, n, d), t, d, depth);
        worst = std::max(worst, std::abs(dual - closed.level(n)[i]));
        if (n % 2 == 1) odd_zero = odd_zero && closed.level(n)[i] == 0.0 && dual == 0.0;
      }
  }
  o.pass = worst <= 1e-14 && odd_zero;
  o.detail = "dual route gap " + fmt(worst) + (odd_zero ? ", odd levels 0" : ", odd levels NOT 0");

  const auto out = compare_run("signature", json::parse(R"({
    "command": "signature", "seed": 808, "d": 2, "N": 4, "t": 1.0,
    "mc": {"n_paths": 20000, "n_steps": 2000}
  })"));
  double worst_excess = -1e300;
  int checked = 0;
  for (const auto& row : out["comparison"]) {
    const auto q = row["quantity"].get<std::string>();
    const std::size_t len = q.size() - 3;  // "S[" ... "]"
    if (len != 2 && len != 4) continue;
    ++checked;
    const double tol = std::max(3 * row["mc_se"].get<double>(), 2e-3);
    const double gap = std::abs(row["mc_mean"].get<double>() - row["analytic"].get<double>());
    worst_excess = std::max(worst_excess, gap / tol);
    o.pass = o.pass && gap <= tol;
  }
  o.detail += ", MC " + std::to_string(checked) + " entries, worst gap/tol " + fmt(worst_excess);
  return o;
}

Outcome chen_and_group() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z(0.0, 0.5);
  double worst_chen = 0.0, worst_inv = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 3, depth = 5, points = 4 + trial % 9;
    std::vector<std::vector<double>> path(static_cast<std::size_t>(points), std::vector<double>(d, 0.0));
    for (int p = 1; p < points; ++p)
      for (int i = 0; i < d; ++i) path[p][i] = path[p - 1][i] + z(rng);
    const int cut = 1 + trial % (points - 2);
    const std::vector<std::vector<double>> left(path.begin(), path.begin() + cut + 1);
    const std::vector<std::vector<double>> right(path.begin() + cut, path.end());
    worst_chen = std::max(worst_chen, chen_signature(path, depth)
                                          .max_abs_difference(tensor_product(chen_signature(left, depth),
                                                                             chen_signature(right, depth))));
    std::vector<double> v(static_cast<std::size_t>(d)), w(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) w[i] = -(v[i] = z(rng));
    worst_inv = std::max(worst_inv, tensor_product(tensor_exp(v, d, depth), tensor_exp(w, d, depth))
                                        .max_abs_difference(TruncatedTensor::unit(d, depth)));
  }
  o.pass = worst_chen <= 1e-12 && worst_inv <= 1e-12;
  o.detail = "Chen gap " + fmt(worst_chen) + ", exp(v)exp(-v) gap " + fmt(worst_inv);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("polymoments-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  int identical = 0;
  std::string mismatched;
  for (const auto& [name, cfg] : g_mc_runs) {
    const fs::path config = dir / (name + ".json");
    std::ofstream(config) << cfg.dump(2);
    std::string outputs[2], dumps[2];
    bool ok = true;
    for (int i = 0; i < 2; ++i) {
      const unsigned threads = i == 0 ? 1 : 8;
      const fs::path out = dir / (name + "-" + std::to_string(threads) + ".json");
      const fs::path dump = dir / (name + "-" + std::to_string(threads) + ".csv");
      const std::string cmd = std::string("\"") + POLYMOMENTS_CLI_PATH + "\" compare --config \"" + config.string() +
                              "\" --out \"" + out.string() + "\" --dump \"" + dump.string() +
                              "\" --threads " + std::to_string(threads) + " 2>/dev/null";
      ok = ok && std::system(cmd.c_str()) == 0;
      outputs[i] = slurp(out);
      dumps[i] = fs::exists(dump) ? slurp(dump) : "";
    }
    const std::string in_process = cli::execute(cfg, {cli::Mode::kCompare, cli::Format::kJson, 1, false}).output;
    if (ok && !outputs[0].empty() && outputs[0] == outputs[1] && dumps[0] == dumps[1] && outputs[0] == in_process)
      ++identical;
    else
      mismatched += " " + name;
  }
  fs::remove_all(dir);
  o.pass = !g_mc_runs.empty() && identical == static_cast<int>(g_mc_runs.size());
  o.detail = std::to_string(identical) + "/" + std::to_string(g_mc_runs.size()) +
             " MC runs byte-identical across --threads 1/8 (output and dump)" +
             (mismatched.empty() ? "" : ", differing:" + mismatched);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Jacobi moment formula and Euler-Maruyama oracle", 10, jacobi_moment_formula},
      {2, "dual/bidual adjointness on random specs", 30, adjointness},
      {3, "degree non-increase and block-triangular G_k", 0, degree_non_increase},
      {4, "classical Bergomi quadrature, closed form and lognormal MC", 60, classical_bergomi},
      {5, "rough Bergomi bounds, forward VIX and MC", 180, rough_bergomi},
      {6, "rough spot-moment heuristic vs scalar lognormal MC", 20, rough_spot},
      {7, "Volterra closed form vs PDMP Feynman-Kac MC", 60, volterra},
      {8, "expected Brownian signature: dual route and MC", 180, expected_signature},
      {9, "Chen identity and group inverse", 0, chen_and_group},
      {10, "determinism across thread counts", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      o.pass = false;
      o.detail += ", over the " + fmt(c.time_limit) + " s budget";
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %2d  %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
