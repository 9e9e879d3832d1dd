#include "polymoments/io.hpp"

#include <cmath>

#include "polymoments/errors.hpp"

namespace polymoments::io {

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& expect_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  return j;
}

const json& expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

long long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long long>();
}

// wraps constructor argument checks (std::invalid_argument) as config errors at `path`
template <class F>
auto checked(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

const json& require(const json& obj, const std::string& key, const std::string& path) {
  expect_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(child(path, key), "missing required field");
  return *it;
}

double number(const json& obj, const std::string& key, const std::string& path) {
  return as_number(require(obj, key, path), child(path, key));
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  expect_object(obj, path);
  return obj.contains(key) ? as_number(obj.at(key), child(path, key)) : fallback;
}

long long integer(const json& obj, const std::string& key, const std::string& path) {
  return as_integer(require(obj, key, path), child(path, key));
}

long long integer_or(const json& obj, const std::string& key, long long fallback, const std::string& path) {
  expect_object(obj, path);
  return obj.contains(key) ? as_integer(obj.at(key), child(path, key)) : fallback;
}

std::vector<double> number_array(const json& obj, const std::string& key, const std::string& path) {
  const std::string p = child(path, key);
  const json& arr = expect_array(require(obj, key, path), p);
  std::vector<double> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_number(arr[i], child(p, i)));
  return out;
}

Polynomial polynomial_from_json(const json& j, int dim, const std::string& path) {
  expect_array(j, path);
  Polynomial p(dim);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string tp = child(path, t);
    const json& term = expect_object(j[t], tp);
    const std::string ap = child(tp, "alpha");
    const json& alpha = expect_array(require(term, "alpha", tp), ap);
    if (alpha.size() != static_cast<std::size_t>(dim))
      throw ConfigError(ap, "expected " + std::to_string(dim) + " exponents");
    std::vector<int> e;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const long long v = as_integer(alpha[i], child(ap, i));
      if (v < 0) throw ConfigError(child(ap, i), "exponents must be >= 0");
      e.push_back(static_cast<int>(v));
    }
    p.add_term(MultiIndex(std::move(e)), number(term, "c", tp));
  }
  return p;
}

json to_json(const Polynomial& p) {
  json arr = json::array();
  for (const auto& [alpha, c] : p.terms()) arr.push_back({{"alpha", alpha.exponents()}, {"c", c}});
  return arr;
}

GeneratorSpec generator_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  const long long dim = integer(j, "dim", path);
  if (dim < 1) throw ConfigError(child(path, "dim"), "dimension must be >= 1");
  const int d = static_cast<int>(dim);
  GeneratorSpec spec = GeneratorSpec::zero(d);

  const std::string dp = child(path, "drift");
  const json& drift = expect_array(require(j, "drift", path), dp);
  if (drift.size() != spec.drift.size()) throw ConfigError(dp, "expected " + std::to_string(d) + " polynomials");
  for (std::size_t i = 0; i < drift.size(); ++i) spec.drift[i] = polynomial_from_json(drift[i], d, child(dp, i));

  const std::string ap = child(path, "diffusion");
  const json& diff = expect_array(require(j, "diffusion", path), ap);
  if (diff.size() != spec.diffusion.size()) throw ConfigError(ap, "expected " + std::to_string(d) + " rows");
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const std::string rp = child(ap, i);
    const json& row = expect_array(diff[i], rp);
    if (row.size() != spec.diffusion.size()) throw ConfigError(rp, "expected " + std::to_string(d) + " entries");
    for (std::size_t k = 0; k < row.size(); ++k) spec.diffusion[i][k] = polynomial_from_json(row[k], d, child(rp, k));
  }

  if (j.contains("jumps")) {
    const std::string jp = child(path, "jumps");
    const json& jumps = expect_array(j.at("jumps"), jp);
    for (std::size_t n = 0; n < jumps.size(); ++n) {
      const std::string ep = child(jp, n);
      const json& entry = expect_object(jumps[n], ep);
      const std::string bp = child(ep, "beta");
      const json& beta = expect_array(require(entry, "beta", ep), bp);
      if (beta.size() != static_cast<std::size_t>(d)) throw ConfigError(bp, "expected " + std::to_string(d) + " exponents");
      std::vector<int> e;
      for (std::size_t i = 0; i < beta.size(); ++i) {
        const long long v = as_integer(beta[i], child(bp, i));
        if (v < 0) throw ConfigError(child(bp, i), "exponents must be >= 0");
        e.push_back(static_cast<int>(v));
      }
      MultiIndex b(std::move(e));
      if (b.total_degree() < 2) throw ConfigError(bp, "jump moments need |beta| >= 2");
      spec.jumps.push_back({std::move(b), polynomial_from_json(require(entry, "mu", ep), d, child(ep, "mu"))});
    }
  }

  if (auto v = validate_generator(spec); v && v->kind == GeneratorViolation::Kind::kSymmetry)
    throw ConfigError(child(path, "diffusion"), v->field + ": " + v->message);
  return spec;
}

json to_json(const GeneratorSpec& spec) {
  json j;
  j["dim"] = spec.dim;
  j["drift"] = json::array();
  for (const auto& b : spec.drift) j["drift"].push_back(to_json(b));
  j["diffusion"] = json::array();
  for (const auto& row : spec.diffusion) {
    json r = json::array();
    for (const auto& a : row) r.push_back(to_json(a));
    j["diffusion"].push_back(r);
  }
  j["jumps"] = json::array();
  for (const auto& jm : spec.jumps) j["jumps"].push_back({{"beta", jm.beta.exponents()}, {"mu", to_json(jm.mu)}});
  return j;
}

std::vector<std::vector<FactorEntry>> factor_from_json(const json& j, int dim, const std::string& path) {
  expect_array(j, path);
  std::vector<std::vector<FactorEntry>> sigma;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string rp = child(path, i);
    const json& row = expect_array(j[i], rp);
    std::vector<FactorEntry> r;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string ep = child(rp, c);
      if (row[c].is_object()) {
        r.push_back({polynomial_from_json(require(row[c], "sqrt", ep), dim, child(ep, "sqrt")), true});
      } else {
        r.push_back({polynomial_from_json(row[c], dim, ep), false});
      }
    }
    sigma.push_back(std::move(r));
  }
  return sigma;
}

ForwardCurve curve_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  const json& form = require(j, "form", path);
  if (!form.is_string()) throw ConfigError(child(path, "form"), "expected a string");
  const auto f = form.get<std::string>();
  if (f == "flat") {
    const double level = number(j, "level", path);
    return checked(path, [&] { return ForwardCurve::flat(level); });
  }
  if (f == "exponential") {
    const double b = number(j, "b", path);
    const double gamma = number(j, "gamma", path);
    const double c = number_or(j, "c", 0.0, path);
    return checked(path, [&] { return ForwardCurve::exponential(b, gamma, c); });
  }
  if (f == "tabulated") {
    auto x = number_array(j, "x", path);
    auto y = number_array(j, "y", path);
    return checked(path, [&] { return ForwardCurve::tabulated(std::move(x), std::move(y)); });
  }
  throw ConfigError(child(path, "form"), "unknown curve form '" + f + "'");
}

KernelSpec kernel_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  const json& form = require(j, "form", path);
  if (!form.is_string()) throw ConfigError(child(path, "form"), "expected a string");
  const auto f = form.get<std::string>();
  if (f == "exponential") {
    const double omega = number(j, "omega", path);
    const double gamma = number(j, "gamma", path);
    return checked(path, [&] { return KernelSpec::exponential(omega, gamma); });
  }
  if (f == "rough") {
    const double hurst = number(j, "H", path);
    const double c = number_or(j, "c", 1.0, path);
    return checked(path, [&] { return KernelSpec::rough(hurst, c); });
  }
  throw ConfigError(child(path, "form"), "unknown kernel form '" + f + "'");
}

}  // namespace polymoments::io
