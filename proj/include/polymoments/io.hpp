#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "polymoments/forwardvariance.hpp"
#include "polymoments/generator.hpp"
#include "polymoments/mcsim.hpp"

namespace polymoments::io {

using nlohmann::json;

// Loaders throw ConfigError carrying a JSON pointer to the offending field.
// `path` is the pointer of the value being read.

/// [{"alpha": [..], "c": float}, ...]
Polynomial polynomial_from_json(const json& j, int dim, const std::string& path);
json to_json(const Polynomial& p);

/// {"dim": d, "drift": [poly], "diffusion": [[poly]], "jumps": [{"beta": [..], "mu": poly}]}
/// Shapes and symmetry are checked here; degree conditions are left to the
/// dual-matrix build so that they surface as DegreeIncrease.
GeneratorSpec generator_from_json(const json& j, const std::string& path);
json to_json(const GeneratorSpec& spec);

/// sigma: [[entry]] with entry = poly or {"sqrt": poly}
std::vector<std::vector<FactorEntry>> factor_from_json(const json& j, int dim, const std::string& path);

/// {"form": "flat", "level"} | {"form": "exponential", "b", "gamma", "c"} | {"form": "tabulated", "x", "y"}
ForwardCurve curve_from_json(const json& j, const std::string& path);
/// {"form": "exponential", "omega", "gamma"} | {"form": "rough", "H", "c"}
KernelSpec kernel_from_json(const json& j, const std::string& path);

// Field accessors with path-aware errors.
const json& require(const json& obj, const std::string& key, const std::string& path);
double number(const json& obj, const std::string& key, const std::string& path);
double number_or(const json& obj, const std::string& key, double fallback, const std::string& path);
long long integer(const json& obj, const std::string& key, const std::string& path);
long long integer_or(const json& obj, const std::string& key, long long fallback, const std::string& path);
std::vector<double> number_array(const json& obj, const std::string& key, const std::string& path);

}  // namespace polymoments::io
