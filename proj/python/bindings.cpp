#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "polymoments/cli.hpp"
#include "polymoments/errors.hpp"
#include "polymoments/forwardvariance.hpp"
#include "polymoments/generator.hpp"
#include "polymoments/io.hpp"
#include "polymoments/moments.hpp"
#include "polymoments/polybasis.hpp"
#include "polymoments/signature.hpp"

namespace py = pybind11;
using namespace polymoments;
using nlohmann::json;

namespace {

// Python objects cross the boundary as JSON documents, in the same schema the
// command line tool reads.
json to_json(const py::handle& obj) {
  return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

GeneratorSpec generator(const py::handle& obj) { return io::generator_from_json(to_json(obj), ""); }

std::vector<KernelSpec> kernels(const py::handle& obj) {
  const json j = to_json(obj);
  std::vector<KernelSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(io::kernel_from_json(j[i], "/" + std::to_string(i)));
  return out;
}

std::vector<Eigen::VectorXd> levels(const TruncatedTensor& t) {
  std::vector<Eigen::VectorXd> out;
  for (int n = 0; n <= t.depth(); ++n) {
    const auto l = t.level(n);
    out.emplace_back(Eigen::Map<const Eigen::VectorXd>(l.data(), static_cast<Eigen::Index>(l.size())));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Moment engine for polynomial processes";

  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<DegreeIncrease>(m, "DegreeIncrease", numerical.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "enumerate_basis",
      [](int d, int k) {
        std::vector<std::vector<int>> out;
        for (const auto& b : enumerate_basis(d, k)) out.push_back(b.exponents());
        return out;
      },
      py::arg("d"), py::arg("k"), "Graded-lex exponent vectors of total degree <= k.");

  m.def(
      "build_dual_matrix", [](const py::object& spec, int k) { return build_dual_matrix(generator(spec), k).entries; },
      py::arg("generator"), py::arg("k"), "Matrix G_k of the generator on polynomials of degree <= k.");

  m.def("expm", &expm, py::arg("a"), py::arg("t") = 1.0, "exp(t A), scaling and squaring with Pade(13).");

  m.def(
      "conditional_moment",
      [](const py::object& spec, int k, const Eigen::VectorXd& a, const std::vector<double>& y, double horizon) {
        return conditional_moment(generator(spec), k, {k, a}, y, horizon);
      },
      py::arg("generator"), py::arg("k"), py::arg("coefficients"), py::arg("y"), py::arg("T"),
      "E[p(X_T) | X_0 = y] for the polynomial with the given graded-lex coefficients.");

  m.def(
      "moment_vector",
      [](const py::object& spec, int k, const std::vector<double>& y0, double horizon) {
        return moment_vector(generator(spec), k, y0, horizon).values;
      },
      py::arg("generator"), py::arg("k"), py::arg("y0"), py::arg("T"), "E[H(X_T) | X_0 = y0].");

  m.def(
      "bergomi_vix_moment",
      [](const py::object& ks, const py::object& curve, double t, double delta, int k, int n_nodes) {
        BergomiQuadrature q;
        q.n_nodes = n_nodes;
        return bergomi_vix_moment(kernels(ks), io::curve_from_json(to_json(curve), ""), {t, delta, k}, q);
      },
      py::arg("kernels"), py::arg("curve"), py::arg("t"), py::arg("delta") = 30.0 / 365.0, py::arg("k") = 1,
      py::arg("n_nodes") = 32);

  m.def(
      "rough_lognormal_bounds",
      [](double hurst, double scale, const py::object& curve, double t, double delta, int k) {
        const auto b = rough_lognormal_bounds(hurst, scale, io::curve_from_json(to_json(curve), ""), {t, delta, k});
        return std::make_pair(b.lower, b.upper);
      },
      py::arg("H"), py::arg("c"), py::arg("curve"), py::arg("t"), py::arg("delta") = 30.0 / 365.0, py::arg("k") = 1);

  m.def(
      "rough_spot_moment",
      [](double hurst, double scale, const py::object& curve, double t, int k) {
        return rough_spot_moment(hurst, scale, io::curve_from_json(to_json(curve), ""), t, k);
      },
      py::arg("H"), py::arg("c"), py::arg("curve"), py::arg("t"), py::arg("k"));

  m.def(
      "volterra_vix_moment_closed",
      [](double b, double gamma, double omega, double t, double delta, int k) {
        return volterra_vix_moment_closed(b, gamma, omega, {t, delta, k});
      },
      py::arg("b"), py::arg("gamma"), py::arg("omega"), py::arg("t"), py::arg("delta") = 30.0 / 365.0,
      py::arg("k") = 1);

  m.def(
      "expected_signature_bm", [](int d, int depth, double t) { return levels(expected_signature_bm(d, depth, t)); },
      py::arg("d"), py::arg("N"), py::arg("t"), "Levels 0..N of E[S(B)_{0,t}], words in row-major order.");

  m.def(
      "chen_signature",
      [](const std::vector<std::vector<double>>& path, int depth) { return levels(chen_signature(path, depth)); },
      py::arg("path"), py::arg("N"), "Signature of the piecewise-linear path through the given points.");

  m.def(
      "execute",
      [](const py::object& config, const std::string& mode, const std::string& format, unsigned threads) {
        if (mode != "run" && mode != "compare") throw py::value_error("mode must be 'run' or 'compare'");
        if (format != "json" && format != "csv") throw py::value_error("format must be 'json' or 'csv'");
        cli::ExecuteOptions opts{mode == "compare" ? cli::Mode::kCompare : cli::Mode::kRun,
                                 format == "csv" ? cli::Format::kCsv : cli::Format::kJson, threads, false};
        return cli::execute(to_json(config), opts).output;
      },
      py::arg("config"), py::arg("mode") = "run", py::arg("format") = "json", py::arg("threads") = 1,
      "Runs a configuration document and returns the rendered output.");

  m.def(
      "config_hash", [](const py::object& config) { return cli::config_hash(to_json(config)); }, py::arg("config"));

  m.attr("__version__") = cli::kToolVersion;
}
