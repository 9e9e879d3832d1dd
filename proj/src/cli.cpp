#include "polymoments/cli.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "polymoments/errors.hpp"
#include "polymoments/forwardvariance.hpp"
#include "polymoments/generator.hpp"
#include "polymoments/io.hpp"
#include "polymoments/mcsim.hpp"
#include "polymoments/moments.hpp"
#include "polymoments/rng.hpp"
#include "polymoments/signature.hpp"

namespace polymoments::cli {

using nlohmann::json;

std::string config_hash(const json& config) {
  const std::string canonical = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

struct Row {
  std::string quantity;
  double analytic;
  McEstimate mc;
};

struct Evaluation {
  json analytic;
  json mc;
  std::vector<Row> rows;
  std::string dump;
};

struct Request {
  const json& cfg;
  std::string path;  // JSON pointer of the payload
  std::uint64_t seed;
  unsigned threads;
  bool want_analytic;
  bool want_mc;
  bool want_dump;
};

json estimate_json(const McEstimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"n_paths", e.n_paths}};
}

const json& mc_block(const Request& r) { return io::require(r.cfg, "mc", r.path); }

SimConfig sim_config(const Request& r) {
  const json& mc = mc_block(r);
  const std::string p = r.path + "/mc";
  SimConfig cfg;
  const long long n = io::integer(mc, "n_paths", p);
  if (n < 1) throw ConfigError(p + "/n_paths", "must be >= 1");
  cfg.n_paths = static_cast<std::uint64_t>(n);
  cfg.dt = io::number_or(mc, "dt", 0.01, p);
  if (!(cfg.dt > 0.0)) throw ConfigError(p + "/dt", "must be > 0");
  cfg.substeps = static_cast<int>(io::integer_or(mc, "substeps", 1, p));
  if (cfg.substeps < 1) throw ConfigError(p + "/substeps", "must be >= 1");
  if (mc.contains("clamp")) {
    if (!mc.at("clamp").is_boolean()) throw ConfigError(p + "/clamp", "expected a boolean");
    cfg.clamp = mc.at("clamp").get<bool>();
  }
  if (mc.contains("exact")) {
    if (!mc.at("exact").is_boolean()) throw ConfigError(p + "/exact", "expected a boolean");
    cfg.exact_mode = mc.at("exact").get<bool>();
  }
  cfg.seed = r.seed;
  cfg.threads = r.threads;
  return cfg;
}

std::vector<int> moment_orders(const json& cfg, const std::string& path) {
  const json& k = io::require(cfg, "k", path);
  std::vector<int> out;
  auto one = [&](const json& v, const std::string& p) {
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError(p, "moment orders must be integers >= 1");
    out.push_back(static_cast<int>(v.get<long long>()));
  };
  if (k.is_array()) {
    if (k.empty()) throw ConfigError(path + "/k", "expected at least one order");
    for (std::size_t i = 0; i < k.size(); ++i) one(k[i], path + "/k/" + std::to_string(i));
  } else {
    one(k, path + "/k");
  }
  return out;
}

std::string dump_series(const std::vector<std::string>& names, const std::vector<const std::vector<double>*>& cols) {
  std::ostringstream os;
  os << std::setprecision(17) << "path_index";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  const std::size_t rows = cols.empty() ? 0 : cols.front()->size();
  for (std::size_t i = 0; i < rows; ++i) {
    os << i;
    for (const auto* c : cols) os << ',' << (*c)[i];
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

Evaluation eval_moments(const Request& r) {
  Evaluation ev;
  const GeneratorSpec spec = io::generator_from_json(io::require(r.cfg, "generator", r.path), r.path + "/generator");
  const long long k = io::integer(r.cfg, "k", r.path);
  if (k < 0) throw ConfigError(r.path + "/k", "must be >= 0");
  const std::vector<double> y0 = io::number_array(r.cfg, "y0", r.path);
  if (y0.size() != static_cast<std::size_t>(spec.dim)) throw ConfigError(r.path + "/y0", "dimension does not match generator");
  const double horizon = io::number(r.cfg, "T", r.path);
  if (horizon < 0.0) throw ConfigError(r.path + "/T", "must be >= 0");

  const auto basis = enumerate_basis(spec.dim, static_cast<int>(k));
  std::optional<Polynomial> target;
  if (r.cfg.contains("polynomial")) {
    target = io::polynomial_from_json(r.cfg.at("polynomial"), spec.dim, r.path + "/polynomial");
    if (target->degree() > k) throw ConfigError(r.path + "/polynomial", "degree exceeds k");
  } else if (r.cfg.contains("coefficients")) {
    const auto a = io::number_array(r.cfg, "coefficients", r.path);
    if (a.size() != basis.size())
      throw ConfigError(r.path + "/coefficients", "expected " + std::to_string(basis.size()) + " coefficients");
    target = from_coefficients(Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())), basis);
  }

  json basis_json = json::array();
  for (const auto& b : basis) basis_json.push_back(b.exponents());

  MomentVector mv;
  double cond = 0.0;
  if (r.want_analytic) {
    const DualMatrix dual = build_dual_matrix(spec, static_cast<int>(k));
    mv = moment_vector(dual, y0, horizon);
    ev.analytic = {{"basis", basis_json}, {"moments", std::vector<double>(mv.values.begin(), mv.values.end())}};
    if (target) {
      cond = conditional_moment(dual, {static_cast<int>(k), to_coefficients(*target, basis)}, y0, horizon);
      ev.analytic["conditional_moment"] = cond;
    }
  }
  if (r.want_mc) {
    const json& mc = mc_block(r);
    const SimConfig sim = sim_config(r);
    DiffusionModel model{spec, io::factor_from_json(io::require(mc, "sigma", r.path + "/mc"), spec.dim, r.path + "/mc/sigma"),
                         std::nullopt};
    if (mc.contains("box")) {
      const std::string bp = r.path + "/mc/box";
      model.box = StateBox{io::number_array(mc.at("box"), "lower", bp), io::number_array(mc.at("box"), "upper", bp)};
    }
    if (auto err = check_diffusion_model(model)) throw ConfigError(r.path + "/mc/sigma", *err);
    const Samples samples = simulate_diffusion(model, y0, horizon, sim);
    json moms = json::array();
    std::vector<McEstimate> ests;
    for (const auto& b : basis) {
      ests.push_back(mc_moment(samples, Polynomial::monomial(b)));
      moms.push_back(estimate_json(ests.back()));
    }
    ev.mc = {{"basis", basis_json}, {"moments", moms}, {"n_paths", sim.n_paths}, {"dt", sim.dt}};
    std::optional<McEstimate> cond_mc;
    if (target) {
      cond_mc = mc_moment(samples, *target);
      ev.mc["conditional_moment"] = estimate_json(*cond_mc);
    }
    if (r.want_analytic) {
      for (std::size_t j = 0; j < basis.size(); ++j)
        ev.rows.push_back({"E[y^" + basis[j].to_string() + "]", mv.values[static_cast<Eigen::Index>(j)], ests[j]});
      if (target) ev.rows.push_back({"E[p(y)]", cond, *cond_mc});
    }
    if (r.want_dump) {
      std::vector<std::vector<double>> cols(static_cast<std::size_t>(spec.dim));
      std::vector<std::string> names;
      std::vector<const std::vector<double>*> ptrs;
      for (int i = 0; i < spec.dim; ++i) {
        auto& c = cols[static_cast<std::size_t>(i)];
        c.resize(static_cast<std::size_t>(samples.rows()));
        for (Eigen::Index p = 0; p < samples.rows(); ++p) c[static_cast<std::size_t>(p)] = samples(p, i);
        names.push_back("y" + std::to_string(i));
        ptrs.push_back(&c);
      }
      ev.dump = dump_series(names, ptrs);
    }
  }
  return ev;
}

Evaluation eval_vix_bergomi(const Request& r) {
  Evaluation ev;
  const ForwardCurve curve = io::curve_from_json(io::require(r.cfg, "curve", r.path), r.path + "/curve");
  const std::string kp = r.path + "/kernels";
  const json& kj = io::require(r.cfg, "kernels", r.path);
  if (!kj.is_array()) throw ConfigError(kp, "expected an array");
  std::vector<KernelSpec> kernels;
  for (std::size_t i = 0; i < kj.size(); ++i) kernels.push_back(io::kernel_from_json(kj[i], kp + "/" + std::to_string(i)));
  const double t = io::number(r.cfg, "t", r.path);
  const double delta = io::number_or(r.cfg, "delta", 30.0 / 365.0, r.path);
  if (t < 0.0) throw ConfigError(r.path + "/t", "must be >= 0");
  if (!(delta > 0.0)) throw ConfigError(r.path + "/delta", "must be > 0");
  const auto orders = moment_orders(r.cfg, r.path);

  std::vector<double> analytic;
  if (r.want_analytic) {
    BergomiQuadrature quad;
    quad.n_nodes = static_cast<int>(io::integer_or(r.cfg, "n_nodes", quad.n_nodes, r.path));
    quad.time_nodes = static_cast<int>(io::integer_or(r.cfg, "time_nodes", quad.time_nodes, r.path));
    json moms = json::array();
    for (int k : orders) {
      const VixQuery q{t, delta, k};
      const double v = bergomi_vix_moment(kernels, curve, q, quad);
      analytic.push_back(v);
      json m = {{"k", k}, {"value", v}};
      if (kernels.size() == 1)
        if (const auto* rough = std::get_if<KernelSpec::Rough>(&kernels.front().form())) {
          const auto b = rough_lognormal_bounds(rough->hurst, rough->scale, curve, q);
          m["lognormal_bounds"] = {{"lower", b.lower}, {"upper", b.upper}};
        }
      moms.push_back(m);
    }
    ev.analytic = {{"forward_vix2", curve.average(t, delta)}, {"moments", moms}};
  }
  if (r.want_mc) {
    const SimConfig sim = sim_config(r);
    const long long n_x = io::integer_or(mc_block(r), "n_x", 64, r.path + "/mc");
    if (n_x < 2) throw ConfigError(r.path + "/mc/n_x", "must be >= 2");
    const auto samples = simulate_bergomi_vix(kernels, curve, t, delta, static_cast<int>(n_x), sim);
    json moms = json::array();
    for (std::size_t i = 0; i < orders.size(); ++i) {
      const McEstimate e = power_moment(samples, orders[i]);
      json m = estimate_json(e);
      m["k"] = orders[i];
      moms.push_back(m);
      if (r.want_analytic) ev.rows.push_back({"E[VIX^(2*" + std::to_string(orders[i]) + ")]", analytic[i], e});
    }
    ev.mc = {{"moments", moms}, {"n_x", n_x}, {"n_paths", sim.n_paths}};
    if (r.want_dump) ev.dump = dump_series({"vix2"}, {&samples});
  }
  return ev;
}

Evaluation eval_vix_volterra(const Request& r) {
  Evaluation ev;
  const ForwardCurve curve = io::curve_from_json(io::require(r.cfg, "curve", r.path), r.path + "/curve");
  const KernelSpec kernel = io::kernel_from_json(io::require(r.cfg, "kernel", r.path), r.path + "/kernel");
  const double t = io::number(r.cfg, "t", r.path);
  const double delta = io::number_or(r.cfg, "delta", 30.0 / 365.0, r.path);
  if (t < 0.0) throw ConfigError(r.path + "/t", "must be >= 0");
  if (!(delta > 0.0)) throw ConfigError(r.path + "/delta", "must be > 0");
  const auto orders = moment_orders(r.cfg, r.path);

  std::vector<double> analytic;
  if (r.want_analytic) {
    const auto* ek = std::get_if<KernelSpec::Exponential>(&kernel.form());
    const auto* ec = std::get_if<ForwardCurve::Exponential>(&curve.form());
    if (!ek) throw ConfigError(r.path + "/kernel", "closed form needs an exponential kernel");
    if (!ec || ec->c != 0.0 || ec->gamma != ek->gamma)
      throw ConfigError(r.path + "/curve", "closed form needs lambda_0 = b exp(-gamma x) with the kernel's gamma");
    json moms = json::array();
    for (int k : orders) {
      const double v = volterra_vix_moment_closed(ec->b, ek->gamma, ek->omega, {t, delta, k});
      analytic.push_back(v);
      moms.push_back({{"k", k}, {"value", v}});
    }
    ev.analytic = {{"moments", moms}};
  }
  if (r.want_mc) {
    const SimConfig sim = sim_config(r);
    if (!kernel.is_bounded()) throw ConfigError(r.path + "/kernel", "the PDMP representation needs a bounded kernel");
    json moms = json::array();
    std::vector<PdmpEstimate> runs;
    for (std::size_t i = 0; i < orders.size(); ++i) {
      runs.push_back(simulate_volterra_pdmp(kernel, curve, t, delta, orders[i], sim));
      const auto& pe = runs.back();
      json m = estimate_json(pe.estimate);
      m["k"] = orders[i];
      m["min_weight"] = pe.min_weight;
      m["max_weight"] = pe.max_weight;
      m["jumps"] = pe.jumps;
      moms.push_back(m);
      if (r.want_analytic) ev.rows.push_back({"E[VIX^(2*" + std::to_string(orders[i]) + ")]", analytic[i], pe.estimate});
    }
    ev.mc = {{"moments", moms}, {"n_paths", sim.n_paths}};
    if (r.want_dump) {
      std::vector<std::string> names;
      std::vector<const std::vector<double>*> cols;
      for (std::size_t i = 0; i < orders.size(); ++i)
        if (!runs[i].values.empty()) {
          names.push_back(orders.size() == 1 ? "value" : "value_k" + std::to_string(orders[i]));
          cols.push_back(&runs[i].values);
        }
      if (!cols.empty()) ev.dump = dump_series(names, cols);
    }
  }
  return ev;
}

json levels_json(const TruncatedTensor& s) {
  json levels = json::array();
  for (int n = 0; n <= s.depth(); ++n) {
    json lvl = json::object();
    const auto values = s.level(n);
    for (std::size_t i = 0; i < values.size(); ++i)
      lvl[word_label(word_from_index(i, n, s.alphabet_size()))] = values[i];
    levels.push_back(lvl);
  }
  return levels;
}

Evaluation eval_signature(const Request& r) {
  Evaluation ev;
  const long long d = io::integer(r.cfg, "d", r.path);
  const long long depth = io::integer(r.cfg, "N", r.path);
  const double t = io::number(r.cfg, "t", r.path);
  if (d < 1 || d > 9) throw ConfigError(r.path + "/d", "must be in 1..9");
  if (depth < 0 || depth > 12) throw ConfigError(r.path + "/N", "must be in 0..12");
  if (t < 0.0) throw ConfigError(r.path + "/t", "must be >= 0");

  TruncatedTensor expected(static_cast<int>(d), static_cast<int>(depth));
  if (r.want_analytic) {
    expected = expected_signature_bm(static_cast<int>(d), static_cast<int>(depth), t);
    ev.analytic = {{"levels", levels_json(expected)}};
  }
  if (r.want_mc) {
    const SimConfig sim = sim_config(r);
    const long long steps = io::integer(mc_block(r), "n_steps", r.path + "/mc");
    if (steps < 1) throw ConfigError(r.path + "/mc/n_steps", "must be >= 1");
    const auto est = simulate_brownian_signature(static_cast<int>(d), static_cast<int>(depth), t,
                                                 static_cast<int>(steps), sim);
    ev.mc = {{"mean", levels_json(est.mean)}, {"std_error", levels_json(est.std_error)}, {"n_paths", est.n_paths},
             {"n_steps", steps}};
    if (r.want_analytic)
      for (int n = 1; n <= depth; ++n) {
        const auto mean = est.mean.level(n);
        const auto se = est.std_error.level(n);
        const auto an = expected.level(n);
        for (std::size_t i = 0; i < mean.size(); ++i)
          ev.rows.push_back({"S[" + word_label(word_from_index(i, n, static_cast<int>(d))) + "]", an[i],
                             {mean[i], se[i], est.n_paths}});
      }
  }
  return ev;
}

using Evaluator = std::function<Evaluation(const Request&)>;

Evaluator evaluator_for(const std::string& command, const std::string& path) {
  if (command == "moments") return eval_moments;
  if (command == "vix-bergomi") return eval_vix_bergomi;
  if (command == "vix-volterra") return eval_vix_volterra;
  if (command == "signature") return eval_signature;
  throw ConfigError(path, "unknown command '" + command + "'");
}

std::string require_string(const json& cfg, const std::string& key, const std::string& path) {
  const json& v = io::require(cfg, key, path);
  if (!v.is_string()) throw ConfigError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

json compare_rows(const std::vector<Row>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    const double diff = row.mc.mean - row.analytic;
    json z;
    bool flagged;
    if (row.mc.std_error > 0.0) {
      const double zv = diff / row.mc.std_error;
      z = zv;
      flagged = std::abs(zv) > 3.0;
    } else if (std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(row.analytic))) {
      z = 0.0;
      flagged = false;
    } else {
      flagged = true;  // z is unbounded, reported as null
    }
    out.push_back({{"quantity", row.quantity},
                   {"analytic", row.analytic},
                   {"mc_mean", row.mc.mean},
                   {"mc_se", row.mc.std_error},
                   {"z", z},
                   {"flagged", flagged}});
  }
  return out;
}

void flatten(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix + "/" + k, os);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "/" + std::to_string(i), os);
  } else {
    os << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

std::string render(const json& meta, const json& result, const json* rows, Format format) {
  if (format == Format::kJson) {
    json doc = meta;
    doc["result"] = result;
    if (rows) doc["comparison"] = *rows;
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  for (const auto& [k, v] : meta.items()) os << "# " << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  if (rows) {
    os << "quantity,analytic,mc_mean,mc_se,z,flagged\n";
    for (const auto& row : *rows)
      os << row["quantity"].get<std::string>() << ',' << row["analytic"].dump() << ',' << row["mc_mean"].dump() << ','
         << row["mc_se"].dump() << ',' << row["z"].dump() << ',' << (row["flagged"].get<bool>() ? "true" : "false")
         << '\n';
  } else {
    os << "key,value\n";
    flatten(result, "", os);
  }
  return os.str();
}

}  // namespace

ExecuteResult execute(const json& config, const ExecuteOptions& opts) {
  if (!config.is_object()) throw ConfigError("", "config must be a JSON object");
  const std::string command = require_string(config, "command", "");
  const json& seed_json = io::require(config, "seed", "");
  if (!seed_json.is_number_integer() || (seed_json.is_number_integer() && !seed_json.is_number_unsigned() &&
                                         seed_json.get<long long>() < 0))
    throw ConfigError("/seed", "seed must be a non-negative 64-bit integer");
  const auto seed = seed_json.get<std::uint64_t>();

  json meta = {{"command", command},
               {"config_hash", config_hash(config)},
               {"seed", seed},
               {"tool_version", kToolVersion},
               {"rng", Philox4x32::kName}};

  ExecuteResult out;
  if (opts.mode == Mode::kCompare) {
    if (command == "simulate") throw ConfigError("/command", "compare needs an analytic command, not 'simulate'");
    const Evaluator eval = evaluator_for(command, "/command");
    const Evaluation ev = eval({config, "", seed, opts.threads, true, true, opts.dump});
    const json rows = compare_rows(ev.rows);
    std::size_t flagged = 0;
    for (const auto& row : rows) flagged += row["flagged"].get<bool>() ? 1 : 0;
    meta["mode"] = "compare";
    const json result = {{"analytic", ev.analytic}, {"mc", ev.mc}, {"n_flagged", flagged}};
    out.output = render(meta, result, &rows, opts.format);
    out.dump = ev.dump;
    return out;
  }

  meta["mode"] = "run";
  if (command == "simulate") {
    const std::string target = require_string(config, "target", "");
    if (target == "simulate") throw ConfigError("/target", "target must be an analytic command");
    const Evaluation ev = evaluator_for(target, "/target")({config, "", seed, opts.threads, false, true, opts.dump});
    out.output = render(meta, ev.mc, nullptr, opts.format);
    out.dump = ev.dump;
    return out;
  }
  const Evaluation ev = evaluator_for(command, "/command")({config, "", seed, opts.threads, true, false, false});
  out.output = render(meta, ev.analytic, nullptr, opts.format);
  return out;
}

int run(const CommandLine& cmd, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(cmd.config_path);
    if (!in) throw ConfigError("", "cannot open config file '" + cmd.config_path + "'");
    json config;
    try {
      config = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    const ExecuteResult result =
        execute(config, {cmd.mode, cmd.format, cmd.threads, cmd.dump_path.has_value()});
    if (cmd.out_path) {
      std::ofstream f(*cmd.out_path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write '" + *cmd.out_path + "'");
      f << result.output;
    } else {
      out << result.output;
    }
    if (cmd.dump_path) {
      if (result.dump.empty()) {
        err << "warning: this command produces no sample-level data; nothing dumped\n";
      } else {
        std::ofstream f(*cmd.dump_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + *cmd.dump_path + "'");
        f << result.dump;
      }
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    err << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace polymoments::cli
