#include "fracgauge/cli.hpp"

#include "fracgauge/operators.hpp"
#include "fracgauge/sobolev.hpp"
#include "fracgauge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

namespace fracgauge {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kInteriorMargin = 0.1;

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": missing or of the wrong type");
  }
}

template <class T>
T get_or(const json& j, const std::string& key, const std::string& where, T fallback) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

Domain parse_domain(const json& j) {
  reject_unknown(j, "domain", {"kind", "box_bounds"});
  const auto kind = get<std::string>(j, "kind", "domain");
  if (kind == "unit_disk") {
    if (j.contains("box_bounds")) throw ConfigError("domain.box_bounds: only valid for kind 'box'");
    return Domain::unit_disk();
  }
  if (kind != "box") throw ConfigError("domain.kind: expected 'unit_disk' or 'box'");
  const auto b = get<std::vector<std::vector<double>>>(j, "box_bounds", "domain");
  if (b.size() != 2 || b[0].size() != 2 || b[1].size() != 2) {
    throw ConfigError("domain.box_bounds: expected [[xlo, xhi], [ylo, yhi]]");
  }
  try {
    return Domain::box({b[0][0], b[0][1]}, {b[1][0], b[1][1]});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("domain.box_bounds: ") + e.what());
  }
}

MeasureSpec parse_measure(const json& j, const std::string& where) {
  reject_unknown(j, where, {"kind", "density", "scale", "value", "coefficients", "atoms"});
  MeasureSpec m;
  const auto kind = get<std::string>(j, "kind", where);
  if (kind == "zero") {
    m.kind = MeasureSpec::Kind::Zero;
    if (j.size() != 1) throw ConfigError(where + ": kind 'zero' takes no other keys");
    return m;
  }
  if (kind == "atoms") {
    m.kind = MeasureSpec::Kind::Atoms;
    if (!j.contains("atoms") || !j.at("atoms").is_array()) throw ConfigError(where + ".atoms: expected a list");
    for (const auto& a : j.at("atoms")) {
      reject_unknown(a, where + ".atoms[]", {"x", "y", "mass"});
      const Atom atom{{get<double>(a, "x", where + ".atoms[]"), get<double>(a, "y", where + ".atoms[]")},
                      get<double>(a, "mass", where + ".atoms[]")};
      if (!(atom.mass >= 0.0)) throw ConfigError(where + ".atoms[].mass: must be nonnegative");
      m.atoms.push_back(atom);
    }
    return m;
  }
  if (kind != "density") throw ConfigError(where + ".kind: expected 'zero', 'density' or 'atoms'");
  m.kind = MeasureSpec::Kind::Density;
  const auto d = get<std::string>(j, "density", where);
  if (d == "phi") {
    m.density = MeasureSpec::Density::Phi;
  } else if (d == "constant") {
    m.density = MeasureSpec::Density::Constant;
  } else if (d == "radial_polynomial") {
    m.density = MeasureSpec::Density::RadialPolynomial;
  } else {
    throw ConfigError(where + ".density: expected 'phi', 'constant' or 'radial_polynomial'");
  }
  m.scale = get_or<double>(j, "scale", where, 1.0);
  if (!(m.scale >= 0.0) || !std::isfinite(m.scale)) throw ConfigError(where + ".scale: must be finite and >= 0");
  m.value = get_or<double>(j, "value", where, 1.0);
  if (!(m.value >= 0.0) || !std::isfinite(m.value)) throw ConfigError(where + ".value: must be finite and >= 0");
  if (m.density == MeasureSpec::Density::RadialPolynomial) {
    m.coefficients = get<std::vector<double>>(j, "coefficients", where);
    if (m.coefficients.empty()) throw ConfigError(where + ".coefficients: must not be empty");
  } else if (j.contains("coefficients")) {
    throw ConfigError(where + ".coefficients: only valid for radial_polynomial");
  }
  if (j.contains("atoms")) throw ConfigError(where + ".atoms: only valid for kind 'atoms'");
  return m;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const ojson& j) { write_text(path, j.dump(2) + "\n"); }

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const Mesh& mesh, const Eigen::VectorXd& value,
               const std::vector<double>& bound) {
  std::string s = "node_x,node_y,delta,value,bound,margin\n";
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double v = value[static_cast<Eigen::Index>(i)];
    s += fmt17(mesh.nodes[i].x) + "," + fmt17(mesh.nodes[i].y) + "," + fmt17(mesh.delta[i]) + "," + fmt17(v) + "," +
         fmt17(bound[i]) + "," + fmt17(bound[i] - v) + "\n";
  }
  write_text(path, s);
}

std::filesystem::path prepare_out(const std::string& out_dir) {
  std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct Instance {
  FracParams params;
  KernelMatrix K;
};

Instance assemble(const RunConfig& c, std::ostream& log) {
  const FracParams params{c.alpha, 2};
  const Mesh mesh = build_mesh(c.domain, c.resolution);
  log << "mesh: " << mesh.size() << " nodes\n";
  return {params, assemble_green_matrix(default_backend(params, c.domain), mesh)};
}

ojson config_echo(const RunConfig& c, std::size_t nodes) {
  return {{"alpha", c.alpha},
          {"resolution", c.resolution},
          {"nodes", nodes},
          {"domain", c.domain.kind() == Domain::Kind::UnitDisk ? "unit_disk" : "box"},
          {"A_mode", c.a_mode == AMode::Calibrated ? "calibrated" : "literature"}};
}

double interior_mean_or_nan(const Mesh& mesh, const Eigen::VectorXd& v) {
  try {
    return interior_mean(mesh, v, kInteriorMargin);
  } catch (const std::invalid_argument&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

// Nonzero measure or the Lebesgue weights when the config leaves it at zero.
WeightVector reference_measure(const RunConfig& c, const KernelMatrix& K) {
  WeightVector nu = discretize(c.nu, K, c.a_mode);
  if (nu.total() == 0.0) nu = lebesgue_weights(K.mesh);
  return nu;
}

int finish_check(const std::filesystem::path& dir, const std::string& which, ojson body, bool pass,
                 std::ostream& log) {
  ojson j;
  j["check"] = which;
  j["pass"] = pass;
  for (auto& [k, v] : body.items()) j[k] = v;
  write_json(dir / ("verify_" + which + ".json"), j);
  log << "verify " << which << ": " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

RunConfig parse_config(const json& j) {
  reject_unknown(j, "config", {"domain", "alpha", "resolution", "omega", "nu", "tolerance", "max_terms", "seed",
                               "A_mode", "output"});
  RunConfig c;
  if (!j.contains("domain")) throw ConfigError("config.domain: missing");
  c.domain = parse_domain(j.at("domain"));
  c.alpha = get<double>(j, "alpha", "config");
  if (!(c.alpha > 0.0 && c.alpha < 2.0)) throw ConfigError("config.alpha: must lie in (0, 2)");
  c.resolution = get<int>(j, "resolution", "config");
  if (c.resolution < 4) throw ConfigError("config.resolution: must be at least 4");
  if (j.contains("omega")) c.omega = parse_measure(j.at("omega"), "omega");
  if (j.contains("nu")) c.nu = parse_measure(j.at("nu"), "nu");
  c.tolerance = get_or<double>(j, "tolerance", "config", c.tolerance);
  if (!(c.tolerance > 0.0)) throw ConfigError("config.tolerance: must be positive");
  c.max_terms = get_or<int>(j, "max_terms", "config", c.max_terms);
  if (c.max_terms < 1) throw ConfigError("config.max_terms: must be positive");
  c.seed = get_or<std::uint64_t>(j, "seed", "config", c.seed);
  const auto mode = get_or<std::string>(j, "A_mode", "config", "calibrated");
  if (mode == "calibrated") {
    c.a_mode = AMode::Calibrated;
  } else if (mode == "literature") {
    c.a_mode = AMode::Literature;
  } else {
    throw ConfigError("config.A_mode: expected 'calibrated' or 'literature'");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, "output", {"report", "csv", "summary"});
    c.output.report = get_or<std::string>(o, "report", "output", c.output.report);
    c.output.csv = get_or<std::string>(o, "csv", "output", c.output.csv);
    c.output.summary = get_or<std::string>(o, "summary", "output", c.output.summary);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

WeightVector discretize(const MeasureSpec& spec, const KernelMatrix& K, AMode mode) {
  const Mesh& mesh = K.mesh;
  switch (spec.kind) {
    case MeasureSpec::Kind::Zero:
      return WeightVector{std::vector<double>(mesh.size(), 0.0)};
    case MeasureSpec::Kind::Atoms:
      try {
        return snap_atoms(mesh, spec.atoms);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("atoms: ") + e.what());
      }
    case MeasureSpec::Kind::Density:
      break;
  }
  if (spec.density == MeasureSpec::Density::Phi) return phi_weights(K, mode, spec.scale);
  const Point c = mesh.domain.centroid();
  try {
    return discretize_density(mesh, [&](Point x) {
      if (spec.density == MeasureSpec::Density::Constant) return spec.scale * spec.value;
      const double r = distance(x, c);
      double s = 0.0;
      for (auto it = spec.coefficients.rbegin(); it != spec.coefficients.rend(); ++it) s = s * r + *it;
      return spec.scale * s;
    });
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("density: ") + e.what());
  }
}

int cmd_solve(const RunConfig& c, const std::string& out_dir, std::ostream& log) {
  const auto dir = prepare_out(out_dir);
  const Instance inst = assemble(c, log);
  const SchrodingerOp op(inst.K, discretize(c.omega, inst.K, c.a_mode));
  const WeightVector nu = discretize(c.nu, inst.K, c.a_mode);
  const SolveReport r = neumann_solve(op, nu, c.tolerance, c.max_terms);

  std::vector<double> bound(inst.K.size(), std::numeric_limits<double>::quiet_NaN());
  ojson summary = config_echo(c, inst.K.size());
  summary["command"] = "solve";
  if (r.converged) {
    const BoundFitReport fit = fit_exponential_bounds(op, r);
    bound = fit.bound;
    summary["fitted_C_upper"] = fit.fitted_C_upper;
    summary["C1_envelope"] = fit.C1_envelope;
  }
  summary["interior_margin"] = kInteriorMargin;
  summary["interior_mean"] = interior_mean_or_nan(inst.K.mesh, r.values);
  summary["divergence_declared"] = !r.converged;
  write_json(dir / c.output.report, to_json(r));
  write_json(dir / c.output.summary, summary);
  write_csv(dir / c.output.csv, inst.K.mesh, r.values, bound);
  log << "solve: terms " << r.terms_used << ", |T| " << r.t_norm_estimate << ", "
      << (r.converged ? "converged" : "divergence declared") << "\n";
  return r.converged ? kExitOk : kExitDivergence;
}

int cmd_gauge(const RunConfig& c, const std::string& out_dir, std::ostream& log) {
  const auto dir = prepare_out(out_dir);
  const Instance inst = assemble(c, log);
  const SchrodingerOp op(inst.K, discretize(c.omega, inst.K, c.a_mode));
  const SolveReport r = gauge(op, c.tolerance, c.max_terms);

  // For omega = gamma phi dx the gauge is the constant 1/(1 - gamma).
  double expected = std::numeric_limits<double>::quiet_NaN();
  if (c.omega.kind == MeasureSpec::Kind::Zero) expected = 1.0;
  if (c.omega.kind == MeasureSpec::Kind::Density && c.omega.density == MeasureSpec::Density::Phi &&
      c.omega.scale < 1.0) {
    expected = 1.0 / (1.0 - c.omega.scale);
  }
  ojson summary = config_echo(c, inst.K.size());
  summary["command"] = "gauge";
  summary["interior_margin"] = kInteriorMargin;
  summary["interior_mean"] = interior_mean_or_nan(inst.K.mesh, r.values);
  summary["expected_constant"] = std::isnan(expected) ? ojson(nullptr) : ojson(expected);
  summary["divergence_declared"] = !r.converged;
  write_json(dir / c.output.report, to_json(r));
  write_json(dir / c.output.summary, summary);
  write_csv(dir / c.output.csv, inst.K.mesh, r.values, std::vector<double>(inst.K.size(), expected));
  log << "gauge: terms " << r.terms_used << ", |T| " << r.t_norm_estimate << ", "
      << (r.converged ? "converged" : "divergence declared") << "\n";
  return r.converged ? kExitOk : kExitDivergence;
}

int cmd_verify(const RunConfig& c, const std::string& which, const std::string& out_dir, std::ostream& log) {
  const auto& names = verify_checks();
  if (std::find(names.begin(), names.end(), which) == names.end()) {
    throw ConfigError("unknown check '" + which + "'");
  }
  const auto dir = prepare_out(out_dir);
  ojson body = config_echo(c, 0);

  if (which == "hardy") {
    body.erase("nodes");
    ojson table = ojson::array();
    bool pass = true;
    for (int k = 1; k <= 9; ++k) {
      const double a = 1.0 + 0.1 * k;
      const double v = hardy_constant(a, 2);
      table.push_back({{"alpha", a}, {"C1", v}});
      log << "  alpha " << a << "  C1 " << v << "\n";
      pass = pass && std::isfinite(v) && v > 0.0;
    }
    // Decay towards alpha = 2.
    double prev = std::numeric_limits<double>::infinity();
    for (double a : {1.5, 1.7, 1.9, 1.99}) {
      const double v = hardy_constant(a, 2);
      pass = pass && v < prev;
      prev = v;
    }
    const double decay = hardy_constant(1.9999, 2) / hardy_constant(1.9, 2);
    body["decay_ratio_1.9999_over_1.9"] = decay;
    pass = pass && decay < 0.1;
    body["table"] = table;
    return finish_check(dir, which, body, pass, log);
  }
  if (which == "equivalence") {
    body.erase("nodes");
    if (c.domain.kind() != Domain::Kind::UnitDisk) throw ConfigError("equivalence needs domain.kind = unit_disk");
    const FracParams params{c.alpha, 2};
    const RatioRange r1 = check_green_equivalence(params, 10000, c.seed);
    const RatioRange r2 = check_green_equivalence(params, 20000, c.seed);
    const bool stable = r2.lo > 0.0 && r1.lo / r2.lo <= 2.0 && r2.hi / r1.hi <= 2.0;
    const KernelMatrix K = assemble_green_matrix(default_backend(params, c.domain), build_mesh(c.domain, c.resolution));
    const RatioRange g1 = g1_envelope(K);
    body["ratio_10k"] = {r1.lo, r1.hi};
    body["ratio_20k"] = {r2.lo, r2.hi};
    body["g1_over_m"] = {g1.lo, g1.hi};
    const bool pass = r1.lo > 0.0 && std::isfinite(r1.hi) && stable && g1.lo > 0.0 && std::isfinite(g1.hi);
    return finish_check(dir, which, body, pass, log);
  }

  const Instance inst = assemble(c, log);
  const KernelMatrix& K = inst.K;
  body["nodes"] = K.size();

  if (which == "gphi") {
    const double dev = check_gphi(K, c.a_mode, kInteriorMargin);
    body["interior_margin"] = kInteriorMargin;
    body["max_deviation"] = dev;
    return finish_check(dir, which, body, dev <= 0.03, log);
  }
  if (which == "counterexample") {
    const CounterexampleReport r = run_counterexample(K, c.a_mode, 20, kInteriorMargin);
    bool terms_ok = true;
    for (double m : r.term_means) terms_ok = terms_ok && std::abs(m - 1.0) <= 0.03;
    const bool sum_ok = std::abs(r.partial_sum_mean - (r.J + 1)) <= 0.03 * (r.J + 1);
    body["report"] = to_json(r);
    return finish_check(dir, which, body, r.t_norm < 1.0 && terms_ok && sum_ok, log);
  }

  const SchrodingerOp op(K, discretize(c.omega, K, c.a_mode));
  if (which == "tnorm") {
    const double a = operator_norm(op);
    const double b = embedding_constant(K, op.omega());
    body["operator_norm"] = a;
    body["embedding_constant"] = b;
    body["gap"] = std::abs(a - b);
    return finish_check(dir, which, body, std::abs(a - b) <= 1e-8, log);
  }
  if (which == "fubini") {
    const WeightVector nu = reference_measure(c, K);
    const SolveReport r = neumann_solve(op, nu, c.tolerance, c.max_terms);
    const double res = fubini_check(op, nu, r.terms_used);
    body["terms"] = r.terms_used;
    body["residual"] = res;
    return finish_check(dir, which, body, res <= 1e-10, log);
  }
  if (which == "bounds") {
    const WeightVector nu = lebesgue_weights(K.mesh);
    const SolveReport r = neumann_solve(op, nu, c.tolerance, c.max_terms);
    if (!r.converged) {
      body["converged"] = false;
      finish_check(dir, which, body, false, log);
      return kExitDivergence;
    }
    const BoundFitReport fit = fit_exponential_bounds(op, r);
    body["exponential"] = to_json(fit);
    body["exponential"].erase("margins");
    bool pass = fit.violations == 0;
    if (c.domain.kind() == Domain::Kind::UnitDisk) {
      const SolveReport g = gauge(op, c.tolerance, c.max_terms);
      if (g.converged) {
        body["poisson"] = to_json(gauge_poisson_bounds(op, g));
      } else {
        pass = false;
      }
    }
    write_csv(dir / c.output.csv, K.mesh, r.values, fit.bound);
    return finish_check(dir, which, body, pass, log);
  }
  // coercivity: test function u = G1, which vanishes at the boundary like delta^{alpha/2}.
  const double beta2 = embedding_constant(K, op.omega());
  const Eigen::VectorXd u = K.entries * lebesgue_weights(K.mesh).view();
  const WeightVector raw = phi_weights_unscaled(inst.params, K.mesh);
  const double A = phi_constant(c.a_mode, K, raw);
  const CoercivityReport cr = coercivity_check(inst.params, K.mesh, op.omega(), u, A, beta2);
  body["beta2"] = beta2;
  body["B_value"] = cr.B_value;
  body["lower"] = cr.lower;
  body["relative_gap"] = (cr.B_value - cr.lower) / std::abs(cr.lower);
  // The Gagliardo form and the Green matrix are separate discretizations, so
  // the inequality is checked with a 5% allowance.
  const bool pass = beta2 < 1.0 && cr.B_value >= cr.lower - 0.05 * std::abs(cr.lower);
  return finish_check(dir, which, body, pass, log);
}

}  // namespace fracgauge
