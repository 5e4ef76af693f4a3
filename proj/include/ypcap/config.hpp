#pragma once

// Run configuration: flat `key = value` entries grouped in [sections],
// SI units throughout. `#` starts a comment. Unknown sections or keys are
// errors. See configs/*.cfg for annotated examples.

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "ypcap/eos.hpp"
#include "ypcap/errors.hpp"
#include "ypcap/model.hpp"
#include "ypcap/paths.hpp"
#include "ypcap/shock1d.hpp"

namespace ypcap {

enum class EosKind { Analytic, Table };

struct EosConfig {
  EosKind kind = EosKind::Analytic;
  AnalyticEos analytic;  // fully resolved, including matched defaults
  std::string table_path;
  RangePolicy policy = RangePolicy::Strict;

  friend bool operator==(const EosConfig&, const EosConfig&) = default;
};

struct SurfaceConfig {
  int samples = 200;
  double p_c = 0.0;  // cap position to draw; 0 selects p_c0

  friend bool operator==(const SurfaceConfig&, const SurfaceConfig&) = default;
};

struct TabulateConfig {
  double rho_min = 0.0;  // 0 selects 0.8 rho_ref
  double rho_max = 0.0;  // 0 selects 1.5 rho_ref
  int nr = 50;
  double t_min = 250.0;
  double t_max = 2000.0;
  int nt = 50;

  friend bool operator==(const TabulateConfig&, const TabulateConfig&) = default;
};

struct OutputConfig {
  std::string dir = "out";
  int stride = 1;

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

/// Table-style material inputs; MaterialParams is derived from these.
struct MaterialInputs {
  double rho0 = 0.0;
  double t0 = 298.15;
  double g0 = 0.0;
  double nu0 = 0.25;
  ShearMode shear_mode = ShearMode::ConstantG;
  double h = 0.0;
  double beta_max = 0.0;
  double omega = 1.0;
  double z_max = 0.0;
  double p_c0 = 0.0;
  double x = 1.0;
  double alpha0 = 0.0;
  double gamma0 = 0.0;
  double p_y = 0.0;
  bool cap = true;

  friend bool operator==(const MaterialInputs&, const MaterialInputs&) = default;
};

struct RunConfig {
  MaterialInputs material;
  EosConfig eos;
  SolverParams solver;
  double cfl = 0.5;
  int cells = 500;
  LoadingProgram crush;
  LoadingProgram triax;
  ShockConfig shock;
  SurfaceConfig surface;
  TabulateConfig tabulate;
  OutputConfig output;

  RunConfig() {
    crush.kind = ProgramKind::Hydrostatic;
    crush.target_pressure = 2e10;
    crush.n_steps = 100000;
    crush.unload = true;
    triax.kind = ProgramKind::Triaxial;
    triax.n_steps = 2000;
  }

  MaterialParams params() const {
    MaterialParams p;
    p.rho0 = material.rho0;
    p.t0 = material.t0;
    p.elastic = {material.g0, material.nu0, material.shear_mode};
    p.crush = {material.h, material.beta_max, material.omega, material.z_max};
    p.yield = make_yield_params(material.alpha0, material.gamma0, material.p_y, material.x, material.p_c0);
    p.solver = solver;
    p.cap_enabled = material.cap;
    return p;
  }

  ShockConfig shock_config() const {
    ShockConfig s = shock;
    s.cells = cells;
    s.cfl = cfl;
    return s;
  }

  AnyEos make_eos() const {
    if (eos.kind == EosKind::Table) return AnyEos(EosTable::load(eos.table_path, eos.policy));
    AnalyticEos a = eos.analytic;
    a.policy = eos.policy;
    return AnyEos(a);
  }

  /// Program blocks are validated by the subcommand that runs them.
  void validate() const {
    params().validate();
    if (eos.kind == EosKind::Analytic) eos.analytic.validate();
    if (eos.kind == EosKind::Table && eos.table_path.empty()) throw ValidationError("eos: table path required");
    shock_config().validate();
    if (!(tabulate.t_max > tabulate.t_min)) throw ValidationError("tabulate: t_max > t_min violated");
    if (tabulate.rho_max != 0.0 && !(tabulate.rho_max > tabulate.rho_min))
      throw ValidationError("tabulate: rho_max > rho_min violated");
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

struct Field {
  std::string text;
  int line;
  int column;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_number(const Field& f) {
  double v = 0.0;
  const char* first = f.text.data();
  const char* last = first + f.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ParseError(f.line, f.column, "expected a number, got '" + f.text + "'");
  return v;
}

inline int to_int(const Field& f) {
  int v = 0;
  const char* first = f.text.data();
  const char* last = first + f.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError(f.line, f.column, "expected an integer, got '" + f.text + "'");
  return v;
}

inline bool to_bool(const Field& f) {
  if (f.text == "true" || f.text == "yes" || f.text == "1") return true;
  if (f.text == "false" || f.text == "no" || f.text == "0") return false;
  throw ParseError(f.line, f.column, "expected true or false, got '" + f.text + "'");
}

inline std::vector<double> to_list(const Field& f) {
  std::vector<double> out;
  if (trim(f.text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = f.text.find(',', start);
    const std::string raw = f.text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto lead = raw.find_first_not_of(" \t");
    out.push_back(to_number({trim(raw), f.line, f.column + static_cast<int>(start + (lead == std::string::npos ? 0 : lead))}));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] inline void invalid(const Field& f, const std::string& invariant) {
  throw ValidationError("line " + std::to_string(f.line) + ": " + invariant + " violated (value " + f.text + ")");
}

using Setter = std::function<void(RunConfig&, const Field&)>;

template <class Get>
Setter num(Get get, std::function<bool(double)> ok = {}, std::string invariant = {}) {
  return [=](RunConfig& c, const Field& f) {
    const double v = to_number(f);
    if (ok && !ok(v)) invalid(f, invariant);
    get(c) = v;
  };
}

template <class Get>
Setter integer(Get get, int min_value, std::string invariant) {
  return [=](RunConfig& c, const Field& f) {
    const int v = to_int(f);
    if (v < min_value) invalid(f, invariant);
    get(c) = v;
  };
}

template <class Get>
Setter boolean(Get get) {
  return [=](RunConfig& c, const Field& f) { get(c) = to_bool(f); };
}

inline const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = [] {
    std::map<std::string, std::map<std::string, Setter>> m;
    auto pos = [](double v) { return v > 0.0; };
    auto neg = [](double v) { return v < 0.0; };
    auto nonneg = [](double v) { return v >= 0.0; };

    auto& mat = m["material"];
    mat["rho0"] = num([](RunConfig& c) -> double& { return c.material.rho0; }, pos, "material: rho0 > 0");
    mat["T0"] = num([](RunConfig& c) -> double& { return c.material.t0; }, nonneg, "material: T0 >= 0");
    mat["G0"] = num([](RunConfig& c) -> double& { return c.material.g0; }, pos, "elastic: G0 > 0");
    mat["nu0"] = num([](RunConfig& c) -> double& { return c.material.nu0; },
                     [](double v) { return v > 0.0 && v < 0.5; }, "elastic: 0 < nu0 < 0.5");
    mat["shear_mode"] = [](RunConfig& c, const Field& f) {
      if (f.text == "constant_g") c.material.shear_mode = ShearMode::ConstantG;
      else if (f.text == "constant_nu") c.material.shear_mode = ShearMode::ConstantNu;
      else throw ParseError(f.line, f.column, "expected constant_g or constant_nu, got '" + f.text + "'");
    };
    mat["H"] = num([](RunConfig& c) -> double& { return c.material.h; }, pos, "crush: H > 0");
    mat["beta_max"] = num([](RunConfig& c) -> double& { return c.material.beta_max; }, nonneg, "crush: beta_max >= 0");
    mat["omega"] = num([](RunConfig& c) -> double& { return c.material.omega; }, pos, "crush: omega > 0");
    mat["z_max"] = num([](RunConfig& c) -> double& { return c.material.z_max; },
                       [](double v) { return v >= 0.0 && v < 1.0; }, "crush: 0 <= z_max < 1");
    mat["p_c0"] = num([](RunConfig& c) -> double& { return c.material.p_c0; }, neg, "yield: p_c0 < 0");
    mat["X"] = num([](RunConfig& c) -> double& { return c.material.x; },
                   [](double v) { return v >= 0.0 && v <= 1.0; }, "yield: 0 <= X <= 1");
    mat["alpha0"] = num([](RunConfig& c) -> double& { return c.material.alpha0; }, pos, "yield: alpha0 > 0");
    mat["gamma0"] = num([](RunConfig& c) -> double& { return c.material.gamma0; }, pos, "yield: gamma0 > 0");
    mat["P_y"] = num([](RunConfig& c) -> double& { return c.material.p_y; }, pos, "yield: P_y > 0");
    mat["cap"] = boolean([](RunConfig& c) -> bool& { return c.material.cap; });

    auto& eos = m["eos"];
    eos["kind"] = [](RunConfig& c, const Field& f) {
      if (f.text == "analytic") c.eos.kind = EosKind::Analytic;
      else if (f.text == "table") c.eos.kind = EosKind::Table;
      else throw ParseError(f.line, f.column, "expected analytic or table, got '" + f.text + "'");
    };
    eos["table"] = [](RunConfig& c, const Field& f) { c.eos.table_path = f.text; };
    eos["range"] = [](RunConfig& c, const Field& f) {
      if (f.text == "strict") c.eos.policy = RangePolicy::Strict;
      else if (f.text == "clamp") c.eos.policy = RangePolicy::Clamp;
      else throw ParseError(f.line, f.column, "expected strict or clamp, got '" + f.text + "'");
    };
    eos["rho_ref"] = num([](RunConfig& c) -> double& { return c.eos.analytic.rho_ref; }, pos, "analytic EOS: rho_ref > 0");
    eos["T_ref"] = num([](RunConfig& c) -> double& { return c.eos.analytic.t_ref; }, nonneg, "analytic EOS: t_ref >= 0");
    eos["K0"] = num([](RunConfig& c) -> double& { return c.eos.analytic.k0; }, pos, "analytic EOS: k0 > 0");
    eos["gruneisen"] = num([](RunConfig& c) -> double& { return c.eos.analytic.gamma0; });
    eos["cv"] = num([](RunConfig& c) -> double& { return c.eos.analytic.cv; }, pos, "analytic EOS: cv > 0");
    eos["n"] = num([](RunConfig& c) -> double& { return c.eos.analytic.stiffening; }, pos,
                   "analytic EOS: stiffening exponent > 0");

    auto& sol = m["solver"];
    sol["tol"] = num([](RunConfig& c) -> double& { return c.solver.tol; }, pos, "solver: tol > 0");
    sol["max_iter"] = integer([](RunConfig& c) -> int& { return c.solver.max_iter; }, 1, "solver: max_iter >= 1");
    sol["max_halvings"] =
        integer([](RunConfig& c) -> int& { return c.solver.max_halvings; }, 0, "solver: max_halvings >= 0");
    sol["p_c_guard"] = num([](RunConfig& c) -> double& { return c.solver.p_c_guard; },
                           [](double v) { return v > 1.0; }, "solver: p_c_guard > 1");
    sol["cfl"] = num([](RunConfig& c) -> double& { return c.cfl; },
                     [](double v) { return v > 0.0 && v <= 1.0; }, "shock: 0 < cfl <= 1");
    sol["cells"] = integer([](RunConfig& c) -> int& { return c.cells; }, 1, "shock: cells >= 1");

    auto& cr = m["crush"];
    cr["target_ev"] = num([](RunConfig& c) -> double& { return c.crush.target_ev; });
    cr["target_pressure"] =
        num([](RunConfig& c) -> double& { return c.crush.target_pressure; }, nonneg, "program: target_pressure >= 0");
    cr["ev_step"] = num([](RunConfig& c) -> double& { return c.crush.ev_step; });
    cr["n_steps"] = integer([](RunConfig& c) -> int& { return c.crush.n_steps; }, 1, "program: n_steps >= 1");
    cr["unload"] = boolean([](RunConfig& c) -> bool& { return c.crush.unload; });

    auto& tx = m["triax"];
    tx["confinement"] = num([](RunConfig& c) -> double& { return c.triax.confinement; },
                            [](double v) { return v != 0.0; }, "program: triaxial confinement non-zero");
    tx["axial_increment"] = num([](RunConfig& c) -> double& { return c.triax.axial_increment; });
    tx["axial_strain_rate"] = num([](RunConfig& c) -> double& { return c.triax.axial_strain_rate; }, pos,
                                  "program: axial_strain_rate > 0");
    tx["ramp_steps"] = integer([](RunConfig& c) -> int& { return c.triax.ramp_steps; }, 1, "program: ramp_steps >= 1");
    tx["n_steps"] = integer([](RunConfig& c) -> int& { return c.triax.n_steps; }, 1, "program: n_steps >= 1");

    auto& sh = m["shock"];
    sh["cavity_radius"] =
        num([](RunConfig& c) -> double& { return c.shock.cavity_radius; }, pos, "shock: cavity_radius > 0");
    sh["outer_radius"] = num([](RunConfig& c) -> double& { return c.shock.outer_radius; }, pos, "shock: outer_radius > 0");
    sh["t_final"] = num([](RunConfig& c) -> double& { return c.shock.t_final; }, pos, "shock: t_final > 0");
    sh["c_q"] = num([](RunConfig& c) -> double& { return c.shock.c_q; }, nonneg, "shock: c_q >= 0");
    sh["c_l"] = num([](RunConfig& c) -> double& { return c.shock.c_l; }, nonneg, "shock: c_l >= 0");
    sh["sample_dt"] = num([](RunConfig& c) -> double& { return c.shock.sample_dt; }, pos, "shock: sample_dt > 0");
    sh["max_dt_cuts"] =
        integer([](RunConfig& c) -> int& { return c.shock.max_dt_cuts; }, 0, "shock: max_dt_cuts >= 0");
    sh["gauges"] = [](RunConfig& c, const Field& f) { c.shock.gauges = to_list(f); };
    sh["snapshot_times"] = [](RunConfig& c, const Field& f) { c.shock.snapshot_times = to_list(f); };
    sh["p_peak"] = num([](RunConfig& c) -> double& { return c.shock.load.p_peak; }, pos, "load: p_peak > 0");
    sh["tau"] = num([](RunConfig& c) -> double& { return c.shock.load.tau; }, pos, "load: tau > 0");
    sh["t_end"] = num([](RunConfig& c) -> double& { return c.shock.load.t_end; }, nonneg, "load: t_end >= 0");

    auto& su = m["surface"];
    su["samples"] = integer([](RunConfig& c) -> int& { return c.surface.samples; }, 2, "surface: samples >= 2");
    su["p_c"] = num([](RunConfig& c) -> double& { return c.surface.p_c; },
                    [](double v) { return v <= 0.0; }, "surface: p_c <= 0");

    auto& tb = m["tabulate"];
    tb["rho_min"] = num([](RunConfig& c) -> double& { return c.tabulate.rho_min; }, nonneg, "tabulate: rho_min >= 0");
    tb["rho_max"] = num([](RunConfig& c) -> double& { return c.tabulate.rho_max; }, nonneg, "tabulate: rho_max >= 0");
    tb["nr"] = integer([](RunConfig& c) -> int& { return c.tabulate.nr; }, 2, "tabulate: nr >= 2");
    tb["t_min"] = num([](RunConfig& c) -> double& { return c.tabulate.t_min; }, nonneg, "tabulate: t_min >= 0");
    tb["t_max"] = num([](RunConfig& c) -> double& { return c.tabulate.t_max; }, pos, "tabulate: t_max > 0");
    tb["nt"] = integer([](RunConfig& c) -> int& { return c.tabulate.nt; }, 2, "tabulate: nt >= 2");

    auto& out = m["output"];
    out["dir"] = [](RunConfig& c, const Field& f) { c.output.dir = f.text; };
    out["stride"] = integer([](RunConfig& c) -> int& { return c.output.stride; }, 1, "output: stride >= 1");
    return m;
  }();
  return s;
}

}  // namespace detail

/// Parse and validate a configuration. Analytic EOS constants that are not
/// given default to the material: rho_ref = rho0 / (1 - z_max),
/// T_ref = T0, K0 from G0 and nu0.
inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string section;
  std::map<std::string, int> seen;  // "section.key" -> line
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = line.substr(0, line.find('#'));
    const std::string t = detail::trim(body);
    if (t.empty()) continue;
    const int col = static_cast<int>(body.find_first_not_of(" \t")) + 1;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(lineno, col, "unterminated section header");
      section = detail::trim(t.substr(1, t.size() - 2));
      if (!detail::schema().count(section)) throw ParseError(lineno, col + 1, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, col, "expected key = value");
    if (section.empty()) throw ParseError(lineno, col, "key outside of any [section]");
    const std::string key = detail::trim(body.substr(0, eq));
    if (key.empty()) throw ParseError(lineno, col, "missing key before '='");
    const std::string raw = body.substr(eq + 1);
    const std::string value = detail::trim(raw);
    const auto lead = raw.find_first_not_of(" \t");
    const int vcol = static_cast<int>(eq) + 2 + static_cast<int>(lead == std::string::npos ? 0 : lead);
    const auto& keys = detail::schema().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw ParseError(lineno, col, "unknown key '" + key + "' in [" + section + "]");
    const std::string full = section + "." + key;
    if (seen.count(full))
      throw ParseError(lineno, col, "duplicate key '" + key + "' (first set on line " + std::to_string(seen[full]) + ")");
    seen[full] = lineno;
    const bool list = key == "gauges" || key == "snapshot_times";
    if (value.empty() && !list) throw ParseError(lineno, vcol, "missing value for '" + key + "'");
    it->second(cfg, {value, lineno, vcol});
  }

  for (const char* req : {"material.rho0", "material.G0", "material.H", "material.omega", "material.z_max",
                          "material.p_c0", "material.alpha0", "material.gamma0", "material.P_y"})
    if (!seen.count(req)) throw ValidationError(std::string("missing required key ") + req);

  AnalyticEos& a = cfg.eos.analytic;
  const auto& mi = cfg.material;
  if (!seen.count("eos.rho_ref")) a.rho_ref = mi.rho0 / (1.0 - mi.z_max);
  if (!seen.count("eos.T_ref")) a.t_ref = mi.t0;
  if (!seen.count("eos.K0")) a.k0 = 2.0 * mi.g0 * (1.0 + mi.nu0) / (3.0 * (1.0 - 2.0 * mi.nu0));

  auto where = [&](const std::string& key) {
    const auto s = seen.find(key);
    return s == seen.end() ? std::string() : "line " + std::to_string(s->second) + ": ";
  };
  if (mi.gamma0 > mi.alpha0)
    throw ValidationError(where("material.gamma0") + "yield: 0 < R = gamma0/alpha0 <= 1 violated");
  if (!(cfg.shock.outer_radius > cfg.shock.cavity_radius))
    throw ValidationError(where("shock.outer_radius") + "shock: outer_radius > cavity_radius violated");
  for (double g : cfg.shock.gauges)
    if (!(g > cfg.shock.cavity_radius && g < cfg.shock.outer_radius))
      throw ValidationError(where("shock.gauges") + "shock: gauge radius inside the mesh violated");
  if (cfg.crush.target_pressure > 0.0 && !(cfg.crush.ev_step < 0.0))
    throw ValidationError(where("crush.ev_step") + "program: ev_step < 0 with a pressure target violated");
  if (cfg.eos.kind == EosKind::Table && cfg.eos.table_path.empty())
    throw ValidationError(where("eos.kind") + "eos: table path required");
  cfg.validate();
  return cfg;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  return parse_config(in);
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

}  // namespace detail

/// Canonical text form; parse_config(serialize(c)) == c.
inline std::string serialize(const RunConfig& c) {
  using detail::fmt;
  std::ostringstream o;
  const auto& m = c.material;
  o << "[material]\n"
    << "rho0 = " << fmt(m.rho0) << "\nT0 = " << fmt(m.t0) << "\nG0 = " << fmt(m.g0) << "\nnu0 = " << fmt(m.nu0)
    << "\nshear_mode = " << (m.shear_mode == ShearMode::ConstantG ? "constant_g" : "constant_nu")
    << "\nH = " << fmt(m.h) << "\nbeta_max = " << fmt(m.beta_max) << "\nomega = " << fmt(m.omega)
    << "\nz_max = " << fmt(m.z_max) << "\np_c0 = " << fmt(m.p_c0) << "\nX = " << fmt(m.x)
    << "\nalpha0 = " << fmt(m.alpha0) << "\ngamma0 = " << fmt(m.gamma0) << "\nP_y = " << fmt(m.p_y)
    << "\ncap = " << (m.cap ? "true" : "false") << "\n\n";
  const auto& a = c.eos.analytic;
  o << "[eos]\nkind = " << (c.eos.kind == EosKind::Analytic ? "analytic" : "table") << '\n';
  if (!c.eos.table_path.empty()) o << "table = " << c.eos.table_path << '\n';
  o << "range = " << (c.eos.policy == RangePolicy::Strict ? "strict" : "clamp") << "\nrho_ref = " << fmt(a.rho_ref)
    << "\nT_ref = " << fmt(a.t_ref) << "\nK0 = " << fmt(a.k0) << "\ngruneisen = " << fmt(a.gamma0)
    << "\ncv = " << fmt(a.cv) << "\nn = " << fmt(a.stiffening) << "\n\n";
  o << "[solver]\ntol = " << fmt(c.solver.tol) << "\nmax_iter = " << c.solver.max_iter
    << "\nmax_halvings = " << c.solver.max_halvings << "\np_c_guard = " << fmt(c.solver.p_c_guard)
    << "\ncfl = " << fmt(c.cfl) << "\ncells = " << c.cells << "\n\n";
  o << "[crush]\ntarget_ev = " << fmt(c.crush.target_ev) << "\ntarget_pressure = " << fmt(c.crush.target_pressure)
    << "\nev_step = " << fmt(c.crush.ev_step) << "\nn_steps = " << c.crush.n_steps
    << "\nunload = " << (c.crush.unload ? "true" : "false") << "\n\n";
  o << "[triax]\nconfinement = " << fmt(c.triax.confinement) << "\naxial_increment = " << fmt(c.triax.axial_increment)
    << "\naxial_strain_rate = " << fmt(c.triax.axial_strain_rate) << "\nramp_steps = " << c.triax.ramp_steps
    << "\nn_steps = " << c.triax.n_steps << "\n\n";
  const auto& s = c.shock;
  o << "[shock]\ncavity_radius = " << fmt(s.cavity_radius) << "\nouter_radius = " << fmt(s.outer_radius)
    << "\nt_final = " << fmt(s.t_final) << "\nc_q = " << fmt(s.c_q) << "\nc_l = " << fmt(s.c_l)
    << "\nsample_dt = " << fmt(s.sample_dt) << "\nmax_dt_cuts = " << s.max_dt_cuts
    << "\ngauges = " << detail::fmt_list(s.gauges) << "\nsnapshot_times = " << detail::fmt_list(s.snapshot_times)
    << "\np_peak = " << fmt(s.load.p_peak) << "\ntau = " << fmt(s.load.tau) << "\nt_end = " << fmt(s.load.t_end)
    << "\n\n";
  o << "[surface]\nsamples = " << c.surface.samples << "\np_c = " << fmt(c.surface.p_c) << "\n\n";
  const auto& t = c.tabulate;
  o << "[tabulate]\nrho_min = " << fmt(t.rho_min) << "\nrho_max = " << fmt(t.rho_max) << "\nnr = " << t.nr
    << "\nt_min = " << fmt(t.t_min) << "\nt_max = " << fmt(t.t_max) << "\nnt = " << t.nt << "\n\n";
  o << "[output]\ndir = " << c.output.dir << "\nstride = " << c.output.stride << '\n';
  return o.str();
}

}  // namespace ypcap
