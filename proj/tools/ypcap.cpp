// ypcap: command-line driver for the Yp-Cap material model.
//
//   ypcap surface --config FILE   composite yield surface samples
//   ypcap crush   --config FILE   hydrostatic crush curve (load and unload)
//   ypcap triax   --config FILE   triaxial compression at fixed confinement
//   ypcap shock   --config FILE   spherical cavity source, gauges and snapshots
//   ypcap eos     --config FILE   tabulated EOS in the ypcap-eos text format
//
// Exit codes: 0 success, 1 invalid input, 2 solver non-convergence, 3 other.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ypcap/config.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace ypcap;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<int> cells;
  bool clamp_eos = false;
  bool yp_only = false;
  std::optional<double> x_override;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// SHA-1 of "blob <size>\0<content>", the hash `git hash-object` prints.
std::string git_blob_sha1(const std::string& content) {
  const std::string data = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("SHA-1 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

template <class Row>
std::vector<Row> strided(const std::vector<Row>& rows, int stride) {
  if (stride <= 1) return rows;
  std::vector<Row> out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (i % static_cast<std::size_t>(stride) == 0 || i + 1 == rows.size()) out.push_back(rows[i]);
  return out;
}

GaugeRecord strided(const GaugeRecord& g, int stride) {
  GaugeRecord out;
  out.radius = g.radius;
  for (std::size_t i = 0; i < g.times.size(); ++i) {
    if (stride > 1 && i % static_cast<std::size_t>(stride) != 0 && i + 1 != g.times.size()) continue;
    out.times.push_back(g.times[i]);
    out.v_r.push_back(g.v_r[i]);
    out.p.push_back(g.p[i]);
    out.q.push_back(g.q[i]);
  }
  return out;
}

std::string number_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class Run {
 public:
  Run(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt) {
    source_ = read_file(opt.config);
    std::istringstream in(source_);
    cfg_ = parse_config(in);
    if (opt.cells) {
      if (*opt.cells < 1) throw ValidationError("--cells: cells >= 1 violated");
      cfg_.cells = *opt.cells;
    }
    if (opt.clamp_eos) cfg_.eos.policy = RangePolicy::Clamp;
    if (opt.yp_only) cfg_.material.cap = false;
    if (opt.x_override) cfg_.material.x = *opt.x_override;
    if (!opt.out.empty()) cfg_.output.dir = opt.out;
    cfg_.validate();
    dir_ = cfg_.output.dir;
    fs::create_directories(dir_);
  }

  const RunConfig& cfg() const { return cfg_; }

  template <class Writer>
  void emit(const std::string& name, Writer&& write) {
    const fs::path path = dir_ / name;
    std::ostringstream os;
    write(os);
    std::ofstream out(path, std::ios::binary);
    out << os.str();
    if (!out) throw std::runtime_error("cannot write " + path.string());
    outputs_.push_back({{"file", name}, {"sha1", git_blob_sha1(os.str())}});
  }

  json& extra() { return extra_; }

  void finish() {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m;
    m["command"] = command_;
    m["config_path"] = opt_.config;
    m["config_sha1"] = git_blob_sha1(source_);
    json ov = json::object();
    if (opt_.cells) ov["cells"] = *opt_.cells;
    if (opt_.clamp_eos) ov["clamp_eos"] = true;
    if (opt_.yp_only) ov["yp_only"] = true;
    if (opt_.x_override) ov["x"] = *opt_.x_override;
    if (!opt_.out.empty()) ov["out"] = opt_.out;
    m["overrides"] = ov;
    m["config"] = serialize(cfg_);
    m["outputs"] = outputs_;
    for (auto it = extra_.begin(); it != extra_.end(); ++it) m[it.key()] = it.value();
    m["wall_time_s"] = wall;
    std::ofstream out(dir_ / "manifest.json");
    out << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  Options opt_;
  std::string source_;
  RunConfig cfg_;
  fs::path dir_;
  json outputs_ = json::array();
  json extra_ = json::object();
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void cmd_surface(Run& run) {
  const MaterialParams p = run.cfg().params();
  const double p_c = run.cfg().surface.p_c == 0.0 ? p.yield.p_c0 : run.cfg().surface.p_c;
  if (p_c > p.yield.p_c0) throw ValidationError("surface: p_c <= p_c0 violated");
  const SurfaceState s = surface_at(p_c, p.yield);
  const auto rows = sample_surface(s, p.yield.p_y, run.cfg().surface.samples);
  run.emit("surface.csv", [&](std::ostream& os) {
    os.precision(12);
    os << "p,q_yp,q_mcc,active_branch\n";
    for (const auto& r : rows) os << r.p << ',' << r.q_yp << ',' << r.q_mcc << ',' << to_string(r.active) << '\n';
  });
  const auto cs = critical_state(s.p_c, s.m);
  run.extra()["surface"] = {{"p_c", s.p_c}, {"M", s.m},       {"alpha", s.alpha},
                            {"gamma", s.gamma}, {"p_cs", cs.p_cs}, {"q_cs", cs.q_cs}};
}

void cmd_crush(Run& run) {
  const auto eos = run.cfg().make_eos();
  const auto rows = run_hydrostatic(run.cfg().crush, run.cfg().params(), eos);
  run.emit("crush.csv", [&](std::ostream& os) { write_csv(os, strided(rows, run.cfg().output.stride)); });
  const auto peak = std::find_if(rows.begin(), rows.end(), [](const HydroRow& r) { return r.unloading; });
  const HydroRow& top = peak == rows.begin() || peak == rows.end() ? rows.back() : *(peak - 1);
  run.extra()["crush"] = {{"steps", rows.size() - 1},
                          {"peak_pressure", top.pressure},
                          {"z_final", rows.back().z},
                          {"plastic_volume_strain", rows.back().e_v_plastic}};
}

void cmd_triax(Run& run) {
  const auto eos = run.cfg().make_eos();
  const auto rows = run_triaxial(run.cfg().triax, run.cfg().params(), eos);
  run.emit("triax.csv", [&](std::ostream& os) { write_csv(os, strided(rows, run.cfg().output.stride)); });
  double q_peak = 0.0;
  for (const auto& r : rows) q_peak = std::max(q_peak, r.q);
  run.extra()["triax"] = {{"steps", rows.size() - 1}, {"q_peak", q_peak}, {"z_final", rows.back().z}};
}

void cmd_shock(Run& run) {
  const auto eos = run.cfg().make_eos();
  const ShockResult res = ypcap::run(run.cfg().shock_config(), run.cfg().params(), eos);
  json gauges = json::array();
  for (const auto& g : res.gauges) {
    run.emit("gauge_r" + number_tag(g.radius) + ".csv",
             [&](std::ostream& os) { write_csv(os, strided(g, run.cfg().output.stride)); });
    const PulseMetrics m = pulse_metrics(g.raw_t, g.raw_v);
    gauges.push_back({{"radius", g.radius}, {"peak_velocity", m.peak}, {"t_peak", m.t_peak}, {"fwhm", m.width}});
  }
  for (const auto& s : res.snapshots)
    run.emit("snapshot_t" + number_tag(s.time) + ".csv", [&](std::ostream& os) { write_csv(os, s); });
  run.extra()["shock"] = {{"steps", res.steps},
                          {"mass_initial", res.mass_initial},
                          {"mass_final", res.mass_final},
                          {"boundary_work", res.ledger.boundary_work},
                          {"kinetic", res.ledger.kinetic},
                          {"internal", res.ledger.internal},
                          {"energy_drift", res.ledger.relative_drift()},
                          {"gauges", gauges}};
}

void cmd_eos(Run& run) {
  const RunConfig& c = run.cfg();
  std::optional<EosTable> table;
  if (c.eos.kind == EosKind::Table) {
    table = EosTable::load(c.eos.table_path, c.eos.policy);
  } else {
    const double rho_ref = c.eos.analytic.rho_ref;
    const double lo = c.tabulate.rho_min > 0.0 ? c.tabulate.rho_min : 0.8 * rho_ref;
    const double hi = c.tabulate.rho_max > 0.0 ? c.tabulate.rho_max : 1.5 * rho_ref;
    if (!(hi > lo)) throw ValidationError("tabulate: rho_max > rho_min violated");
    table = EosTable::tabulate(c.eos.analytic, lo, hi, static_cast<std::size_t>(c.tabulate.nr), c.tabulate.t_min,
                               c.tabulate.t_max, static_cast<std::size_t>(c.tabulate.nt));
  }
  run.emit("eos_table.txt", [&](std::ostream& os) { table->write(os); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Yp-Cap material model driver"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"surface", "Composite surface samples: surface.csv with columns p, q_yp, q_mcc, active_branch (Pa)"},
      {"crush", "Hydrostatic crush curve: crush.csv with columns step, e_v, p, P, rho, rho_sl, z, p_c"},
      {"triax", "Triaxial compression: triax.csv with columns step, t, eps_axial, p, q, z, p_c, m, alpha"},
      {"shock", "Spherical cavity source: gauge_r<R>.csv (t, v_r, p, q), snapshot_t<T>.csv (r, v_r, z, p, q, rho)"},
      {"eos", "Tabulated EOS: eos_table.txt"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (overrides [output] dir)");
    sub->add_option("--cells", opt.cells, "Shock mesh cell count");
    sub->add_flag("--clamp-eos", opt.clamp_eos, "Clamp EOS queries to the table range instead of failing");
    sub->add_flag("--yp-only", opt.yp_only, "Disable the cap; all yielding on the Yp surface");
    sub->add_option("--x-override", opt.x_override, "Damage propensity X in [0, 1]");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Run run(command, opt);
    if (command == "surface") cmd_surface(run);
    else if (command == "crush") cmd_crush(run);
    else if (command == "triax") cmd_triax(run);
    else if (command == "shock") cmd_shock(run);
    else cmd_eos(run);
    run.finish();
  } catch (const ParseError& e) {
    std::cerr << "ypcap: " << opt.config << ": " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "ypcap: " << e.what() << '\n';
    return 1;
  } catch (const NoConvergence& e) {
    std::cerr << "ypcap: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ypcap: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
