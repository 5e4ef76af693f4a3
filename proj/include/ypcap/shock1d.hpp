#pragma once

// Spherically symmetric Lagrangian explicit dynamics on a staggered grid.
//
// Nodes carry radius and velocity (velocities live at half steps), cells carry
// a MaterialState. Node forces are the exact derivative of the discrete
// internal power V (s_rr e_rr + 2 s_tt e_tt), so the scheme conserves energy
// up to the leapfrog splitting error. Cells are driven with the stress of the
// settled state (see settle()), which removes the one-step lag of the
// volumetric response from the momentum equation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "ypcap/errors.hpp"
#include "ypcap/model.hpp"

namespace ypcap {

struct CavityLoad {
  double p_peak = 5.38e9;  // Pa
  double tau = 0.01 / std::log(50.0);  // s; P(0.01 s) = 0.02 p_peak
  double t_end = 0.01;     // s

  void validate() const {
    if (!(p_peak > 0.0)) throw ValidationError("load: p_peak > 0 violated");
    if (!(tau > 0.0)) throw ValidationError("load: tau > 0 violated");
    if (!(t_end >= 0.0)) throw ValidationError("load: t_end >= 0 violated");
  }
  friend bool operator==(const CavityLoad&, const CavityLoad&) = default;
};

inline double cavity_pressure(const CavityLoad& load, double t) {
  if (t < 0.0 || t > load.t_end) return 0.0;
  return load.p_peak * std::exp(-t / load.tau);
}

/// Linear plus quadratic viscous pressure, active only in compression.
inline double artificial_viscosity(double rho, double c, double dx, double edot_v, double c_q = 2.0,
                                   double c_l = 0.06) {
  if (!(edot_v < 0.0)) return 0.0;
  return rho * (c_q * c_q * dx * dx * edot_v * edot_v + c_l * c * dx * std::abs(edot_v));
}

struct ShockConfig {
  double cavity_radius = 12.0;  // m
  double outer_radius = 400.0;  // m, fixed boundary
  int cells = 500;
  double cfl = 0.5;
  double t_final = 0.15;  // s
  double c_q = 2.0;
  double c_l = 0.06;
  std::vector<double> gauges{55.0, 114.0, 191.0};  // m
  std::vector<double> snapshot_times;              // s; the final state is always captured
  double sample_dt = 1e-4;                          // s, gauge output stride
  int max_dt_cuts = 6;
  CavityLoad load;

  void validate() const {
    if (!(cavity_radius > 0.0)) throw ValidationError("shock: cavity_radius > 0 violated");
    if (!(outer_radius > cavity_radius)) throw ValidationError("shock: outer_radius > cavity_radius violated");
    if (cells < 1) throw ValidationError("shock: cells >= 1 violated");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ValidationError("shock: 0 < cfl <= 1 violated");
    if (!(t_final > 0.0)) throw ValidationError("shock: t_final > 0 violated");
    if (!(c_q >= 0.0 && c_l >= 0.0)) throw ValidationError("shock: viscosity coefficients >= 0 violated");
    if (!(sample_dt > 0.0)) throw ValidationError("shock: sample_dt > 0 violated");
    for (double g : gauges)
      if (!(g > cavity_radius && g < outer_radius)) throw ValidationError("shock: gauge radius outside the mesh");
    load.validate();
  }

  friend bool operator==(const ShockConfig&, const ShockConfig&) = default;
};

/// Cavity pressure history; an empty function means the exponential load.
using PressureHistory = std::function<double(double)>;

struct GaugeRecord {
  double radius = 0.0;
  std::vector<double> times;
  std::vector<double> v_r;
  std::vector<double> p;
  std::vector<double> q;
  // Unresampled velocity history at the gauge node.
  std::vector<double> raw_t;
  std::vector<double> raw_v;
};

struct SnapshotRow {
  double r, v_r, z, p, q, rho;
};

struct Snapshot {
  double time = 0.0;
  std::vector<SnapshotRow> rows;
};

struct EnergyLedger {
  double kinetic = 0.0;
  double internal = 0.0;  // change since t = 0, per unit solid angle
  double boundary_work = 0.0;
  double peak_boundary_work = 0.0;
  double max_drift = 0.0;  // max |kinetic + internal - boundary_work| over the run
  double worst_dissipation = 0.0;  // min over cell updates of dissipation / |sigma|

  double drift() const { return kinetic + internal - boundary_work; }
  double relative_drift() const { return peak_boundary_work > 0.0 ? max_drift / peak_boundary_work : 0.0; }
};

struct PulseMetrics {
  double peak = 0.0;
  double t_peak = 0.0;
  double width = 0.0;  // full width at half maximum
};

/// Peak and FWHM of a positive pulse in a sampled history.
inline PulseMetrics pulse_metrics(const std::vector<double>& t, const std::vector<double>& v) {
  PulseMetrics m;
  if (t.empty()) return m;
  const auto it = std::max_element(v.begin(), v.end());
  const std::size_t k = static_cast<std::size_t>(it - v.begin());
  m.peak = *it;
  m.t_peak = t[k];
  const double half = 0.5 * m.peak;
  double t_lo = t.front(), t_hi = t.back();
  for (std::size_t i = k; i > 0; --i)
    if (v[i - 1] < half) {
      t_lo = t[i - 1] + (half - v[i - 1]) / (v[i] - v[i - 1]) * (t[i] - t[i - 1]);
      break;
    }
  for (std::size_t i = k; i + 1 < v.size(); ++i)
    if (v[i + 1] < half) {
      t_hi = t[i] + (v[i] - half) / (v[i] - v[i + 1]) * (t[i + 1] - t[i]);
      break;
    }
  m.width = t_hi - t_lo;
  return m;
}

struct Mesh1D {
  std::vector<double> r;          // node radii
  std::vector<double> u;          // node velocities at the last half step
  std::vector<double> node_mass;  // lumped, per unit solid angle
  std::vector<double> cell_mass;
  std::vector<MaterialState> cells;    // committed states
  std::vector<MaterialState> settled;  // force-bearing states
  std::vector<double> q_av;
  std::vector<double> k_nr;
  std::vector<double> g_nr;
  std::vector<double> cell_energy0;  // initial specific energy
  double t = 0.0;
  double dt_prev = 0.0;

  std::size_t n_cells() const { return cells.size(); }
  double volume(std::size_t i) const { return (r[i + 1] * r[i + 1] * r[i + 1] - r[i] * r[i] * r[i]) / 3.0; }
  double density(std::size_t i) const { return cell_mass[i] / volume(i); }
  double total_mass() const {
    double m = 0.0;
    for (double x : cell_mass) m += x;
    return m;
  }
};

template <Eos E>
Mesh1D make_mesh(const ShockConfig& cfg, const MaterialParams& params, const E& eos) {
  Mesh1D m;
  const std::size_t n = static_cast<std::size_t>(cfg.cells);
  m.r.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    m.r[i] = cfg.cavity_radius + (cfg.outer_radius - cfg.cavity_radius) * static_cast<double>(i) / n;
  m.r[n] = cfg.outer_radius;
  m.u.assign(n + 1, 0.0);
  m.node_mass.assign(n + 1, 0.0);
  const MaterialState s0 = init_state(params, eos);
  const StepResult st0 = settle(s0, eos, params);
  for (std::size_t i = 0; i < n; ++i) {
    const double mass = params.rho0 * m.volume(i);
    m.cell_mass.push_back(mass);
    m.node_mass[i] += 0.5 * mass;
    m.node_mass[i + 1] += 0.5 * mass;
  }
  m.cells.assign(n, s0);
  m.settled.assign(n, st0.state);
  m.q_av.assign(n, 0.0);
  m.k_nr.assign(n, st0.diag.k_nr);
  m.g_nr.assign(n, st0.diag.g_nr);
  m.cell_energy0.assign(n, st0.state.energy);
  return m;
}

/// Stable time step from the elastic wave speed plus the viscous signal speed.
inline double stable_dt(const Mesh1D& m, const ShockConfig& cfg) {
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.n_cells(); ++i) {
    const double len = m.r[i + 1] - m.r[i];
    const double rho = m.density(i);
    const double c = std::sqrt((m.k_nr[i] + 4.0 / 3.0 * m.g_nr[i]) / rho);
    const double visc = m.q_av[i] > 0.0 ? cfg.c_l * c + 2.0 * std::sqrt(m.q_av[i] / rho) * cfg.c_q : 0.0;
    dt = std::min(dt, len / (visc + std::sqrt(visc * visc + c * c)));
  }
  return cfg.cfl * dt;
}

namespace detail {

inline std::vector<double> node_forces(const Mesh1D& m, double p_cavity) {
  const std::size_t n = m.n_cells();
  std::vector<double> f(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double ra = m.r[i], rb = m.r[i + 1];
    const SymTensor& s = m.settled[i].stress;
    const double s_rr = s[0] - m.q_av[i];
    const double s_tt = 0.5 * (s[1] + s[2]) - m.q_av[i];
    const double shear = m.volume(i) * (s_rr - s_tt) / (rb - ra);
    f[i + 1] -= shear + s_tt * rb * rb;
    f[i] += shear + s_tt * ra * ra;
  }
  f[0] += p_cavity * m.r[0] * m.r[0];
  return f;
}

}  // namespace detail

/// One leapfrog step of length dt. Updates ledger.boundary_work. Throws
/// MeshTangled or kernel errors, leaving `m` unchanged.
template <Eos E>
void step(Mesh1D& m, double dt, const ShockConfig& cfg, const MaterialParams& params, const E& eos,
          EnergyLedger* ledger = nullptr, const PressureHistory& history = {}) {
  const std::size_t n = m.n_cells();
  const double p_cav = history ? history(m.t) : cavity_pressure(cfg.load, m.t);
  const std::vector<double> f = detail::node_forces(m, p_cav);
  const double dt_mid = m.dt_prev > 0.0 ? 0.5 * (m.dt_prev + dt) : 0.5 * dt;

  std::vector<double> u(m.u), r(m.r);
  for (std::size_t j = 0; j < n; ++j) u[j] += dt_mid * f[j] / m.node_mass[j];
  u[n] = 0.0;
  for (std::size_t j = 0; j <= n; ++j) r[j] += dt * u[j];
  for (std::size_t i = 0; i < n; ++i)
    if (!(r[i + 1] > r[i]) || !(r[0] > 0.0))
      throw MeshTangled("mesh tangled in cell " + std::to_string(i) + " at t = " + std::to_string(m.t));

  std::vector<MaterialState> cells(n), settled(n);
  std::vector<double> q_av(n), k_nr(n), g_nr(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ra0 = m.r[i], rb0 = m.r[i + 1], ra = r[i], rb = r[i + 1];
    const double v0 = m.volume(i);
    const double v1 = (rb * rb * rb - ra * ra * ra) / 3.0;
    const double d_rr = (rb - ra) / (rb0 - ra0) - 1.0;
    const double d_v = v1 / v0 - 1.0;
    const double d_tt = 0.5 * (d_v - d_rr);
    StepResult c = update_step(m.cells[i], SymTensor::diag(d_rr, d_tt, d_tt), eos, params);
    if (c.diag.dissipation < 0.0) {
      const double sn = norm(c.state.stress);
      worst = std::min(worst, sn > 0.0 ? c.diag.dissipation / sn : -std::numeric_limits<double>::infinity());
    }
    // Viscous heating equals the work of the viscous node forces.
    const double visc_work = -m.q_av[i] * (rb0 * rb0 * (rb - rb0) - ra0 * ra0 * (ra - ra0));
    c.state.energy += visc_work / m.cell_mass[i];
    const StepResult s = settle(c.state, eos, params);
    cells[i] = c.state;
    settled[i] = s.state;
    k_nr[i] = s.diag.k_nr;
    g_nr[i] = s.diag.g_nr;
    const double rho = m.cell_mass[i] / v1;
    const double cs = std::sqrt((k_nr[i] + 4.0 / 3.0 * g_nr[i]) / rho);
    q_av[i] = artificial_viscosity(rho, cs, rb - ra, d_v / dt, cfg.c_q, cfg.c_l);
  }

  // Paired with the half-step kinetic energy: m (u+^2 - u-^2) / 2 = dt_mid f (u+ + u-) / 2.
  if (ledger) {
    ledger->boundary_work += dt_mid * p_cav * m.r[0] * m.r[0] * 0.5 * (m.u[0] + u[0]);
    ledger->worst_dissipation = std::min(ledger->worst_dissipation, worst);
  }
  m.u = std::move(u);
  m.r = std::move(r);
  m.cells = std::move(cells);
  m.settled = std::move(settled);
  m.q_av = std::move(q_av);
  m.k_nr = std::move(k_nr);
  m.g_nr = std::move(g_nr);
  m.t += dt;
  m.dt_prev = dt;
}

inline void update_ledger(const Mesh1D& m, EnergyLedger& e) {
  e.kinetic = 0.0;
  for (std::size_t j = 0; j < m.r.size(); ++j) e.kinetic += 0.5 * m.node_mass[j] * m.u[j] * m.u[j];
  e.internal = 0.0;
  for (std::size_t i = 0; i < m.n_cells(); ++i) e.internal += m.cell_mass[i] * (m.settled[i].energy - m.cell_energy0[i]);
  e.peak_boundary_work = std::max(e.peak_boundary_work, std::abs(e.boundary_work));
  e.max_drift = std::max(e.max_drift, std::abs(e.drift()));
}

inline Snapshot take_snapshot(const Mesh1D& m) {
  Snapshot s;
  s.time = m.t;
  for (std::size_t i = 0; i < m.n_cells(); ++i) {
    const MaterialState& st = m.settled[i];
    s.rows.push_back({0.5 * (m.r[i] + m.r[i + 1]), 0.5 * (m.u[i] + m.u[i + 1]), st.z, st.mean_stress(),
                      st.mises_stress(), m.density(i)});
  }
  return s;
}

struct ShockResult {
  std::vector<GaugeRecord> gauges;
  std::vector<Snapshot> snapshots;
  EnergyLedger ledger;
  long steps = 0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  Mesh1D mesh;
};

namespace detail {

inline double interp(const std::vector<double>& t, const std::vector<double>& v, double x) {
  if (t.empty()) return 0.0;
  if (x <= t.front()) return v.front();
  if (x >= t.back()) return v.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - t.begin());
  const double w = (x - t[k - 1]) / (t[k] - t[k - 1]);
  return (1.0 - w) * v[k - 1] + w * v[k];
}

}  // namespace detail

/// Advance from rest to cfg.t_final under the cavity load.
template <Eos E>
ShockResult run(const ShockConfig& cfg, const MaterialParams& params, const E& eos,
               const PressureHistory& history = {}) {
  cfg.validate();
  params.validate();
  ShockResult res;
  Mesh1D m = make_mesh(cfg, params, eos);
  res.mass_initial = m.total_mass();

  struct Probe {
    std::size_t node, cell;
    std::vector<double> ts, p, q;
  };
  std::vector<Probe> probes;
  const double h0 = (cfg.outer_radius - cfg.cavity_radius) / cfg.cells;
  for (double g : cfg.gauges) {
    Probe pr;
    pr.node = static_cast<std::size_t>(std::lround((g - cfg.cavity_radius) / h0));
    pr.cell = std::min(static_cast<std::size_t>((g - cfg.cavity_radius) / h0), m.n_cells() - 1);
    GaugeRecord rec;
    rec.radius = g;
    rec.raw_t.push_back(0.0);
    rec.raw_v.push_back(0.0);
    res.gauges.push_back(rec);
    pr.ts.push_back(0.0);
    pr.p.push_back(m.settled[pr.cell].mean_stress());
    pr.q.push_back(m.settled[pr.cell].mises_stress());
    probes.push_back(pr);
  }

  std::vector<double> snaps = cfg.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  EnergyLedger ledger;

  while (m.t < cfg.t_final * (1.0 - 1e-12)) {
    double dt = std::min(stable_dt(m, cfg), cfg.t_final - m.t);
    for (int cut = 0;; ++cut) {
      try {
        step(m, dt, cfg, params, eos, &ledger, history);
        break;
      } catch (const NoConvergence&) {
        if (cut >= cfg.max_dt_cuts) throw;
        dt *= 0.5;
      }
    }
    ++res.steps;
    update_ledger(m, ledger);
    for (std::size_t k = 0; k < probes.size(); ++k) {
      Probe& pr = probes[k];
      res.gauges[k].raw_t.push_back(m.t - 0.5 * m.dt_prev);
      res.gauges[k].raw_v.push_back(m.u[pr.node]);
      pr.ts.push_back(m.t);
      pr.p.push_back(m.settled[pr.cell].mean_stress());
      pr.q.push_back(m.settled[pr.cell].mises_stress());
    }
    while (next_snap < snaps.size() && m.t >= snaps[next_snap]) {
      res.snapshots.push_back(take_snapshot(m));
      ++next_snap;
    }
  }
  res.snapshots.push_back(take_snapshot(m));

  const long n_out = static_cast<long>(std::floor(cfg.t_final / cfg.sample_dt + 1e-9));
  for (std::size_t k = 0; k < probes.size(); ++k) {
    GaugeRecord& g = res.gauges[k];
    for (long i = 0; i <= n_out; ++i) {
      const double t = static_cast<double>(i) * cfg.sample_dt;
      g.times.push_back(t);
      g.v_r.push_back(detail::interp(g.raw_t, g.raw_v, t));
      g.p.push_back(detail::interp(probes[k].ts, probes[k].p, t));
      g.q.push_back(detail::interp(probes[k].ts, probes[k].q, t));
    }
  }
  res.ledger = ledger;
  res.mass_final = m.total_mass();
  res.mesh = std::move(m);
  return res;
}

inline void write_csv(std::ostream& out, const GaugeRecord& g) {
  const auto old = out.precision(12);
  out << "t,v_r,p,q\n";
  for (std::size_t i = 0; i < g.times.size(); ++i)
    out << g.times[i] << ',' << g.v_r[i] << ',' << g.p[i] << ',' << g.q[i] << '\n';
  out.precision(old);
}

inline void write_csv(std::ostream& out, const Snapshot& s) {
  const auto old = out.precision(12);
  out << "r,v_r,z,p,q,rho\n";
  for (const auto& row : s.rows)
    out << row.r << ',' << row.v_r << ',' << row.z << ',' << row.p << ',' << row.q << ',' << row.rho << '\n';
  out.precision(old);
}

}  // namespace ypcap
