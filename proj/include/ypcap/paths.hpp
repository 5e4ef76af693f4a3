#pragma once

// Material-point loading programs: hydrostatic crush curves and triaxial
// compression at constant confinement.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "ypcap/errors.hpp"
#include "ypcap/model.hpp"

namespace ypcap {

enum class ProgramKind { Hydrostatic, Triaxial, UniaxialStrain };

struct LoadingProgram {
  ProgramKind kind = ProgramKind::Hydrostatic;
  // Hydrostatic / uniaxial strain: either a peak engineering volumetric strain
  // (negative in compression) split over n_steps, or a peak pressure reached
  // in steps of ev_step.
  double target_ev = 0.0;
  double target_pressure = 0.0;  // Pa, compression positive; 0 disables
  double ev_step = -1e-3;
  // Triaxial: confinement as a positive pressure, axial compression per step.
  double confinement = 0.0;
  double axial_increment = -1e-3;
  double axial_strain_rate = 1.0;  // 1/s, only sets the t column
  int ramp_steps = 100;
  int n_steps = 1000;
  bool unload = false;

  void validate() const {
    if (n_steps < 1) throw ValidationError("program: n_steps >= 1 violated");
    if (target_pressure < 0.0) throw ValidationError("program: target_pressure >= 0 violated");
    if (target_pressure > 0.0 && !(ev_step < 0.0))
      throw ValidationError("program: ev_step < 0 required with a pressure target");
    if (kind == ProgramKind::Triaxial) {
      if (confinement == 0.0) throw ValidationError("program: triaxial confinement must be non-zero");
      if (ramp_steps < 1) throw ValidationError("program: ramp_steps >= 1 violated");
      if (!(axial_strain_rate > 0.0)) throw ValidationError("program: axial_strain_rate > 0 violated");
    }
  }

  /// Confinement as a pressure; mean-stress (negative) inputs are accepted.
  double confining_pressure() const { return std::abs(confinement); }

  friend bool operator==(const LoadingProgram&, const LoadingProgram&) = default;
};

struct HydroRow {
  int step = 0;
  double e_v = 0.0;  // accumulated applied volumetric strain
  double p = 0.0;    // mean stress, tension positive
  double pressure = 0.0;
  double rho = 0.0;
  double rho_sl = 0.0;
  double z = 0.0;
  double p_c = 0.0;
  double q = 0.0;
  double e_v_plastic = 0.0;  // accumulated plastic volume strain
  double dissipation = 0.0;  // of the step
  bool unloading = false;
};

struct TriaxRow {
  int step = 0;
  double t = 0.0;
  double eps_axial = 0.0;
  double p = 0.0;
  double q = 0.0;
  double z = 0.0;
  double p_c = 0.0;
  double m = 0.0;
  double alpha = 0.0;
  double sigma_axial = 0.0;
  double sigma_lateral = 0.0;
  double dissipation = 0.0;
  int control_iterations = 0;
};

namespace detail {

inline HydroRow hydro_row(int step, double e_v, double e_v_p, const MaterialState& s, double diss, bool unloading) {
  HydroRow r;
  r.step = step;
  r.e_v = e_v;
  r.p = s.mean_stress();
  r.pressure = -r.p;
  r.rho = s.rho;
  r.rho_sl = s.rho_sl;
  r.z = s.z;
  r.p_c = s.p_c;
  r.q = s.mises_stress();
  r.e_v_plastic = e_v_p;
  r.dissipation = diss;
  r.unloading = unloading;
  return r;
}

}  // namespace detail

/// Proportional strain program: each step applies `direction * de_v`, where
/// the direction has unit trace. Rows hold the committed state (its pressure
/// lags the applied volumetric strain by one step). Unloading replays the
/// loading increments in reverse with exactly inverse volume ratios, then one
/// zero increment flushes the lag.
template <Eos E>
std::vector<HydroRow> run_proportional(const SymTensor& direction, const LoadingProgram& prog,
                                       const MaterialParams& params, const E& eos) {
  prog.validate();
  MaterialState s = init_state(params, eos);
  std::vector<HydroRow> rows;
  rows.push_back(detail::hydro_row(0, 0.0, 0.0, s, 0.0, false));
  std::vector<double> applied;
  double e_v = 0.0, e_v_p = 0.0;
  int step = 0;

  auto advance = [&](double de, bool unloading) {
    const StepResult r = update_step(s, direction * de, eos, params);
    s = r.state;
    e_v += de;
    e_v_p += r.diag.de_v_plastic;
    rows.push_back(detail::hydro_row(++step, e_v, e_v_p, s, r.diag.dissipation, unloading));
  };

  if (prog.target_pressure > 0.0) {
    for (int i = 0; i < prog.n_steps && -settle(s, eos, params).state.mean_stress() < prog.target_pressure; ++i) {
      advance(prog.ev_step, false);
      applied.push_back(prog.ev_step);
    }
  } else {
    const double de = prog.target_ev / prog.n_steps;
    for (int i = 0; i < prog.n_steps; ++i) {
      advance(de, false);
      applied.push_back(de);
    }
  }
  if (prog.unload) {
    for (auto it = applied.rbegin(); it != applied.rend(); ++it) advance(-*it / (1.0 + *it), true);
    advance(0.0, true);
  }
  return rows;
}

template <Eos E>
std::vector<HydroRow> run_hydrostatic(const LoadingProgram& prog, const MaterialParams& params, const E& eos) {
  if (prog.kind != ProgramKind::Hydrostatic) throw ValidationError("run_hydrostatic: program kind must be hydrostatic");
  return run_proportional(SymTensor::identity() / 3.0, prog, params, eos);
}

template <Eos E>
std::vector<HydroRow> run_uniaxial_strain(const LoadingProgram& prog, const MaterialParams& params, const E& eos) {
  if (prog.kind != ProgramKind::UniaxialStrain)
    throw ValidationError("run_uniaxial_strain: program kind must be uniaxial strain");
  return run_proportional(SymTensor::diag(1.0, 0.0, 0.0), prog, params, eos);
}

namespace detail {

/// Secant search for x with g(x) = 0; returns the best iterate and its residual.
template <class G>
std::pair<double, double> secant(G&& g, double x0, double x1, double tol, int max_iter, int& iterations) {
  double f0 = g(x0), f1 = g(x1);
  double best = std::abs(f0) < std::abs(f1) ? x0 : x1;
  double best_f = std::min(std::abs(f0), std::abs(f1));
  iterations = 2;
  while (iterations < max_iter && best_f > tol) {
    if (f1 == f0) break;
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = g(x1);
    ++iterations;
    if (std::abs(f1) < best_f) {
      best = x1;
      best_f = std::abs(f1);
    }
  }
  return {best, best_f};
}

}  // namespace detail

/// Triaxial compression. Phase 1 ramps the isotropic pressure to the
/// confinement; phase 2 applies axial strain increments while a secant
/// iteration on the (equal) lateral strain increments holds the lateral
/// stress at the confinement. The control acts on the settled state, so the
/// lateral stress is held after the lagged volumetric increment is applied.
template <Eos E>
std::vector<TriaxRow> run_triaxial(const LoadingProgram& prog, const MaterialParams& params, const E& eos) {
  if (prog.kind != ProgramKind::Triaxial) throw ValidationError("run_triaxial: program kind must be triaxial");
  prog.validate();
  const double conf = prog.confining_pressure();
  const double tol = 1e-9 * conf;
  const double fail_tol = 1e-3 * conf;
  constexpr int kMaxControl = 30;

  MaterialState s = init_state(params, eos);
  std::vector<TriaxRow> rows;
  double eps_ax = 0.0;
  int step = 0;

  auto record = [&](const StepResult& settled, double t, int iters) {
    const MaterialState& st = settled.state;
    TriaxRow r;
    r.step = step;
    r.t = t;
    r.eps_axial = eps_ax;
    r.p = st.mean_stress();
    r.q = st.mises_stress();
    r.z = st.z;
    r.p_c = st.p_c;
    r.m = st.m;
    r.alpha = st.alpha;
    r.sigma_axial = st.stress[0];
    r.sigma_lateral = 0.5 * (st.stress[1] + st.stress[2]);
    r.dissipation = settled.diag.dissipation;
    r.control_iterations = iters;
    rows.push_back(r);
  };
  record(settle(s, eos, params), -1.0, 0);

  const double k_est = eos.tangent_bulk_modulus(s.rho_sl, s.temp);
  double guess = -conf / k_est / prog.ramp_steps;
  for (int k = 1; k <= prog.ramp_steps; ++k) {
    const double target = conf * k / prog.ramp_steps;
    auto miss = [&](double de) {
      const StepResult c = update_step(s, SymTensor::identity() * (de / 3.0), eos, params);
      return -settle(c.state, eos, params).state.mean_stress() - target;
    };
    int iters = 0;
    const auto [de, err] = detail::secant(miss, guess, guess * 1.001 + 1e-12, tol, kMaxControl, iters);
    if (err > fail_tol)
      throw LateralControlFailure("triaxial ramp: confinement missed by " + std::to_string(err) + " Pa");
    s = update_step(s, SymTensor::identity() * (de / 3.0), eos, params).state;
    eps_ax += de / 3.0;
    guess = de;
    ++step;
    record(settle(s, eos, params), -1.0 + static_cast<double>(k) / prog.ramp_steps, iters);
  }

  const double nu = params.elastic.nu0;
  double lateral = -nu / (1.0 - nu) * prog.axial_increment;
  for (int i = 1; i <= prog.n_steps; ++i) {
    auto increment = [&](double x) { return SymTensor::diag(prog.axial_increment, x, x); };
    auto miss = [&](double x) {
      const StepResult c = update_step(s, increment(x), eos, params);
      const SymTensor& sig = settle(c.state, eos, params).state.stress;
      return 0.5 * (sig[1] + sig[2]) + conf;
    };
    int iters = 0;
    const double dx = 1e-3 * std::abs(prog.axial_increment) + 1e-15;
    const auto [x, err] = detail::secant(miss, lateral, lateral + dx, tol, kMaxControl, iters);
    if (err > fail_tol)
      throw LateralControlFailure("triaxial: lateral stress missed confinement by " + std::to_string(err) +
                                  " Pa after " + std::to_string(iters) + " iterations");
    s = update_step(s, increment(x), eos, params).state;
    lateral = x;
    eps_ax += prog.axial_increment;
    ++step;
    record(settle(s, eos, params), i * std::abs(prog.axial_increment) / prog.axial_strain_rate, iters);
  }
  return rows;
}

inline void write_csv(std::ostream& out, const std::vector<HydroRow>& rows) {
  const auto old = out.precision(12);
  out << "step,e_v,p,P,rho,rho_sl,z,p_c\n";
  for (const auto& r : rows)
    out << r.step << ',' << r.e_v << ',' << r.p << ',' << r.pressure << ',' << r.rho << ',' << r.rho_sl << ','
        << r.z << ',' << r.p_c << '\n';
  out.precision(old);
}

inline void write_csv(std::ostream& out, const std::vector<TriaxRow>& rows) {
  const auto old = out.precision(12);
  out << "step,t,eps_axial,p,q,z,p_c,m,alpha\n";
  for (const auto& r : rows)
    out << r.step << ',' << r.t << ',' << r.eps_axial << ',' << r.p << ',' << r.q << ',' << r.z << ',' << r.p_c
        << ',' << r.m << ',' << r.alpha << '\n';
  out.precision(old);
}

}  // namespace ypcap
