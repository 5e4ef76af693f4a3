#pragma once

// Material-point stress update for the Yp-Cap model.
//
// One call to update_step advances a MaterialState over a strain increment:
//   1. split increment: current deviatoric part, previous step's volumetric part
//   2. trial temperature and pressure from the EOS at the start-of-step energy
//   3. trial deviator and crush ISV
//   4. locus classification against the critical state
//   5. radial return on Yp or closest-point projection on the cap
//   6. EOS-consistent density and mid-step energy update

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <string>

#include "ypcap/eos.hpp"
#include "ypcap/errors.hpp"
#include "ypcap/hardening.hpp"
#include "ypcap/surface.hpp"
#include "ypcap/tensor.hpp"

namespace ypcap {

enum class ShearMode { ConstantG, ConstantNu };

struct ElasticParams {
  double g0 = 0.0;  // Pa
  double nu0 = 0.25;
  ShearMode shear_mode = ShearMode::ConstantG;

  void validate() const {
    if (!(g0 > 0.0)) throw ValidationError("elastic: G0 > 0 violated");
    if (!(nu0 > 0.0 && nu0 < 0.5)) throw ValidationError("elastic: 0 < nu0 < 0.5 violated");
  }

  friend bool operator==(const ElasticParams&, const ElasticParams&) = default;
};

struct SolverParams {
  double tol = 1e-10;     // scaled residual norm
  int max_iter = 50;
  int max_halvings = 10;
  double p_c_guard = 50.0;  // cap may not pass p_c_guard * p_c0

  void validate() const {
    if (!(tol > 0.0)) throw ValidationError("solver: tol > 0 violated");
    if (max_iter < 1) throw ValidationError("solver: max_iter >= 1 violated");
    if (max_halvings < 0) throw ValidationError("solver: max_halvings >= 0 violated");
    if (!(p_c_guard > 1.0)) throw ValidationError("solver: p_c_guard > 1 violated");
  }

  friend bool operator==(const SolverParams&, const SolverParams&) = default;
};

struct MaterialParams {
  double rho0 = 0.0;  // kg/m^3, total initial density
  double t0 = 298.15;
  ElasticParams elastic;
  CrushParams crush;
  YieldParams yield;
  SolverParams solver;
  bool cap_enabled = true;

  void validate() const {
    if (!(rho0 > 0.0)) throw ValidationError("material: rho0 > 0 violated");
    if (!(t0 >= 0.0)) throw ValidationError("material: T0 >= 0 violated");
    elastic.validate();
    if (!(crush.h > 0.0)) throw ValidationError("crush: H > 0 violated");
    if (!(crush.beta_max >= 0.0)) throw ValidationError("crush: beta_max >= 0 violated");
    if (!(crush.omega > 0.0)) throw ValidationError("crush: omega > 0 violated");
    // z_max = 0 is admitted: a fully saturated material with a frozen cap.
    if (!(crush.z_max >= 0.0 && crush.z_max < 1.0)) throw ValidationError("crush: 0 <= z_max < 1 violated");
    yield.validate();
    solver.validate();
  }

  friend bool operator==(const MaterialParams&, const MaterialParams&) = default;
};

struct MaterialState {
  SymTensor stress;     // Pa
  SymTensor eps_dev_e;  // elastic deviatoric strain
  double e_v_e = 0.0;   // elastic volume strain
  double z = 0.0;
  double beta = 0.0;  // Pa
  double p_c = 0.0;   // Pa
  double m = 0.0;
  double alpha = 0.0;  // Pa
  double gamma = 0.0;  // Pa
  double rho = 0.0;     // kg/m^3, total
  double rho_sl = 0.0;  // kg/m^3, solid + liquid
  double energy = 0.0;  // J/kg
  double temp = 0.0;    // K
  bool hardened = false;
  double de_v_prev = 0.0;     // lagged volumetric increment
  double plastic_work = 0.0;  // J/m^3, accumulated sigma : d eps_p

  double mean_stress() const { return stress.mean(); }
  double mises_stress() const { return mises(stress); }
  SurfaceState surface() const { return {p_c, m, alpha, gamma}; }
};

enum class Branch { Elastic, YpRadial, YpApex, CriticalState, Cap, ElasticFallback };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::Elastic: return "elastic";
    case Branch::YpRadial: return "yp-radial";
    case Branch::YpApex: return "yp-apex";
    case Branch::CriticalState: return "critical-state";
    case Branch::Cap: return "cap";
    case Branch::ElasticFallback: return "elastic-fallback";
  }
  return "?";
}

struct StepDiagnostics {
  Branch branch = Branch::Elastic;
  Locus locus = Locus::YpSide;
  int iterations = 0;
  double residual = 0.0;  // scaled Newton residual at exit
  double dlambda = 0.0;
  double k_nr = 0.0;
  double g_nr = 0.0;
  double temp = 0.0;  // temperature held over the increment
  double p_tr = 0.0;
  double q_tr = 0.0;
  double f_trial = 0.0;
  double consistency = 0.0;  // scaled |F| of the active branch after return
  SymTensor d_eps_split;
  SymTensor d_eps_plastic;
  double de_v_plastic = 0.0;
  double dz = 0.0;
  double dissipation = 0.0;  // J/m^3 over the step
};

struct StepResult {
  MaterialState state;
  StepDiagnostics diag;
};

/// Elastic predictor quantities.
struct TrialState {
  double p_tr = 0.0;
  double q_tr = 0.0;
  SymTensor s_tr;
  double k_nr = 0.0;
  double g_nr = 0.0;
  double temp = 0.0;
  double beta_tr = 0.0;
  double rho_sl_tr = 0.0;
};

/// Time-split strain increment: deviator of the current increment plus the
/// previous step's volumetric increment. Stores tr(d_eps) for the next call.
inline SymTensor split_increment(const SymTensor& d_eps, MaterialState& state) {
  const SymTensor split = assemble(d_eps.deviator(), state.de_v_prev / 3.0);
  state.de_v_prev = d_eps.trace();
  return split;
}

inline double shear_modulus(const ElasticParams& e, double k_nr) {
  if (e.shear_mode == ShearMode::ConstantG) return e.g0;
  return 3.0 * k_nr * (1.0 - 2.0 * e.nu0) / (2.0 * (1.0 + e.nu0));
}

template <Eos E>
TrialState trial_state(const MaterialState& state, const SymTensor& split_eps, const E& eos,
                       const MaterialParams& params) {
  TrialState tr;
  tr.temp = eos.temperature_from_energy(state.rho_sl, state.energy);
  tr.rho_sl_tr = state.rho_sl / (1.0 + split_eps.trace());
  tr.p_tr = -eos.pressure(tr.rho_sl_tr, tr.temp);
  tr.k_nr = eos.tangent_bulk_modulus(tr.rho_sl_tr, tr.temp);
  tr.g_nr = shear_modulus(params.elastic, tr.k_nr);
  tr.s_tr = state.stress.deviator() + split_eps.deviator() * (2.0 * tr.g_nr);
  tr.q_tr = mises(tr.s_tr);
  tr.beta_tr = beta_of_z(state.z, params.crush);
  return tr;
}

struct YpReturn {
  double p;
  double q;
  SymTensor s;
  bool apex;
};

/// Radial return onto Yp at fixed mean stress, or to the tensile apex.
inline YpReturn yp_radial_return(double p_tr, double q_tr, const SymTensor& s_tr, double alpha,
                                 double gamma, double p_y) {
  const double a = yp_apex(alpha, gamma, p_y);
  if (p_tr >= a) return {a, 0.0, SymTensor::zero(), true};
  const double s_norm = norm(s_tr);
  if (q_tr <= 0.0 || s_norm == 0.0)
    throw ZeroDeviatorReturn("Yp radial return below the apex with a zero trial deviator");
  const double q = alpha - gamma * std::exp(p_tr / p_y);
  return {p_tr, q, s_tr * (std::sqrt(2.0 / 3.0) * q / s_norm), false};
}

/// Residual and Jacobian of the cap closest-point projection in the
/// unknowns v = (mu, p, q, beta) with mu = G dlambda.
struct CapSystem {
  using Vec = Eigen::Vector4d;
  using Mat = Eigen::Matrix4d;

  double p_tr;
  double q_tr;
  double k_nr;
  double g_nr;
  double z_n;
  CrushParams crush;
  YieldParams yield;

  double delta_z(const Vec& v) const {
    const double dl = v[0] / g_nr, p = v[1], q = v[2], beta = v[3];
    const double p_c = yield.p_c0 - beta;
    const double m = csl_slope(p_c, yield);
    const double dm = csl_slope_dbeta(p_c, yield);
    return dl * (2.0 * q * q / (m * m * m) * dm - p);
  }

  Vec residual(const Vec& v) const {
    const double mu = v[0], p = v[1], q = v[2], beta = v[3];
    const double p_c = yield.p_c0 - beta;
    const double m = csl_slope(p_c, yield);
    const double kg = k_nr / g_nr;
    const double dz = delta_z(v);
    Vec r;
    r[0] = f_mcc(p, q, p_c, m);
    r[1] = p * (1.0 + 2.0 * mu * kg) - p_tr - mu * (yield.p_c0 - beta) * kg;
    r[2] = q * (1.0 + 6.0 * mu / (m * m)) - q_tr;
    r[3] = beta - crush.h * (z_n + dz) -
           crush.beta_max * (std::exp(crush.omega * z_n) * std::exp(crush.omega * dz) - 1.0);
    return r;
  }

  Mat jacobian(const Vec& v) const {
    const double mu = v[0], p = v[1], q = v[2], beta = v[3];
    const double dl = mu / g_nr;
    const double p_c = yield.p_c0 - beta;
    const double m = csl_slope(p_c, yield);
    const double m2 = m * m, m3 = m2 * m, m4 = m3 * m;
    const double dm = csl_slope_dbeta(p_c, yield);  // X p_c0 M0 / p_c^2
    const double xpm = yield.x_damage * yield.p_c0 * yield.m0;
    const double kg = k_nr / g_nr;
    const double dz = dl * (2.0 * q * q / m3 * dm - p);

    const double dz_dbeta = dl * (4.0 * q * q / m3 * xpm / (p_c * p_c * p_c) - 6.0 * q * q / m4 * dm * dm);
    const double dz_dq = dl * (4.0 * q / m3 * dm);
    const double dz_dp = -dl;
    const double dz_ddl = 2.0 * q * q / m3 * dm - p;
    const double hexp = crush.h + crush.beta_max * crush.omega * std::exp(crush.omega * z_n) *
                                      std::exp(crush.omega * dz);

    Mat j;
    j(0, 0) = 0.0;
    j(0, 1) = 2.0 * p - p_c;
    j(0, 2) = 2.0 * q / m2;
    j(0, 3) = p - 2.0 * q * q / m3 * dm;

    j(1, 0) = (2.0 * p - p_c) * kg;
    j(1, 1) = 1.0 + 2.0 * mu * kg;
    j(1, 2) = 0.0;
    j(1, 3) = kg * mu;

    j(2, 0) = 6.0 * q / m2;
    j(2, 1) = 0.0;
    j(2, 2) = 1.0 + 6.0 * mu / m2;
    j(2, 3) = -12.0 * q * mu / m3 * dm;

    j(3, 0) = -hexp / g_nr * dz_ddl;
    j(3, 1) = -hexp * dz_dp;
    j(3, 2) = -hexp * dz_dq;
    j(3, 3) = 1.0 - hexp * dz_dbeta;
    return j;
  }

  /// Residual scaling: R1 by p_c0^2, the rest by |p_c0|.
  Vec residual_scale() const {
    const double s = std::abs(yield.p_c0);
    return {s * s, s, s, s};
  }
  Vec unknown_scale() const {
    const double s = std::abs(yield.p_c0);
    return {1.0, s, s, s};
  }
  double scaled_norm(const Vec& r) const { return r.cwiseQuotient(residual_scale()).norm(); }
};

struct CapReturn {
  double p = 0.0;
  double q = 0.0;
  double beta = 0.0;
  double dlambda = 0.0;
  double z = 0.0;
  double m = 0.0;
  double p_c = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  bool hardened = false;
  int iterations = 0;
  double residual = 0.0;
  double consistency = 0.0;  // |F_mcc| / max(alpha^2, p_c0^2) at the Newton solution
};

namespace detail {

struct CapSolve {
  CapSystem::Vec v;
  double rnorm = 0.0;
  int iterations = 0;
};

/// Damped Newton on the scaled cap system from v. Steps are shortened to keep
/// beta inside [beta_lo, beta_hi] and halved until the scaled residual drops.
inline CapSolve cap_newton(const CapSystem& sys, CapSystem::Vec v, const SolverParams& sol, double beta_lo,
                           double beta_hi) {
  const auto in_guard = [&](const CapSystem::Vec& x) { return x[3] <= beta_hi && x[3] >= beta_lo; };
  const CapSystem::Vec rs = sys.residual_scale();
  const CapSystem::Vec us = sys.unknown_scale();
  CapSystem::Vec r = sys.residual(v);
  double rnorm = sys.scaled_norm(r);
  int it = 0;
  while (!(rnorm <= sol.tol)) {
    if (it >= sol.max_iter)
      throw NoConvergence(it, rnorm, "cap return: no convergence after " + std::to_string(it) +
                                         " iterations, scaled residual " + std::to_string(rnorm));
    const CapSystem::Mat jt = rs.cwiseInverse().asDiagonal() * sys.jacobian(v) * us.asDiagonal();
    const CapSystem::Vec dx = us.cwiseProduct(jt.partialPivLu().solve(r.cwiseQuotient(rs)));
    if (!dx.allFinite()) throw NoConvergence(it, rnorm, "cap return: singular Jacobian");

    double step = 1.0;
    if (v[3] - dx[3] > beta_hi) step = std::min(step, 0.9 * (beta_hi - v[3]) / -dx[3]);
    if (v[3] - dx[3] < beta_lo) step = std::min(step, 0.9 * (beta_lo - v[3]) / -dx[3]);
    CapSystem::Vec trial = v - step * dx;
    CapSystem::Vec r_trial;
    double n_trial = 0.0;
    bool have = false;
    for (int h = 0; h <= sol.max_halvings; ++h) {
      if (in_guard(trial)) {
        r_trial = sys.residual(trial);
        n_trial = sys.scaled_norm(r_trial);
        if (std::isfinite(n_trial)) {
          have = true;
          if (n_trial < rnorm) break;
        }
      }
      if (h == sol.max_halvings) break;
      step *= 0.5;
      trial = v - step * dx;
    }
    if (!have || !in_guard(trial) || !std::isfinite(n_trial))
      throw NoConvergence(it, rnorm, "cap return: iterate left the preconsolidation guard");
    v = trial;
    r = r_trial;
    rnorm = n_trial;
    ++it;
  }
  return {v, rnorm, it};
}

/// Return onto the cap held at beta: p and q follow from mu in closed form and
/// the yield condition is bracketed and bisected in mu.
inline CapSystem::Vec fixed_cap_start(const CapSystem& sys, double beta) {
  const double p_c = sys.yield.p_c0 - beta;
  const double m = csl_slope(p_c, sys.yield);
  const double kg = sys.k_nr / sys.g_nr;
  const auto at = [&](double mu) {
    const double p = (sys.p_tr + mu * p_c * kg) / (1.0 + 2.0 * mu * kg);
    const double q = sys.q_tr / (1.0 + 6.0 * mu / (m * m));
    return CapSystem::Vec(mu, p, q, beta);
  };
  const auto f = [&](double mu) {
    const CapSystem::Vec v = at(mu);
    return f_mcc(v[1], v[2], p_c, m);
  };
  if (!(f(0.0) > 0.0)) return at(0.0);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && f(hi) > 0.0; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 100 && hi - lo > 1e-14 * hi; ++i) (f(0.5 * (lo + hi)) > 0.0 ? lo : hi) = 0.5 * (lo + hi);
  return at(0.5 * (lo + hi));
}

/// The hardening condition bisected in beta over [beta_tr, beta_hi] with the
/// fixed-cap return inside.
inline CapSystem::Vec hardened_cap_start(const CapSystem& sys, double beta_tr, double beta_hi) {
  const auto g = [&](double beta) { return sys.residual(fixed_cap_start(sys, beta))[3]; };
  double lo = beta_tr, hi = beta_hi;
  if (!(g(lo) < 0.0)) return fixed_cap_start(sys, lo);
  if (!(g(hi) > 0.0)) return fixed_cap_start(sys, hi);
  for (int i = 0; i < 40 && hi - lo > 1e-10 * std::abs(hi); ++i) (g(0.5 * (lo + hi)) < 0.0 ? lo : hi) = 0.5 * (lo + hi);
  return fixed_cap_start(sys, 0.5 * (lo + hi));
}

}  // namespace detail

/// Closest-point projection onto the cap by damped Newton iteration started
/// from the return onto the cap held at its trial size, then from the
/// hardened-cap start. When both fail, the trial is reached by continuation
/// from the point where the segment (p_n, q_n) -> (p_tr, q_tr) crosses the
/// current cap. Throws NoConvergence or NegativeDlambda.
inline CapReturn mcc_return(double p_tr, double q_tr, double beta_tr, double k_nr, double g_nr,
                            const MaterialState& state, const MaterialParams& params) {
  const CapSystem sys{p_tr, q_tr, k_nr, g_nr, state.z, params.crush, params.yield};
  const auto& sol = params.solver;
  const double p_c0 = params.yield.p_c0;
  const double beta_hi = (1.0 - sol.p_c_guard) * p_c0;  // p_c >= guard * p_c0
  const double beta_lo = 0.5 * p_c0;                    // p_c <= p_c0 / 2 keeps M finite

  detail::CapSolve solved;
  try {
    solved = detail::cap_newton(sys, detail::fixed_cap_start(sys, beta_tr), sol, beta_lo, beta_hi);
  } catch (const NoConvergence& first) {
    int total = first.iterations();
    bool done = false;
    try {
      solved = detail::cap_newton(sys, detail::hardened_cap_start(sys, beta_tr, beta_hi), sol, beta_lo, beta_hi);
      solved.iterations += total;
      done = true;
    } catch (const NoConvergence& second) {
      total += second.iterations();
    }
    const double p_n = state.mean_stress(), q_n = state.mises_stress();
    const double p_cn = p_c_of_beta(beta_tr, p_c0), m_n = csl_slope(p_cn, params.yield);
    const auto f_at = [&](double t) { return f_mcc(p_n + t * (p_tr - p_n), q_n + t * (q_tr - q_n), p_cn, m_n); };
    double lo = 0.0, hi = 1.0;
    if (!done && f_at(0.0) < 0.0)
      for (int i = 0; i < 60; ++i) (f_at(0.5 * (lo + hi)) < 0.0 ? lo : hi) = 0.5 * (lo + hi);
    const double t0 = lo;
    for (int n = 8; n <= 128 && !done; n *= 4) {
      try {
        CapSystem::Vec v(0.0, p_n + t0 * (p_tr - p_n), q_n + t0 * (q_tr - q_n), beta_tr);
        for (int k = 1; k <= n; ++k) {
          const double t = t0 + (1.0 - t0) * k / n;
          CapSystem sub = sys;
          sub.p_tr = p_n + t * (p_tr - p_n);
          sub.q_tr = q_n + t * (q_tr - q_n);
          const detail::CapSolve part = detail::cap_newton(sub, v, sol, beta_lo, beta_hi);
          v = part.v;
          total += part.iterations;
        }
        solved = {v, sys.scaled_norm(sys.residual(v)), total};
        done = true;
      } catch (const NoConvergence& e) {
        total += e.iterations();
      }
    }
    if (!done) throw first;
  }
  const CapSystem::Vec& v = solved.v;
  const int it = solved.iterations;
  const double rnorm = solved.rnorm;

  if (v[0] < -1e-12) throw NegativeDlambda(v[0] / g_nr);

  CapReturn out;
  out.p = v[1];
  out.q = std::max(v[2], 0.0);
  out.beta = v[3];
  out.dlambda = v[0] / g_nr;
  out.p_c = p_c_of_beta(out.beta, p_c0);
  out.m = csl_slope(out.p_c, params.yield);
  out.z = state.z + sys.delta_z(v);
  {
    const double a = alpha_update(out.p_c, out.m, params.yield);
    out.consistency = std::abs(f_mcc(out.p, out.q, out.p_c, out.m)) / std::max(a * a, p_c0 * p_c0);
  }
  if (out.z >= params.crush.z_max - 1e-12) {
    // Crush-out inside the step: freeze the cap at beta(z_max).
    out.z = params.crush.z_max;
    out.beta = beta_of_z(out.z, params.crush);
    out.p_c = p_c_of_beta(out.beta, p_c0);
    out.m = csl_slope(out.p_c, params.yield);
    out.hardened = true;
  }
  out.alpha = alpha_update(out.p_c, out.m, params.yield);
  out.gamma = params.yield.r_ratio * out.alpha;
  out.iterations = it;
  out.residual = rnorm;
  return out;
}

template <Eos E>
MaterialState init_state(const MaterialParams& params, const E& eos) {
  MaterialState s;
  s.rho = params.rho0;
  s.rho_sl = params.rho0 / (1.0 - params.crush.z_max);
  s.temp = params.t0;
  s.energy = eos.energy(s.rho_sl, params.t0);
  const double p0 = -eos.pressure(s.rho_sl, params.t0);
  if (std::abs(p0) > 1e3)
    std::clog << "ypcap: warning: EOS reference pressure at (rho_sl0, T0) is " << -p0
              << " Pa; the initial state is not stress free\n";
  s.stress = SymTensor::identity() * p0;
  const auto surf = initial_surface(params.yield);
  s.p_c = surf.p_c;
  s.m = surf.m;
  s.alpha = surf.alpha;
  s.gamma = surf.gamma;
  s.hardened = params.crush.z_max <= 0.0;
  return s;
}

/// Degree of saturation phi_l / (phi_l + phi_g) with phi_g = z_max.
inline double saturation(double phi_l, double z_max) {
  const double pores = phi_l + z_max;
  return pores > 0.0 ? phi_l / pores : 1.0;
}

template <Eos E>
StepResult update_step(const MaterialState& state, const SymTensor& d_eps, const E& eos,
                       const MaterialParams& params) {
  StepResult out{state, {}};
  MaterialState& next = out.state;
  StepDiagnostics& diag = out.diag;

  const SymTensor split = split_increment(d_eps, next);
  const TrialState tr = trial_state(state, split, eos, params);
  diag.d_eps_split = split;
  diag.k_nr = tr.k_nr;
  diag.g_nr = tr.g_nr;
  diag.temp = tr.temp;
  diag.p_tr = tr.p_tr;
  diag.q_tr = tr.q_tr;

  const SurfaceState surf = state.surface();
  const bool yp_only = state.hardened || !params.cap_enabled;
  diag.locus = classify_locus(tr.p_tr, tr.q_tr, surf, yp_only, params.yield.p_c0);

  double p = tr.p_tr;
  double q = tr.q_tr;
  SymTensor s = tr.s_tr;
  bool cap_ran = false;
  double dz = 0.0;
  const auto radial = [&](double scale) { return norm(tr.s_tr) > 0.0 ? tr.s_tr * (scale / norm(tr.s_tr)) : SymTensor::zero(); };

  switch (diag.locus) {
    case Locus::CriticalState: {
      const auto cs = critical_state(surf.p_c, surf.m);
      p = cs.p_cs;
      q = cs.q_cs;
      s = radial(std::sqrt(2.0 / 3.0) * q);
      diag.branch = Branch::CriticalState;
      diag.consistency = std::abs(f_yp(p, q, surf.alpha, surf.gamma, params.yield.p_y)) / surf.alpha;
      break;
    }
    case Locus::YpSide: {
      diag.f_trial = f_yp(tr.p_tr, tr.q_tr, surf.alpha, surf.gamma, params.yield.p_y);
      if (diag.f_trial <= 0.0) break;
      const auto ret = yp_radial_return(tr.p_tr, tr.q_tr, tr.s_tr, surf.alpha, surf.gamma, params.yield.p_y);
      p = ret.p;
      q = ret.q;
      s = ret.s;
      diag.branch = ret.apex ? Branch::YpApex : Branch::YpRadial;
      diag.consistency = ret.apex ? 0.0 : std::abs(f_yp(p, q, surf.alpha, surf.gamma, params.yield.p_y)) / surf.alpha;
      break;
    }
    case Locus::MccSide: {
      diag.f_trial = f_mcc(tr.p_tr, tr.q_tr, surf.p_c, surf.m);
      if (diag.f_trial <= 0.0) break;
      try {
        const CapReturn ret = mcc_return(tr.p_tr, tr.q_tr, tr.beta_tr, tr.k_nr, tr.g_nr, state, params);
        p = ret.p;
        q = ret.q;
        s = radial(std::sqrt(2.0 / 3.0) * q);
        dz = ret.z - state.z;
        next.z = ret.z;
        next.beta = ret.beta;
        next.p_c = ret.p_c;
        next.m = ret.m;
        next.alpha = ret.alpha;
        next.gamma = ret.gamma;
        next.hardened = ret.hardened;
        cap_ran = true;
        diag.branch = Branch::Cap;
        diag.iterations = ret.iterations;
        diag.residual = ret.residual;
        diag.dlambda = ret.dlambda;
        diag.consistency = ret.consistency;
      } catch (const NegativeDlambda&) {
        diag.branch = Branch::ElasticFallback;
      }
      break;
    }
  }

  // Plastic strain of the step, split by the elastic moduli.
  const SymTensor dev_p = (tr.s_tr - s) * (0.5 / tr.g_nr);
  diag.de_v_plastic = (tr.p_tr - p) / tr.k_nr;
  diag.d_eps_plastic = assemble(dev_p, diag.de_v_plastic / 3.0);
  diag.dz = dz;
  const double de_v_elastic = split.trace() - diag.de_v_plastic;

  next.stress = assemble(s, p);
  next.eps_dev_e = state.eps_dev_e + split.deviator() - dev_p;
  next.e_v_e = state.e_v_e + de_v_elastic;

  next.rho_sl = cap_ran ? eos.density_from_pressure(-p, tr.temp) : state.rho_sl / (1.0 + de_v_elastic);
  next.rho = state.rho / (1.0 + split.trace());
  // The split strain is measured from the start-of-step volume m / rho_n.
  next.energy = state.energy + 0.5 * contract(state.stress + next.stress, split) / state.rho;
  next.temp = eos.temperature_from_energy(next.rho_sl, next.energy);

  const double work_p = contract(diag.d_eps_plastic, next.stress);
  next.plastic_work = state.plastic_work + work_p;
  diag.dissipation = work_p - dz * next.beta;
  return out;
}

/// State after flushing the pending (lagged) volumetric increment with a
/// zero strain increment; its stress is the lag-free response to the strain
/// applied so far.
template <Eos E>
StepResult settle(const MaterialState& state, const E& eos, const MaterialParams& params) {
  return update_step(state, SymTensor::zero(), eos, params);
}

}  // namespace ypcap
