// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "ypcap/config.hpp"
#include "ypcap/paths.hpp"
#include "ypcap/shock1d.hpp"

using namespace ypcap;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string source_dir() {
  const char* s = std::getenv("YPCAP_SOURCE_DIR");
  return s ? s : ".";
}

// Smallest dissipation / |sigma| seen by any acceptance run.
double g_worst_dissipation = 0.0;

void note_dissipation(double diss, double sigma_norm) {
  if (diss >= 0.0) return;
  g_worst_dissipation =
      std::min(g_worst_dissipation, sigma_norm > 0.0 ? diss / sigma_norm : -std::numeric_limits<double>::infinity());
}

struct Outcome {
  bool pass;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++g_failures;
  std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LoadingProgram crush_program() {
  LoadingProgram prog;
  prog.kind = ProgramKind::Hydrostatic;
  prog.target_pressure = 2e10;
  prog.ev_step = -1e-3;
  prog.n_steps = 100000;
  prog.unload = true;
  return prog;
}

Outcome jacobian() {
  const auto t0 = Clock::now();
  std::mt19937 rng(1);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const MaterialParams mp = k % 2 ? fixtures::matpoint(0.5 * (k % 3)) : fixtures::npe(0.5 * (k % 3));
    const auto s = oracles::random_cap_sample(rng, mp);
    worst = std::max(worst, oracles::jacobian_error(s.sys, s.v));
  }
  const double wall = seconds_since(t0);
  return {worst <= 1e-5 && wall < 5.0,
          fmt("max relative error %.2e over 100 states (tol 1e-5), %.2f s (limit 5 s)", worst, wall)};
}

Outcome consistency() {
  const auto t0 = Clock::now();
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0), n(-1.0, 1.0);
  int yp = 0, cap = 0, elastic = 0, fallback = 0, no_conv = 0, other = 0, max_it = 0;
  double worst_f = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double x = 0.5 * (k % 3);
    const MaterialParams mp = k % 2 ? fixtures::matpoint(x) : fixtures::npe(x);
    const AnalyticEos eos = fixtures::desk_eos(mp);
    const double z = 0.8 * mp.crush.z_max * u(rng);
    const SurfaceState surf = surface_at(p_c_of_beta(beta_of_z(z, mp.crush), mp.yield.p_c0), mp.yield);
    MaterialState s = oracles::state_with(mp, eos, z, oracles::random_admissible_stress(rng, surf, mp.yield));
    // Lagged volume change up to 0.3 |p_c0| / K and deviatoric strain up to 2 |p_c0| / G.
    const double k0 = eos.k0, g0 = mp.elastic.g0, pc = std::abs(mp.yield.p_c0);
    s.de_v_prev = 0.3 * pc / k0 * n(rng);
    const double dev = 0.3 * pc / g0;
    const SymTensor d{{dev * n(rng), dev * n(rng), dev * n(rng), dev * n(rng), dev * n(rng), dev * n(rng)}};
    try {
      const StepResult r = update_step(s, d, eos, mp);
      note_dissipation(r.diag.dissipation, norm(r.state.stress));
      if (r.diag.branch == Branch::Elastic) {
        ++elastic;
        continue;
      }
      if (r.diag.branch == Branch::ElasticFallback) {
        // Converged with a negative multiplier: the trial is kept, so measure it against the cap.
        ++fallback;
        const MaterialState& st = r.state;
        const double scale = std::max(st.alpha * st.alpha, mp.yield.p_c0 * mp.yield.p_c0);
        worst_f = std::max(worst_f, std::max(0.0, f_mcc(st.mean_stress(), st.mises_stress(), st.p_c, st.m)) / scale);
        continue;
      }
      (r.diag.branch == Branch::Cap || r.diag.branch == Branch::CriticalState ? cap : yp) += 1;
      worst_f = std::max(worst_f, r.diag.consistency);
      max_it = std::max(max_it, r.diag.iterations);
    } catch (const NoConvergence&) {
      ++no_conv;
    } catch (const std::exception&) {
      ++other;
    }
  }
  const double wall = seconds_since(t0);
  const bool ok = worst_f <= 1e-8 && max_it <= 25 && no_conv == 0 && other == 0 && yp > 0 && cap > 0 && wall < 30.0;
  return {ok, fmt("%d Yp, %d cap, %d elastic, %d negative-multiplier fallback probes; max scaled |F| %.2e (tol 1e-8), max iterations %d (limit 25), "
                  "%d NoConvergence, %d other errors, %.2f s (limit 30 s)",
                  yp, cap, elastic, fallback, worst_f, max_it, no_conv, other, wall)};
}

double m0_bisection(const YieldParams& y) {
  double lo = 1e-6, hi = 100.0;
  auto g = [&](double m) { return alpha_update(y.p_c0, m, y) - y.alpha0; };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((g(lo) < 0) == (g(mid) < 0) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Outcome m0_oracle() {
  const YieldParams npe = parse_config(source_dir() + "/configs/npe.cfg").params().yield;
  const YieldParams mat = parse_config(source_dir() + "/configs/matpoint.cfg").params().yield;
  const double b_npe = m0_bisection(npe), b_mat = m0_bisection(mat);
  const bool ok = std::abs(npe.m0 - 1.0997) <= 1e-3 && std::abs(b_npe - 1.0997) <= 1e-3 &&
                  std::abs(mat.m0 - 1.0) <= 1e-2 && std::abs(b_mat - 1.0) <= 1e-2 && mat.r_ratio == 1.0;
  return {ok, fmt("NPE M0 %.6f (bisection %.6f, target 1.0997 +- 1e-3); material point M0 %.6f (bisection %.6f, "
                  "target 1 +- 1e-2), R %.3f",
                  npe.m0, b_npe, mat.m0, b_mat, mat.r_ratio)};
}

Outcome surface_continuity() {
  double worst = 0.0;
  int states = 0;
  for (double x : {0.0, 0.5, 1.0}) {
    const MaterialParams mp = fixtures::matpoint(x);
    const AnalyticEos eos = fixtures::desk_eos(mp);
    MaterialState s = init_state(mp, eos);
    for (int i = 0; i < 334 && states < 1000; ++i) {
      s = update_step(s, SymTensor::identity() * (-1e-3 / 3.0), eos, mp).state;
      const SurfaceState surf = surface_at(s.p_c, mp.yield);
      const auto [p_cs, q_cs] = critical_state(surf.p_c, surf.m);
      worst = std::max(worst, std::abs(f_yp(p_cs, q_cs, surf.alpha, surf.gamma, mp.yield.p_y)) / surf.alpha);
      ++states;
    }
  }
  return {worst <= 1e-9, fmt("max |f_yp(p_cs, q_cs)| / alpha %.2e over %d states (tol 1e-9)", worst, states)};
}

Outcome crush_out() {
  const MaterialParams mp = fixtures::matpoint();
  const AnalyticEos eos = fixtures::desk_eos(mp);
  const auto rows = run_hydrostatic(crush_program(), mp, eos);
  const auto first_unload = std::find_if(rows.begin(), rows.end(), [](const HydroRow& r) { return r.unloading; });
  const HydroRow& peak = *(first_unload - 1);
  double dz_unload = 0.0;
  for (auto it = first_unload; it != rows.end(); ++it) dz_unload = std::max(dz_unload, std::abs(it->z - peak.z));
  for (const auto& r : rows) note_dissipation(r.dissipation, std::sqrt(3.0) * std::abs(r.p));
  const bool ok = std::abs(peak.z - 0.2) <= 1e-4 && std::abs(peak.e_v_plastic + 0.2) <= 0.002 && dz_unload == 0.0;
  return {ok, fmt("z %.6f (0.2 +- 1e-4), plastic volume strain %.6f (-0.2 +- 0.002), unload |dz| %.1e (exactly 0)",
                  peak.z, peak.e_v_plastic, dz_unload)};
}

Outcome damage_dichotomy() {
  std::vector<MaterialState> path[2];
  for (int k = 0; k < 2; ++k) {
    const MaterialParams mp = fixtures::npe(k == 0 ? 1.0 : 0.0);
    const AnalyticEos eos = fixtures::desk_eos(mp);
    MaterialState s = init_state(mp, eos);
    for (int i = 0; i < 400 && !s.hardened; ++i) {
      const StepResult r = update_step(s, SymTensor::identity() * (-2e-4 / 3.0), eos, mp);
      note_dissipation(r.diag.dissipation, norm(r.state.stress));
      s = r.state;
      path[k].push_back(s);
    }
  }
  const YieldParams y1 = fixtures::npe(1.0).yield;
  const double q_ref = -y1.m0 * y1.p_c0 / 2.0;
  bool mono1 = true, mono0 = true;
  double q_dev = 0.0, a1_end = 0.0, a0_end = 0.0;
  for (std::size_t i = 1; i < path[0].size(); ++i) mono1 &= path[0][i].alpha <= path[0][i - 1].alpha;
  for (std::size_t i = 1; i < path[1].size(); ++i) mono0 &= path[1][i].alpha >= path[1][i - 1].alpha;
  for (const auto& s : path[0]) q_dev = std::max(q_dev, std::abs(critical_state(s.p_c, s.m).q_cs - q_ref) / q_ref);
  a1_end = path[0].back().alpha;
  a0_end = path[1].back().alpha;
  const bool moved = path[0].back().z > 0.0 && path[1].back().z > 0.0;
  return {mono1 && mono0 && q_dev <= 1e-9 && moved,
          fmt("X=1 alpha non-increasing: %s (%.4g -> %.4g Pa), q_cs rel. deviation %.2e (tol 1e-9); "
              "X=0 alpha non-decreasing: %s (-> %.4g Pa)",
              mono1 ? "yes" : "no", y1.alpha0, a1_end, q_dev, mono0 ? "yes" : "no", a0_end)};
}

Outcome triaxial() {
  LoadingProgram prog;
  prog.kind = ProgramKind::Triaxial;
  prog.axial_increment = -2e-4;
  prog.ramp_steps = 50;
  prog.n_steps = 200;
  auto track = [](const std::vector<TriaxRow>& rows) {
    for (const auto& r : rows)
      note_dissipation(r.dissipation, std::sqrt(r.sigma_axial * r.sigma_axial + 2.0 * r.sigma_lateral * r.sigma_lateral));
  };

  const MaterialParams dil = fixtures::npe(1.0);
  const AnalyticEos eos = fixtures::desk_eos(dil);
  prog.confinement = 10e6;
  const auto rows_d = run_triaxial(prog, dil, eos);
  track(rows_d);
  const TriaxRow& last = rows_d.back();
  const double yp = last.alpha - dil.yield.r_ratio * last.alpha * std::exp(last.p / dil.yield.p_y);
  double z_d = 0.0;
  for (const auto& r : rows_d) z_d = std::max(z_d, r.z);
  const double plateau_err = std::abs(last.q - yp) / yp;

  prog.confinement = 150e6;
  const auto rows_c = run_triaxial(prog, dil, eos);
  track(rows_c);
  double q_peak = 0.0;
  for (const auto& r : rows_c) q_peak = std::max(q_peak, r.q);
  const double bound = -dil.yield.m0 * dil.yield.p_c0 / 2.0 * (1.0 + 1e-6);

  return {plateau_err <= 5e-3 && z_d == 0.0 && q_peak <= bound,
          fmt("dilative (10 MPa): plateau q %.5g Pa vs Yp %.5g Pa, rel. error %.2e (tol 5e-3), max z %.1e; "
              "compactive X=1 (150 MPa): peak q %.6g Pa <= %.6g Pa",
              last.q, yp, plateau_err, z_d, q_peak, bound)};
}

double elastic_cycle_error(double& t_err) {
  const MaterialParams mp = fixtures::npe();
  const AnalyticEos eos = fixtures::desk_eos(mp);
  const MaterialState s0 = init_state(mp, eos);
  MaterialState s = s0;
  const double de = -2e-5;
  for (int i = 0; i < 20; ++i) s = update_step(s, SymTensor::identity() * (de / 3), eos, mp).state;
  for (int i = 0; i < 20; ++i) s = update_step(s, SymTensor::identity() * (-de / (1 + de) / 3), eos, mp).state;
  s = settle(s, eos, mp).state;
  t_err = std::abs(s.temp - s0.temp) / s0.temp;
  return std::abs(s.energy - s0.energy) / std::abs(s0.energy);
}

Outcome eos_inversions() {
  AnalyticEos a = fixtures::desk_eos(fixtures::npe());
  a.stiffening = 4.0;
  const double lo = 0.9 * a.rho_ref, hi = 1.3 * a.rho_ref, t_lo = 250.0, t_hi = 1500.0;
  const EosTable coarse = EosTable::tabulate(a, lo, hi, 50, t_lo, t_hi, 50);
  const EosTable fine = EosTable::tabulate(a, lo, hi, 99, t_lo, t_hi, 99);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> ur(lo, hi), ut(t_lo, t_hi);
  double rt_t = 0.0, rt_rho = 0.0, err_c = 0.0, err_f = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double rho = ur(rng), t = ut(rng);
    const double e = coarse.energy(rho, t);
    rt_t = std::max(rt_t, std::abs(coarse.temperature_from_energy(rho, e) - t) / t);
    const double p = coarse.pressure(rho, t);
    rt_rho = std::max(rt_rho, std::abs(coarse.density_from_pressure(p, t) - rho) / rho);
    err_c = std::max(err_c, std::abs(coarse.pressure(rho, t) - a.pressure(rho, t)));
    err_f = std::max(err_f, std::abs(fine.pressure(rho, t) - a.pressure(rho, t)));
  }
  const double ratio = err_c / err_f;
  return {rt_t <= 1e-8 && rt_rho <= 1e-8 && ratio >= 3.5,
          fmt("round trips T-E %.2e, rho-p %.2e (tol 1e-8) on 50x50; pressure error %.3g Pa -> %.3g Pa under 2x "
              "refinement, ratio %.2f (>= 3.5)",
              rt_t, rt_rho, err_c, err_f, ratio)};
}

Outcome shock_oracles() {
  const MaterialParams mp = fixtures::npe();
  const AnalyticEos eos = fixtures::desk_eos(mp);
  const double c_ref = std::sqrt((eos.k0 + 4.0 / 3.0 * mp.elastic.g0) / mp.rho0);

  ShockConfig ac;
  ac.outer_radius = 212.0;
  ac.cells = 2000;
  ac.t_final = 0.07;
  ac.gauges = {62.0, 162.0};
  ac.load = {1e6, 1e-3, 0.01};
  const ShockResult acoustic = run(ac, mp, eos);
  note_dissipation(acoustic.ledger.worst_dissipation, 1.0);
  auto arrival = [](const GaugeRecord& g) {
    const PulseMetrics m = pulse_metrics(g.raw_t, g.raw_v);
    for (std::size_t i = 1; i < g.raw_v.size(); ++i)
      if (g.raw_v[i] >= 0.5 * m.peak)
        return g.raw_t[i - 1] + (0.5 * m.peak - g.raw_v[i - 1]) / (g.raw_v[i] - g.raw_v[i - 1]) *
                                    (g.raw_t[i] - g.raw_t[i - 1]);
    return 0.0;
  };
  const double c = 100.0 / (arrival(acoustic.gauges[1]) - arrival(acoustic.gauges[0]));
  const double c_err = std::abs(c - c_ref) / c_ref;

  const double a = 12.0, b = 48.0, p0 = 1e6, ramp = 0.2;
  ShockConfig qs;
  qs.cavity_radius = a;
  qs.outer_radius = b;
  qs.cells = 200;
  qs.t_final = 0.3;
  qs.gauges = {30.0};
  const ShockResult lame = run(qs, mp, eos, [&](double t) {
    return t >= ramp ? p0 : 0.5 * p0 * (1.0 - std::cos(std::numbers::pi * t / ramp));
  });
  note_dissipation(lame.ledger.worst_dissipation, 1.0);
  const double bb = p0 / (3.0 * eos.k0 / (b * b * b) + 4.0 * mp.elastic.g0 / (a * a * a));
  double lame_err = 0.0;
  for (const auto& row : lame.snapshots.back().rows) {
    const double q = 6.0 * mp.elastic.g0 * bb / (row.r * row.r * row.r);
    lame_err = std::max(lame_err, std::abs(row.q - q) / q);
  }

  const auto t0 = Clock::now();
  const ShockResult desk = run(ShockConfig{}, mp, eos);
  const double wall = seconds_since(t0);
  note_dissipation(desk.ledger.worst_dissipation, 1.0);
  const double drift = desk.ledger.relative_drift();

  return {c_err <= 0.02 && lame_err <= 0.03 && drift <= 0.01 && wall < 60.0,
          fmt("acoustic speed %.1f m/s vs %.1f m/s (%.2f%%, tol 2%%); Lame 1/r^3 Mises profile max error %.2f%% "
              "(tol 3%%); desk energy drift %.3f%% (tol 1%%), %.2f s (limit 60 s)",
              c, c_ref, 100 * c_err, 100 * lame_err, 100 * drift, wall)};
}

Outcome qualitative() {
  const MaterialParams full = fixtures::npe(1.0);
  MaterialParams yp_only = full;
  yp_only.cap_enabled = false;
  const MaterialParams x0 = fixtures::npe(0.0);
  const AnalyticEos eos = fixtures::desk_eos(full);
  const ShockConfig cfg;
  const ShockResult r_full = run(cfg, full, eos), r_yp = run(cfg, yp_only, eos), r_x0 = run(cfg, x0, eos);
  for (const auto* r : {&r_full, &r_yp, &r_x0}) note_dissipation(r->ledger.worst_dissipation, 1.0);

  std::string detail;
  bool ok = true;
  std::vector<PulseMetrics> m_full;
  for (std::size_t k = 0; k < cfg.gauges.size(); ++k) {
    const PulseMetrics f = pulse_metrics(r_full.gauges[k].raw_t, r_full.gauges[k].raw_v);
    const PulseMetrics y = pulse_metrics(r_yp.gauges[k].raw_t, r_yp.gauges[k].raw_v);
    const PulseMetrics z = pulse_metrics(r_x0.gauges[k].raw_t, r_x0.gauges[k].raw_v);
    if (k > 0) ok &= f.peak < m_full.back().peak;
    ok &= y.peak > f.peak && y.width < f.width && z.peak > f.peak && z.width < f.width;
    m_full.push_back(f);
    detail += fmt("r=%g m: full %.3g m/s / %.2f ms, yp-only %.3g / %.2f, X=0 %.3g / %.2f; ", cfg.gauges[k], f.peak,
                  1e3 * f.width, y.peak, 1e3 * y.width, z.peak, 1e3 * z.width);
  }
  const auto& rows = r_full.snapshots.back().rows;
  bool z_mono = true;
  for (std::size_t i = 1; i < rows.size(); ++i) z_mono &= rows[i].z <= rows[i - 1].z;
  const bool crushed = rows.front().z >= full.crush.z_max - 1e-12;
  ok &= z_mono && crushed;
  detail += fmt("z(r) non-increasing: %s, z at cavity %.4f (z_max %.4f)", z_mono ? "yes" : "no", rows.front().z,
                full.crush.z_max);
  return {ok, detail};
}

Outcome thermodynamics() {
  double t_err = 0.0;
  const double e_err = elastic_cycle_error(t_err);
  const bool ok = g_worst_dissipation >= -1e-12 && e_err <= 1e-8 && t_err <= 1e-8;
  return {ok, fmt("min dissipation / |sigma| over all runs %.2e (>= -1e-12); elastic cycle E error %.2e, T error "
                  "%.2e (tol 1e-8)",
                  g_worst_dissipation, e_err, t_err)};
}

}  // namespace

int main() {
  report(1, "Jacobian oracle", jacobian);
  report(2, "Return-mapping consistency", consistency);
  report(3, "M0 oracle", m0_oracle);
  report(4, "Surface continuity", surface_continuity);
  report(5, "Crush-out", crush_out);
  report(6, "Damage dichotomy", damage_dichotomy);
  report(7, "Triaxial behaviour", triaxial);
  report(9, "EOS inversions", eos_inversions);
  report(10, "Shock solver oracles", shock_oracles);
  report(11, "Qualitative gauge and crush structure", qualitative);
  // Last, so the dissipation check covers every run above.
  report(8, "Thermodynamics", thermodynamics);
  return g_failures == 0 ? 0 : 1;
}
