#pragma once

#include "ypcap/eos.hpp"
#include "ypcap/model.hpp"

namespace fixtures {

/// Bulk modulus implied by a shear modulus at Poisson ratio nu.
inline double bulk_from_shear(double g, double nu = 0.25) { return 2.0 * g * (1.0 + nu) / (3.0 * (1.0 - 2.0 * nu)); }

inline ypcap::MaterialParams npe(double x = 1.0) {
  ypcap::MaterialParams p;
  p.rho0 = 1910.25;
  p.t0 = 298.15;
  p.elastic.g0 = 3.972e9;
  p.crush = {7e9, 2e6, 255.0, 0.0217};
  p.yield = ypcap::make_yield_params(0.1617e9, 0.1436e9, 0.175e9, x, -95e6);
  return p;
}

inline ypcap::MaterialParams matpoint(double x = 1.0) {
  ypcap::MaterialParams p;
  p.rho0 = 1608.80;
  p.t0 = 298.15;
  p.elastic.g0 = 4.557e9;
  p.crush = {1e9, 0.5e6, 50.0, 0.20};
  p.yield = ypcap::make_yield_params(0.6396e9, 0.6396e9, 0.35e9, x, -950e6);
  return p;
}

/// Analytic EOS stress free at (rho0 / (1 - z_max), T0) with K matched to G0.
inline ypcap::AnalyticEos desk_eos(const ypcap::MaterialParams& p, double gruneisen = 1.0) {
  ypcap::AnalyticEos e;
  e.rho_ref = p.rho0 / (1.0 - p.crush.z_max);
  e.t_ref = p.t0;
  e.k0 = bulk_from_shear(p.elastic.g0, p.elastic.nu0);
  e.gamma0 = gruneisen;
  e.cv = 1000.0;
  return e;
}

}  // namespace fixtures
