#pragma once

// Composite Yp-Cap yield surface.
//
// Sign convention: mean stress p is tension positive, so every compressive
// quantity (p_c, p_cs) is negative. Mises stress q is non-negative.
//
//   Yp branch:   F_yp  = q - alpha + gamma exp(p / P_y)
//   Cap branch:  F_mcc = (q / M)^2 + p (p - p_c)
//   CSL slope:   M     = (X p_c0 / p_c + (1 - X)) M0
//
// The two branches meet at the critical state (p_c / 2, -M p_c / 2); alpha is
// re-solved from that intersection whenever p_c moves, keeping gamma / alpha = R.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ypcap/errors.hpp"

namespace ypcap {

struct YieldParams {
  double alpha0 = 0.0;    // Pa, initial Yp cut-off strength
  double gamma0 = 0.0;    // Pa
  double p_y = 0.0;       // Pa, exponential pressure scale
  double x_damage = 1.0;  // propensity for damage, [0, 1]
  double m0 = 0.0;        // initial CSL slope
  double r_ratio = 1.0;   // gamma0 / alpha0
  double p_c0 = 0.0;      // Pa, initial preconsolidation stress (< 0)

  void validate() const {
    if (!(alpha0 > 0.0)) throw ValidationError("yield: alpha0 > 0 violated");
    if (!(r_ratio > 0.0 && r_ratio <= 1.0)) throw ValidationError("yield: 0 < R = gamma0/alpha0 <= 1 violated");
    if (!(p_y > 0.0)) throw ValidationError("yield: P_y > 0 violated");
    if (!(p_c0 < 0.0)) throw ValidationError("yield: p_c0 < 0 violated");
    if (!(x_damage >= 0.0 && x_damage <= 1.0)) throw ValidationError("yield: 0 <= X <= 1 violated");
    if (!(m0 > 0.0)) throw ValidationError("yield: M0 > 0 violated");
  }

  friend bool operator==(const YieldParams&, const YieldParams&) = default;
};

/// Current position of the cap and the strength it implies.
struct SurfaceState {
  double p_c = 0.0;
  double m = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;

  friend bool operator==(const SurfaceState&, const SurfaceState&) = default;
};

struct CriticalPoint {
  double p_cs;
  double q_cs;
};

enum class Locus { YpSide, MccSide, CriticalState };

inline const char* to_string(Locus l) {
  switch (l) {
    case Locus::YpSide: return "yp";
    case Locus::MccSide: return "mcc";
    case Locus::CriticalState: return "cs";
  }
  return "?";
}

inline double f_yp(double p, double q, double alpha, double gamma, double p_y) {
  return q - alpha + gamma * std::exp(p / p_y);
}

/// Tensile apex of the Yp branch, P_y ln(alpha / gamma) >= 0.
inline double yp_apex(double alpha, double gamma, double p_y) { return p_y * std::log(alpha / gamma); }

inline double csl_slope(double p_c, const YieldParams& y) {
  return (y.x_damage * y.p_c0 / p_c + (1.0 - y.x_damage)) * y.m0;
}

/// dM/dbeta with p_c = p_c0 - beta.
inline double csl_slope_dbeta(double p_c, const YieldParams& y) {
  return y.x_damage * y.p_c0 * y.m0 / (p_c * p_c);
}

inline double f_mcc(double p, double q, double p_c, double m) {
  const double qm = q / m;
  return qm * qm + p * (p - p_c);
}

inline CriticalPoint critical_state(double p_c, double m) {
  const double p_cs = 0.5 * p_c;
  return {p_cs, -m * p_cs};
}

/// Cut-off strength that places the Yp/cap intersection on the CSL.
inline double alpha_update(double p_c, double m, const YieldParams& y) {
  const double p_cs = 0.5 * p_c;
  const double denom = y.r_ratio * std::exp(p_cs / y.p_y) - 1.0;
  if (std::abs(denom) < 1e-12) throw DegenerateDenominator("alpha update: R exp(p_cs/P_y) - 1 vanishes");
  return m * p_cs / denom;
}

/// Initial CSL slope implied by {alpha0, gamma0, p_c0} (closed-form inverse of alpha_update).
inline double solve_m0(double alpha0, double gamma0, double p_c0, double p_y) {
  const double r = gamma0 / alpha0;
  const double p_cs = 0.5 * p_c0;
  return alpha0 * (r * std::exp(p_cs / p_y) - 1.0) / p_cs;
}

/// Build yield parameters from the Table-1 style inputs, deriving M0 and R.
inline YieldParams make_yield_params(double alpha0, double gamma0, double p_y, double x_damage, double p_c0) {
  YieldParams y;
  y.alpha0 = alpha0;
  y.gamma0 = gamma0;
  y.p_y = p_y;
  y.x_damage = x_damage;
  y.p_c0 = p_c0;
  y.r_ratio = alpha0 > 0.0 ? gamma0 / alpha0 : 0.0;
  y.m0 = (alpha0 > 0.0 && p_c0 < 0.0 && p_y > 0.0) ? solve_m0(alpha0, gamma0, p_c0, p_y) : 0.0;
  y.validate();
  return y;
}

/// Surface geometry for a cap at p_c: M(p_c), alpha(p_c), gamma = R alpha.
inline SurfaceState surface_at(double p_c, const YieldParams& y) {
  SurfaceState s;
  s.p_c = p_c;
  s.m = csl_slope(p_c, y);
  s.alpha = alpha_update(p_c, s.m, y);
  s.gamma = y.r_ratio * s.alpha;
  return s;
}

inline SurfaceState initial_surface(const YieldParams& y) {
  return {y.p_c0, y.m0, y.alpha0, y.gamma0};
}

/// Which branch is active for a trial (p, q). Equality with p_cs is tested in
/// a band of 1e-9 |p_c0|. A hardened (crushed-out) point always yields on Yp.
inline Locus classify_locus(double p_tr, double q_tr, const SurfaceState& s, bool hardened, double p_c0) {
  if (hardened) return Locus::YpSide;
  const auto [p_cs, q_cs] = critical_state(s.p_c, s.m);
  const double tol_p = 1e-9 * std::abs(p_c0);
  if (p_tr > p_cs + tol_p) return Locus::YpSide;
  if (p_tr < p_cs - tol_p) return Locus::MccSide;
  return q_tr > q_cs ? Locus::CriticalState : Locus::YpSide;
}

struct SurfaceSample {
  double p;
  double q_yp;   // Yp strength, 0 beyond the apex
  double q_mcc;  // cap ellipse, 0 outside [p_c, 0]
  Locus active;  // branch that bounds the elastic domain at p
};

/// Uniform samples of the composite surface from the cap apex p_c to the Yp apex.
inline std::vector<SurfaceSample> sample_surface(const SurfaceState& s, double p_y, int samples) {
  if (samples < 2) throw ValidationError("surface: samples >= 2 violated");
  const double apex = yp_apex(s.alpha, s.gamma, p_y);
  const double p_cs = critical_state(s.p_c, s.m).p_cs;
  std::vector<SurfaceSample> out;
  for (int i = 0; i < samples; ++i) {
    const double p = s.p_c + (apex - s.p_c) * i / (samples - 1);
    SurfaceSample row{p, std::max(0.0, s.alpha - s.gamma * std::exp(p / p_y)), 0.0,
                      p < p_cs ? Locus::MccSide : Locus::YpSide};
    if (p >= s.p_c && p <= 0.0) row.q_mcc = s.m * std::sqrt(std::max(0.0, p * (s.p_c - p)));
    out.push_back(row);
  }
  return out;
}

}  // namespace ypcap
