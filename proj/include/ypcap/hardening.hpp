#pragma once

#include <cmath>

#include "ypcap/errors.hpp"

namespace ypcap {

/// Pore-crush potential parameters. z_max is the crushable (air-filled)
/// porosity; once z reaches it the cap is frozen.
struct CrushParams {
  double h = 0.0;         // Pa, linear hardening modulus
  double beta_max = 0.0;  // Pa, exponential hardening coefficient
  double omega = 1.0;
  double z_max = 0.0;

  void validate() const {
    if (!(h > 0.0)) throw ValidationError("crush: H > 0 violated");
    if (!(beta_max >= 0.0)) throw ValidationError("crush: beta_max >= 0 violated");
    if (!(omega > 0.0)) throw ValidationError("crush: omega > 0 violated");
    if (!(z_max > 0.0 && z_max < 1.0)) throw ValidationError("crush: 0 < z_max < 1 violated");
  }

  friend bool operator==(const CrushParams&, const CrushParams&) = default;
};

/// Stored energy per unit volume, H z^2 / 2 + beta_max (exp(omega z) / omega - z).
inline double stored_energy(double z, const CrushParams& c) {
  return 0.5 * c.h * z * z + c.beta_max * (std::exp(c.omega * z) / c.omega - z);
}

/// Stress-like ISV conjugate to z.
inline double beta_of_z(double z, const CrushParams& c) {
  return c.h * z + c.beta_max * std::expm1(c.omega * z);
}

inline double dbeta_dz(double z, const CrushParams& c) {
  return c.h + c.beta_max * c.omega * std::exp(c.omega * z);
}

inline double p_c_of_beta(double beta, double p_c0) { return p_c0 - beta; }

}  // namespace ypcap
