#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace ypcap {

/// Symmetric 3x3 tensor stored as six independent components in the order
/// xx, yy, zz, xy, yz, xz. Shear components are tensor (not engineering)
/// components, so a strain with c[3] = g/2 is a simple shear of angle g.
struct SymTensor {
  std::array<double, 6> c{};

  static constexpr SymTensor zero() { return {}; }
  static constexpr SymTensor identity() { return {{1.0, 1.0, 1.0, 0.0, 0.0, 0.0}}; }
  static constexpr SymTensor diag(double xx, double yy, double zz) {
    return {{xx, yy, zz, 0.0, 0.0, 0.0}};
  }

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  constexpr double trace() const { return c[0] + c[1] + c[2]; }
  constexpr double mean() const { return trace() / 3.0; }

  constexpr SymTensor deviator() const {
    const double m = mean();
    return {{c[0] - m, c[1] - m, c[2] - m, c[3], c[4], c[5]}};
  }

  constexpr SymTensor& operator+=(const SymTensor& o) {
    for (std::size_t i = 0; i < 6; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr SymTensor& operator-=(const SymTensor& o) {
    for (std::size_t i = 0; i < 6; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr SymTensor& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }

  friend constexpr SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend constexpr SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend constexpr SymTensor operator*(SymTensor a, double s) { return a *= s; }
  friend constexpr SymTensor operator*(double s, SymTensor a) { return a *= s; }
  friend constexpr SymTensor operator/(SymTensor a, double s) { return a *= (1.0 / s); }
  friend constexpr SymTensor operator-(SymTensor a) { return a *= -1.0; }

  friend constexpr bool operator==(const SymTensor&, const SymTensor&) = default;
};

/// Full double contraction a:b, counting each off-diagonal pair twice.
constexpr double contract(const SymTensor& a, const SymTensor& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] +
         2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5]);
}

inline double norm(const SymTensor& a) { return std::sqrt(contract(a, a)); }

/// Mises equivalent stress, sqrt(3/2) |dev(a)|.
inline double mises(const SymTensor& a) { return std::sqrt(1.5) * norm(a.deviator()); }

/// Recombine a deviator and a mean value into a full tensor.
constexpr SymTensor assemble(const SymTensor& dev, double mean) {
  return dev + SymTensor::identity() * mean;
}

}  // namespace ypcap
