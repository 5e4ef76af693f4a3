#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ypcap/eos.hpp"

using namespace ypcap;

namespace {

AnalyticEos water_like() {
  AnalyticEos e;
  e.rho_ref = 1000.0;
  e.t_ref = 300.0;
  e.k0 = 2.2e9;
  e.gamma0 = 0.5;
  e.cv = 4000.0;
  return e;
}

}  // namespace

TEST(AnalyticEos, ReferenceStateIsStressFree) {
  const AnalyticEos e = water_like();
  EXPECT_EQ(e.pressure(1000.0, 300.0), 0.0);
  EXPECT_DOUBLE_EQ(e.energy(1000.0, 300.0), 1.2e6);
}

TEST(AnalyticEos, LinearColdCurve) {
  const AnalyticEos e = water_like();
  EXPECT_NEAR(e.pressure(1010.0, 300.0), 2.2e7, 1e-6);
  EXPECT_NEAR(e.tangent_bulk_modulus(1010.0, 300.0), 2.2e9 * 1.01, 1e-3);
}

TEST(AnalyticEos, InversesAreExact) {
  AnalyticEos e = water_like();
  for (double n : {1.0, 4.0}) {
    e.stiffening = n;
    for (double rho : {950.0, 1000.0, 1100.0})
      for (double t : {250.0, 300.0, 900.0}) {
        EXPECT_NEAR(e.density_from_pressure(e.pressure(rho, t), t), rho, 1e-9 * rho);
        EXPECT_NEAR(e.temperature_from_energy(rho, e.energy(rho, t)), t, 1e-12 * t);
      }
  }
}

TEST(AnalyticEos, TangentMatchesCentralDifference) {
  AnalyticEos e = water_like();
  e.stiffening = 4.0;
  const double rho = 1070.0, t = 400.0, h = 1e-3;
  const double fd = rho * (e.pressure(rho + h, t) - e.pressure(rho - h, t)) / (2 * h);
  EXPECT_NEAR(e.tangent_bulk_modulus(rho, t), fd, 1e-6 * fd);
}

TEST(AnalyticEos, RejectsNegativeTemperatureUnlessClamped) {
  AnalyticEos e = water_like();
  EXPECT_THROW(e.temperature_from_energy(1000.0, -5.0), OutOfTableRange);
  e.policy = RangePolicy::Clamp;
  EXPECT_EQ(e.temperature_from_energy(1000.0, -5.0), 0.0);
}

TEST(AnalyticEos, TensileLimitOfColdCurve) {
  const AnalyticEos e = water_like();
  EXPECT_THROW(e.density_from_pressure(-3e9, 300.0), OutOfTableRange);
}

TEST(EosTable, NodesReproduceTheSource) {
  AnalyticEos a = water_like();
  a.stiffening = 3.0;
  const EosTable t = EosTable::tabulate(a, 900.0, 1200.0, 7, 200.0, 1000.0, 5);
  for (double rho : t.rho_grid())
    for (double tk : t.t_grid()) {
      EXPECT_DOUBLE_EQ(t.pressure(rho, tk), a.pressure(rho, tk));
      EXPECT_DOUBLE_EQ(t.energy(rho, tk), a.energy(rho, tk));
    }
}

TEST(EosTable, RoundTripsOffNode) {
  AnalyticEos a = water_like();
  a.stiffening = 3.0;
  const EosTable t = EosTable::tabulate(a, 900.0, 1200.0, 50, 200.0, 1000.0, 50);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ur(905.0, 1195.0), ut(210.0, 990.0);
  for (int k = 0; k < 500; ++k) {
    const double rho = ur(rng), tk = ut(rng);
    EXPECT_NEAR(t.temperature_from_energy(rho, t.energy(rho, tk)), tk, 1e-8 * tk);
    EXPECT_NEAR(t.density_from_pressure(t.pressure(rho, tk), tk), rho, 1e-8 * rho);
  }
}

TEST(EosTable, LinearTableHasExactTangent) {
  // 2x2 table with P = 5e9 (rho/1000 - 1): tangent rho dP/drho = 5e6 rho.
  std::istringstream in(
      "ypcap-eos 1\nNR 2 NT 2\nRHO 1000 1100\nT 100 200\nP\n0 0\n5e8 5e8\nE\n1 2\n1 2\n");
  const EosTable t = EosTable::parse(in);
  EXPECT_NEAR(t.tangent_bulk_modulus(1050.0, 150.0), 5e6 * 1050.0, 1e-3);
}

TEST(EosTable, WriteParseRoundTrip) {
  const EosTable a = EosTable::tabulate(water_like(), 900.0, 1200.0, 4, 200.0, 1000.0, 3);
  std::stringstream s;
  a.write(s);
  const EosTable b = EosTable::parse(s);
  EXPECT_EQ(a.p_surface(), b.p_surface());
  EXPECT_EQ(a.e_surface(), b.e_surface());
  EXPECT_EQ(a.rho_grid(), b.rho_grid());
}

TEST(EosTable, StrictRangeThrowsAndClampClamps) {
  EosTable t = EosTable::tabulate(water_like(), 900.0, 1200.0, 4, 200.0, 1000.0, 3);
  EXPECT_THROW(t.pressure(1300.0, 300.0), OutOfTableRange);
  EXPECT_THROW(t.density_from_pressure(1e12, 300.0), OutOfTableRange);
  t.set_policy(RangePolicy::Clamp);
  EXPECT_DOUBLE_EQ(t.pressure(1300.0, 300.0), t.pressure(1200.0, 300.0));
  EXPECT_DOUBLE_EQ(t.density_from_pressure(1e12, 300.0), 1200.0);
}

TEST(EosTable, RejectsNonMonotoneEnergy) {
  std::istringstream in("ypcap-eos 1\nNR 2 NT 2\nRHO 1 2\nT 1 2\nP\n0 0\n1 1\nE\n2 1\n1 2\n");
  EXPECT_THROW(EosTable::parse(in), NonMonotoneColumn);
}

TEST(EosTable, RejectsNonIncreasingGrid) {
  std::istringstream in("ypcap-eos 1\nNR 2 NT 2\nRHO 2 1\nT 1 2\nP\n0 0\n1 1\nE\n1 2\n1 2\n");
  EXPECT_THROW(EosTable::parse(in), NonMonotoneColumn);
}

TEST(EosTable, ParseErrorCarriesPosition) {
  std::istringstream in("ypcap-eos 1\nNR 2 NT 2\nRHO 1 2\nT 1 x2\n");
  try {
    EosTable::parse(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.column(), 5);
  }
}

TEST(EosTable, CommentsAreIgnored) {
  std::istringstream in(
      "# header\nypcap-eos 1  # version\nNR 2 NT 2\nRHO 1000 1100\nT 100 200\nP\n0 0\n5e8 5e8\nE\n1 2\n1 2\n");
  EXPECT_NO_THROW(EosTable::parse(in));
}

TEST(AnyEos, DispatchesAndSetsPolicy) {
  AnyEos e(water_like());
  EXPECT_NEAR(e.pressure(1010.0, 300.0), 2.2e7, 1e-6);
  EXPECT_THROW(e.temperature_from_energy(1000.0, -1.0), OutOfTableRange);
  e.set_policy(RangePolicy::Clamp);
  EXPECT_EQ(e.temperature_from_energy(1000.0, -1.0), 0.0);
}
