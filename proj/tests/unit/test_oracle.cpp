#include "enz/oracle/axisymmetric.hpp"
#include "support.hpp"

using namespace enz;
using namespace enz::oracle;

TEST(Oracle, SetupValidation) {
  ConcentricSetup g;
  g.a = 1.2;
  EXPECT_ENZ_ERROR(oracle_scalars(g), ErrorCode::ValidationError);
  g = ConcentricSetup{};
  g.r1 = 0.9;
  EXPECT_ENZ_ERROR(oracle_s(g), ErrorCode::ValidationError);
  g = ConcentricSetup{};
  g.k = -1.0;
  EXPECT_ENZ_ERROR(oracle_scalars(g), ErrorCode::Domain);
}

TEST(Oracle, RejectsNonPositiveDelta) {
  EXPECT_ENZ_ERROR(oracle_transmission(ConcentricSetup{}, 0.0), ErrorCode::Domain);
  EXPECT_ENZ_ERROR(oracle_transmission(ConcentricSetup{}, -1e-2), ErrorCode::Domain);
}

TEST(Oracle, ResonantDopantDetected) {
  ConcentricSetup g;
  g.k = 2.404825557695773 / g.a;
  EXPECT_ENZ_ERROR(oracle_psi_d(g, 0.1), ErrorCode::ResonantDopant);
  EXPECT_ENZ_ERROR(oracle_scalars(g), ErrorCode::ResonantDopant);
}

TEST(Oracle, AuxiliaryProfilesNormalised) {
  ConcentricSetup g;
  EXPECT_NEAR(std::abs(oracle_psi_e(g, g.b) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(oracle_psi_d(g, g.a) - 1.0), 0.0, 1e-14);
  auto s = oracle_s(g);
  EXPECT_NEAR(std::abs(s.value(g.b)), 0.0, 1e-13);
  EXPECT_LT(s.matching_residual(), 1e-12);
}

TEST(Oracle, ScalarIdentities) {
  ConcentricSetup g;
  auto o = oracle_scalars(g);
  EXPECT_NEAR(std::abs(o.c_star + o.flux_s / o.beta), 0.0, 1e-15);
  double enz = kPi * (g.b * g.b - g.a * g.a);
  EXPECT_NEAR(std::abs(o.beta - (g.k * g.k * enz + o.flux_psi_e - o.flux_psi_d)), 0.0, 1e-14);
  // Gauss on the dopant: int lap psi_d = flux, lap psi_d = -k^2 psi_d.
  EXPECT_NEAR(std::abs(o.flux_psi_d + g.k * g.k * o.int_psi_d), 0.0, 1e-13);
  EXPECT_LT(std::imag(g.k * std::conj(o.beta)), 0.0);
}

TEST(Oracle, TransmissionSolvesRadialEquation) {
  ConcentricSetup g;
  auto u = oracle_transmission(g, 0.05);
  EXPECT_LT(u.matching_residual(), 1e-10);
  // u'' + u'/r + k^2 u = 0 in a source-free layer, checked by differences.
  for (double r : {0.15, 1.6, 3.5}) {
    const double e = 1e-4;
    Complex d2 = (u.value(r + e) - 2.0 * u.value(r) + u.value(r - e)) / (e * e);
    Complex res = d2 + u.derivative(r) / r + g.k * g.k * u.value(r);
    EXPECT_LT(std::abs(res), 1e-5 * std::abs(u.value(r)) + 1e-6) << r;
  }
}

TEST(Oracle, OutgoingAtLargeRadius) {
  ConcentricSetup g;
  auto u = oracle_transmission(g, 0.05);
  for (double r : {40.0, 80.0}) {
    Complex ratio = u.derivative(r) / u.value(r);
    EXPECT_NEAR(ratio.imag(), g.k, 2e-2) << r;
  }
}

TEST(Oracle, EnzFieldTendsToConstant) {
  ConcentricSetup g;
  auto o = oracle_scalars(g);
  auto u = oracle_transmission(g, 1e-5);
  for (double r : {0.35, 0.6, 0.95}) EXPECT_LT(std::abs(u.value(r) - o.c_star) / std::abs(o.c_star), 1e-3) << r;
}
