#include "support.hpp"

using namespace enz;
using namespace enz::correctors;

namespace {
const CorrectorHierarchy& hierarchy() {
  static CorrectorHierarchy h = [] {
    auto h = build_hierarchy(fixtures::generic_setup().cx, 6);
    h.rho_hat = estimate_radius(fixtures::generic_setup().cx, 20, 7).rho_hat;
    return h;
  }();
  return h;
}
}  // namespace

TEST(Correctors, SeedHasSourceFluxOnly) {
  const auto& s = fixtures::generic_setup();
  auto st = seed(s.cx);
  EXPECT_EQ(st.g.values.norm(), 0.0);
  EXPECT_EQ(st.h_d.values.norm(), 0.0);
  EXPECT_NEAR(std::abs(st.h_e.total() - s.aux.flux_s.total()), 0.0, 1e-14);
}

TEST(Correctors, HierarchyShapes) {
  const auto& h = hierarchy();
  EXPECT_EQ(h.order, 6);
  EXPECT_EQ(h.e.size(), 7u);
  EXPECT_EQ(h.phi.size(), 7u);
  EXPECT_EQ(h.states.size(), 8u);
  EXPECT_EQ(h.c_delta(0.3, 0), h.c_star);
}

TEST(Correctors, PhiHasZeroMean) {
  const auto& s = fixtures::generic_setup();
  for (const auto& phi : hierarchy().phi) EXPECT_LT(std::abs(mean(s.ws, phi)), 1e-12 * (1.0 + phi.values.norm()));
}

TEST(Correctors, StepIsLinear) {
  const auto& s = fixtures::generic_setup();
  const auto& h = hierarchy();
  auto a = op_Ik(s.cx, h.states[1]), b = op_Ik(s.cx, h.states[2]);
  Complex al(0.3, -1.2);
  auto c = op_Ik(s.cx, al * h.states[1] + h.states[2]);
  auto d = c - (al * a + b);
  EXPECT_LT(state_norm(s.ws, d), 1e-10 * state_norm(s.ws, c));
}

TEST(Correctors, InterfacesMatch) {
  EXPECT_LT(interface_jump(fixtures::generic_setup().cx, hierarchy(), Complex(0.05, 0.01), 4), 1e-14);
}

TEST(Correctors, SeriesConvergesInsideRadius) {
  const auto& s = fixtures::generic_setup();
  const auto& h = hierarchy();
  ASSERT_GT(h.rho_hat, 0.0);
  Complex d = 0.1 / h.rho_hat;
  auto rc = resolvent_check(s.cx, h, d);
  EXPECT_LT(rc.residual, 1e-6);
  EXPECT_LT(rc.tail_ratio, 0.5);
}

TEST(Correctors, OrderBoundsChecked) {
  const auto& s = fixtures::generic_setup();
  const auto& h = hierarchy();
  EXPECT_ENZ_ERROR(h.c_delta(0.1, 9), ErrorCode::ValidationError);
  EXPECT_ENZ_ERROR(assemble_v_delta(s.cx, h, 0.1, -1), ErrorCode::ValidationError);
  EXPECT_ENZ_ERROR(build_hierarchy(s.cx, -1), ErrorCode::ValidationError);
}

TEST(Correctors, DivergentSeriesFlagged) {
  const auto& s = fixtures::generic_setup();
  const auto& h = hierarchy();
  EXPECT_ENZ_ERROR(assemble_v_delta(s.cx, h, 2.0 / h.rho_hat, 7, true), ErrorCode::DivergentSeries);
  EXPECT_NO_THROW(assemble_v_delta(s.cx, h, 2.0 / h.rho_hat, 7, false));
}

TEST(Correctors, RadiusNeedsIterations) {
  EXPECT_ENZ_ERROR(estimate_radius(fixtures::generic_setup().cx, 5, 1), ErrorCode::ValidationError);
}

TEST(Correctors, RadiusDeterministicForSeed) {
  const auto& cx = fixtures::generic_setup().cx;
  auto a = estimate_radius(cx, 12, 3), b = estimate_radius(cx, 12, 3);
  EXPECT_EQ(a.rho_hat, b.rho_hat);
  EXPECT_EQ(a.ratios, b.ratios);
}

TEST(Correctors, ResolventNeedsTwoStates) {
  const auto& s = fixtures::generic_setup();
  auto h = build_hierarchy(s.cx, 0);
  h.states.resize(2);
  EXPECT_ENZ_ERROR(resolvent_check(s.cx, h, 0.1), ErrorCode::ValidationError);
}

TEST(Correctors, FirstCorrectionMatchesFiniteDifference) {
  // e_0 = d c_delta / d delta at 0 against two direct solves.
  const auto& s = fixtures::generic_setup();
  const auto& h = hierarchy();
  auto c_at = [&](double d) {
    auto cfg = s.cfg;
    cfg.delta = d;
    auto u = direct::solve_transmission(s.ws.mesh_ptr(), cfg, s.ws.views().global);
    auto enz = fem::restrict_to(u, s.ws.views().enz);
    return fem::integral(enz) / s.ws.measures().of(geometry::Region::Enz);
  };
  // Mean ENZ value is c_delta + O(delta) mean of phi, which has zero mean.
  double d = 1e-3;
  Complex fd = (c_at(d) - c_at(-d)) / (2 * d);
  EXPECT_LT(std::abs(fd - h.e[0]) / std::abs(h.e[0]), 1e-3);
}
