#include <sstream>

#include "enz/fields/fields.hpp"
#include "support.hpp"

using namespace enz;
using namespace enz::fields;

namespace {
fem::ScalarField phi0() {
  const auto& s = fixtures::generic_setup();
  return correctors::op_Pk(s.cx, correctors::seed(s.cx));
}
}  // namespace

TEST(Fields, GradientOfLinearFieldExact) {
  const auto& s = fixtures::generic_setup();
  auto v = s.ws.views().enz;
  fem::VectorXc x(v->size());
  for (int i = 0; i < v->size(); ++i) {
    Vec2 p = v->mesh->nodes[v->nodes[i]];
    x[i] = Complex(3.0 * p.x, -p.y);
  }
  fem::ScalarField u(v, x);
  for (int t : v->triangles) {
    auto g = p1_gradient(u, t);
    ASSERT_NEAR(std::abs(g[0] - 3.0), 0.0, 1e-11);
    ASSERT_NEAR(std::abs(g[1] - Complex(0.0, -1.0)), 0.0, 1e-11);
  }
}

TEST(Fields, PoyntingSkipsPmlAndScalesWithEps) {
  const auto& s = fixtures::generic_setup();
  auto u = direct::solve_transmission(s.ws.mesh_ptr(), s.cfg, s.ws.views().global);
  auto a = compute_poynting(u, 1.0, 0.01), b = compute_poynting(u, 1.0, 0.02);
  ASSERT_EQ(a.triangles.size(), b.triangles.size());
  for (std::size_t i = 0; i < a.triangles.size(); ++i) {
    ASSERT_NE(a.region(i), geometry::Region::Pml);
    double f = a.region(i) == geometry::Region::Enz ? 2.0 : 1.0;
    ASSERT_NEAR(std::abs(a.values[i][0] - f * b.values[i][0]), 0.0, 1e-12 * (1.0 + std::abs(a.values[i][0])));
  }
  EXPECT_ENZ_ERROR(compute_poynting(u, 1.0, 0.0), ErrorCode::ValidationError);
  EXPECT_ENZ_ERROR(compute_poynting(u, 0.0, 0.01), ErrorCode::ValidationError);
}

TEST(Fields, LimitFieldIsIdealFluid) {
  const auto& s = fixtures::generic_setup();
  auto p = phi0();
  auto r = ideal_fluid_residuals(p, s.aux, s.cfg);
  EXPECT_GT(r.scale, 0.0);
  for (double v : {r.div, r.curl, r.bc_omega, r.bc_dopant, r.w_real, r.w_imag}) EXPECT_LE(v, 1e-8 * r.scale);
  EXPECT_NEAR(r.div_constant.real(), 0.0, 1e-15);
  EXPECT_NEAR(r.div_constant.imag(), 0.5 * s.cfg.omega * std::norm(s.aux.c_star) * s.cfg.mu.real(), 1e-15);
}

TEST(Fields, ResidualsNeedEnzField) {
  const auto& s = fixtures::generic_setup();
  EXPECT_ENZ_ERROR(ideal_fluid_residuals(s.aux.psi_d, s.aux, s.cfg), ErrorCode::TagMismatch);
}

TEST(Fields, GapShrinksWithDelta) {
  const auto& s = fixtures::generic_setup();
  auto lim = limit_poynting(phi0(), s.aux.c_star, s.cfg.omega);
  EXPECT_EQ(enz_l2_gap(lim, lim), 0.0);
  double prev = 1e300;
  for (double d : {1e-1, 1e-2, 1e-3}) {
    auto c = s.cfg;
    c.delta = d;
    auto u = direct::solve_transmission(s.ws.mesh_ptr(), c, s.ws.views().global);
    double g = enz_l2_gap(compute_poynting(u, c.omega, c.delta), lim);
    EXPECT_LT(g, prev);
    prev = g;
  }
}

TEST(Fields, GapNeedsMatchingTriangles) {
  const auto& s = fixtures::generic_setup();
  auto lim = limit_poynting(phi0(), s.aux.c_star, s.cfg.omega);
  auto cut = lim;
  cut.triangles.pop_back();
  cut.values.pop_back();
  EXPECT_ENZ_ERROR(enz_l2_gap(lim, cut), ErrorCode::TagMismatch);
}

TEST(Fields, CsvLayout) {
  const auto& s = fixtures::generic_setup();
  auto lim = limit_poynting(phi0(), s.aux.c_star, s.cfg.omega);
  std::ostringstream os;
  write_vector_csv(os, lim);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "tri_centroid_x,y,S1_re,S1_im,S2_re,S2_im,region");
  std::getline(is, line);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
  EXPECT_NE(line.find("ENZ"), std::string::npos);
}
