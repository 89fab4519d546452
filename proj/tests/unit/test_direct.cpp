#include "support.hpp"

using namespace enz;
using namespace enz::direct;

TEST(Direct, ZeroDeltaRejected) {
  auto cfg = fixtures::generic_physics();
  cfg.delta = 0.0;
  EXPECT_ENZ_ERROR(transmission_coefficients(cfg), ErrorCode::ValidationError);
  EXPECT_ENZ_ERROR(solve_transmission(fixtures::generic_mesh(), cfg), ErrorCode::ValidationError);
}

TEST(Direct, CoefficientsPerRegion) {
  auto cfg = fixtures::generic_physics();
  cfg.delta = Complex(0.0, 0.02);
  auto co = transmission_coefficients(cfg);
  EXPECT_EQ(co.a[static_cast<int>(geometry::Region::Enz)], 1.0 / Complex(0.0, 0.02));
  EXPECT_EQ(co.a[static_cast<int>(geometry::Region::Dopant)], Complex(1.0));
  EXPECT_EQ(co.c[static_cast<int>(geometry::Region::Exterior)], cfg.k2());
}

TEST(Direct, SlopeOfPowerLaw) {
  std::vector<double> x{1e-1, 1e-2, 1e-3}, y;
  for (double v : x) y.push_back(5.0 * v * v);
  EXPECT_NEAR(loglog_slope(x, y), 2.0, 1e-12);
}

TEST(Direct, SlopeInputErrors) {
  EXPECT_ENZ_ERROR(loglog_slope({1.0}, {1.0}), ErrorCode::ValidationError);
  EXPECT_ENZ_ERROR(loglog_slope({1.0, 2.0}, {1.0}), ErrorCode::ValidationError);
  EXPECT_ENZ_ERROR(loglog_slope({1.0, 2.0}, {1.0, 0.0}), ErrorCode::ValidationError);
  EXPECT_ENZ_ERROR(loglog_slope({2.0, 2.0}, {1.0, 3.0}), ErrorCode::ValidationError);
}

TEST(Direct, CompareIdenticalIsZero) {
  const auto& s = fixtures::generic_setup();
  auto u = solve_transmission(s.ws.mesh_ptr(), s.cfg, s.ws.views().global);
  auto c = compare(u, u);
  EXPECT_EQ(c.h1_error, 0.0);
  EXPECT_GT(c.h1_reference, 0.0);
  EXPECT_ENZ_ERROR(compare(u, s.aux.psi_e), ErrorCode::TagMismatch);
}

TEST(Direct, LossyEnzAbsorbsGainEmits) {
  const auto& s = fixtures::generic_setup();
  for (double sign : {1.0, -1.0}) {
    auto cfg = s.cfg;
    cfg.delta = Complex(0.0, sign * 0.05);
    auto u = solve_transmission(s.ws.mesh_ptr(), cfg, s.ws.views().global);
    EXPECT_GT(sign * enz_absorption(u, cfg.delta), 0.0);
  }
}

TEST(Direct, EnzFieldFlattensAsDeltaShrinks) {
  const auto& s = fixtures::generic_setup();
  double prev = 1e300;
  for (double d : {1e-1, 1e-2, 1e-3}) {
    auto cfg = s.cfg;
    cfg.delta = d;
    double f = enz_flatness(solve_transmission(s.ws.mesh_ptr(), cfg, s.ws.views().global));
    EXPECT_LT(f, prev);
    prev = f;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(Direct, SweepOrderBound) {
  const auto& s = fixtures::generic_setup();
  auto h = correctors::build_hierarchy(s.cx, 1);
  EXPECT_ENZ_ERROR(sweep(s.cx, h, {0.1}, 4), ErrorCode::ValidationError);
  EXPECT_ENZ_ERROR(sweep(s.cx, h, {0.1}, 0), ErrorCode::ValidationError);
  auto rows = sweep(s.cx, h, {0.02}, 3);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GT(rows[0].h1_error[0], rows[0].h1_error[1]);
  EXPECT_GT(rows[0].h1_error[1], rows[0].h1_error[2]);
}

TEST(Direct, RobinTruncationWithoutPml) {
  geometry::DomainSpec d;
  d.dopant = geometry::Circle{{0.3, 0.0}, 0.2};
  d.pml_thickness = 0.0;
  auto mesh = std::make_shared<const geometry::Mesh>(geometry::build_mesh(d, 0.1));
  auto cfg = fixtures::generic_physics();
  auto u = solve_transmission(mesh, cfg);
  EXPECT_TRUE(std::isfinite(u.values.norm()));
  EXPECT_GT(u.values.norm(), 0.0);
}
