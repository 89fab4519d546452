#include "enz/resonance/resonance.hpp"
#include "support.hpp"

using namespace enz;
using namespace enz::resonance;

namespace {
fem::ViewPtr dopant_view() {
  static auto v = fem::RegionView::make(fixtures::concentric_mesh(), fem::RegionMask::of({geometry::Region::Dopant}));
  return v;
}
}  // namespace

TEST(Resonance, DiskEigenvalues) {
  EXPECT_NEAR(disk_eigenvalue(0, 0.3), std::pow(2.404825557695773 / 0.3, 2), 1e-9);
  EXPECT_NEAR(disk_eigenvalue(1, 1.0), std::pow(3.831705970207512, 2), 1e-9);
}

TEST(Resonance, RadialModeIsExcited) {
  auto c = find_cluster(dopant_view(), disk_eigenvalue(0, 0.3));
  ASSERT_EQ(c.modes.size(), 1u);
  EXPECT_EQ(classify(c), Excitation::Excited);
  EXPECT_GT(std::abs(c.means[0]), 0.1);
  EXPECT_STREQ(excitation_name(classify(c)), "EXCITED");
}

TEST(Resonance, AngularPairIsNotExcited) {
  auto c = find_cluster(dopant_view(), disk_eigenvalue(1, 0.3));
  ASSERT_EQ(c.modes.size(), 2u);
  EXPECT_EQ(classify(c), Excitation::NotExcited);
  EXPECT_ENZ_ERROR(compute_Cbar(c, 1.0), ErrorCode::Degenerate);
}

TEST(Resonance, WavenumberBranch) {
  for (Complex k2 : {Complex(4.0, 0.0), Complex(4.0, -1e-3), Complex(4.0, 1e-3), Complex(-1.0, 0.0)}) {
    Complex k = wavenumber(k2);
    EXPECT_GE(std::arg(k), 0.0);
    EXPECT_LT(std::arg(k), kPi);
    EXPECT_NEAR(std::abs(k * k - k2), 0.0, 1e-14);
  }
}

TEST(Resonance, CbarFormula) {
  ModeCluster c;
  c.lambda_star = 2.0;
  c.means = {0.5};
  c.l1 = {1.0};
  EXPECT_NEAR(std::abs(compute_Cbar(c, Complex(1.0, 1.0)) - Complex(-1.0, -1.0)), 0.0, 1e-15);
}

TEST(Resonance, RichardsonExactForLinearRatio) {
  std::vector<GammaRecord> p(3);
  Complex a(2.0, 1.0), b(0.5, -0.3);
  for (int i = 0; i < 3; ++i) {
    p[i].gamma = std::pow(10.0, -1 - i);
    p[i].c_star = p[i].gamma * (a + b * p[i].gamma);
  }
  EXPECT_NEAR(std::abs(richardson_cbar(p) - a), 0.0, 1e-13);
  EXPECT_ENZ_ERROR(richardson_cbar({p[0]}), ErrorCode::ValidationError);
}

TEST(Resonance, SweepRequiresExcitedMode) {
  StudyOptions so;
  so.target = disk_eigenvalue(1, 0.3);
  so.gammas = {1e-2};
  EXPECT_ENZ_ERROR(gamma_sweep(fixtures::concentric_mesh(), fixtures::generic_physics(), so), ErrorCode::ValidationError);
}

TEST(Resonance, ShortSweepScalings) {
  StudyOptions so;
  so.target = disk_eigenvalue(0, 0.3);
  so.gammas = {1e-1, 1e-2};
  auto st = gamma_sweep(fixtures::concentric_mesh(), fixtures::generic_physics(), so);
  auto s = path_slopes(st.real_path);
  EXPECT_NEAR(s.c_star, 1.0, 0.1);
  EXPECT_NEAR(s.mu_eff, -1.0, 0.1);
  EXPECT_LT(std::abs(richardson_cbar(st.real_path) - st.c_bar) / std::abs(st.c_bar), 2e-2);
  // The dopant datum of the limit problem balances the source flux.
  EXPECT_LT(std::abs(limit_dopant_flux(st.cluster, st.c_bar).total() - st.flux_s_star.total()),
            1e-6 * std::abs(st.flux_s_star.total()));
}

TEST(Resonance, NotExcitedLeavesCstarUnchanged) {
  auto r = not_excited_study(fixtures::concentric_mesh(), fixtures::generic_physics(), disk_eigenvalue(1, 0.3),
                             {Complex(0.5, 0.0), Complex(0.0, 0.5)});
  EXPECT_EQ(r.excitation, Excitation::NotExcited);
  EXPECT_LT(std::abs(r.c_star - r.c_star_shifted), 1e-8 * std::abs(r.c_star));
  EXPECT_GT(r.chi0_change, 1e-3);
  EXPECT_ENZ_ERROR(not_excited_study(fixtures::concentric_mesh(), fixtures::generic_physics(), disk_eigenvalue(0, 0.3), {}),
                   ErrorCode::ValidationError);
}
