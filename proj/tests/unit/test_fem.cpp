#include <sstream>

#include "enz/fem/eigen.hpp"
#include "enz/fem/recovery.hpp"
#include "enz/special/bessel.hpp"
#include "support.hpp"

using namespace enz;
using namespace enz::fem;

namespace {

ViewPtr omega_view(const std::shared_ptr<const Mesh>& m) {
  return RegionView::make(m, RegionMask::of({Region::Dopant, Region::Enz}));
}

ScalarField sample(const ViewPtr& v, const std::function<Complex(Vec2)>& f) {
  VectorXc x(v->size());
  for (int i = 0; i < v->size(); ++i) x[i] = f(v->mesh->nodes[v->nodes[i]]);
  return {v, x};
}

}  // namespace

TEST(Fem, MassMatrixIntegratesArea) {
  auto m = fixtures::small_mesh(0.15);
  auto v = omega_view(m);
  SparseR mass = mass_matrix(v);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(v->size());
  EXPECT_NEAR(one.dot(mass * one), geometry::region_measures(*m).omega_area(), 1e-12);
}

TEST(Fem, PatchTestReproducesLinearField) {
  auto m = fixtures::small_mesh(0.15);
  auto v = omega_view(m);
  auto lin = [](Vec2 p) { return Complex(2.0 - p.x + 4.0 * p.y, p.y); };
  auto sys = assemble(v, Coefficients::laplace(), 1.0);
  auto nodes = m->boundary_nodes(BoundaryTag::GammaOmega);
  VectorXc g(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) g[i] = lin(m->nodes[nodes[i]]);
  auto u = solve(sys, VectorXc(), {{BoundaryTag::GammaOmega, g}});
  for (int i = 0; i < v->size(); ++i) ASSERT_NEAR(std::abs(u.values[i] - lin(m->nodes[v->nodes[i]])), 0.0, 1e-12);
}

TEST(Fem, ZeroCoefficientRejected) {
  auto m = fixtures::small_mesh(0.2);
  Coefficients co;
  co.a[static_cast<int>(Region::Enz)] = 0.0;
  EXPECT_ENZ_ERROR(assemble(omega_view(m), co, 1.0), ErrorCode::ZeroCoefficient);
}

TEST(Fem, TraceOnUnconstrainedTagRejected) {
  auto m = fixtures::small_mesh(0.2);
  auto v = omega_view(m);
  DirichletSolver ds(assemble(v, Coefficients::helmholtz(1.0), 1.0), {BoundaryTag::GammaOmega});
  auto nd = m->boundary_nodes(BoundaryTag::GammaD).size();
  EXPECT_ENZ_ERROR(ds.solve(VectorXc(), {{BoundaryTag::GammaD, VectorXc::Ones(nd)}}), ErrorCode::TagMismatch);
  EXPECT_ENZ_ERROR(ds.solve(VectorXc(), {{BoundaryTag::GammaOmega, VectorXc::Ones(3)}}), ErrorCode::TagMismatch);
}

TEST(Fem, TagNotOnRegionRejected) {
  auto m = fixtures::small_mesh(0.2);
  auto dop = RegionView::make(m, RegionMask::of({Region::Dopant}));
  EXPECT_ENZ_ERROR(dop->local_nodes(BoundaryTag::GammaOmega), ErrorCode::TagMismatch);
}

TEST(Fem, PureNeumannHelmholtzAtZeroIsSingular) {
  auto m = fixtures::small_mesh(0.2);
  auto v = RegionView::make(m, RegionMask::of({Region::Enz}));
  SparseC k = assemble(v, Coefficients::laplace(), 1.0).matrix;
  EXPECT_ENZ_ERROR(FactorizationC{k}, ErrorCode::SingularSystem);
}

TEST(Fem, NeumannSolverMeanZeroAndCompatibility) {
  auto m = fixtures::small_mesh(0.15);
  auto v = RegionView::make(m, RegionMask::of({Region::Enz}));
  MeanZeroNeumannSolver ns(v);
  // Unit outward flux on dOmega balanced by a constant volume sink.
  auto on = BoundaryFunctional::zero(m, BoundaryTag::GammaOmega);
  on.values = boundary_lumped_mass(*m, BoundaryTag::GammaOmega).cast<Complex>();
  double len = on.values.sum().real();
  VectorXc vol = VectorXc::Constant(v->size(), -len / ns.measure());
  auto r = ns.solve(vol, {on});
  EXPECT_NEAR(std::abs(integral(r.field)), 0.0, 1e-12);
  EXPECT_ENZ_ERROR(ns.solve(VectorXc(), {on}), ErrorCode::IncompatibleData);
}

TEST(Fem, ZeroDataGivesZeroNeumannSolution) {
  auto m = fixtures::small_mesh(0.2);
  MeanZeroNeumannSolver ns(RegionView::make(m, RegionMask::of({Region::Enz})));
  auto r = ns.solve(VectorXc(), {});
  EXPECT_EQ(r.field.values.norm(), 0.0);
}

TEST(Fem, VariationalFluxOfLogPotential) {
  // u = log r on the ENZ annulus: total canonical flux on either circle is 2 pi.
  auto m = fixtures::small_mesh(0.1);
  auto v = RegionView::make(m, RegionMask::of({Region::Enz}));
  auto sys = assemble(v, Coefficients::laplace(), 1.0);
  auto lg = [&](BoundaryTag t) {
    auto nodes = m->boundary_nodes(t);
    VectorXc g(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) g[i] = std::log(norm(m->nodes[nodes[i]]));
    return Trace{t, g};
  };
  auto u = solve(sys, VectorXc(), {lg(BoundaryTag::GammaD), lg(BoundaryTag::GammaOmega)});
  EXPECT_NEAR(flux_extract(u, sys, BoundaryTag::GammaOmega).total().real(), 2 * kPi, 2e-2);
  EXPECT_NEAR(flux_extract(u, sys, BoundaryTag::GammaD).total().real(), 2 * kPi, 2e-2);
  EXPECT_EQ(orientation_sign(*v, BoundaryTag::GammaOmega), 1.0);
  EXPECT_EQ(orientation_sign(*v, BoundaryTag::GammaD), -1.0);
}

TEST(Fem, NormsAndWindows) {
  auto m = fixtures::small_mesh(0.15);
  auto v = omega_view(m);
  auto one = sample(v, [](Vec2) { return Complex(1.0); });
  EXPECT_NEAR(l2_norm(one), std::sqrt(geometry::region_measures(*m).omega_area()), 1e-12);
  auto lin = sample(v, [](Vec2 p) { return Complex(p.x, 0.0); });
  auto parts = norm_parts(lin, Window{});
  EXPECT_NEAR(parts.grad_sq, geometry::region_measures(*m).omega_area(), 1e-12);
  EXPECT_ENZ_ERROR(norm_parts(lin, Window::regions(RegionMask::of({Region::Pml}))), ErrorCode::EmptyWindow);
  EXPECT_ENZ_ERROR(norm_parts(lin, Window::disk_window({{10.0, 10.0}, 0.1})), ErrorCode::EmptyWindow);
}

TEST(Fem, FieldArithmeticNeedsSameRegion) {
  auto m = fixtures::small_mesh(0.2);
  auto a = ScalarField::zero(omega_view(m));
  auto b = ScalarField::zero(RegionView::make(m, RegionMask::of({Region::Enz})));
  EXPECT_ENZ_ERROR(a + b, ErrorCode::TagMismatch);
  EXPECT_ENZ_ERROR(ScalarField(a.view, VectorXc::Zero(3)), ErrorCode::TagMismatch);
  EXPECT_ENZ_ERROR(restrict_to(b, a.view), ErrorCode::TagMismatch);
}

TEST(Fem, ManufacturedLoadConverges) {
  auto ex = [](Vec2 p) { return Complex(std::sin(p.x) * std::cos(p.y), 0.0); };
  auto f = [](Vec2 p) { return Complex(std::sin(p.x) * std::cos(p.y), 0.0); };  // -lap u - u = u
  std::vector<double> err;
  for (double h : {0.2, 0.1}) {
    auto m = fixtures::small_mesh(h);
    auto v = omega_view(m);
    auto sys = assemble(v, Coefficients::helmholtz(1.0), 1.0);
    auto nodes = m->boundary_nodes(BoundaryTag::GammaOmega);
    VectorXc g(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) g[i] = ex(m->nodes[nodes[i]]);
    auto u = solve(sys, assemble_load(v, f), {{BoundaryTag::GammaOmega, g}});
    err.push_back(l2_norm(u - sample(v, ex)));
  }
  EXPECT_GT(err[0] / err[1], 3.0);
}

TEST(Fem, SourceLoadIntegratesAmplitude) {
  auto m = fixtures::concentric_mesh();
  auto v = RegionView::make(m, RegionMask::all());
  geometry::SourceSpec s;
  s.disks.push_back({{2.5, 0.0}, 0.2, {2.0, -1.0}});
  Complex total = assemble_load(v, s).sum();
  const Complex exact = Complex(2.0, -1.0) * kPi * 0.04;
  EXPECT_LT(std::abs(total - exact), 1e-3 * std::abs(exact));
}

TEST(Fem, GradientRecoveryExactOnQuadratics) {
  auto m = fixtures::small_mesh(0.15);
  auto v = omega_view(m);
  auto u = sample(v, [](Vec2 p) { return Complex(p.x * p.x - 2.0 * p.x * p.y, p.y); });
  GradientRecovery gr(u, v->mask);
  int g = v->nodes[v->size() / 2];
  Vec2 p = m->nodes[g];
  auto d = gr.at(g);
  EXPECT_NEAR(std::abs(d[0] - Complex(2 * p.x - 2 * p.y, 0.0)), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(d[1] - Complex(-2 * p.x, 1.0)), 0.0, 1e-9);
}

TEST(Fem, DirichletEigenvaluesOfDisk) {
  auto m = fixtures::concentric_mesh();
  auto dop = RegionView::make(m, RegionMask::of({Region::Dopant}));
  double target = std::pow(2.404825557695773 / 0.3, 2);
  auto e = dirichlet_eigs(dop, {BoundaryTag::GammaD}, 1, target);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_NEAR(e[0].value / target, 1.0, 5e-2);
  EXPECT_GT(e[0].value, target);  // conforming P1 overestimates
  EXPECT_LE(e[0].residual, 1e-8);
  EXPECT_ENZ_ERROR(dirichlet_eigs(dop, {BoundaryTag::GammaD}, 0, target), ErrorCode::ValidationError);
}

TEST(Fem, PmlAbsorbsOutgoingWave) {
  // Exterior problem with unit data on dOmega against the Hankel solution.
  auto m = fixtures::concentric_mesh();
  auto v = RegionView::make(m, RegionMask::of({Region::Exterior, Region::Pml}));
  auto sys = assemble(v, Coefficients::helmholtz(1.0), 1.0, RadiationSpec::pml(1.0));
  DirichletSolver ds(sys, {BoundaryTag::GammaOmega, BoundaryTag::PmlOuter});
  auto n = m->boundary_nodes(BoundaryTag::GammaOmega).size();
  auto u = ds.solve(VectorXc(), {{BoundaryTag::GammaOmega, VectorXc::Ones(n)}});
  double worst = 0.0;
  for (int i = 0; i < v->size(); ++i) {
    double r = norm(m->nodes[v->nodes[i]]);
    if (r > 1.0 && r < 3.0)
      worst = std::max(worst, std::abs(u.values[i] - special::h0(r) / special::h0(1.0)));
  }
  EXPECT_LT(worst, 2e-2);
}

TEST(Fem, CsvHasHeaderAndFullPrecision) {
  auto m = fixtures::small_mesh(0.2);
  auto v = omega_view(m);
  auto u = sample(v, [](Vec2) { return Complex(1.0 / 3.0, 0.0); });
  std::ostringstream os;
  write_field_csv(os, u);
  std::string s = os.str();
  EXPECT_EQ(s.rfind("node_index,x,y,re,im\n", 0), 0u);
  EXPECT_NE(s.find("0.33333333333333331"), std::string::npos);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}
