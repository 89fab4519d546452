#pragma once

#include "enz/correctors/correctors.hpp"

namespace enz::direct {

using fem::ScalarField;
using fem::VectorXc;
using fem::Window;
using geometry::Mesh;
using geometry::Region;
using physics::PhysicsConfig;

inline fem::Coefficients transmission_coefficients(const PhysicsConfig& cfg) {
  if (cfg.delta == Complex{} || !std::isfinite(cfg.delta.real()) || !std::isfinite(cfg.delta.imag()))
    fail(ErrorCode::ValidationError, "delta must be nonzero and finite");
  fem::Coefficients co = fem::Coefficients::helmholtz(cfg.k2());
  co.a[static_cast<int>(Region::Enz)] = 1.0 / cfg.delta;
  return co;
}

// One global solve of -div(1/eps grad u) - k^2 u = f with eps = delta on the
// ENZ region and 1 elsewhere, radiating at the truncation.
inline ScalarField solve_transmission(std::shared_ptr<const Mesh> mesh, const PhysicsConfig& cfg,
                                      const fem::ViewPtr& global = nullptr) {
  cfg.validate();
  fem::ViewPtr view = global ? global : fem::RegionView::make(mesh, fem::RegionMask::all());
  fem::AssembledSystem sys = fem::assemble(view, transmission_coefficients(cfg), cfg.k, cfg.radiation_for(*mesh));
  std::vector<geometry::BoundaryTag> tags;
  if (mesh->has_pml()) tags.push_back(geometry::BoundaryTag::PmlOuter);
  VectorXc load = fem::assemble_load(view, cfg.sources);
  return fem::DirichletSolver(std::move(sys), tags, cfg.solve_options()).solve(load);
}

struct Comparison {
  double h1_error = 0.0;
  double l2_error = 0.0;
  double h1_reference = 0.0;  // H1 norm of the first field on the window
  double relative_h1() const { return h1_reference > 0.0 ? h1_error / h1_reference : h1_error; }
};

// Windowed discrete norms of u - v; the default window excludes the PML.
inline Comparison compare(const ScalarField& u, const ScalarField& v, const Window& w = {}) {
  fem::require_same_view(u, v);
  fem::NormParts d = fem::norm_parts(u - v, w);
  Comparison c;
  c.h1_error = d.h1();
  c.l2_error = d.l2();
  c.h1_reference = fem::norm_parts(u, w).h1();
  return c;
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::ValidationError, "slope fit needs at least two points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) fail(ErrorCode::ValidationError, "slope fit needs positive data");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) fail(ErrorCode::ValidationError, "slope fit needs distinct abscissae");
  return sxy / sxx;
}

struct SweepRow {
  Complex delta;
  std::vector<double> h1_error;  // one entry per expansion order 0..orders-1
};

// Direct solves over a list of delta against expansions of orders 0..orders-1
// built from one hierarchy.
inline std::vector<SweepRow> sweep(const correctors::Context& cx, const correctors::CorrectorHierarchy& h,
                                   const std::vector<Complex>& deltas, int orders, const Window& w = {}) {
  if (orders < 1 || orders > h.order + 2) fail(ErrorCode::ValidationError, "expansion order exceeds the hierarchy");
  std::vector<SweepRow> rows;
  const auto& ws = cx.workspace();
  for (Complex d : deltas) {
    PhysicsConfig cfg = ws.config();
    cfg.delta = d;
    ScalarField u = solve_transmission(ws.mesh_ptr(), cfg, ws.views().global);
    SweepRow row{d, {}};
    for (int J = 0; J < orders; ++J) row.h1_error.push_back(compare(u, correctors::assemble_v_delta(cx, h, d, J), w).h1_error);
    rows.push_back(std::move(row));
  }
  return rows;
}

// -Im((1/delta) int_ENZ |grad u|^2); nonnegative for a lossy ENZ (Im delta > 0).
inline double enz_absorption(const ScalarField& u, Complex delta) {
  double g = fem::norm_parts(u, Window::regions(fem::RegionMask::of({Region::Enz}))).grad_sq;
  return -(g / delta).imag();
}

// Relative H1(ENZ) deviation of u from its ENZ mean.
inline double enz_flatness(const ScalarField& u) {
  Window w = Window::regions(fem::RegionMask::of({Region::Enz}));
  const Mesh& m = u.mesh();
  double area = 0.0;
  for (int t : u.view->triangles)
    if (w.admits(m, t)) area += m.area(t);
  Complex mean = fem::integral(u, w) / area;
  ScalarField c{u.view, VectorXc::Constant(u.values.size(), mean)};
  return fem::norm_parts(u - c, w).h1() / fem::norm_parts(u, w).h1();
}

}  // namespace enz::direct
