#pragma once

#include <optional>

#include "enz/fem/assembly.hpp"

namespace enz::fem {

// Triangles are selected by their centroid: region mask and, optionally, a disk.
struct Window {
  RegionMask mask = RegionMask::of({Region::Dopant, Region::Enz, Region::Exterior});
  std::optional<geometry::Circle> disk;

  static Window regions(RegionMask m) { return {m, std::nullopt}; }
  static Window disk_window(geometry::Circle c) { return {RegionMask::of({Region::Dopant, Region::Enz, Region::Exterior}), c}; }
  static Window everything() { return {RegionMask::all(), std::nullopt}; }

  bool admits(const Mesh& m, int t) const {
    if (!mask.has(m.regions[t])) return false;
    if (disk && !(distance(m.centroid(t), disk->center) < disk->radius)) return false;
    return true;
  }
};

struct NormParts {
  double l2_sq = 0.0;
  double grad_sq = 0.0;
  double l2() const { return std::sqrt(l2_sq); }
  double h1() const { return std::sqrt(l2_sq + grad_sq); }
};

inline NormParts norm_parts(const ScalarField& u, const Window& w) {
  const Mesh& m = u.mesh();
  CompensatedSum<double> l2, gr;
  bool any = false;
  for (int t : u.view->triangles) {
    if (!w.admits(m, t)) continue;
    any = true;
    const auto& v = m.triangles[t];
    TriangleGeometry g = triangle_geometry(m, t);
    Complex ui[3];
    for (int i = 0; i < 3; ++i) ui[i] = u.values[u.view->local[v[i]]];
    double s = std::norm(ui[0]) + std::norm(ui[1]) + std::norm(ui[2]) + std::norm(ui[0] + ui[1] + ui[2]);
    l2.add(g.area / 12.0 * s);
    Complex gx = ui[0] * g.grad[0].x + ui[1] * g.grad[1].x + ui[2] * g.grad[2].x;
    Complex gy = ui[0] * g.grad[0].y + ui[1] * g.grad[1].y + ui[2] * g.grad[2].y;
    gr.add(g.area * (std::norm(gx) + std::norm(gy)));
  }
  if (!any) fail(ErrorCode::EmptyWindow, "window contains no triangles of the field");
  return {l2.value(), gr.value()};
}

inline double h1_norm(const ScalarField& u, const Window& w = {}) { return norm_parts(u, w).h1(); }
inline double l2_norm(const ScalarField& u, const Window& w = {}) { return norm_parts(u, w).l2(); }

// int_window u over admitted triangles.
inline Complex integral(const ScalarField& u, const Window& w = Window::everything()) {
  const Mesh& m = u.mesh();
  CompensatedSum<Complex> s;
  for (int t : u.view->triangles) {
    if (!w.admits(m, t)) continue;
    const auto& v = m.triangles[t];
    Complex sum = u.values[u.view->local[v[0]]] + u.values[u.view->local[v[1]]] + u.values[u.view->local[v[2]]];
    s.add(m.area(t) / 3.0 * sum);
  }
  return s.value();
}

// Field restricted to a sub-region view (values copied node by node).
inline ScalarField restrict_to(const ScalarField& u, const ViewPtr& target) {
  VectorXc vals(target->size());
  for (int l = 0; l < target->size(); ++l) {
    int g = target->nodes[l];
    int src = u.view->local[g];
    if (src < 0) fail(ErrorCode::TagMismatch, "target region is not covered by the field");
    vals[l] = u.values[src];
  }
  return {target, std::move(vals)};
}

}  // namespace enz::fem
