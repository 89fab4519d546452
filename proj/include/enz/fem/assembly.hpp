#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <functional>
#include <optional>

#include "enz/fem/field.hpp"
#include "enz/geometry/source.hpp"

namespace enz::fem {

using SparseC = Eigen::SparseMatrix<Complex>;
using SparseR = Eigen::SparseMatrix<double>;

struct RadiationSpec {
  enum class Mode { RobinAbc, Pml };
  Mode mode = Mode::Pml;
  int order = 2;
  double sigma0 = 0.0;

  // Strength giving a theoretical normal-incidence reflection of 1e-6.
  static RadiationSpec pml(double thickness, int order = 2) {
    return {Mode::Pml, order, (order + 1) * std::log(1e6) / (2.0 * thickness)};
  }
  static RadiationSpec robin() { return {Mode::RobinAbc, 2, 0.0}; }
};

// Per-region coefficients of  int a grad u . grad v - c u v.
struct Coefficients {
  std::array<Complex, geometry::kRegionCount> a{Complex(1), Complex(1), Complex(1), Complex(1)};
  std::array<Complex, geometry::kRegionCount> c{};

  static Coefficients helmholtz(Complex k2) {
    Coefficients co;
    co.c.fill(k2);
    return co;
  }
  static Coefficients laplace() { return {}; }
};

struct AssembledSystem {
  ViewPtr view;
  SparseC matrix;
};

struct TriangleGeometry {
  double area;
  std::array<Vec2, 3> grad;  // gradients of the barycentric functions
};

inline TriangleGeometry triangle_geometry(const Mesh& m, int t) {
  const auto& v = m.triangles[t];
  Vec2 p[3] = {m.nodes[v[0]], m.nodes[v[1]], m.nodes[v[2]]};
  double a2 = cross(p[1] - p[0], p[2] - p[0]);
  TriangleGeometry g;
  g.area = 0.5 * a2;
  for (int i = 0; i < 3; ++i) {
    Vec2 e = p[(i + 2) % 3] - p[(i + 1) % 3];
    g.grad[i] = {-e.y / a2, e.x / a2};
  }
  return g;
}

namespace detail {

struct PmlCoefficient {
  std::array<std::array<Complex, 2>, 2> tensor;
  Complex mass;
};

inline PmlCoefficient pml_coefficient(Vec2 x, Complex k, double rt, double thickness, const RadiationSpec& rad) {
  double r = norm(x);
  double xi = std::max(0.0, r - rt) / thickness;
  double sigma = rad.sigma0 * std::pow(xi, rad.order);
  double integral = rad.sigma0 * thickness / (rad.order + 1) * std::pow(xi, rad.order + 1);
  Complex sr = 1.0 + kI * sigma / k;
  Complex st = (r + kI * integral / k) / r;
  Vec2 er{x.x / r, x.y / r};
  Vec2 et{-er.y, er.x};
  Complex arr = st / sr, att = sr / st;
  PmlCoefficient out;
  out.tensor[0][0] = arr * er.x * er.x + att * et.x * et.x;
  out.tensor[0][1] = arr * er.x * er.y + att * et.x * et.y;
  out.tensor[1][0] = out.tensor[0][1];
  out.tensor[1][1] = arr * er.y * er.y + att * et.y * et.y;
  out.mass = sr * st;
  return out;
}

}  // namespace detail

// Sparse matrix of  sum_T int_T a grad u . grad v - c u v  over the view,
// in local node numbering. PML triangles use the radially stretched tensor
// when a PML radiation spec is given; with a Robin spec and no PML the
// boundary term -int (ik - 1/(2R)) u v is added on GAMMA_INF.
inline AssembledSystem assemble(ViewPtr view, const Coefficients& co, Complex k,
                                const std::optional<RadiationSpec>& rad = std::nullopt) {
  const Mesh& m = *view->mesh;
  for (int r = 0; r < geometry::kRegionCount; ++r) {
    Region reg = static_cast<Region>(r);
    if (!view->mask.has(reg)) continue;
    bool present = false;
    for (int t : view->triangles)
      if (m.regions[t] == reg) {
        present = true;
        break;
      }
    if (present && co.a[r] == Complex{}) fail(ErrorCode::ZeroCoefficient, std::string("zero coefficient on ") + region_name(reg));
  }
  bool use_pml = rad && rad->mode == RadiationSpec::Mode::Pml && m.has_pml();
  if (rad && rad->mode == RadiationSpec::Mode::Pml && !m.has_pml() && view->mask.has(Region::Exterior))
    fail(ErrorCode::ValidationError, "PML radiation requested on a mesh without an absorbing layer");
  if (rad && rad->mode == RadiationSpec::Mode::RobinAbc && m.has_pml() && view->mask.has(Region::Pml))
    fail(ErrorCode::ValidationError, "Robin radiation requested on a mesh with an absorbing layer");
  if (use_pml && !(rad->sigma0 > 0.0)) fail(ErrorCode::ValidationError, "PML strength must be positive");

  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(view->triangles.size() * 9);
  for (int t : view->triangles) {
    const auto& v = m.triangles[t];
    TriangleGeometry g = triangle_geometry(m, t);
    int r = static_cast<int>(m.regions[t]);
    Complex ke[3][3];
    if (use_pml && m.regions[t] == Region::Pml) {
      Complex lam[2][2] = {};
      Complex w[3];
      for (int q = 0; q < 3; ++q) {
        Vec2 x = 0.5 * (m.nodes[v[q]] + m.nodes[v[(q + 1) % 3]]);
        auto pc = detail::pml_coefficient(x, k, m.truncation_radius, m.pml_thickness, *rad);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) lam[i][j] += pc.tensor[i][j] / 3.0;
        w[q] = pc.mass;
      }
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          Vec2 gi = g.grad[i], gj = g.grad[j];
          Complex s = gi.x * (lam[0][0] * gj.x + lam[0][1] * gj.y) + gi.y * (lam[1][0] * gj.x + lam[1][1] * gj.y);
          // Edge-midpoint rule: lambda_i lambda_j at midpoint q of edge (q, q+1).
          Complex mass{};
          for (int q = 0; q < 3; ++q) {
            double li = (i == q || i == (q + 1) % 3) ? 0.5 : 0.0;
            double lj = (j == q || j == (q + 1) % 3) ? 0.5 : 0.0;
            mass += w[q] * li * lj;
          }
          ke[i][j] = co.a[r] * g.area * s - co.c[r] * (g.area / 3.0) * mass;
        }
      }
    } else {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          ke[i][j] = co.a[r] * g.area * dot(g.grad[i], g.grad[j]) - co.c[r] * g.area / 12.0 * (i == j ? 2.0 : 1.0);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trips.emplace_back(view->local[v[i]], view->local[v[j]], ke[i][j]);
  }
  if (rad && rad->mode == RadiationSpec::Mode::RobinAbc && !m.has_pml() && view->mask.has(Region::Exterior)) {
    Complex beta = kI * k - 1.0 / (2.0 * m.truncation_radius);
    for (const auto& e : m.edges) {
      if (e.tag != BoundaryTag::GammaInf) continue;
      int a = view->local[e.nodes[0]], b = view->local[e.nodes[1]];
      trips.emplace_back(a, a, -beta * e.length / 3.0);
      trips.emplace_back(b, b, -beta * e.length / 3.0);
      trips.emplace_back(a, b, -beta * e.length / 6.0);
      trips.emplace_back(b, a, -beta * e.length / 6.0);
    }
  }
  AssembledSystem sys{view, SparseC(view->size(), view->size())};
  sys.matrix.setFromTriplets(trips.begin(), trips.end());
  sys.matrix.makeCompressed();
  return sys;
}

// Consistent P1 mass matrix of the view.
inline SparseR mass_matrix(const ViewPtr& view) {
  const Mesh& m = *view->mesh;
  std::vector<Eigen::Triplet<double>> trips;
  for (int t : view->triangles) {
    const auto& v = m.triangles[t];
    double a = m.area(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trips.emplace_back(view->local[v[i]], view->local[v[j]], a / 12.0 * (i == j ? 2.0 : 1.0));
  }
  SparseR M(view->size(), view->size());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

// Load vector int f phi_i for a smooth f (degree-5 seven-point rule).
inline VectorXc assemble_load(const ViewPtr& view, const std::function<Complex(Vec2)>& f) {
  static const double a1 = 0.059715871789770, b1 = 0.470142064105115;
  static const double a2 = 0.797426985353087, b2 = 0.101286507323456;
  static const double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
  const double pts[7][3] = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                            {a2, b2, b2},                {b2, a2, b2}, {b2, b2, a2}};
  const double wts[7] = {w0, w1, w1, w1, w2, w2, w2};
  const Mesh& m = *view->mesh;
  VectorXc b = VectorXc::Zero(view->size());
  for (int t : view->triangles) {
    const auto& v = m.triangles[t];
    double area = m.area(t);
    for (int q = 0; q < 7; ++q) {
      Vec2 x = pts[q][0] * m.nodes[v[0]] + pts[q][1] * m.nodes[v[1]] + pts[q][2] * m.nodes[v[2]];
      Complex fx = f(x) * wts[q] * area;
      for (int i = 0; i < 3; ++i) b[view->local[v[i]]] += fx * pts[q][i];
    }
  }
  return b;
}

namespace detail {

inline double point_triangle_distance(Vec2 p, const std::array<Vec2, 3>& tri) {
  double c0 = cross(tri[1] - tri[0], p - tri[0]);
  double c1 = cross(tri[2] - tri[1], p - tri[1]);
  double c2 = cross(tri[0] - tri[2], p - tri[2]);
  if ((c0 >= 0 && c1 >= 0 && c2 >= 0) || (c0 <= 0 && c1 <= 0 && c2 <= 0)) return 0.0;
  return std::min({geometry::segment_distance(p, tri[0], tri[1]), geometry::segment_distance(p, tri[1], tri[2]),
                   geometry::segment_distance(p, tri[2], tri[0])});
}

// Adds amp * int_{tri cap support} lambda_i over a recursively split triangle;
// bary holds the barycentric coordinates of the sub-triangle corners.
inline void source_quadrature(const geometry::SourceDisk& d, const std::array<Vec2, 3>& tri,
                              const std::array<std::array<double, 3>, 3>& bary, double area, int depth,
                              std::array<Complex, 3>& out) {
  double rmax = 0.0;
  for (auto p : tri) rmax = std::max(rmax, distance(p, d.center));
  double rmin = point_triangle_distance(d.center, tri);
  bool inside = rmax <= d.radius && rmin >= d.inner_radius;
  bool outside = rmin >= d.radius || rmax <= d.inner_radius;
  if (outside) return;
  if (inside || depth == 0) {
    Vec2 c = (1.0 / 3.0) * (tri[0] + tri[1] + tri[2]);
    if (!inside && !d.covers(c)) return;
    for (int i = 0; i < 3; ++i) out[i] += d.amplitude * area * (bary[0][i] + bary[1][i] + bary[2][i]) / 3.0;
    return;
  }
  auto mid = [](Vec2 a, Vec2 b) { return 0.5 * (a + b); };
  auto bmid = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::array<double, 3>{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
  };
  Vec2 m01 = mid(tri[0], tri[1]), m12 = mid(tri[1], tri[2]), m20 = mid(tri[2], tri[0]);
  auto b01 = bmid(bary[0], bary[1]), b12 = bmid(bary[1], bary[2]), b20 = bmid(bary[2], bary[0]);
  double qa = 0.25 * area;
  source_quadrature(d, {tri[0], m01, m20}, {bary[0], b01, b20}, qa, depth - 1, out);
  source_quadrature(d, {m01, tri[1], m12}, {b01, bary[1], b12}, qa, depth - 1, out);
  source_quadrature(d, {m20, m12, tri[2]}, {b20, b12, bary[2]}, qa, depth - 1, out);
  source_quadrature(d, {m01, m12, m20}, {b01, b12, b20}, qa, depth - 1, out);
}

}  // namespace detail

// Load vector of a piecewise-constant source; triangles cut by a source
// boundary are integrated by recursive bisection.
inline VectorXc assemble_load(const ViewPtr& view, const geometry::SourceSpec& src, int depth = 7) {
  const Mesh& m = *view->mesh;
  VectorXc b = VectorXc::Zero(view->size());
  for (int t : view->triangles) {
    const auto& v = m.triangles[t];
    std::array<Vec2, 3> tri = {m.nodes[v[0]], m.nodes[v[1]], m.nodes[v[2]]};
    std::array<Complex, 3> acc{};
    for (const auto& d : src.disks)
      detail::source_quadrature(d, tri, {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}, m.area(t), depth, acc);
    for (int i = 0; i < 3; ++i) b[view->local[v[i]]] += acc[i];
  }
  return b;
}

}  // namespace enz::fem
