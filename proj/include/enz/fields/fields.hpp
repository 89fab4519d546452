#pragma once

#include <unordered_map>

#include "enz/correctors/correctors.hpp"

namespace enz::fields {

using fem::ScalarField;
using fem::VectorXc;
using geometry::Mesh;
using geometry::Region;

// Piecewise-constant complex 2-vector field on triangles.
struct VectorFieldPW {
  std::shared_ptr<const Mesh> mesh;
  std::vector<int> triangles;
  std::vector<std::array<Complex, 2>> values;

  Region region(std::size_t i) const { return mesh->regions[triangles[i]]; }
};

inline std::array<Complex, 2> p1_gradient(const ScalarField& u, int t) {
  const Mesh& m = u.mesh();
  fem::TriangleGeometry g = fem::triangle_geometry(m, t);
  std::array<Complex, 2> out{};
  for (int i = 0; i < 3; ++i) {
    Complex v = u.at_node(m.triangles[t][i]);
    out[0] += v * g.grad[i].x;
    out[1] += v * g.grad[i].y;
  }
  return out;
}

inline Complex centroid_value(const ScalarField& u, int t) {
  const auto& v = u.mesh().triangles[t];
  return (u.at_node(v[0]) + u.at_node(v[1]) + u.at_node(v[2])) / 3.0;
}

// S = conj(u) grad u / (2 i omega eps) on every non-PML triangle of the field,
// with eps = delta on the ENZ region and 1 elsewhere.
inline VectorFieldPW compute_poynting(const ScalarField& u, double omega, Complex delta) {
  if (!(omega > 0.0)) fail(ErrorCode::ValidationError, "omega must be positive");
  if (delta == Complex{}) fail(ErrorCode::ValidationError, "delta must be nonzero");
  VectorFieldPW s{u.view->mesh, {}, {}};
  const Mesh& m = u.mesh();
  for (int t : u.view->triangles) {
    Region r = m.regions[t];
    if (r == Region::Pml) continue;
    Complex eps = r == Region::Enz ? delta : Complex(1.0);
    Complex f = std::conj(centroid_value(u, t)) / (2.0 * kI * omega * eps);
    auto g = p1_gradient(u, t);
    s.triangles.push_back(t);
    s.values.push_back({f * g[0], f * g[1]});
  }
  return s;
}

// Limit field (conj(c*) / (2 i omega)) grad phi0 on the ENZ triangles.
inline VectorFieldPW limit_poynting(const ScalarField& phi0, Complex c_star, double omega) {
  VectorFieldPW s{phi0.view->mesh, {}, {}};
  Complex f = std::conj(c_star) / (2.0 * kI * omega);
  for (int t : phi0.view->triangles) {
    if (phi0.mesh().regions[t] != Region::Enz) continue;
    auto g = p1_gradient(phi0, t);
    s.triangles.push_back(t);
    s.values.push_back({f * g[0], f * g[1]});
  }
  return s;
}

// L2 norm over ENZ triangles of a - b; both must cover the same ENZ triangles.
inline double enz_l2_gap(const VectorFieldPW& a, const VectorFieldPW& b) {
  std::unordered_map<int, std::size_t> idx;
  for (std::size_t i = 0; i < b.triangles.size(); ++i) idx[b.triangles[i]] = i;
  CompensatedSum<double> s;
  bool any = false;
  for (std::size_t i = 0; i < a.triangles.size(); ++i) {
    int t = a.triangles[i];
    if (a.mesh->regions[t] != Region::Enz) continue;
    auto it = idx.find(t);
    if (it == idx.end()) fail(ErrorCode::TagMismatch, "fields cover different triangles");
    any = true;
    const auto& x = a.values[i];
    const auto& y = b.values[it->second];
    s.add(a.mesh->area(t) * (std::norm(x[0] - y[0]) + std::norm(x[1] - y[1])));
  }
  if (!any) fail(ErrorCode::EmptyWindow, "no ENZ triangles");
  return std::sqrt(s.value());
}

struct FluidResiduals {
  double div = 0.0;          // max over interior ENZ nodes of |int S.grad v + q int v|
  double curl = 0.0;         // max over interior ENZ nodes of |int S.rot v|
  double bc_omega = 0.0;     // boundary functional mismatch on dOmega
  double bc_dopant = 0.0;    // and on dD
  double w_real = 0.0;       // weak Laplacian residuals of Re and Im of the potential
  double w_imag = 0.0;
  double scale = 0.0;        // data scale the residuals are compared against
  Complex div_constant;      // q = i omega mu |c*|^2 / 2
};

// Weak residuals of div S = q, curl S = 0 and the boundary data for the limit
// field S = (conj(c*)/(2 i omega)) grad phi0 on the ENZ region.
inline FluidResiduals ideal_fluid_residuals(const ScalarField& phi0, const auxiliary::AuxiliarySet& aux,
                                            const physics::PhysicsConfig& cfg) {
  const Mesh& m = phi0.mesh();
  const fem::ViewPtr& view = phi0.view;
  if (!(view->mask == fem::RegionMask::of({Region::Enz}))) fail(ErrorCode::TagMismatch, "phi0 must live on the ENZ region");
  const int n = view->size();
  const Complex c = aux.c_star;
  const Complex f = std::conj(c) / (2.0 * kI * cfg.omega);
  FluidResiduals r;
  r.div_constant = kI * cfg.omega * cfg.mu * std::norm(c) / 2.0;
  VectorXc sg = VectorXc::Zero(n), sr = VectorXc::Zero(n);
  Eigen::VectorXd iv = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd kr_re = Eigen::VectorXd::Zero(n), kr_im = Eigen::VectorXd::Zero(n);
  for (int t : view->triangles) {
    fem::TriangleGeometry g = fem::triangle_geometry(m, t);
    auto gp = p1_gradient(phi0, t);
    Complex s0 = f * gp[0], s1 = f * gp[1];
    for (int i = 0; i < 3; ++i) {
      int l = view->local[m.triangles[t][i]];
      sg[l] += g.area * (s0 * g.grad[i].x + s1 * g.grad[i].y);
      sr[l] += g.area * (-s0 * g.grad[i].y + s1 * g.grad[i].x);
      iv[l] += g.area / 3.0;
      kr_re[l] += g.area * (s0.real() * g.grad[i].x + s1.real() * g.grad[i].y);
      kr_im[l] += g.area * (s0.imag() * g.grad[i].x + s1.imag() * g.grad[i].y);
    }
  }
  std::vector<char> boundary(n, 0);
  for (auto tag : {geometry::BoundaryTag::GammaOmega, geometry::BoundaryTag::GammaD})
    for (int l : view->local_nodes(tag)) boundary[l] = 1;
  for (int i = 0; i < n; ++i) {
    r.scale = std::max({r.scale, std::abs(sg[i]), std::abs(r.div_constant * iv[i])});
    if (boundary[i]) continue;
    r.div = std::max(r.div, std::abs(sg[i] + r.div_constant * iv[i]));
    r.curl = std::max(r.curl, std::abs(sr[i]));
    r.w_real = std::max(r.w_real, std::abs(kr_re[i] + r.div_constant.real() * iv[i]));
    r.w_imag = std::max(r.w_imag, std::abs(kr_im[i] + r.div_constant.imag() * iv[i]));
  }
  // Outward (from ENZ) weak normal component against the stated data.
  auto local_o = view->local_nodes(geometry::BoundaryTag::GammaOmega);
  for (std::size_t i = 0; i < local_o.size(); ++i) {
    int l = local_o[i];
    Complex data = f * (c * aux.flux_psi_e.values[i] + aux.flux_s.values[i]);
    r.bc_omega = std::max(r.bc_omega, std::abs(sg[l] + r.div_constant * iv[l] - data));
    r.scale = std::max(r.scale, std::abs(data));
  }
  auto local_d = view->local_nodes(geometry::BoundaryTag::GammaD);
  for (std::size_t i = 0; i < local_d.size(); ++i) {
    int l = local_d[i];
    Complex data = -f * c * aux.flux_psi_d.values[i];
    r.bc_dopant = std::max(r.bc_dopant, std::abs(sg[l] + r.div_constant * iv[l] - data));
    r.scale = std::max(r.scale, std::abs(data));
  }
  return r;
}

inline void write_vector_csv(std::ostream& os, const VectorFieldPW& s) {
  os << "tri_centroid_x,y,S1_re,S1_im,S2_re,S2_im,region\n";
  for (std::size_t i = 0; i < s.triangles.size(); ++i) {
    Vec2 c = s.mesh->centroid(s.triangles[i]);
    const auto& v = s.values[i];
    os << fem::format_double(c.x) << ',' << fem::format_double(c.y) << ',' << fem::format_double(v[0].real()) << ','
       << fem::format_double(v[0].imag()) << ',' << fem::format_double(v[1].real()) << ','
       << fem::format_double(v[1].imag()) << ',' << geometry::region_name(s.region(i)) << '\n';
  }
}

}  // namespace enz::fields
