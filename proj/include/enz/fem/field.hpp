#pragma once

#include <Eigen/Core>
#include <cstdio>
#include <initializer_list>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "enz/geometry/mesh.hpp"

namespace enz::fem {

using geometry::BoundaryTag;
using geometry::Mesh;
using geometry::Region;
using VectorXc = Eigen::VectorXcd;

struct RegionMask {
  std::uint8_t bits = 0;

  static RegionMask of(std::initializer_list<Region> rs) {
    RegionMask m;
    for (Region r : rs) m.bits |= std::uint8_t(1u << static_cast<int>(r));
    return m;
  }
  static RegionMask all() { return {0x0f}; }
  bool has(Region r) const { return bits & (1u << static_cast<int>(r)); }
  bool operator==(const RegionMask&) const = default;
};

// Triangles and nodes of a region mask with a global-to-local node map.
struct RegionView {
  std::shared_ptr<const Mesh> mesh;
  RegionMask mask;
  std::vector<int> triangles;
  std::vector<int> nodes;  // sorted global ids
  std::vector<int> local;  // global id -> local index or -1

  int size() const { return static_cast<int>(nodes.size()); }
  bool contains_node(int g) const { return local[g] >= 0; }

  static std::shared_ptr<const RegionView> make(std::shared_ptr<const Mesh> mesh, RegionMask mask) {
    auto v = std::make_shared<RegionView>();
    v->mesh = std::move(mesh);
    v->mask = mask;
    const Mesh& m = *v->mesh;
    v->local.assign(m.nodes.size(), -1);
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
      if (!mask.has(m.regions[t])) continue;
      v->triangles.push_back(t);
      for (int k : m.triangles[t]) v->local[k] = 0;
    }
    for (int g = 0; g < static_cast<int>(m.nodes.size()); ++g) {
      if (v->local[g] < 0) continue;
      v->local[g] = static_cast<int>(v->nodes.size());
      v->nodes.push_back(g);
    }
    return v;
  }

  // Local indices of the nodes on a boundary tag; the tag must touch the view.
  std::vector<int> local_nodes(BoundaryTag tag) const {
    std::vector<int> out;
    for (int g : mesh->boundary_nodes(tag)) {
      if (local[g] < 0) fail(ErrorCode::TagMismatch, std::string("boundary ") + geometry::tag_name(tag) + " is not on the region");
      out.push_back(local[g]);
    }
    if (out.empty()) fail(ErrorCode::TagMismatch, std::string("boundary ") + geometry::tag_name(tag) + " is empty");
    return out;
  }
};

using ViewPtr = std::shared_ptr<const RegionView>;

struct ScalarField {
  ViewPtr view;
  VectorXc values;

  ScalarField() = default;
  ScalarField(ViewPtr v, VectorXc vals) : view(std::move(v)), values(std::move(vals)) {
    if (values.size() != view->size()) fail(ErrorCode::TagMismatch, "field size does not match region");
  }
  static ScalarField zero(ViewPtr v) {
    int n = v->size();
    return {std::move(v), VectorXc::Zero(n)};
  }
  const Mesh& mesh() const { return *view->mesh; }
  Complex at_node(int global) const { return values[view->local[global]]; }
};

inline void require_same_view(const ScalarField& a, const ScalarField& b) {
  if (a.view.get() != b.view.get() &&
      !(a.view->mesh == b.view->mesh && a.view->mask == b.view->mask))
    fail(ErrorCode::TagMismatch, "fields live on different regions");
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_view(a, b);
  return {a.view, a.values + b.values};
}
inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_view(a, b);
  return {a.view, a.values - b.values};
}
inline ScalarField operator*(Complex s, const ScalarField& a) { return {a.view, s * a.values}; }

// Dual vector on one boundary tag, indexed like mesh.boundary_nodes(tag).
// Values are taken with respect to the canonical normal of the tag (away
// from D on GAMMA_D, away from Omega on GAMMA_OMEGA, radially outward on the
// circles).
struct BoundaryFunctional {
  std::shared_ptr<const Mesh> mesh;
  BoundaryTag tag = BoundaryTag::GammaD;
  VectorXc values;

  static BoundaryFunctional zero(std::shared_ptr<const Mesh> m, BoundaryTag t) {
    int n = static_cast<int>(m->boundary_nodes(t).size());
    return {std::move(m), t, VectorXc::Zero(n)};
  }
  const std::vector<int>& nodes() const { return mesh->boundary_nodes(tag); }
  Complex total() const {
    CompensatedSum<Complex> s;
    for (Eigen::Index i = 0; i < values.size(); ++i) s.add(values[i]);
    return s.value();
  }
  Complex pair(const VectorXc& trace) const {
    if (trace.size() != values.size()) fail(ErrorCode::TagMismatch, "trace size does not match boundary");
    CompensatedSum<Complex> s;
    for (Eigen::Index i = 0; i < values.size(); ++i) s.add(values[i] * trace[i]);
    return s.value();
  }
};

inline void require_same_tag(const BoundaryFunctional& a, const BoundaryFunctional& b) {
  if (a.tag != b.tag || a.mesh != b.mesh) fail(ErrorCode::TagMismatch, "functionals live on different boundaries");
}

inline BoundaryFunctional operator+(const BoundaryFunctional& a, const BoundaryFunctional& b) {
  require_same_tag(a, b);
  return {a.mesh, a.tag, a.values + b.values};
}
inline BoundaryFunctional operator-(const BoundaryFunctional& a, const BoundaryFunctional& b) {
  require_same_tag(a, b);
  return {a.mesh, a.tag, a.values - b.values};
}
inline BoundaryFunctional operator*(Complex s, const BoundaryFunctional& a) { return {a.mesh, a.tag, s * a.values}; }

// Lumped boundary mass (half of each adjacent edge length) per tag node.
inline Eigen::VectorXd boundary_lumped_mass(const Mesh& m, BoundaryTag tag) {
  const auto& nodes = m.boundary_nodes(tag);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes.size()));
  for (const auto& e : m.edges) {
    if (e.tag != tag) continue;
    for (int k : e.nodes) {
      auto it = std::lower_bound(nodes.begin(), nodes.end(), k);
      w[it - nodes.begin()] += 0.5 * e.length;
    }
  }
  return w;
}

// Trace of a field on a boundary tag, ordered like mesh.boundary_nodes(tag).
inline VectorXc trace(const ScalarField& u, BoundaryTag tag) {
  const auto& nodes = u.mesh().boundary_nodes(tag);
  VectorXc t(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    int l = u.view->local[nodes[i]];
    if (l < 0) fail(ErrorCode::TagMismatch, "field is not defined on the boundary");
    t[static_cast<Eigen::Index>(i)] = u.values[l];
  }
  return t;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_field_csv(std::ostream& os, const ScalarField& u) {
  os << "node_index,x,y,re,im\n";
  const Mesh& m = u.mesh();
  for (int l = 0; l < u.view->size(); ++l) {
    int g = u.view->nodes[l];
    os << g << "," << format_double(m.nodes[g].x) << "," << format_double(m.nodes[g].y) << ","
       << format_double(u.values[l].real()) << "," << format_double(u.values[l].imag()) << "\n";
  }
}

}  // namespace enz::fem
