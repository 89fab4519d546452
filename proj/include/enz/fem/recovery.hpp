#pragma once

#include <Eigen/Dense>
#include <algorithm>

#include "enz/fem/field.hpp"

namespace enz::fem {

// Nodal gradient recovery by a least-squares quadratic fit over a two-ring
// patch of triangles admitted by a region mask.
class GradientRecovery {
 public:
  GradientRecovery(const ScalarField& u, RegionMask patch_mask) : u_(u), mask_(patch_mask) {
    const Mesh& m = u.mesh();
    node_tris_.assign(m.nodes.size(), {});
    for (int t : u.view->triangles) {
      if (!mask_.has(m.regions[t])) continue;
      for (int k : m.triangles[t]) node_tris_[k].push_back(t);
    }
  }

  // Gradient at a global node (real and imaginary parts fitted separately).
  std::array<Complex, 2> at(int g) const {
    const Mesh& m = u_.mesh();
    std::vector<int> patch{g};
    for (int ring = 0; ring < 2; ++ring) {
      std::vector<int> next = patch;
      for (int p : patch)
        for (int t : node_tris_[p])
          for (int k : m.triangles[t]) next.push_back(k);
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      patch.swap(next);
    }
    if (patch.size() < 6) fail(ErrorCode::MeshFailure, "recovery patch too small");
    const double h = m.target_h > 0.0 ? m.target_h : 1.0;
    const Vec2 c = m.nodes[g];
    Eigen::MatrixXd A(patch.size(), 6);
    Eigen::VectorXd br(patch.size()), bi(patch.size());
    for (std::size_t i = 0; i < patch.size(); ++i) {
      Vec2 d = (1.0 / h) * (m.nodes[patch[i]] - c);
      A.row(static_cast<Eigen::Index>(i)) << 1.0, d.x, d.y, d.x * d.x, d.x * d.y, d.y * d.y;
      Complex v = u_.values[u_.view->local[patch[i]]];
      br[static_cast<Eigen::Index>(i)] = v.real();
      bi[static_cast<Eigen::Index>(i)] = v.imag();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::VectorXd cr = qr.solve(br), ci = qr.solve(bi);
    return {Complex(cr[1], ci[1]) / h, Complex(cr[2], ci[2]) / h};
  }

  // int over the tag of grad u . n with the stored (canonical) edge normals,
  // by the trapezoidal rule on recovered nodal gradients.
  Complex boundary_flux(BoundaryTag tag) const {
    const Mesh& m = u_.mesh();
    std::vector<std::array<Complex, 2>> cache(m.nodes.size());
    std::vector<char> have(m.nodes.size(), 0);
    auto grad = [&](int g) -> const std::array<Complex, 2>& {
      if (!have[g]) {
        cache[g] = at(g);
        have[g] = 1;
      }
      return cache[g];
    };
    CompensatedSum<Complex> total;
    for (const auto& e : m.edges) {
      if (e.tag != tag) continue;
      Complex s{};
      for (int k : e.nodes) {
        const auto& gr = grad(k);
        s += gr[0] * e.normal.x + gr[1] * e.normal.y;
      }
      total.add(0.5 * e.length * s);
    }
    return total.value();
  }

 private:
  ScalarField u_;
  RegionMask mask_;
  std::vector<std::vector<int>> node_tris_;
};

}  // namespace enz::fem
