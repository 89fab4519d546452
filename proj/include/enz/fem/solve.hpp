#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "enz/fem/assembly.hpp"
#include "enz/fem/sparse_solver.hpp"

namespace enz::fem {

// +1 when the region's outward normal on the tag equals the canonical normal.
inline double orientation_sign(const RegionView& view, BoundaryTag tag) {
  return view.mask.has(geometry::inner_region(tag)) ? 1.0 : -1.0;
}

// Variational flux on a boundary tag: the residual a(u, phi_i) - l(phi_i) at
// the tag nodes, reported against the canonical normal of the tag.
inline BoundaryFunctional flux_extract(const ScalarField& u, const AssembledSystem& sys, const VectorXc& load,
                                       BoundaryTag tag) {
  if (u.view->mesh != sys.view->mesh || !(u.view->mask == sys.view->mask))
    fail(ErrorCode::TagMismatch, "field was not solved on this system");
  auto local = sys.view->local_nodes(tag);
  VectorXc r = sys.matrix * u.values;
  if (load.size() == r.size()) r -= load;
  double s = orientation_sign(*sys.view, tag);
  BoundaryFunctional out = BoundaryFunctional::zero(sys.view->mesh, tag);
  for (std::size_t i = 0; i < local.size(); ++i) out.values[static_cast<Eigen::Index>(i)] = s * r[local[i]];
  return out;
}

inline BoundaryFunctional flux_extract(const ScalarField& u, const AssembledSystem& sys, BoundaryTag tag) {
  return flux_extract(u, sys, VectorXc(), tag);
}

using Trace = std::pair<BoundaryTag, VectorXc>;

// Factorized system with Dirichlet constraints on a set of boundary tags.
// Optional deflation vectors (fields vanishing on the constraints) border
// the free block so that a system singular on their span stays solvable:
// the solution is then mass-orthogonal to them and the residual lies in
// their mass-weighted span.
class DirichletSolver {
 public:
  DirichletSolver(AssembledSystem sys, std::vector<BoundaryTag> constrained, SolveOptions opt = {},
                  const std::vector<ScalarField>& deflate = {})
      : sys_(std::move(sys)), tags_(std::move(constrained)) {
    const int n = sys_.view->size();
    fixed_.assign(n, -1);
    int nc = 0;
    for (BoundaryTag t : tags_)
      for (int l : sys_.view->local_nodes(t))
        if (fixed_[l] < 0) fixed_[l] = nc++;
    free_.assign(n, -1);
    int nf = 0;
    for (int i = 0; i < n; ++i)
      if (fixed_[i] < 0) free_[i] = nf++;
    if (nf == 0) fail(ErrorCode::SingularSystem, "no free unknowns");
    std::vector<Eigen::Triplet<Complex>> ff, fc;
    for (Eigen::Index j = 0; j < sys_.matrix.outerSize(); ++j) {
      for (SparseC::InnerIterator it(sys_.matrix, j); it; ++it) {
        int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
        if (free_[r] < 0) continue;
        if (free_[c] >= 0)
          ff.emplace_back(free_[r], free_[c], it.value());
        else
          fc.emplace_back(free_[r], fixed_[c], it.value());
      }
    }
    nextra_ = static_cast<int>(deflate.size());
    if (nextra_ > 0) {
      SparseR mass = mass_matrix(sys_.view);
      for (int j = 0; j < nextra_; ++j) {
        if (deflate[j].view->mesh != sys_.view->mesh || !(deflate[j].view->mask == sys_.view->mask)) fail(ErrorCode::TagMismatch, "deflation vector lives on another region");
        VectorXc w = mass.cast<Complex>() * deflate[j].values;
        for (int i = 0; i < n; ++i) {
          if (free_[i] < 0 || w[i] == Complex{}) continue;
          ff.emplace_back(free_[i], nf + j, w[i]);
          ff.emplace_back(nf + j, free_[i], w[i]);
        }
      }
    }
    SparseC aff(nf + nextra_, nf + nextra_);
    aff.setFromTriplets(ff.begin(), ff.end());
    afc_ = SparseC(nf, nc);
    afc_.setFromTriplets(fc.begin(), fc.end());
    lu_ = std::make_shared<FactorizationC>(std::move(aff), opt);
    nfixed_ = nc;
    nfree_ = nf;
  }

  const AssembledSystem& system() const { return sys_; }
  const ViewPtr& view() const { return sys_.view; }
  double singularity_ratio() const { return lu_->singularity_ratio(); }

  // Solves with load vector (local numbering, empty for none) and traces on
  // constrained tags; tags without a trace are held at zero.
  ScalarField solve(const VectorXc& load, const std::vector<Trace>& traces = {}) const {
    const int n = sys_.view->size();
    VectorXc g = VectorXc::Zero(nfixed_);
    for (const auto& [tag, values] : traces) {
      if (std::find(tags_.begin(), tags_.end(), tag) == tags_.end())
        fail(ErrorCode::TagMismatch, std::string("no Dirichlet constraint on ") + geometry::tag_name(tag));
      auto local = sys_.view->local_nodes(tag);
      if (values.size() != static_cast<Eigen::Index>(local.size())) fail(ErrorCode::TagMismatch, "trace size mismatch");
      for (std::size_t i = 0; i < local.size(); ++i) g[fixed_[local[i]]] = values[static_cast<Eigen::Index>(i)];
    }
    VectorXc rhs = VectorXc::Zero(nfree_ + nextra_);
    rhs.head(nfree_) = -(afc_ * g);
    if (load.size() == n)
      for (int i = 0; i < n; ++i)
        if (free_[i] >= 0) rhs[free_[i]] += load[i];
    VectorXc x = lu_->solve(rhs);
    VectorXc u(n);
    for (int i = 0; i < n; ++i) u[i] = free_[i] >= 0 ? x[free_[i]] : g[fixed_[i]];
    return {sys_.view, std::move(u)};
  }

  BoundaryFunctional flux(const ScalarField& u, const VectorXc& load, BoundaryTag tag) const {
    return flux_extract(u, sys_, load, tag);
  }
  BoundaryFunctional flux(const ScalarField& u, BoundaryTag tag) const { return flux_extract(u, sys_, tag); }

 private:
  AssembledSystem sys_;
  std::vector<BoundaryTag> tags_;
  std::vector<int> fixed_, free_;
  int nfixed_ = 0, nfree_ = 0, nextra_ = 0;
  SparseC afc_;
  std::shared_ptr<FactorizationC> lu_;
};

// One-shot Dirichlet solve.
inline ScalarField solve(const AssembledSystem& sys, const VectorXc& load, const std::vector<Trace>& traces,
                         SolveOptions opt = {}) {
  std::vector<BoundaryTag> tags;
  for (const auto& t : traces) tags.push_back(t.first);
  return DirichletSolver(sys, tags, opt).solve(load, traces);
}

struct NeumannResult {
  ScalarField field;
  Complex compatibility;  // sum of all data, zero for consistent data
  double data_scale = 0.0;
};

// Pure Neumann Laplace problem with a mean-zero side condition, realized by a
// bordered system with one scalar multiplier.
class MeanZeroNeumannSolver {
 public:
  explicit MeanZeroNeumannSolver(ViewPtr view, SolveOptions opt = {}) : view_(std::move(view)) {
    stiffness_ = assemble(view_, Coefficients::laplace(), Complex(1.0)).matrix;
    mass_ = mass_matrix(view_);
    const int n = view_->size();
    weights_ = mass_ * Eigen::VectorXd::Ones(n);
    std::vector<Eigen::Triplet<Complex>> trips;
    for (Eigen::Index j = 0; j < stiffness_.outerSize(); ++j)
      for (SparseC::InnerIterator it(stiffness_, j); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < n; ++i) {
      trips.emplace_back(i, n, weights_[i]);
      trips.emplace_back(n, i, weights_[i]);
    }
    SparseC b(n + 1, n + 1);
    b.setFromTriplets(trips.begin(), trips.end());
    lu_ = std::make_shared<FactorizationC>(std::move(b), opt);
  }

  const ViewPtr& view() const { return view_; }
  const SparseR& mass() const { return mass_; }
  const SparseC& stiffness() const { return stiffness_; }
  double measure() const { return weights_.sum(); }

  // Right-hand side int volume * phi_i plus the boundary data; fluxes are
  // canonical-normal functionals and are reoriented to the region's outward
  // normal here.
  VectorXc rhs(const VectorXc& volume, const std::vector<BoundaryFunctional>& fluxes) const {
    const int n = view_->size();
    VectorXc r = VectorXc::Zero(n);
    if (volume.size() == n) r = mass_.cast<Complex>() * volume;
    for (const auto& h : fluxes) {
      auto local = view_->local_nodes(h.tag);
      double s = orientation_sign(*view_, h.tag);
      for (std::size_t i = 0; i < local.size(); ++i) r[local[i]] += s * h.values[static_cast<Eigen::Index>(i)];
    }
    return r;
  }

  NeumannResult solve(const VectorXc& volume, const std::vector<BoundaryFunctional>& fluxes,
                      double ctol = 1e-6) const {
    VectorXc r = rhs(volume, fluxes);
    return solve_rhs(r, ctol);
  }

  NeumannResult solve_rhs(const VectorXc& r, double ctol = 1e-6) const {
    const int n = view_->size();
    CompensatedSum<Complex> total;
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
      total.add(r[i]);
      scale += std::abs(r[i]);
    }
    NeumannResult out{ScalarField::zero(view_), total.value(), scale};
    if (std::abs(out.compatibility) > ctol * scale)
      fail(ErrorCode::IncompatibleData, "Neumann data do not integrate to zero (residual " +
                                            std::to_string(std::abs(out.compatibility)) + " of scale " +
                                            std::to_string(scale) + ")");
    if (scale == 0.0) return out;
    VectorXc b(n + 1);
    b.head(n) = r;
    b[n] = 0.0;
    VectorXc x = lu_->solve(b);
    out.field.values = x.head(n);
    return out;
  }

 private:
  ViewPtr view_;
  SparseC stiffness_;
  SparseR mass_;
  Eigen::VectorXd weights_;
  std::shared_ptr<FactorizationC> lu_;
};

}  // namespace enz::fem
