#pragma once

#include <Eigen/Dense>
#include <random>

#include "enz/fem/solve.hpp"

namespace enz::fem {

struct EigenPair {
  double value = 0.0;
  ScalarField mode;          // mass-normalized, zero on the constrained boundary
  double residual = 0.0;     // ||K u - lambda M u|| / ||u||
};

struct EigenOptions {
  int max_iterations = 400;
  double converge_tol = 1e-11;   // relative to ||K u||
  double accept_tol = 1e-8;      // ||K u - lambda M u|| <= accept_tol ||u||
  unsigned seed = 20240611u;
};

// Eigenpairs of the Dirichlet Laplacian pencil (K, M) nearest to a shift, by
// shift-invert subspace iteration with Rayleigh-Ritz projection.
inline std::vector<EigenPair> dirichlet_eigs(const ViewPtr& view, const std::vector<BoundaryTag>& constrained, int count,
                                             double shift, const EigenOptions& opt = {}) {
  if (count < 1) fail(ErrorCode::ValidationError, "eigenpair count must be at least one");
  const int n = view->size();
  SparseC kc = assemble(view, Coefficients::laplace(), Complex(1.0)).matrix;
  SparseR m = mass_matrix(view);
  std::vector<int> fixed(n, 0);
  for (BoundaryTag t : constrained)
    for (int l : view->local_nodes(t)) fixed[l] = 1;
  std::vector<int> interior, pos(n, -1);
  for (int i = 0; i < n; ++i)
    if (!fixed[i]) {
      pos[i] = static_cast<int>(interior.size());
      interior.push_back(i);
    }
  const int ni = static_cast<int>(interior.size());
  if (ni < count) fail(ErrorCode::ValidationError, "too few interior nodes for the requested eigenpairs");
  std::vector<Eigen::Triplet<double>> tk, tm;
  for (Eigen::Index j = 0; j < kc.outerSize(); ++j)
    for (SparseC::InnerIterator it(kc, j); it; ++it)
      if (pos[it.row()] >= 0 && pos[it.col()] >= 0) tk.emplace_back(pos[it.row()], pos[it.col()], it.value().real());
  for (Eigen::Index j = 0; j < m.outerSize(); ++j)
    for (SparseR::InnerIterator it(m, j); it; ++it)
      if (pos[it.row()] >= 0 && pos[it.col()] >= 0) tm.emplace_back(pos[it.row()], pos[it.col()], it.value());
  SparseR K(ni, ni), M(ni, ni);
  K.setFromTriplets(tk.begin(), tk.end());
  M.setFromTriplets(tm.begin(), tm.end());
  SparseR shifted = K - shift * M;
  SolveOptions so;
  so.check_singularity = false;
  so.rtol = 1e-9;
  FactorizationR lu(shifted, so);

  const int p = std::min(ni, std::max(2 * count, count + 8));
  std::mt19937 rng(opt.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd X(ni, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < ni; ++i) X(i, j) = dist(rng);

  auto m_orthonormalize = [&](Eigen::MatrixXd& Y) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < Y.cols(); ++j) {
        for (int i = 0; i < j; ++i) {
          Eigen::VectorXd mi = M * Y.col(i);
          Y.col(j) -= mi.dot(Y.col(j)) * Y.col(i);
        }
        double nrm = std::sqrt(Y.col(j).dot(M * Y.col(j)));
        if (!(nrm > 0.0)) fail(ErrorCode::NoConvergence, "subspace collapsed");
        Y.col(j) /= nrm;
      }
    }
  };

  Eigen::VectorXd theta;
  std::vector<int> order;
  std::vector<double> res(count, 0.0);
  bool converged = false;
  for (int iter = 0; iter < opt.max_iterations && !converged; ++iter) {
    Eigen::MatrixXd Y(ni, p);
    for (int j = 0; j < p; ++j) {
      Eigen::VectorXd rhs = M * X.col(j);
      Y.col(j) = lu.solve(rhs);
      Y.col(j) /= Y.col(j).norm();
    }
    m_orthonormalize(Y);
    Eigen::MatrixXd kh = Y.transpose() * (K * Y);
    kh = 0.5 * (kh + kh.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kh);
    theta = es.eigenvalues();
    X = Y * es.eigenvectors();
    order.resize(p);
    for (int j = 0; j < p; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(theta[a] - shift) < std::abs(theta[b] - shift); });
    converged = true;
    for (int c = 0; c < count; ++c) {
      int j = order[c];
      Eigen::VectorXd kx = K * X.col(j);
      Eigen::VectorXd r = kx - theta[j] * (M * X.col(j));
      res[c] = r.norm() / X.col(j).norm();
      if (r.norm() > opt.converge_tol * kx.norm()) converged = false;
    }
  }
  std::vector<EigenPair> out;
  for (int c = 0; c < count; ++c) {
    if (!(res[c] <= opt.accept_tol))
      fail(ErrorCode::NoConvergence, "eigenpair residual " + std::to_string(res[c]) + " above tolerance");
    int j = order[c];
    Eigen::VectorXd x = X.col(j);
    Eigen::Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    if (x[imax] < 0.0) x = -x;
    VectorXc full = VectorXc::Zero(n);
    for (int i = 0; i < ni; ++i) full[interior[i]] = x[i];
    out.push_back({theta[j], ScalarField(view, std::move(full)), res[c]});
  }
  std::stable_sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
  return out;
}

// Canonical-normal flux of an eigenmode: residual rows of (K - lambda M) on the tag.
inline BoundaryFunctional eigen_flux(const EigenPair& ep, BoundaryTag tag) {
  AssembledSystem sys = assemble(ep.mode.view, Coefficients::helmholtz(ep.value), Complex(1.0));
  return flux_extract(ep.mode, sys, tag);
}

}  // namespace enz::fem
