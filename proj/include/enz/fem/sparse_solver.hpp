#pragma once

#include <Eigen/SparseCore>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#ifdef ENZ_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "enz/common.hpp"

namespace enz::fem {

struct SolveOptions {
  double rtol = 1e-10;              // residual contract relative to the rhs norm
  double singular_ratio = 1e-8;     // sigma_min / norm threshold of the equilibrated matrix
  bool check_singularity = true;
  int refinement_steps = 3;
};

// Sparse LU with a residual contract, iterative refinement and a
// singularity guard on the diagonally equilibrated matrix. All matrices
// handled here are complex symmetric, which the guard uses to apply the
// adjoint inverse.
template <class Scalar>
class SparseFactorization {
 public:
  using Matrix = Eigen::SparseMatrix<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SparseFactorization(Matrix a, SolveOptions opt = {}) : a_(std::move(a)), opt_(opt) {
    a_.makeCompressed();
    const Eigen::Index n = a_.rows();
    if (n == 0) fail(ErrorCode::SingularSystem, "empty system");
    scale_ = Eigen::VectorXd::Ones(n);
    for (Eigen::Index j = 0; j < a_.outerSize(); ++j)
      for (typename Matrix::InnerIterator it(a_, j); it; ++it)
        if (it.row() == it.col() && std::abs(it.value()) > 0.0) scale_[j] = 1.0 / std::sqrt(std::abs(it.value()));
    factorize();
    if (opt_.check_singularity) {
      ratio_ = estimate_ratio();
      if (!(ratio_ >= opt_.singular_ratio))
        fail(ErrorCode::SingularSystem, "matrix is numerically singular (sigma_min/norm = " + std::to_string(ratio_) + ")");
    }
  }

  Eigen::Index size() const { return a_.rows(); }
  const Matrix& matrix() const { return a_; }
  // Estimated sigma_min / infinity norm of the equilibrated matrix (0 when not computed).
  double singularity_ratio() const { return ratio_; }

  Vector solve(const Vector& b) const {
    if (b.size() != a_.rows()) fail(ErrorCode::SingularSystem, "rhs size mismatch");
    double bnorm = b.norm();
    if (bnorm == 0.0) return Vector::Zero(b.size());
    Vector x = raw_solve(b);
    Vector r = b - a_ * x;
    for (int step = 0; step < opt_.refinement_steps && r.norm() > opt_.rtol * bnorm; ++step) {
      x += raw_solve(r);
      r = b - a_ * x;
    }
    if (!x.allFinite() || r.norm() > opt_.rtol * bnorm)
      fail(ErrorCode::SingularSystem, "residual contract not met (" + std::to_string(r.norm() / bnorm) + ")");
    return x;
  }

 private:
  using Fallback = Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>>;

  // UMFPACK when available. Some BLAS builds return silently wrong dense
  // kernels on some CPUs, so a probe solve checks the factors and falls back
  // to the BLAS-free SparseLU when the probe residual is poor.
  void factorize() {
#ifdef ENZ_HAVE_UMFPACK
    umf_ = std::make_unique<Eigen::UmfPackLU<Matrix>>();
    umf_->compute(a_);
    if (umf_->info() == Eigen::Success) {
      Vector b(a_.rows());
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = Scalar(std::cos(0.37 * double(i)) + 1.5);
      Vector x = umf_->solve(b);
      if (x.allFinite() && (b - a_ * x).norm() <= 1e-8 * b.norm()) return;
    }
    umf_.reset();
#endif
    slu_ = std::make_unique<Fallback>();
    slu_->compute(a_);
    if (slu_->info() != Eigen::Success) fail(ErrorCode::SingularSystem, "sparse factorization failed");
  }

  Vector raw_solve(const Vector& b) const {
#ifdef ENZ_HAVE_UMFPACK
    if (umf_) return umf_->solve(b);
#endif
    return slu_->solve(b);
  }

  // Power iteration on (S A S)^{-H} (S A S)^{-1} with S the equilibration.
  double estimate_ratio() const {
    const Eigen::Index n = a_.rows();
    double anorm = 0.0;
    {
      Eigen::VectorXd rows = Eigen::VectorXd::Zero(n);
      for (Eigen::Index j = 0; j < a_.outerSize(); ++j)
        for (typename Matrix::InnerIterator it(a_, j); it; ++it)
          rows[it.row()] += std::abs(it.value()) * scale_[it.row()] * scale_[j];
      anorm = rows.maxCoeff();
    }
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = Scalar(1.0 + 0.5 * std::sin(1.7 * double(i) + 0.3));
    x /= x.norm();
    double inv_norm = 0.0;
    for (int it = 0; it < 6; ++it) {
      Vector y = scale_.cast<Scalar>().asDiagonal() * raw_solve(Vector(scale_.cast<Scalar>().asDiagonal() * x));
      Vector yc = y.conjugate();
      Vector z = scale_.cast<Scalar>().asDiagonal() * raw_solve(Vector(scale_.cast<Scalar>().asDiagonal() * yc));
      z = z.conjugate().eval();
      double zn = z.norm();
      if (!std::isfinite(zn)) return 0.0;
      inv_norm = std::sqrt(zn);
      if (zn == 0.0) break;
      x = z / zn;
    }
    if (inv_norm == 0.0) return std::numeric_limits<double>::infinity();
    return (1.0 / inv_norm) / anorm;
  }

  Matrix a_;
  SolveOptions opt_;
  Eigen::VectorXd scale_;
#ifdef ENZ_HAVE_UMFPACK
  std::unique_ptr<Eigen::UmfPackLU<Matrix>> umf_;
#endif
  std::unique_ptr<Fallback> slu_;
  double ratio_ = 0.0;
};

using FactorizationC = SparseFactorization<Complex>;
using FactorizationR = SparseFactorization<double>;

}  // namespace enz::fem
