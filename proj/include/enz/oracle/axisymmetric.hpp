#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "enz/special/bessel.hpp"

namespace enz::oracle {

// One radial layer of a piecewise-constant medium: -div(alpha grad u) - k^2 u = f
// on (previous radius, r_out). The last layer extends to infinity.
struct RadialLayer {
  double r_out = std::numeric_limits<double>::infinity();
  double alpha = 1.0;  // 1/eps, real and positive
  Complex f{};         // constant source amplitude
};

// Mode-0 problem on r > r0 (r0 = 0: whole plane) with an optional Dirichlet
// value at r0 and an outgoing H0 tail.
struct RadialProblem {
  double k = 1.0;
  double r0 = 0.0;
  Complex dirichlet{};
  std::vector<RadialLayer> layers;
};

class RadialSolution {
 public:
  RadialSolution(RadialProblem p) : p_(std::move(p)) { solve(); }

  const RadialProblem& problem() const { return p_; }

  Complex value(double r) const { return eval(layer_of(r), r, false); }
  // Radial derivative u'(r) evaluated from the layer containing r (from the
  // inner side at an interface).
  Complex derivative(double r) const { return eval(layer_of(r), r, true); }
  Complex derivative_in(int layer, double r) const { return eval(layer, r, true); }
  Complex value_in(int layer, double r) const { return eval(layer, r, false); }

  // Largest |[u]| and |[alpha u']| over the interfaces, relative to the local size.
  double matching_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < p_.layers.size(); ++i) {
      double r = p_.layers[i].r_out;
      Complex u0 = eval(i, r, false), u1 = eval(i + 1, r, false);
      Complex q0 = p_.layers[i].alpha * eval(i, r, true), q1 = p_.layers[i + 1].alpha * eval(i + 1, r, true);
      worst = std::max(worst, std::abs(u0 - u1) / std::max(1.0, std::abs(u0)));
      worst = std::max(worst, std::abs(q0 - q1) / std::max(1.0, std::abs(q0)));
    }
    return worst;
  }

  // int_{r0 < |x| < R} u dx by closed-form Bessel integrals.
  Complex integral(double R) const {
    Complex total{};
    double lo = p_.r0;
    for (std::size_t i = 0; i < p_.layers.size() && lo < R; ++i) {
      double hi = std::min(R, p_.layers[i].r_out);
      total += layer_integral(i, lo, hi);
      lo = hi;
    }
    return total;
  }

  // int_{r0 < |x| < R} f dx.
  Complex source_integral(double R) const {
    Complex total{};
    double lo = p_.r0;
    for (std::size_t i = 0; i < p_.layers.size() && lo < R; ++i) {
      double hi = std::min(R, p_.layers[i].r_out);
      total += p_.layers[i].f * kPi * (hi * hi - lo * lo);
      lo = hi;
    }
    return total;
  }

  // Total flux of alpha u' through |x| = R from inside.
  Complex flux(double R) const {
    int i = layer_of(R);
    return 2.0 * kPi * R * p_.layers[i].alpha * eval(i, R, true);
  }

 private:
  struct Coef {
    Complex a{}, b{};  // a J0 + b Y0 (finite layers) or a H0 (tail)
  };

  double kappa(int i) const { return p_.k / std::sqrt(p_.layers[i].alpha); }
  bool is_tail(int i) const { return i + 1 == static_cast<int>(p_.layers.size()); }
  bool has_second(int i) const { return !is_tail(i) && !(i == 0 && p_.r0 == 0.0); }
  int count(int i) const { return is_tail(i) ? 1 : (has_second(i) ? 2 : 1); }

  int layer_of(double r) const {
    for (std::size_t i = 0; i < p_.layers.size(); ++i)
      if (r <= p_.layers[i].r_out) return static_cast<int>(i);
    return static_cast<int>(p_.layers.size()) - 1;
  }

  // Basis values (or derivatives) of layer i at r; index 0 then 1.
  void basis(int i, double r, bool deriv, Complex out[2]) const {
    double kk = kappa(i), z = kk * r;
    if (is_tail(i)) {
      out[0] = deriv ? -kk * special::h1(z) : special::h0(z);
      out[1] = 0.0;
      return;
    }
    if (deriv) {
      out[0] = -kk * special::j1(z);
      out[1] = has_second(i) ? Complex(-kk * special::y1(z)) : Complex(0.0);
    } else {
      out[0] = special::j0(z);
      out[1] = has_second(i) ? Complex(special::y0(z)) : Complex(0.0);
    }
  }

  Complex particular(int i) const { return -p_.layers[i].f / (p_.k * p_.k); }

  Complex eval(int i, double r, bool deriv) const {
    Complex b[2];
    basis(i, r, deriv, b);
    Complex u = coef_[i].a * b[0] + coef_[i].b * b[1];
    if (!deriv) u += particular(i);
    return u;
  }

  Complex layer_integral(int i, double lo, double hi) const {
    double kk = kappa(i);
    auto prim = [&](double r) {
      // int r Z0(kk r) dr = r Z1(kk r) / kk
      Complex v = particular(i) * 0.5 * r * r;
      if (r == 0.0) return v;
      double z = kk * r;
      if (is_tail(i)) return v + coef_[i].a * r * special::h1(z) / kk;
      v += coef_[i].a * r * special::j1(z) / kk;
      if (has_second(i)) v += coef_[i].b * r * special::y1(z) / kk;
      return v;
    };
    return 2.0 * kPi * (prim(hi) - prim(lo));
  }

  void solve() {
    const int nl = static_cast<int>(p_.layers.size());
    if (!(p_.k > 0.0)) fail(ErrorCode::Domain, "oracle requires a real positive wavenumber");
    if (nl < 1) fail(ErrorCode::ValidationError, "no layers");
    if (p_.r0 < 0.0) fail(ErrorCode::ValidationError, "negative inner radius");
    double prev = p_.r0;
    for (int i = 0; i < nl; ++i) {
      if (!(p_.layers[i].alpha > 0.0)) fail(ErrorCode::Domain, "oracle layers need a real positive coefficient");
      if (!(p_.layers[i].r_out > prev)) fail(ErrorCode::ValidationError, "layer radii must increase");
      if (i + 1 < nl && !std::isfinite(p_.layers[i].r_out)) fail(ErrorCode::ValidationError, "inner layer is unbounded");
      prev = p_.layers[i].r_out;
    }
    if (std::isfinite(p_.layers.back().r_out)) p_.layers.back().r_out = std::numeric_limits<double>::infinity();
    if (p_.r0 == 0.0 && nl == 1) fail(ErrorCode::ValidationError, "a single whole-plane layer has no outgoing solution");

    std::vector<int> offset(nl + 1, 0);
    for (int i = 0; i < nl; ++i) offset[i + 1] = offset[i] + count(i);
    const int n = offset[nl];
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    int row = 0;
    Complex b[2];
    if (p_.r0 > 0.0) {
      basis(0, p_.r0, false, b);
      for (int c = 0; c < count(0); ++c) A(row, offset[0] + c) = b[c];
      rhs[row] = p_.dirichlet - particular(0);
      ++row;
    }
    for (int i = 0; i + 1 < nl; ++i) {
      double r = p_.layers[i].r_out;
      double a0 = p_.layers[i].alpha, a1 = p_.layers[i + 1].alpha;
      basis(i, r, false, b);
      for (int c = 0; c < count(i); ++c) A(row, offset[i] + c) = b[c];
      basis(i + 1, r, false, b);
      for (int c = 0; c < count(i + 1); ++c) A(row, offset[i + 1] + c) = -b[c];
      rhs[row] = particular(i + 1) - particular(i);
      ++row;
      basis(i, r, true, b);
      for (int c = 0; c < count(i); ++c) A(row, offset[i] + c) = a0 * b[c];
      basis(i + 1, r, true, b);
      for (int c = 0; c < count(i + 1); ++c) A(row, offset[i + 1] + c) = -a1 * b[c];
      ++row;
    }
    // Column equilibration before the conditioning check.
    Eigen::VectorXd scale(n);
    for (int c = 0; c < n; ++c) {
      double s = A.col(c).norm();
      scale[c] = s > 0.0 ? 1.0 / s : 1.0;
      A.col(c) *= scale[c];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const auto& sv = svd.singularValues();
    if (!(sv[n - 1] > 1e-13 * sv[0])) fail(ErrorCode::SingularMatch, "interface matching system is singular");
    Eigen::VectorXcd x = A.fullPivLu().solve(rhs);
    coef_.assign(nl, {});
    for (int i = 0; i < nl; ++i) {
      coef_[i].a = x[offset[i]] * scale[offset[i]];
      if (count(i) == 2) coef_[i].b = x[offset[i] + 1] * scale[offset[i] + 1];
    }
  }

  RadialProblem p_;
  std::vector<Coef> coef_;
};

// Concentric geometry: dopant radius a, omega radius b, source annulus
// [r1, r2] of amplitude f0 outside b.
struct ConcentricSetup {
  double a = 0.3;
  double b = 1.0;
  double r1 = 2.3;
  double r2 = 2.7;
  Complex f0{1.0, 0.0};
  double k = 1.0;
  Complex mu{1.0, 0.0};
};

struct OracleScalars {
  Complex flux_psi_e;   // int_{dOmega} d psi_e / d nu_Omega
  Complex flux_psi_d;   // int_{dD} d psi_d / d nu_D
  Complex flux_s;       // int_{dOmega} d s / d nu_Omega
  Complex int_psi_d;    // int_D psi_d
  Complex beta;
  Complex c_star;
  Complex mu_eff;
};

inline void check_setup(const ConcentricSetup& g) {
  if (!(0.0 < g.a && g.a < g.b && g.b < g.r1 && g.r1 < g.r2))
    fail(ErrorCode::ValidationError, "oracle radii must satisfy 0 < a < b < r1 < r2");
  if (!(g.k > 0.0)) fail(ErrorCode::Domain, "oracle requires a real positive wavenumber");
}

// psi_e = H0(k r) / H0(k b).
inline Complex oracle_psi_e(const ConcentricSetup& g, double r) {
  return special::h0(g.k * r) / special::h0(g.k * g.b);
}

// psi_d = J0(k r) / J0(k a).
inline Complex oracle_psi_d(const ConcentricSetup& g, double r) {
  double j = special::j0(g.k * g.a);
  if (std::abs(j) < 1e-8) fail(ErrorCode::ResonantDopant, "J0(k a) vanishes");
  return special::j0(g.k * r) / j;
}

// s: exterior problem with s = 0 on r = b and the annulus source.
inline RadialSolution oracle_s(const ConcentricSetup& g) {
  check_setup(g);
  RadialProblem p;
  p.k = g.k;
  p.r0 = g.b;
  p.dirichlet = 0.0;
  p.layers = {{g.r1, 1.0, 0.0}, {g.r2, 1.0, g.f0}, {}};
  return RadialSolution(p);
}

// Full transmission problem with eps = delta (real, positive) in a < r < b.
inline RadialSolution oracle_transmission(const ConcentricSetup& g, double delta) {
  check_setup(g);
  if (!(delta > 0.0)) fail(ErrorCode::Domain, "oracle supports real positive delta only");
  RadialProblem p;
  p.k = g.k;
  p.layers = {{g.a, 1.0, 0.0}, {g.b, 1.0 / delta, 0.0}, {g.r1, 1.0, 0.0}, {g.r2, 1.0, g.f0}, {}};
  return RadialSolution(p);
}

inline OracleScalars oracle_scalars(const ConcentricSetup& g) {
  check_setup(g);
  double ka = g.k * g.a, kb = g.k * g.b;
  double j0a = special::j0(ka);
  if (std::abs(j0a) < 1e-8) fail(ErrorCode::ResonantDopant, "J0(k a) vanishes");
  OracleScalars o;
  o.flux_psi_e = 2.0 * kPi * g.b * (-g.k) * special::h1(kb) / special::h0(kb);
  o.flux_psi_d = 2.0 * kPi * g.a * (-g.k) * special::j1(ka) / j0a;
  o.int_psi_d = 2.0 * kPi * g.a * special::j1(ka) / (g.k * j0a);
  RadialSolution s = oracle_s(g);
  o.flux_s = 2.0 * kPi * g.b * s.derivative_in(0, g.b);
  double enz = kPi * (g.b * g.b - g.a * g.a);
  o.beta = g.k * g.k * enz + o.flux_psi_e - o.flux_psi_d;
  o.c_star = -o.flux_s / o.beta;
  o.mu_eff = (enz + o.int_psi_d) / (kPi * g.b * g.b) * g.mu;
  return o;
}

}  // namespace enz::oracle
