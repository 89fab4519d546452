#pragma once

#include <functional>
#include <random>

#include "enz/auxiliary/auxiliary.hpp"

namespace enz::correctors {

using auxiliary::AuxiliarySet;
using auxiliary::Workspace;
using fem::BoundaryFunctional;
using fem::RegionMask;
using fem::ScalarField;
using fem::VectorXc;
using geometry::BoundaryTag;
using geometry::Region;

// (g, h_e, h_d): mean-zero ENZ field and flux functionals on dOmega and dD.
struct IterState {
  ScalarField g;
  BoundaryFunctional h_e;
  BoundaryFunctional h_d;
};

inline IterState zero_state(const Workspace& ws) {
  return {ScalarField::zero(ws.views().enz), BoundaryFunctional::zero(ws.mesh_ptr(), BoundaryTag::GammaOmega),
          BoundaryFunctional::zero(ws.mesh_ptr(), BoundaryTag::GammaD)};
}

inline IterState operator+(const IterState& a, const IterState& b) { return {a.g + b.g, a.h_e + b.h_e, a.h_d + b.h_d}; }
inline IterState operator-(const IterState& a, const IterState& b) { return {a.g - b.g, a.h_e - b.h_e, a.h_d - b.h_d}; }
inline IterState operator*(Complex s, const IterState& a) { return {s * a.g, s * a.h_e, s * a.h_d}; }

inline void check_state(const Workspace& ws, const IterState& st) {
  if (st.g.view->mesh != ws.mesh_ptr() || !(st.g.view->mask == ws.views().enz->mask))
    fail(ErrorCode::TagMismatch, "state field is not on the ENZ region");
  if (st.h_e.tag != BoundaryTag::GammaOmega || st.h_d.tag != BoundaryTag::GammaD)
    fail(ErrorCode::TagMismatch, "state fluxes are on the wrong tags");
}

// Mass-weighted mean of an ENZ field.
inline Complex mean(const Workspace& ws, const ScalarField& g) {
  const auto& nm = ws.neumann();
  Eigen::VectorXd w = nm.mass() * Eigen::VectorXd::Ones(g.values.size());
  return w.cast<Complex>().dot(g.values) / nm.measure();
}

// Composite discrete norm: H1(ENZ) on g and inverse lumped boundary mass on the fluxes.
inline double state_norm(const Workspace& ws, const IterState& st) {
  const geometry::Mesh& m = ws.mesh();
  double sq = fem::norm_parts(st.g, fem::Window::regions(RegionMask::of({Region::Enz}))).l2_sq +
              fem::norm_parts(st.g, fem::Window::regions(RegionMask::of({Region::Enz}))).grad_sq;
  for (const BoundaryFunctional* h : {&st.h_e, &st.h_d}) {
    Eigen::VectorXd w = fem::boundary_lumped_mass(m, h->tag);
    for (Eigen::Index i = 0; i < w.size(); ++i) sq += std::norm(h->values[i]) / w[i];
  }
  return std::sqrt(sq);
}

// A(h_e, h_d) = -(1/beta)(int_dOmega h_e - int_dD h_d).
inline Complex op_A(const BoundaryFunctional& h_e, const BoundaryFunctional& h_d, Complex beta) {
  if (beta == Complex{}) fail(ErrorCode::BetaNearZero, "beta is zero");
  return -(h_e.total() - h_d.total()) / beta;
}

// Everything the operator algebra needs for one (mesh, k).
struct Context {
  const Workspace* ws = nullptr;
  const AuxiliarySet* aux = nullptr;

  const Workspace& workspace() const { return *ws; }
  Complex k2() const { return ws->config().k2(); }
  double ctol() const { return ws->config().tol.ctol; }
};

// P_k: mean-zero Neumann solve on the ENZ region with volume data
// k^2 (A + g) and fluxes A dpsi_e/dnu + h_e, A dpsi_d/dnu + h_d.
inline ScalarField op_Pk(const Context& cx, const IterState& st) {
  check_state(*cx.ws, st);
  Complex a = op_A(st.h_e, st.h_d, cx.aux->beta);
  VectorXc vol = cx.k2() * (st.g.values.array() + a).matrix();
  BoundaryFunctional fe = a * cx.aux->flux_psi_e + st.h_e;
  BoundaryFunctional fd = a * cx.aux->flux_psi_d + st.h_d;
  return cx.ws->neumann().solve(vol, {fe, fd}, cx.ctol()).field;
}

struct HkResult {
  ScalarField exterior, dopant;
};

// H_k: radiating exterior solve and dopant solve with the given traces.
inline HkResult op_Hk(const Workspace& ws, const VectorXc& trace_e, const VectorXc& trace_d) {
  return {ws.solve_exterior(trace_e), ws.solve_dopant(trace_d)};
}

struct StepResult {
  ScalarField phi, lambda, chi;
  IterState next;  // (phi, dlambda/dnu, dchi/dnu)
};

inline StepResult step(const Context& cx, const IterState& st) {
  ScalarField phi = op_Pk(cx, st);
  HkResult h = op_Hk(*cx.ws, fem::trace(phi, BoundaryTag::GammaOmega), fem::trace(phi, BoundaryTag::GammaD));
  BoundaryFunctional fl = cx.ws->exterior().flux(h.exterior, BoundaryTag::GammaOmega);
  BoundaryFunctional fc = cx.ws->dopant().flux(h.dopant, BoundaryTag::GammaD);
  return {phi, h.exterior, h.dopant, {phi, fl, fc}};
}

// I_k(g, h_e, h_d) = (P_k(.), D_k T P_k(.)).
inline IterState op_Ik(const Context& cx, const IterState& st) { return step(cx, st).next; }

// Seed state (0, ds/dnu, 0).
inline IterState seed(const Context& cx) {
  IterState st = zero_state(*cx.ws);
  st.h_e = cx.aux->flux_s;
  return st;
}

struct CorrectorHierarchy {
  int order = 0;  // entries 0..order
  Complex c_star;
  std::vector<Complex> e;
  std::vector<ScalarField> phi, lambda, chi;
  std::vector<IterState> states;  // states[j] is I_k^j(seed), size order + 2
  double rho_hat = std::numeric_limits<double>::quiet_NaN();

  // c_delta = c* + sum_{j < J} delta^{j+1} e_j (compensated).
  Complex c_delta(Complex delta, int J) const {
    if (J < 0 || J > order + 1) fail(ErrorCode::ValidationError, "truncation order exceeds the hierarchy");
    CompensatedSum<Complex> s;
    s.add(c_star);
    Complex p = delta;
    for (int j = 0; j < J; ++j) {
      s.add(p * e[j]);
      p *= delta;
    }
    return s.value();
  }
  std::function<Complex(Complex)> c_delta_fn(int J) const {
    return [this, J](Complex d) { return c_delta(d, J); };
  }
};

inline CorrectorHierarchy build_hierarchy(const Context& cx, int J) {
  if (J < 0) fail(ErrorCode::ValidationError, "order must be nonnegative");
  CorrectorHierarchy h;
  h.order = J;
  h.c_star = cx.aux->c_star;
  h.states.push_back(seed(cx));
  for (int j = 0; j <= J; ++j) {
    StepResult r = step(cx, h.states.back());
    h.e.push_back(op_A(r.next.h_e, r.next.h_d, cx.aux->beta));
    h.phi.push_back(std::move(r.phi));
    h.lambda.push_back(std::move(r.lambda));
    h.chi.push_back(std::move(r.chi));
    h.states.push_back(std::move(r.next));
  }
  return h;
}

struct RadiusEstimate {
  double rho_hat = 0.0;
  std::vector<double> ratios;  // per-iteration norm growth
  double spread = 0.0;         // relative spread of the geometric-mean ratio over the last quarter
};

// Power iteration for the spectral radius of the discrete I_k under the
// composite norm, from a random mean-zero start. The estimate is the
// geometric mean of the growth factors over the second half of the run.
inline RadiusEstimate estimate_radius(const Context& cx, int iters, unsigned seed_value) {
  if (iters < 10) fail(ErrorCode::ValidationError, "radius estimation needs at least 10 iterations");
  const Workspace& ws = *cx.ws;
  std::mt19937 rng(seed_value);
  std::normal_distribution<double> nd;
  IterState x = zero_state(ws);
  for (Eigen::Index i = 0; i < x.g.values.size(); ++i) x.g.values[i] = Complex(nd(rng), nd(rng));
  x.g.values.array() -= mean(ws, x.g);
  for (BoundaryFunctional* h : {&x.h_e, &x.h_d}) {
    Eigen::VectorXd w = fem::boundary_lumped_mass(ws.mesh(), h->tag);
    for (Eigen::Index i = 0; i < h->values.size(); ++i) h->values[i] = w[i] * Complex(nd(rng), nd(rng));
  }
  double n0 = state_norm(ws, x);
  if (!(n0 > 0.0)) fail(ErrorCode::NoConvergence, "degenerate starting state");
  x = Complex(1.0 / n0) * x;
  RadiusEstimate out;
  std::vector<double> logs;
  for (int it = 0; it < iters; ++it) {
    x = op_Ik(cx, x);
    double n = state_norm(ws, x);
    out.ratios.push_back(n);
    if (n == 0.0) return out;
    logs.push_back(std::log(n));
    x = Complex(1.0 / n) * x;
  }
  auto geo_mean = [&](int from) {
    double s = 0.0;
    for (int i = from; i < iters; ++i) s += logs[i];
    return std::exp(s / (iters - from));
  };
  out.rho_hat = geo_mean(iters / 2);
  double late = geo_mean(iters - std::max(2, iters / 4));
  out.spread = std::abs(late - out.rho_hat) / out.rho_hat;
  if (!std::isfinite(out.rho_hat) || out.spread > 0.25)
    fail(ErrorCode::NoConvergence, "power iteration did not settle (spread " + std::to_string(out.spread) + ")");
  return out;
}

// Global nodal field of the truncated expansion of order J:
//   exterior   c_delta psi_e + s + delta sum_{j<J} delta^j lambda_j
//   ENZ        c_delta       +     delta sum_{j<J} delta^j phi_j
//   dopant     c_delta psi_d +     delta sum_{j<J} delta^j chi_j
// with c_delta = c* + sum_{j<J} delta^{j+1} e_j. Interface nodes agree by
// construction; they take the value of the first region listed.
inline ScalarField assemble_v_delta(const Context& cx, const CorrectorHierarchy& h, Complex delta, int J,
                                    bool require_convergence = false) {
  if (J < 0 || J > h.order + 1) fail(ErrorCode::ValidationError, "truncation order exceeds the hierarchy");
  if (require_convergence && !(std::abs(delta) * h.rho_hat < 1.0))
    fail(ErrorCode::DivergentSeries, "|delta| rho_hat >= 1: the series does not converge");
  const AuxiliarySet& a = *cx.aux;
  Complex cd = h.c_delta(delta, J);
  VectorXc ext = cd * a.psi_e.values + a.s.values;
  VectorXc enz = VectorXc::Constant(cx.ws->views().enz->size(), cd);
  VectorXc dop = cd * a.psi_d.values;
  Complex p = delta;
  for (int j = 0; j < J; ++j) {
    ext += p * h.lambda[j].values;
    enz += p * h.phi[j].values;
    dop += p * h.chi[j].values;
    p *= delta;
  }
  const auto& views = cx.ws->views();
  VectorXc out = VectorXc::Zero(views.global->size());
  std::vector<char> set(out.size(), 0);
  auto scatter = [&](const fem::ViewPtr& v, const VectorXc& vals) {
    for (int l = 0; l < v->size(); ++l) {
      int gl = views.global->local[v->nodes[l]];
      if (!set[gl]) {
        out[gl] = vals[l];
        set[gl] = 1;
      }
    }
  };
  scatter(views.exterior, ext);
  scatter(views.enz, enz);
  scatter(views.dopant, dop);
  return {views.global, std::move(out)};
}

// Largest nodal mismatch between regional expansions at shared interface nodes.
inline double interface_jump(const Context& cx, const CorrectorHierarchy& h, Complex delta, int J) {
  ScalarField v = assemble_v_delta(cx, h, delta, J);
  const AuxiliarySet& a = *cx.aux;
  Complex cd = h.c_delta(delta, J);
  double jump = 0.0;
  for (BoundaryTag t : {BoundaryTag::GammaOmega, BoundaryTag::GammaD}) {
    VectorXc ours = fem::trace(v, t);
    VectorXc other = t == BoundaryTag::GammaOmega ? VectorXc(cd * fem::trace(a.psi_e, t) + fem::trace(a.s, t))
                                                  : VectorXc(cd * fem::trace(a.psi_d, t));
    VectorXc enz = VectorXc::Constant(ours.size(), cd);
    Complex p = delta;
    for (int j = 0; j < J; ++j) {
      other += p * (t == BoundaryTag::GammaOmega ? fem::trace(h.lambda[j], t) : fem::trace(h.chi[j], t));
      enz += p * fem::trace(h.phi[j], t);
      p *= delta;
    }
    jump = std::max({jump, (ours - other).cwiseAbs().maxCoeff(), (ours - enz).cwiseAbs().maxCoeff()});
  }
  return jump;
}

// Summed Neumann state X = sum_{j<=N} delta^j I_k^j(seed) and the relative
// residual ||(I - delta I_k) X - seed|| / ||seed||.
struct ResolventCheck {
  double residual = 0.0;
  double tail_ratio = 0.0;  // ||delta^N state_N|| / ||delta^{N-1} state_{N-1}||
};

inline ResolventCheck resolvent_check(const Context& cx, const CorrectorHierarchy& h, Complex delta) {
  const Workspace& ws = *cx.ws;
  const int n = static_cast<int>(h.states.size()) - 1;  // use states 0..n-1
  if (n < 2) fail(ErrorCode::ValidationError, "resolvent check needs at least two states");
  IterState x = zero_state(ws);
  Complex p = 1.0;
  for (int j = 0; j < n; ++j) {
    x = x + p * h.states[j];
    p *= delta;
  }
  IterState r = x - delta * op_Ik(cx, x) - h.states[0];
  ResolventCheck out;
  out.residual = state_norm(ws, r) / state_norm(ws, h.states[0]);
  double a = state_norm(ws, h.states[n - 1]), b = state_norm(ws, h.states[n - 2]);
  out.tail_ratio = b > 0.0 ? std::abs(delta) * a / b : 0.0;
  return out;
}

}  // namespace enz::correctors
