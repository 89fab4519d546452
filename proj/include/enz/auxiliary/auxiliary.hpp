#pragma once

#include <memory>
#include <optional>

#include "enz/fem/eigen.hpp"
#include "enz/fem/norms.hpp"
#include "enz/fem/recovery.hpp"
#include "enz/physics/config.hpp"

namespace enz::auxiliary {

using fem::BoundaryFunctional;
using fem::RegionMask;
using fem::ScalarField;
using fem::VectorXc;
using fem::ViewPtr;
using geometry::BoundaryTag;
using geometry::Mesh;
using geometry::Region;
using physics::PhysicsConfig;

// Region views of one mesh.
struct Views {
  std::shared_ptr<const Mesh> mesh;
  ViewPtr exterior;  // EXTERIOR and PML
  ViewPtr enz;
  ViewPtr dopant;
  ViewPtr global;    // every region

  static Views make(std::shared_ptr<const Mesh> m) {
    Views v;
    v.mesh = m;
    v.exterior = fem::RegionView::make(m, RegionMask::of({Region::Exterior, Region::Pml}));
    v.enz = fem::RegionView::make(m, RegionMask::of({Region::Enz}));
    v.dopant = fem::RegionView::make(m, RegionMask::of({Region::Dopant}));
    v.global = fem::RegionView::make(m, RegionMask::all());
    return v;
  }
};

inline std::vector<BoundaryTag> exterior_constraints(const Mesh& m) {
  if (m.has_pml()) return {BoundaryTag::GammaOmega, BoundaryTag::PmlOuter};
  return {BoundaryTag::GammaOmega};
}

struct DopantOptions {
  bool eigen_guard = true;                  // reject k^2 near a discrete Dirichlet eigenvalue
  std::vector<ScalarField> deflate;         // near-kernel modes for a deflated solve
};

// Factorized solution operators for one (mesh, k): the radiating exterior
// Dirichlet problem, the dopant Dirichlet problem and the ENZ mean-zero
// Neumann problem (the last is independent of k and may be shared).
class Workspace {
 public:
  Workspace(std::shared_ptr<const Mesh> mesh, const PhysicsConfig& cfg, DopantOptions dopt = {},
            std::shared_ptr<const fem::MeanZeroNeumannSolver> neumann = nullptr)
      : views_(Views::make(std::move(mesh))), cfg_(cfg) {
    cfg_.validate();
    const Mesh& m = *views_.mesh;
    rad_ = cfg_.radiation_for(m);
    measures_ = geometry::region_measures(m);
    Complex k = cfg_.k;
    fem::SolveOptions so = cfg_.solve_options();
    ext_ = std::make_shared<fem::DirichletSolver>(
        fem::assemble(views_.exterior, fem::Coefficients::helmholtz(k * k), k, rad_), exterior_constraints(m), so);
    build_dopant(dopt, so);
    neumann_ = neumann ? std::move(neumann) : std::make_shared<const fem::MeanZeroNeumannSolver>(views_.enz, so);
    if (neumann_->view()->mesh != views_.mesh) fail(ErrorCode::TagMismatch, "shared Neumann solver is on another mesh");
  }

  const Views& views() const { return views_; }
  const Mesh& mesh() const { return *views_.mesh; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return views_.mesh; }
  const PhysicsConfig& config() const { return cfg_; }
  const fem::RadiationSpec& radiation() const { return rad_; }
  const geometry::RegionMeasures& measures() const { return measures_; }
  const fem::DirichletSolver& exterior() const { return *ext_; }
  const fem::DirichletSolver& dopant() const { return *dop_; }
  const fem::MeanZeroNeumannSolver& neumann() const { return *neumann_; }
  std::shared_ptr<const fem::MeanZeroNeumannSolver> neumann_ptr() const { return neumann_; }
  // Nearest discrete Dirichlet eigenvalue of the dopant (NaN when the guard is off).
  double nearest_dopant_eigenvalue() const { return nearest_eig_; }

  // Exterior Helmholtz solve with a trace on GAMMA_OMEGA and an optional load.
  ScalarField solve_exterior(const VectorXc& trace_omega, const VectorXc& load = {}) const {
    std::vector<fem::Trace> tr;
    if (trace_omega.size() > 0) tr.push_back({BoundaryTag::GammaOmega, trace_omega});
    return ext_->solve(load, tr);
  }
  ScalarField solve_dopant(const VectorXc& trace_d) const {
    return dop_->solve({}, {{BoundaryTag::GammaD, trace_d}});
  }

 private:
  void build_dopant(const DopantOptions& dopt, const fem::SolveOptions& so) {
    Complex k = cfg_.k;
    Complex k2 = k * k;
    nearest_eig_ = std::numeric_limits<double>::quiet_NaN();
    if (dopt.eigen_guard && cfg_.tol.resonance_rel > 0.0) {
      // A singular shift-invert at k^2 means k^2 is itself an eigenvalue.
      try {
        nearest_eig_ = fem::dirichlet_eigs(views_.dopant, {BoundaryTag::GammaD}, 1, k2.real())[0].value;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularSystem) throw;
        fail(ErrorCode::ResonantDopant, "k^2 coincides with a Dirichlet eigenvalue of the dopant");
      }
      if (std::abs(nearest_eig_ - k2) <= cfg_.tol.resonance_rel * nearest_eig_)
        fail(ErrorCode::ResonantDopant, "k^2 is within tolerance of a Dirichlet eigenvalue of the dopant (" +
                                            std::to_string(nearest_eig_) + ")");
    }
    try {
      dop_ = std::make_shared<fem::DirichletSolver>(
          fem::assemble(views_.dopant, fem::Coefficients::helmholtz(k2), k), std::vector<BoundaryTag>{BoundaryTag::GammaD},
          so, dopt.deflate);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SingularSystem)
        fail(ErrorCode::ResonantDopant, std::string("dopant Helmholtz system is singular: ") + e.what());
      throw;
    }
  }

  Views views_;
  PhysicsConfig cfg_;
  fem::RadiationSpec rad_;
  geometry::RegionMeasures measures_;
  std::shared_ptr<fem::DirichletSolver> ext_, dop_;
  std::shared_ptr<const fem::MeanZeroNeumannSolver> neumann_;
  double nearest_eig_ = 0.0;
};

struct SolvedField {
  ScalarField field;
  BoundaryFunctional flux;  // canonical normal on its tag
};

inline VectorXc ones_on(const Mesh& m, BoundaryTag t) {
  return VectorXc::Ones(static_cast<Eigen::Index>(m.boundary_nodes(t).size()));
}

// -Delta s - k^2 s = f outside Omega, s = 0 on dOmega, radiating.
inline SolvedField solve_s(const Workspace& ws, const geometry::SourceSpec& src) {
  VectorXc load = fem::assemble_load(ws.views().exterior, src);
  ScalarField s = ws.exterior().solve(load);
  return {s, ws.exterior().flux(s, load, BoundaryTag::GammaOmega)};
}

// psi_e = 1 on dOmega, radiating.
inline SolvedField solve_psi_e(const Workspace& ws) {
  ScalarField u = ws.solve_exterior(ones_on(ws.mesh(), BoundaryTag::GammaOmega));
  return {u, ws.exterior().flux(u, BoundaryTag::GammaOmega)};
}

// psi_d = 1 on dD.
inline SolvedField solve_psi_d(const Workspace& ws) {
  ScalarField u = ws.solve_dopant(ones_on(ws.mesh(), BoundaryTag::GammaD));
  return {u, ws.dopant().flux(u, BoundaryTag::GammaD)};
}

struct BetaInfo {
  Complex beta;
  double sign_certificate;  // Im(k conj(beta)), negative by the Rellich argument
  double scale;             // largest term magnitude
};

inline BetaInfo compute_beta(Complex flux_psi_e, Complex flux_psi_d, double enz_area, const PhysicsConfig& cfg) {
  Complex vol = cfg.k2() * enz_area;
  BetaInfo b;
  b.beta = vol + flux_psi_e - flux_psi_d;
  b.scale = std::max({std::abs(vol), std::abs(flux_psi_e), std::abs(flux_psi_d)});
  b.sign_certificate = (cfg.k * std::conj(b.beta)).imag();
  if (!(std::abs(b.beta) > cfg.tol.beta_floor * b.scale)) fail(ErrorCode::BetaNearZero, "beta is numerically zero");
  return b;
}

// c* = -(1/beta) int_{dOmega} ds/dnu.
inline Complex compute_cstar(Complex beta, Complex flux_s_total) { return -flux_s_total / beta; }

struct MuEff {
  Complex volume;  // (|Omega \ D| + int_D psi_d) / |Omega| mu
  Complex flux;    // from omega^2 mu_eff |Omega| = k^2 |Omega \ D| - int_dD dpsi_d/dnu, recovered-gradient flux
};

inline MuEff compute_mueff(const Workspace& ws, const ScalarField& psi_d) {
  const auto& cfg = ws.config();
  double enz = ws.measures().of(Region::Enz), dop = ws.measures().of(Region::Dopant);
  double omega_area = enz + dop;
  Complex ipsi = fem::integral(psi_d);
  MuEff r;
  r.volume = (enz + ipsi) / omega_area * cfg.mu;
  fem::GradientRecovery rec(psi_d, RegionMask::of({Region::Dopant}));
  Complex fd = rec.boundary_flux(BoundaryTag::GammaD);
  r.flux = (cfg.k2() * enz - fd) / (cfg.omega * cfg.omega * omega_area);
  return r;
}

struct RellichReport {
  double lhs = 0.0;        // -2 Im(k int_{dOmega} u conj(du/dnu))
  double volume = 0.0;     // 2 Im(k) int (|k|^2 |u|^2 + |grad u|^2) up to the truncation circle
  double far_field = 0.0;  // int_{|x|=R} |u_r + u/(2R)|^2 + |k|^2 |u|^2
  double residual = 0.0;   // |lhs - volume - far_field|
};

// Rellich identity for a radiating exterior solution. The far-field term is
// evaluated on the truncation circle with the first curvature correction of
// the outgoing radial derivative.
inline RellichReport rellich_residual(const Workspace& ws, const ScalarField& u, const BoundaryFunctional& flux_omega) {
  RellichReport r;
  const Mesh& m = ws.mesh();
  Complex k = ws.config().k;
  VectorXc tr = fem::trace(u, BoundaryTag::GammaOmega);
  Complex pairing = flux_omega.pair(tr.conjugate());  // int conj(u) du/dnu
  r.lhs = -2.0 * (k * std::conj(pairing)).imag();
  if (tr.norm() == 0.0 && u.values.norm() == 0.0) return r;
  fem::NormParts np = fem::norm_parts(u, fem::Window::regions(RegionMask::of({Region::Exterior})));
  r.volume = 2.0 * k.imag() * (std::norm(k) * np.l2_sq + np.grad_sq);
  fem::GradientRecovery rec(u, RegionMask::of({Region::Exterior}));
  const double R = m.truncation_radius;
  CompensatedSum<double> ff;
  for (const auto& e : m.edges) {
    if (e.tag != BoundaryTag::GammaInf) continue;
    double s = 0.0;
    for (int g : e.nodes) {
      auto gr = rec.at(g);
      Vec2 x = m.nodes[g];
      double rr = norm(x);
      Complex ur = (gr[0] * x.x + gr[1] * x.y) / rr;
      Complex uv = u.at_node(g);
      s += std::norm(ur + uv / (2.0 * R)) + std::norm(k) * std::norm(uv);
    }
    ff.add(0.5 * e.length * s);
  }
  r.far_field = ff.value();
  r.residual = std::abs(r.lhs - r.volume - r.far_field);
  return r;
}

struct AuxiliarySet {
  ScalarField s, psi_e, psi_d;
  BoundaryFunctional flux_s, flux_psi_e, flux_psi_d;
  Complex beta, c_star;
  double sign_certificate = 0.0;
  MuEff mu_eff;
  Complex int_psi_d;
  RellichReport rellich;
};

// All auxiliary solves and constants. A replacement psi_d (e.g. a deflated
// solve at a resonant k) may be supplied.
inline AuxiliarySet compute_auxiliary(const Workspace& ws, const geometry::SourceSpec& src,
                                      std::optional<ScalarField> psi_d_override = std::nullopt) {
  AuxiliarySet a;
  auto s = solve_s(ws, src);
  auto pe = solve_psi_e(ws);
  a.s = s.field;
  a.flux_s = s.flux;
  a.psi_e = pe.field;
  a.flux_psi_e = pe.flux;
  if (psi_d_override) {
    a.psi_d = *psi_d_override;
    a.flux_psi_d = ws.dopant().flux(a.psi_d, BoundaryTag::GammaD);
  } else {
    auto pd = solve_psi_d(ws);
    a.psi_d = pd.field;
    a.flux_psi_d = pd.flux;
  }
  BetaInfo b = compute_beta(a.flux_psi_e.total(), a.flux_psi_d.total(), ws.measures().of(Region::Enz), ws.config());
  a.beta = b.beta;
  a.sign_certificate = b.sign_certificate;
  a.c_star = compute_cstar(a.beta, a.flux_s.total());
  a.mu_eff = compute_mueff(ws, a.psi_d);
  a.int_psi_d = fem::integral(a.psi_d);
  a.rellich = rellich_residual(ws, a.psi_e, a.flux_psi_e);
  return a;
}

}  // namespace enz::auxiliary
