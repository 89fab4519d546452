#pragma once

#include "enz/correctors/correctors.hpp"
#include "enz/special/bessel.hpp"

namespace enz::resonance {

using auxiliary::Workspace;
using fem::BoundaryFunctional;
using fem::EigenPair;
using fem::ScalarField;
using fem::VectorXc;
using geometry::BoundaryTag;
using geometry::Mesh;
using physics::PhysicsConfig;

enum class Excitation { Excited, NotExcited };

inline const char* excitation_name(Excitation e) { return e == Excitation::Excited ? "EXCITED" : "NOT_EXCITED"; }

struct ModeCluster {
  double lambda_star = 0.0;          // mean of the clustered discrete eigenvalues
  std::vector<EigenPair> modes;      // mass-orthonormal
  std::vector<double> means;         // m_j = int_D U_j
  std::vector<double> l1;            // int_D |U_j|
  std::vector<double> others;        // nearby eigenvalues outside the cluster
};

// Discrete Dirichlet eigenpairs of the dopant clustered at the eigenvalue
// nearest to a target.
inline ModeCluster find_cluster(const fem::ViewPtr& dopant, double target, int count = 4, double cluster_rel = 1e-7) {
  auto eig = fem::dirichlet_eigs(dopant, {BoundaryTag::GammaD}, count, target);
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < eig.size(); ++i)
    if (std::abs(eig[i].value - target) < std::abs(eig[nearest].value - target)) nearest = i;
  const double lam = eig[nearest].value;
  ModeCluster c;
  double sum = 0.0;
  fem::SparseR m = fem::mass_matrix(dopant);
  Eigen::VectorXd lumped = m * Eigen::VectorXd::Ones(dopant->size());
  for (auto& p : eig) {
    if (std::abs(p.value - lam) <= cluster_rel * lam) {
      sum += p.value;
      c.means.push_back(fem::integral(p.mode).real());
      c.l1.push_back(lumped.dot(p.mode.values.cwiseAbs()));
      c.modes.push_back(std::move(p));
    } else {
      c.others.push_back(p.value);
    }
  }
  c.lambda_star = sum / static_cast<double>(c.modes.size());
  return c;
}

inline Excitation classify(const ModeCluster& c, double threshold = 1e-6) {
  for (std::size_t j = 0; j < c.modes.size(); ++j)
    if (std::abs(c.means[j]) > threshold * c.l1[j]) return Excitation::Excited;
  return Excitation::NotExcited;
}

inline double sum_mean_sq(const ModeCluster& c) {
  double s = 0.0;
  for (double m : c.means) s += m * m;
  return s;
}

// Wavenumber with 0 <= arg k < pi for a given k^2.
inline Complex wavenumber(Complex k2) {
  Complex k = std::sqrt(k2);
  if (std::arg(k) < 0.0 || std::arg(k) >= kPi) k = -k;
  return k;
}

inline PhysicsConfig config_at(const PhysicsConfig& base, Complex k2) {
  PhysicsConfig c = base;
  c.k = wavenumber(k2);
  c.mu = k2 / (c.omega * c.omega);
  c.validate();
  return c;
}

// int_dOmega ds/dnu from an exterior-only solve (valid at a dopant resonance).
inline BoundaryFunctional source_flux(std::shared_ptr<const Mesh> mesh, const PhysicsConfig& cfg) {
  auto views = auxiliary::Views::make(mesh);
  Complex k = cfg.k;
  fem::DirichletSolver ext(fem::assemble(views.exterior, fem::Coefficients::helmholtz(k * k), k, cfg.radiation_for(*mesh)),
                           auxiliary::exterior_constraints(*mesh), cfg.solve_options());
  VectorXc load = fem::assemble_load(views.exterior, cfg.sources);
  ScalarField s = ext.solve(load);
  return ext.flux(s, load, BoundaryTag::GammaOmega);
}

// C-bar = -int ds/dnu / (lambda*^2 sum m_j^2).
inline Complex compute_Cbar(const ModeCluster& c, Complex flux_s_total) {
  double sm = sum_mean_sq(c);
  double l1 = 0.0;
  for (double v : c.l1) l1 = std::max(l1, v);
  if (!(sm > 1e-12 * l1 * l1)) fail(ErrorCode::Degenerate, "cluster modes have vanishing means");
  return -flux_s_total / (c.lambda_star * c.lambda_star * sm);
}

// D-flux datum of the limit problem: C-bar lambda* sum m_j dU_j/dnu_D.
inline BoundaryFunctional limit_dopant_flux(const ModeCluster& c, Complex cbar) {
  BoundaryFunctional out = BoundaryFunctional::zero(c.modes.front().mode.view->mesh, BoundaryTag::GammaD);
  for (std::size_t j = 0; j < c.modes.size(); ++j)
    out = out + (cbar * c.lambda_star * c.means[j]) * fem::eigen_flux(c.modes[j], BoundaryTag::GammaD);
  return out;
}

// Mean-zero Laplace problem on the ENZ region with flux ds/dnu on dOmega and
// the limit eigenfunction flux on dD.
inline ScalarField solve_phi_hat0(const fem::MeanZeroNeumannSolver& neumann, const ModeCluster& c, Complex cbar,
                                  const BoundaryFunctional& flux_s, double ctol = 1e-6) {
  return neumann.solve({}, {flux_s, limit_dopant_flux(c, cbar)}, ctol).field;
}

struct GammaRecord {
  Complex gamma;
  Complex k2;
  Complex c_star, beta, mu_eff;
  double phi_gap_h1 = 0.0;  // ||phi0^gamma - phi_hat0||_{H1(ENZ)}
};

struct ResonanceStudy {
  ModeCluster cluster;
  Excitation excitation = Excitation::Excited;
  BoundaryFunctional flux_s_star;  // ds/dnu at k^2 = lambda*
  Complex c_bar;
  ScalarField phi_hat0;
  std::vector<GammaRecord> real_path, lossy_path;
};

// Auxiliary set and phi0 at k^2 = lambda* - gamma on a fixed mesh.
inline GammaRecord solve_at(std::shared_ptr<const Mesh> mesh, const PhysicsConfig& base, const ModeCluster& cl,
                            Complex gamma, const std::shared_ptr<const fem::MeanZeroNeumannSolver>& neumann,
                            const ScalarField* phi_hat0) {
  if (gamma == Complex{}) fail(ErrorCode::ValidationError, "gamma must be nonzero");
  Complex k2 = cl.lambda_star - gamma;
  for (double other : cl.others)
    if (std::abs(other - k2) <= std::abs(gamma))
      fail(ErrorCode::ResonantDopant, "detuned k^2 lies closer to another dopant eigenvalue");
  PhysicsConfig cfg = config_at(base, k2);
  cfg.tol.resonance_rel = 0.0;
  Workspace ws(mesh, cfg, {false, {}}, neumann);
  auto aux = auxiliary::compute_auxiliary(ws, cfg.sources);
  correctors::Context cx{&ws, &aux};
  ScalarField phi0 = correctors::op_Pk(cx, correctors::seed(cx));
  GammaRecord r{gamma, k2, aux.c_star, aux.beta, aux.mu_eff.volume, 0.0};
  if (phi_hat0)
    r.phi_gap_h1 = fem::norm_parts(phi0 - *phi_hat0, fem::Window::regions(fem::RegionMask::of({geometry::Region::Enz}))).h1();
  return r;
}

struct StudyOptions {
  std::vector<double> gammas{1e-1, 4.6415888336127774e-2, 2.1544346900318832e-2, 1e-2, 4.6415888336127774e-3,
                             2.1544346900318832e-3, 1e-3};
  double target = 0.0;  // continuum eigenvalue to cluster around
};

// Gamma sweeps along k^2 = lambda* - gamma (real gamma > 0) and
// k^2 = lambda* + i gamma' (material loss, gamma = -i gamma').
inline ResonanceStudy gamma_sweep(std::shared_ptr<const Mesh> mesh, const PhysicsConfig& base, const StudyOptions& opt) {
  ResonanceStudy st;
  auto views = auxiliary::Views::make(mesh);
  st.cluster = find_cluster(views.dopant, opt.target);
  st.excitation = classify(st.cluster);
  if (st.excitation != Excitation::Excited)
    fail(ErrorCode::ValidationError, "the gamma sweep needs an excited resonance");
  PhysicsConfig star = config_at(base, st.cluster.lambda_star);
  st.flux_s_star = source_flux(mesh, star);
  st.c_bar = compute_Cbar(st.cluster, st.flux_s_star.total());
  auto neumann = std::make_shared<const fem::MeanZeroNeumannSolver>(views.enz, base.solve_options());
  st.phi_hat0 = solve_phi_hat0(*neumann, st.cluster, st.c_bar, st.flux_s_star, base.tol.ctol);
  for (double g : opt.gammas) {
    st.real_path.push_back(solve_at(mesh, base, st.cluster, g, neumann, &st.phi_hat0));
    st.lossy_path.push_back(solve_at(mesh, base, st.cluster, Complex(0.0, -g), neumann, &st.phi_hat0));
  }
  return st;
}

// Two-point Richardson extrapolation of c*_gamma / gamma to gamma = 0 from
// the two records of smallest |gamma|.
inline Complex richardson_cbar(const std::vector<GammaRecord>& path) {
  if (path.size() < 2) fail(ErrorCode::ValidationError, "extrapolation needs two sweep points");
  std::vector<GammaRecord> p = path;
  std::sort(p.begin(), p.end(), [](const GammaRecord& a, const GammaRecord& b) { return std::abs(a.gamma) < std::abs(b.gamma); });
  Complex g1 = p[0].gamma, g2 = p[1].gamma;
  Complex q1 = p[0].c_star / g1, q2 = p[1].c_star / g2;
  return (g2 * q1 - g1 * q2) / (g2 - g1);
}

struct Slopes {
  double c_star = 0.0, mu_eff = 0.0, phi_gap = 0.0;
};

inline Slopes path_slopes(const std::vector<GammaRecord>& path) {
  std::vector<double> g, c, m, p;
  for (const auto& r : path) {
    g.push_back(std::abs(r.gamma));
    c.push_back(std::abs(r.c_star));
    m.push_back(std::abs(r.mu_eff));
    p.push_back(r.phi_gap_h1);
  }
  auto slope = [&](const std::vector<double>& y) {
    double mx = 0.0, my = 0.0, n = static_cast<double>(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      mx += std::log(g[i]) / n;
      my += std::log(y[i]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      sxy += (std::log(g[i]) - mx) * (std::log(y[i]) - my);
      sxx += (std::log(g[i]) - mx) * (std::log(g[i]) - mx);
    }
    return sxy / sxx;
  };
  return {slope(c), slope(m), slope(p)};
}

// Dopant solve at an unexcited resonance: psi_d from a solve deflated
// against the cluster modes, so psi_d is the member of the solution family
// mass-orthogonal to them.
struct NotExcitedResult {
  ModeCluster cluster;
  Excitation excitation = Excitation::NotExcited;
  Complex c_star, c_star_shifted;   // with psi_d and psi_d + sum alpha_j U_j
  double chi0_change = 0.0;         // relative H1 change of chi0 under the shift
};

inline NotExcitedResult not_excited_study(std::shared_ptr<const Mesh> mesh, const PhysicsConfig& base, double target,
                                          const std::vector<Complex>& alpha) {
  NotExcitedResult out;
  auto views = auxiliary::Views::make(mesh);
  out.cluster = find_cluster(views.dopant, target);
  out.excitation = classify(out.cluster);
  if (out.excitation != Excitation::NotExcited) fail(ErrorCode::ValidationError, "resonance is excited");
  PhysicsConfig cfg = config_at(base, out.cluster.lambda_star);
  cfg.tol.resonance_rel = 0.0;
  std::vector<ScalarField> modes;
  for (const auto& p : out.cluster.modes) modes.push_back(p.mode);
  Workspace ws(mesh, cfg, {false, modes});
  auto a = auxiliary::compute_auxiliary(ws, cfg.sources);
  ScalarField shifted = a.psi_d;
  for (std::size_t j = 0; j < modes.size() && j < alpha.size(); ++j)
    shifted.values += alpha[j] * fem::restrict_to(modes[j], ws.views().dopant).values;
  auto b = auxiliary::compute_auxiliary(ws, cfg.sources, shifted);
  out.c_star = a.c_star;
  out.c_star_shifted = b.c_star;
  correctors::Context ca{&ws, &a}, cb{&ws, &b};
  auto ha = correctors::build_hierarchy(ca, 0), hb = correctors::build_hierarchy(cb, 0);
  out.chi0_change = fem::h1_norm(ha.chi[0] - hb.chi[0], fem::Window::everything()) /
                    fem::h1_norm(ha.chi[0], fem::Window::everything());
  return out;
}

// Continuum Dirichlet eigenvalue (j_{n,1}/a)^2 of a disk of radius a, n in {0, 1}.
inline double disk_eigenvalue(int order, double radius) {
  double z = special::bessel_zero(order, 1);
  return (z / radius) * (z / radius);
}

}  // namespace enz::resonance
