#pragma once

#include "enz/fem/assembly.hpp"
#include "enz/fem/sparse_solver.hpp"

namespace enz::physics {

struct Tolerances {
  double rtol = 1e-10;           // linear-solver residual contract
  double singular_ratio = 1e-8;  // sigma_min / norm floor for factorizations
  double ctol = 1e-6;            // Neumann compatibility, relative to the data scale
  double beta_floor = 1e-10;     // |beta| floor relative to its largest term
  // Relative distance |lambda - k^2| / lambda to the nearest discrete Dirichlet
  // eigenvalue of the dopant below which it is treated as resonant; 0 disables.
  double resonance_rel = 1e-2;
};

// omega, mu and the wavenumber k with k^2 = omega^2 mu, 0 <= arg k < pi.
struct PhysicsConfig {
  double omega = 1.0;
  Complex mu{1.0, 0.0};
  Complex k{1.0, 0.0};
  Complex delta{1e-2, 0.0};
  geometry::SourceSpec sources;
  std::optional<fem::RadiationSpec> radiation;  // default: PML when the mesh has one, else Robin
  Tolerances tol;
  unsigned seed = 20240611u;

  Complex k2() const { return k * k; }

  fem::SolveOptions solve_options() const {
    fem::SolveOptions o;
    o.rtol = tol.rtol;
    o.singular_ratio = tol.singular_ratio;
    return o;
  }

  static PhysicsConfig from_k(Complex k, double omega = 1.0) {
    PhysicsConfig c;
    c.omega = omega;
    c.k = k;
    c.mu = k * k / (omega * omega);
    c.validate();
    return c;
  }

  static PhysicsConfig from_omega_mu(double omega, Complex mu) {
    PhysicsConfig c;
    c.omega = omega;
    c.mu = mu;
    Complex k = std::sqrt(omega * omega * mu);
    if (std::arg(k) < 0.0) k = -k;
    c.k = k;
    c.validate();
    return c;
  }

  void validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) fail(ErrorCode::ValidationError, "omega must be positive");
    if (!(std::abs(k) > 0.0) || !std::isfinite(k.real()) || !std::isfinite(k.imag()))
      fail(ErrorCode::ValidationError, "k must be nonzero and finite");
    double a = std::arg(k);
    if (!(a >= 0.0 && a < kPi)) fail(ErrorCode::ValidationError, "k must satisfy 0 <= arg k < pi");
    if (std::abs(k * k - omega * omega * mu) > 1e-12 * std::max(1.0, std::abs(k * k)))
      fail(ErrorCode::ValidationError, "k^2 must equal omega^2 mu");
  }

  // Radiation treatment for a given mesh.
  fem::RadiationSpec radiation_for(const geometry::Mesh& m) const {
    if (radiation) {
      fem::RadiationSpec r = *radiation;
      if (r.mode == fem::RadiationSpec::Mode::Pml && r.sigma0 == 0.0 && m.has_pml())
        r = fem::RadiationSpec::pml(m.pml_thickness, r.order);
      return r;
    }
    return m.has_pml() ? fem::RadiationSpec::pml(m.pml_thickness) : fem::RadiationSpec::robin();
  }
};

}  // namespace enz::physics
