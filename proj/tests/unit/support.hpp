#pragma once

#include <gtest/gtest.h>

#include "enz/direct/direct.hpp"

// Expects statement to throw enz::Error with the given code.
#define EXPECT_ENZ_ERROR(statement, expected)                                   \
  do {                                                                           \
    try {                                                                        \
      statement;                                                                 \
      ADD_FAILURE() << "no error thrown, expected " << enz::error_name(expected); \
    } catch (const enz::Error& e_) {                                             \
      EXPECT_EQ(e_.code(), expected) << e_.what();                               \
    }                                                                            \
  } while (0)

namespace enz::fixtures {

inline geometry::DomainSpec generic_domain() {
  geometry::DomainSpec d;
  d.dopant = geometry::Circle{{0.3, 0.0}, 0.2};
  return d;
}

inline physics::PhysicsConfig generic_physics(Complex k = 1.0) {
  auto cfg = physics::PhysicsConfig::from_k(k);
  cfg.sources.disks.push_back({{2.5, 0.0}, 0.2, 1.0});
  return cfg;
}

// Coarse meshes shared across tests of one binary.
inline std::shared_ptr<const geometry::Mesh> generic_mesh() {
  static auto m = std::make_shared<const geometry::Mesh>(geometry::build_mesh(generic_domain(), 0.1));
  return m;
}
inline std::shared_ptr<const geometry::Mesh> concentric_mesh() {
  static auto m = std::make_shared<const geometry::Mesh>(geometry::build_mesh(geometry::DomainSpec{}, 0.1));
  return m;
}
// Small domain for pure FEM checks.
inline std::shared_ptr<const geometry::Mesh> small_mesh(double h = 0.1) {
  geometry::DomainSpec d;
  d.truncation_radius = 1.6;
  d.pml_thickness = 0.4;
  return std::make_shared<const geometry::Mesh>(geometry::build_mesh(d, h));
}

}  // namespace enz::fixtures

namespace enz::fixtures {

// Auxiliary solves on the coarse generic mesh, computed once per binary.
struct GenericSetup {
  physics::PhysicsConfig cfg = generic_physics();
  auxiliary::Workspace ws{generic_mesh(), cfg};
  auxiliary::AuxiliarySet aux = auxiliary::compute_auxiliary(ws, cfg.sources);
  correctors::Context cx{&ws, &aux};
};

inline const GenericSetup& generic_setup() {
  static GenericSetup s;
  return s;
}

}  // namespace enz::fixtures
