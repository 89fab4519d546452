#include <sstream>

#include "support.hpp"

using namespace enz;
using namespace enz::geometry;

TEST(Shape, CircleAndPolygonMeasures) {
  Shape c = Circle{{0.0, 0.0}, 2.0};
  EXPECT_NEAR(area(c), 4.0 * kPi, 1e-12);
  EXPECT_NEAR(perimeter(c), 4.0 * kPi, 1e-12);
  Shape sq = normalize(Polygon{{{1, 1}, {1, -1}, {-1, -1}, {-1, 1}}});  // clockwise input
  EXPECT_GT(signed_area(std::get<Polygon>(sq).vertices), 0.0);
  EXPECT_NEAR(area(sq), 4.0, 1e-12);
  EXPECT_TRUE(contains(sq, {0.5, -0.5}));
  EXPECT_FALSE(contains(sq, {1.5, 0.0}));
  EXPECT_NEAR(max_radius(sq), std::sqrt(2.0), 1e-12);
}

TEST(Shape, RejectsDegenerateShapes) {
  EXPECT_FALSE(is_valid(Circle{{0, 0}, 0.0}));
  EXPECT_FALSE(is_valid(Circle{{0, 0}, -1.0}));
  EXPECT_FALSE(is_valid(Polygon{{{0, 0}, {1, 0}}}));
  Polygon bowtie{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}};
  EXPECT_FALSE(is_simple(bowtie));
  EXPECT_FALSE(is_valid(bowtie));
}

TEST(Shape, StrictInclusion) {
  EXPECT_TRUE(strictly_inside(Circle{{0, 0}, 0.3}, Circle{{0, 0}, 1.0}));
  EXPECT_FALSE(strictly_inside(Circle{{0.8, 0}, 0.3}, Circle{{0, 0}, 1.0}));  // crosses
  EXPECT_FALSE(strictly_inside(Circle{{0.7, 0}, 0.3}, Circle{{0, 0}, 1.0}));  // touches
}

TEST(Domain, ValidationErrors) {
  DomainSpec d;
  d.dopant = Circle{{0.9, 0.0}, 0.3};
  EXPECT_ENZ_ERROR(validate(d), ErrorCode::GeometryInvalid);
  d = DomainSpec{};
  d.truncation_radius = 0.9;
  EXPECT_ENZ_ERROR(validate(d), ErrorCode::GeometryInvalid);
  d = DomainSpec{};
  d.pml_thickness = -1.0;
  EXPECT_ENZ_ERROR(validate(d), ErrorCode::GeometryInvalid);
  d = DomainSpec{};
  d.omega = Polygon{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}};
  EXPECT_ENZ_ERROR(validate(d), ErrorCode::GeometryInvalid);
}

TEST(Domain, SourceValidation) {
  DomainSpec d;
  SourceSpec s;
  s.disks.push_back({{0.9, 0.0}, 0.3});  // overlaps omega
  EXPECT_ENZ_ERROR(validate_sources(d, s), ErrorCode::GeometryInvalid);
  s.disks = {{{2.5, 0.0}, 0.2, 1.0, 0.3}};  // inner > outer
  EXPECT_ENZ_ERROR(validate_sources(d, s), ErrorCode::GeometryInvalid);
  s.disks = {{{3.9, 0.0}, 0.2}};  // leaves the truncation disk
  EXPECT_ENZ_ERROR(validate_sources(d, s), ErrorCode::GeometryInvalid);
  s.disks = {{{0.0, 0.0}, 2.7, 1.0, 2.3}};  // annulus around omega is fine
  EXPECT_NO_THROW(validate_sources(d, s));
  EXPECT_EQ(s.value({2.5, 0.0}), Complex(1.0));
  EXPECT_EQ(s.value({2.0, 0.0}), Complex(0.0));
}

TEST(Mesh, RegionAreasAndBoundaryLengths) {
  auto m = fixtures::concentric_mesh();
  auto rm = region_measures(*m);
  // Inscribed polygons at h = 0.1 lose about 2% of the disk area.
  EXPECT_NEAR(rm.of(Region::Dopant), kPi * 0.09, 0.03 * kPi * 0.09);
  EXPECT_LT(rm.of(Region::Dopant), kPi * 0.09);
  EXPECT_NEAR(rm.omega_area(), kPi, 1e-2);
  EXPECT_NEAR(rm.of(BoundaryTag::GammaD), 2 * kPi * 0.3, 1e-2);
  EXPECT_NEAR(rm.of(BoundaryTag::GammaInf), 2 * kPi * 4.0, 2e-2);
  EXPECT_TRUE(m->has_pml());
  auto q = mesh_quality(*m);
  EXPECT_GE(q.min_angle_deg, 15.0);
  EXPECT_LE(q.max_edge, 1.5 * 0.1);
}

TEST(Mesh, TrianglesArePositivelyOriented) {
  auto m = fixtures::generic_mesh();
  for (std::size_t t = 0; t < m->triangles.size(); ++t) ASSERT_GT(m->area(static_cast<int>(t)), 0.0);
}

TEST(Mesh, CanonicalNormalsPointAwayFromInnerRegion) {
  auto m = fixtures::generic_mesh();
  for (const auto& e : m->edges) {
    Vec2 mid = 0.5 * (m->nodes[e.nodes[0]] + m->nodes[e.nodes[1]]);
    Vec2 c = e.tag == BoundaryTag::GammaD ? Vec2{0.3, 0.0} : Vec2{0.0, 0.0};
    ASSERT_GT(dot(e.normal, mid - c), 0.0) << tag_name(e.tag);
    ASSERT_NEAR(norm(e.normal), 1.0, 1e-12);
  }
}

TEST(Mesh, NoPmlWhenThicknessIsZero) {
  DomainSpec d;
  d.truncation_radius = 1.5;
  d.pml_thickness = 0.0;
  Mesh m = build_mesh(d, 0.1);
  EXPECT_FALSE(m.has_pml());
  EXPECT_TRUE(m.boundary_nodes(BoundaryTag::PmlOuter).empty());
}

TEST(Mesh, PolygonalOmega) {
  DomainSpec d;
  d.omega = Polygon{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
  d.truncation_radius = 2.5;
  d.pml_thickness = 0.5;
  Mesh m = build_mesh(d, 0.1);
  auto rm = region_measures(m);
  EXPECT_NEAR(rm.omega_area(), 4.0, 1e-9);
  EXPECT_NEAR(rm.of(BoundaryTag::GammaOmega), 8.0, 1e-9);
}

TEST(Mesh, RejectsNonPositiveSize) {
  EXPECT_ENZ_ERROR(build_mesh(DomainSpec{}, 0.0), ErrorCode::GeometryInvalid);
  EXPECT_ENZ_ERROR(build_mesh(DomainSpec{}, 0.6), ErrorCode::GeometryInvalid);  // coarser than the curve gap
}

TEST(Mesh, TextRoundTrip) {
  auto m = fixtures::small_mesh(0.2);
  std::stringstream ss;
  write_mesh(ss, *m);
  Mesh r = read_mesh(ss);
  ASSERT_EQ(r.nodes.size(), m->nodes.size());
  ASSERT_EQ(r.triangles, m->triangles);
  EXPECT_EQ(r.regions, m->regions);
  EXPECT_NEAR(r.truncation_radius, m->truncation_radius, 1e-12);
  EXPECT_NEAR(r.pml_thickness, m->pml_thickness, 1e-12);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) ASSERT_EQ(r.nodes[i].x, m->nodes[i].x);
}

TEST(Mesh, ReadErrors) {
  std::stringstream bad_header("vertices 3 triangles 1 edges 0\n");
  EXPECT_ENZ_ERROR(read_mesh(bad_header), ErrorCode::ParseError);
  std::stringstream short_body("nodes 3 triangles 1 edges 0\n0 0\n1 0\n");
  EXPECT_ENZ_ERROR(read_mesh(short_body), ErrorCode::ParseError);
  std::stringstream bad_region("nodes 3 triangles 1 edges 0\n0 0\n1 0\n0 1\n0 1 2 WATER\n");
  EXPECT_ENZ_ERROR(read_mesh(bad_region), ErrorCode::TagMismatch);
}
