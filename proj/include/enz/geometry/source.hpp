#pragma once

#include <vector>

#include "enz/geometry/mesh.hpp"

namespace enz::geometry {

// Constant-amplitude source on a disk, or on an annulus when inner_radius > 0.
struct SourceDisk {
  Vec2 center;
  double radius = 0.0;
  Complex amplitude{1.0, 0.0};
  double inner_radius = 0.0;

  bool covers(Vec2 p) const {
    double r = distance(p, center);
    return r < radius && r >= inner_radius;
  }
};

struct SourceSpec {
  std::vector<SourceDisk> disks;

  Complex value(Vec2 p) const {
    Complex f{};
    for (const auto& d : disks)
      if (d.covers(p)) f += d.amplitude;
    return f;
  }
  bool active() const {
    for (const auto& d : disks)
      if (d.amplitude != Complex{}) return true;
    return false;
  }
};

inline void validate_sources(const DomainSpec& spec, const SourceSpec& src) {
  Shape omega = normalize(spec.omega);
  Vec2 probe = sample_boundary(omega, perimeter(omega))[0];
  for (const auto& d : src.disks) {
    if (!std::isfinite(d.radius) || d.radius <= 0.0 || d.inner_radius < 0.0 || d.inner_radius >= d.radius)
      fail(ErrorCode::GeometryInvalid, "source radii must satisfy 0 <= inner < outer");
    if (!(norm(d.center) + d.radius < spec.truncation_radius))
      fail(ErrorCode::GeometryInvalid, "source is not inside the truncation circle");
    Circle outer{d.center, d.radius};
    if (!(boundary_gap(outer, omega) > 0.0)) fail(ErrorCode::GeometryInvalid, "source touches omega");
    if (d.inner_radius > 0.0 && !(boundary_gap(Circle{d.center, d.inner_radius}, omega) > 0.0))
      fail(ErrorCode::GeometryInvalid, "source touches omega");
    if (d.covers(probe)) fail(ErrorCode::GeometryInvalid, "source overlaps omega");
    Vec2 mid{d.center.x + 0.5 * (d.inner_radius + d.radius), d.center.y};
    if (contains(omega, mid)) fail(ErrorCode::GeometryInvalid, "source overlaps omega");
  }
}

}  // namespace enz::geometry
