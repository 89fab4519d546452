#pragma once

#include <limits>
#include <variant>
#include <vector>

#include "enz/common.hpp"

namespace enz::geometry {

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

// Simple polygon; vertices are stored counter-clockwise after normalize().
struct Polygon {
  std::vector<Vec2> vertices;
};

using Shape = std::variant<Circle, Polygon>;

inline double signed_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + t * ab);
}

// Even-odd rule; points exactly on the boundary may go either way.
inline bool polygon_contains(const std::vector<Vec2>& v, Vec2 p) {
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
    double v = cross(q - p, r - p);
    return (v > 0) - (v < 0);
  };
  auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

inline bool is_simple(const Polygon& poly) {
  const auto& v = poly.vertices;
  std::size_t n = v.size();
  if (n < 3) return false;
  if (std::abs(signed_area(v)) <= 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (distance(v[i], v[(i + 1) % n]) <= 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

inline Shape normalize(Shape s) {
  if (auto* p = std::get_if<Polygon>(&s)) {
    if (signed_area(p->vertices) < 0.0) std::reverse(p->vertices.begin(), p->vertices.end());
  }
  return s;
}

inline bool is_valid(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s))
    return std::isfinite(c->center.x) && std::isfinite(c->center.y) && std::isfinite(c->radius) &&
           c->radius > 0.0;
  const auto& p = std::get<Polygon>(s);
  for (const auto& v : p.vertices)
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) return false;
  return is_simple(p);
}

inline bool contains(const Shape& s, Vec2 p) {
  if (const auto* c = std::get_if<Circle>(&s)) return distance(p, c->center) < c->radius;
  return polygon_contains(std::get<Polygon>(s).vertices, p);
}

// Distance from p to the boundary curve.
inline double boundary_distance(const Shape& s, Vec2 p) {
  if (const auto* c = std::get_if<Circle>(&s)) return std::abs(distance(p, c->center) - c->radius);
  const auto& v = std::get<Polygon>(s).vertices;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    d = std::min(d, segment_distance(p, v[i], v[(i + 1) % v.size()]));
  return d;
}

inline double area(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s)) return kPi * c->radius * c->radius;
  return std::abs(signed_area(std::get<Polygon>(s).vertices));
}

inline double perimeter(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s)) return 2.0 * kPi * c->radius;
  const auto& v = std::get<Polygon>(s).vertices;
  double len = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) len += distance(v[i], v[(i + 1) % v.size()]);
  return len;
}

// Largest distance from the origin to a boundary point.
inline double max_radius(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s)) return norm(c->center) + c->radius;
  double r = 0.0;
  for (const auto& v : std::get<Polygon>(s).vertices) r = std::max(r, norm(v));
  return r;
}

// Counter-clockwise boundary samples with spacing at most h. Circles use an
// inscribed regular polygon; polygon edges are subdivided uniformly.
inline std::vector<Vec2> sample_boundary(const Shape& s, double h) {
  std::vector<Vec2> pts;
  if (const auto* c = std::get_if<Circle>(&s)) {
    int n = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * c->radius / h - 1e-9)));
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
      double t = 2.0 * kPi * i / n;
      pts.push_back({c->center.x + c->radius * std::cos(t), c->center.y + c->radius * std::sin(t)});
    }
    return pts;
  }
  auto v = std::get<Polygon>(normalize(s)).vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Vec2 a = v[i], b = v[(i + 1) % v.size()];
    int n = std::max(1, static_cast<int>(std::ceil(distance(a, b) / h - 1e-9)));
    for (int j = 0; j < n; ++j) pts.push_back(a + (static_cast<double>(j) / n) * (b - a));
  }
  return pts;
}

// Smallest distance between two boundary curves, resolved to about
// perimeter / 4096 on polygons.
inline double boundary_gap(const Shape& a, const Shape& b) {
  const auto* ca = std::get_if<Circle>(&a);
  const auto* cb = std::get_if<Circle>(&b);
  if (ca && cb) {
    double d = distance(ca->center, cb->center);
    double diff = std::abs(ca->radius - cb->radius);
    if (d <= diff) return diff - d;
    return std::max(0.0, d - ca->radius - cb->radius);
  }
  double gap = std::numeric_limits<double>::infinity();
  for (auto p : sample_boundary(a, perimeter(a) / 4096.0)) gap = std::min(gap, boundary_distance(b, p));
  for (auto p : sample_boundary(b, perimeter(b) / 4096.0)) gap = std::min(gap, boundary_distance(a, p));
  return gap;
}

// True when the closure of inner lies in the interior of outer.
inline bool strictly_inside(const Shape& inner, const Shape& outer) {
  for (auto p : sample_boundary(inner, perimeter(inner) / 4096.0))
    if (!contains(outer, p)) return false;
  return boundary_gap(inner, outer) > 0.0;
}

}  // namespace enz::geometry
