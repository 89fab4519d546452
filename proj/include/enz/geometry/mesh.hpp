#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "enz/common.hpp"
#include "enz/geometry/delaunay.hpp"
#include "enz/geometry/shape.hpp"

namespace enz::geometry {

enum class Region : std::uint8_t { Dopant = 0, Enz = 1, Exterior = 2, Pml = 3 };
enum class BoundaryTag : std::uint8_t { GammaD = 0, GammaOmega = 1, GammaInf = 2, PmlOuter = 3 };

inline constexpr int kRegionCount = 4;
inline constexpr int kTagCount = 4;

inline const char* region_name(Region r) {
  static const char* names[] = {"DOPANT", "ENZ", "EXTERIOR", "PML"};
  return names[static_cast<int>(r)];
}

inline const char* tag_name(BoundaryTag t) {
  static const char* names[] = {"GAMMA_D", "GAMMA_OMEGA", "GAMMA_INF", "PML_OUTER"};
  return names[static_cast<int>(t)];
}

// Region lying on the side the canonical normal points away from.
inline Region inner_region(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::GammaD: return Region::Dopant;
    case BoundaryTag::GammaOmega: return Region::Enz;
    case BoundaryTag::GammaInf: return Region::Exterior;
    case BoundaryTag::PmlOuter: return Region::Pml;
  }
  return Region::Dopant;
}

struct DomainSpec {
  Shape omega = Circle{{0.0, 0.0}, 1.0};
  Shape dopant = Circle{{0.0, 0.0}, 0.3};
  double truncation_radius = 4.0;
  double pml_thickness = 1.0;
};

// Boundary edge oriented so that the inner region is on its left; the normal
// points away from the inner region.
struct BoundaryEdge {
  std::array<int, 2> nodes{};
  BoundaryTag tag = BoundaryTag::GammaD;
  Vec2 normal;
  double length = 0.0;
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Region> regions;
  std::vector<BoundaryEdge> edges;
  double target_h = 0.0;
  double truncation_radius = 0.0;
  double pml_thickness = 0.0;

  double area(int t) const {
    const auto& v = triangles[t];
    return 0.5 * cross(nodes[v[1]] - nodes[v[0]], nodes[v[2]] - nodes[v[0]]);
  }
  Vec2 centroid(int t) const {
    const auto& v = triangles[t];
    return (1.0 / 3.0) * (nodes[v[0]] + nodes[v[1]] + nodes[v[2]]);
  }
  bool has_pml() const { return pml_thickness > 0.0; }
  const std::vector<int>& boundary_nodes(BoundaryTag t) const { return tag_nodes_[static_cast<int>(t)]; }

  // Orients boundary edges, computes normals and per-tag node lists, and
  // checks that the tags are consistent with the triangle regions.
  void finalize();

 private:
  std::array<std::vector<int>, kTagCount> tag_nodes_;
};

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

inline std::unordered_map<std::uint64_t, std::vector<int>> edge_triangles(const Mesh& m) {
  std::unordered_map<std::uint64_t, std::vector<int>> map;
  map.reserve(m.triangles.size() * 2);
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    const auto& v = m.triangles[t];
    for (int i = 0; i < 3; ++i) map[edge_key(v[i], v[(i + 1) % 3])].push_back(t);
  }
  return map;
}

}  // namespace detail

inline void Mesh::finalize() {
  if (regions.size() != triangles.size()) fail(ErrorCode::MeshFailure, "region tags do not match triangles");
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    for (int k : triangles[t])
      if (k < 0 || k >= static_cast<int>(nodes.size())) fail(ErrorCode::MeshFailure, "node index out of range");
    if (!(area(t) > 0.0)) fail(ErrorCode::MeshFailure, "non-positive triangle area");
  }
  auto adj = detail::edge_triangles(*this);
  for (const auto& [key, tris] : adj)
    if (tris.size() > 2) fail(ErrorCode::MeshFailure, "non-manifold edge");
  for (auto& tn : tag_nodes_) tn.clear();
  for (auto& e : edges) {
    auto it = adj.find(detail::edge_key(e.nodes[0], e.nodes[1]));
    if (it == adj.end()) fail(ErrorCode::MeshFailure, "boundary edge is not a mesh edge");
    Region want = inner_region(e.tag);
    int inner = -1;
    int others = 0;
    for (int t : it->second) {
      if (regions[t] == want)
        inner = t;
      else
        ++others;
    }
    if (inner < 0) fail(ErrorCode::MeshFailure, std::string("no inner triangle on ") + tag_name(e.tag));
    if (e.tag == BoundaryTag::PmlOuter || (e.tag == BoundaryTag::GammaInf && !has_pml())) {
      if (it->second.size() != 1) fail(ErrorCode::MeshFailure, "outer boundary edge is interior");
    } else if (others != 1) {
      fail(ErrorCode::MeshFailure, std::string("interface edge does not separate regions on ") + tag_name(e.tag));
    }
    // The inner triangle traverses its edges counter-clockwise; keep that direction.
    const auto& v = triangles[inner];
    for (int i = 0; i < 3; ++i) {
      int a = v[i], b = v[(i + 1) % 3];
      if (detail::edge_key(a, b) == detail::edge_key(e.nodes[0], e.nodes[1])) e.nodes = {a, b};
    }
    Vec2 d = nodes[e.nodes[1]] - nodes[e.nodes[0]];
    e.length = norm(d);
    e.normal = {d.y / e.length, -d.x / e.length};
    auto& tn = tag_nodes_[static_cast<int>(e.tag)];
    tn.push_back(e.nodes[0]);
    tn.push_back(e.nodes[1]);
  }
  for (auto& tn : tag_nodes_) {
    std::sort(tn.begin(), tn.end());
    tn.erase(std::unique(tn.begin(), tn.end()), tn.end());
  }
  // Every region interface must be tagged.
  std::unordered_map<std::uint64_t, int> tagged;
  for (const auto& e : edges) tagged[detail::edge_key(e.nodes[0], e.nodes[1])] = 1;
  for (const auto& [key, tris] : adj) {
    bool boundary = tris.size() == 1;
    bool interface = tris.size() == 2 && regions[tris[0]] != regions[tris[1]];
    if ((boundary || interface) && !tagged.count(key)) fail(ErrorCode::MeshFailure, "untagged boundary or interface edge");
  }
}

struct RegionMeasures {
  std::array<double, kRegionCount> area{};
  std::array<double, kTagCount> length{};
  double omega_area() const { return area[0] + area[1]; }
  double of(Region r) const { return area[static_cast<int>(r)]; }
  double of(BoundaryTag t) const { return length[static_cast<int>(t)]; }
};

inline RegionMeasures region_measures(const Mesh& m) {
  RegionMeasures out;
  std::array<CompensatedSum<double>, kRegionCount> a;
  std::array<CompensatedSum<double>, kTagCount> l;
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) a[static_cast<int>(m.regions[t])].add(m.area(t));
  for (const auto& e : m.edges) l[static_cast<int>(e.tag)].add(e.length);
  for (int i = 0; i < kRegionCount; ++i) out.area[i] = a[i].value();
  for (int i = 0; i < kTagCount; ++i) out.length[i] = l[i].value();
  return out;
}

struct MeshQuality {
  double min_angle_deg = 180.0;
  double max_edge = 0.0;
};

inline MeshQuality mesh_quality(const Mesh& m) {
  MeshQuality q;
  for (const auto& v : m.triangles) {
    for (int i = 0; i < 3; ++i) {
      Vec2 a = m.nodes[v[i]], b = m.nodes[v[(i + 1) % 3]], c = m.nodes[v[(i + 2) % 3]];
      double ang = std::atan2(std::abs(cross(b - a, c - a)), dot(b - a, c - a)) * 180.0 / kPi;
      q.min_angle_deg = std::min(q.min_angle_deg, ang);
      q.max_edge = std::max(q.max_edge, distance(a, b));
    }
  }
  return q;
}

inline void validate(const DomainSpec& spec) {
  if (!is_valid(spec.omega)) fail(ErrorCode::GeometryInvalid, "omega shape is not a valid simple curve");
  if (!is_valid(spec.dopant)) fail(ErrorCode::GeometryInvalid, "dopant shape is not a valid simple curve");
  if (!std::isfinite(spec.truncation_radius) || spec.truncation_radius <= 0.0)
    fail(ErrorCode::GeometryInvalid, "truncation radius must be positive");
  if (!std::isfinite(spec.pml_thickness) || spec.pml_thickness < 0.0)
    fail(ErrorCode::GeometryInvalid, "pml thickness must be non-negative");
  Shape omega = normalize(spec.omega), dopant = normalize(spec.dopant);
  if (!strictly_inside(dopant, omega)) fail(ErrorCode::GeometryInvalid, "dopant closure is not inside omega");
  if (!(max_radius(omega) < spec.truncation_radius))
    fail(ErrorCode::GeometryInvalid, "omega closure is not inside the truncation circle");
}

struct MeshOptions {
  int smoothing_sweeps = 3;
  double min_angle_deg = 15.0;
  double max_edge_factor = 1.5;
};

namespace detail {

struct Loop {
  std::vector<int> ids;  // counter-clockwise node indices
  BoundaryTag tag;
};

// Concentric rings of 6i nodes; each of the six sectors is triangulated
// identically, so the mesh is invariant under rotation by 60 degrees.
struct RingDisk {
  std::vector<Vec2> interior;                 // center then rings 1..n-1
  std::vector<Vec2> rim;                      // ring n
  std::vector<std::array<int, 3>> triangles;  // indices: interior first, then rim
};

inline RingDisk ring_disk(const Circle& c, int n) {
  RingDisk d;
  auto ring_node = [&](int i, int k) -> Vec2 {
    double r = c.radius * i / n;
    double t = 2.0 * kPi * k / (6 * i);
    return {c.center.x + r * std::cos(t), c.center.y + r * std::sin(t)};
  };
  std::vector<int> start(n + 1);
  d.interior.push_back(c.center);
  for (int i = 1; i < n; ++i) {
    start[i] = static_cast<int>(d.interior.size());
    for (int k = 0; k < 6 * i; ++k) d.interior.push_back(ring_node(i, k));
  }
  start[n] = static_cast<int>(d.interior.size());
  for (int k = 0; k < 6 * n; ++k) d.rim.push_back(ring_node(n, k));
  auto id = [&](int i, int k) {
    if (i == 0) return 0;
    return start[i] + (k % (6 * i));
  };
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < 6; ++s) {
      for (int t = 0; t <= i; ++t) {
        d.triangles.push_back({id(i + 1, s * (i + 1) + t), id(i + 1, s * (i + 1) + t + 1), id(i, s * i + t)});
      }
      for (int t = 0; t < i; ++t) {
        d.triangles.push_back({id(i, s * i + t), id(i + 1, s * (i + 1) + t + 1), id(i, s * i + t + 1)});
      }
    }
  }
  return d;
}

}  // namespace detail

// Conforming triangulation of the truncated domain. Curves are sampled at
// spacing about h; interior nodes come from a hexagonal lattice kept away from
// the curves, which makes every curve segment Gabriel and hence a Delaunay
// edge. A circular dopant gets a structured six-fold symmetric ring mesh.
inline Mesh build_mesh(const DomainSpec& spec, double h, const MeshOptions& opt = {}) {
  validate(spec);
  if (!std::isfinite(h) || h <= 0.0) fail(ErrorCode::GeometryInvalid, "target h must be positive");
  Shape omega = normalize(spec.omega), dopant = normalize(spec.dopant);
  const double rt = spec.truncation_radius, pml = spec.pml_thickness, rout = rt + pml;
  double gap = std::min(boundary_gap(dopant, omega), rt - max_radius(omega));
  if (!(h < 0.5 * gap)) fail(ErrorCode::GeometryInvalid, "target h must be below half the smallest curve gap");
  if (pml > 0.0 && !(h <= 0.5 * pml)) fail(ErrorCode::GeometryInvalid, "target h must resolve the absorbing layer");

  std::vector<Vec2> pts;
  std::vector<detail::Loop> loops;
  std::vector<std::pair<Shape, BoundaryTag>> curves;
  auto add_loop = [&](const std::vector<Vec2>& samples, BoundaryTag tag) {
    detail::Loop loop{{}, tag};
    for (auto p : samples) {
      loop.ids.push_back(static_cast<int>(pts.size()));
      pts.push_back(p);
    }
    loops.push_back(std::move(loop));
  };

  const auto* dcircle = std::get_if<Circle>(&dopant);
  detail::RingDisk disk;
  if (dcircle) {
    int n = std::max(1, static_cast<int>(std::ceil(dcircle->radius / h - 1e-9)));
    disk = detail::ring_disk(*dcircle, n);
    add_loop(disk.rim, BoundaryTag::GammaD);
  } else {
    add_loop(sample_boundary(dopant, h), BoundaryTag::GammaD);
  }
  curves.push_back({dopant, BoundaryTag::GammaD});
  add_loop(sample_boundary(omega, h), BoundaryTag::GammaOmega);
  curves.push_back({omega, BoundaryTag::GammaOmega});
  Circle trunc{{0.0, 0.0}, rt};
  add_loop(sample_boundary(trunc, h), BoundaryTag::GammaInf);
  curves.push_back({trunc, BoundaryTag::GammaInf});
  if (pml > 0.0) {
    Circle outer{{0.0, 0.0}, rout};
    add_loop(sample_boundary(outer, h), BoundaryTag::PmlOuter);
    curves.push_back({outer, BoundaryTag::PmlOuter});
  }
  const int curve_count = static_cast<int>(pts.size());

  const double dmin = 0.6 * h;
  const double dy = h * std::sqrt(3.0) / 2.0;
  const int jmax = static_cast<int>(std::ceil(rout / dy));
  const int imax = static_cast<int>(std::ceil(rout / h)) + 1;
  for (int j = -jmax; j <= jmax; ++j) {
    for (int i = -imax; i <= imax; ++i) {
      Vec2 p{(i + ((j & 1) ? 0.5 : 0.0)) * h, j * dy};
      if (norm(p) > rout - dmin) continue;
      if (dcircle && contains(dopant, p)) continue;
      bool keep = true;
      for (const auto& [shape, tag] : curves) {
        if (boundary_distance(shape, p) < dmin) {
          keep = false;
          break;
        }
      }
      if (keep) pts.push_back(p);
    }
  }

  auto clear_of_curves = [&](Vec2 p, double d) {
    if (dcircle && contains(dopant, p)) return false;
    if (norm(p) > rout - d) return false;
    for (const auto& [shape, tag] : curves)
      if (boundary_distance(shape, p) < d) return false;
    return true;
  };
  auto tris = delaunay_triangulate(pts, 1.05 * rout);
  // Split long edges away from the curves until the edge bound holds there.
  for (int round = 0; round < 8; ++round) {
    std::vector<Vec2> extra;
    for (const auto& v : tris) {
      int longest = 0;
      double len = 0.0;
      for (int i = 0; i < 3; ++i) {
        double l = distance(pts[v[i]], pts[v[(i + 1) % 3]]);
        if (l > len) {
          len = l;
          longest = i;
        }
      }
      if (len <= 1.4 * h) continue;
      Vec2 mid = 0.5 * (pts[v[longest]] + pts[v[(longest + 1) % 3]]);
      Vec2 cen = (1.0 / 3.0) * (pts[v[0]] + pts[v[1]] + pts[v[2]]);
      if (clear_of_curves(mid, 0.55 * h))
        extra.push_back(mid);
      else if (clear_of_curves(cen, 0.55 * h))
        extra.push_back(cen);
    }
    if (extra.empty()) break;
    std::sort(extra.begin(), extra.end(), [](Vec2 a, Vec2 b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    Vec2 last{1e300, 1e300};
    for (auto p : extra) {
      if (distance(p, last) < 0.25 * h) continue;
      pts.push_back(p);
      last = p;
    }
    tris = delaunay_triangulate(pts, 1.05 * rout);
  }

  std::vector<std::vector<Vec2>> polys;
  for (const auto& loop : loops) {
    std::vector<Vec2> poly;
    for (int id : loop.ids) poly.push_back(pts[id]);
    polys.push_back(std::move(poly));
  }
  const auto& dpoly = polys[0];
  const auto& opoly = polys[1];
  const auto& tpoly = polys[2];
  const auto& outer_poly = polys.back();

  Mesh mesh;
  mesh.target_h = h;
  mesh.truncation_radius = rt;
  mesh.pml_thickness = pml;
  mesh.nodes = pts;
  std::vector<bool> fixed(pts.size(), false);
  for (int i = 0; i < curve_count; ++i) fixed[i] = true;
  for (const auto& v : tris) {
    Vec2 c = (1.0 / 3.0) * (pts[v[0]] + pts[v[1]] + pts[v[2]]);
    if (!polygon_contains(outer_poly, c)) continue;
    Region r;
    if (polygon_contains(dpoly, c)) {
      if (dcircle) continue;
      r = Region::Dopant;
    } else if (polygon_contains(opoly, c)) {
      r = Region::Enz;
    } else if (polygon_contains(tpoly, c)) {
      r = Region::Exterior;
    } else {
      r = Region::Pml;
    }
    mesh.triangles.push_back(v);
    mesh.regions.push_back(r);
  }
  if (dcircle) {
    const int base = static_cast<int>(mesh.nodes.size());
    const int ninterior = static_cast<int>(disk.interior.size());
    for (auto p : disk.interior) {
      mesh.nodes.push_back(p);
      fixed.push_back(true);
    }
    const auto& rim_ids = loops[0].ids;
    for (const auto& t : disk.triangles) {
      std::array<int, 3> v;
      for (int i = 0; i < 3; ++i) v[i] = t[i] < ninterior ? base + t[i] : rim_ids[t[i] - ninterior];
      if (cross(mesh.nodes[v[1]] - mesh.nodes[v[0]], mesh.nodes[v[2]] - mesh.nodes[v[0]]) < 0.0) std::swap(v[1], v[2]);
      mesh.triangles.push_back(v);
      mesh.regions.push_back(Region::Dopant);
    }
  }

  // Drop unreferenced nodes.
  std::vector<int> remap(mesh.nodes.size(), -1);
  for (const auto& v : mesh.triangles)
    for (int k : v) remap[k] = 0;
  std::vector<Vec2> kept;
  std::vector<bool> kept_fixed;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (remap[i] < 0) continue;
    remap[i] = static_cast<int>(kept.size());
    kept.push_back(mesh.nodes[i]);
    kept_fixed.push_back(fixed[i]);
  }
  for (const auto& loop : loops)
    for (int id : loop.ids)
      if (remap[id] < 0) fail(ErrorCode::MeshFailure, "curve node missing from triangulation");
  mesh.nodes = std::move(kept);
  fixed = std::move(kept_fixed);
  for (auto& v : mesh.triangles)
    for (int& k : v) k = remap[k];
  for (const auto& loop : loops) {
    const int n = static_cast<int>(loop.ids.size());
    for (int i = 0; i < n; ++i) {
      BoundaryEdge e;
      e.nodes = {remap[loop.ids[i]], remap[loop.ids[(i + 1) % n]]};
      e.tag = loop.tag;
      mesh.edges.push_back(e);
    }
  }
  mesh.finalize();

  // Laplacian smoothing of lattice nodes; a move is kept only if it does not
  // lower the smallest angle of the surrounding triangles.
  if (opt.smoothing_sweeps > 0) {
    const int nn = static_cast<int>(mesh.nodes.size());
    std::vector<std::vector<int>> node_tris(nn), nbrs(nn);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
      const auto& v = mesh.triangles[t];
      for (int i = 0; i < 3; ++i) {
        node_tris[v[i]].push_back(t);
        nbrs[v[i]].push_back(v[(i + 1) % 3]);
        nbrs[v[i]].push_back(v[(i + 2) % 3]);
      }
    }
    for (auto& nb : nbrs) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    auto local_min_angle = [&](int node) {
      double best = 180.0;
      for (int t : node_tris[node]) {
        const auto& v = mesh.triangles[t];
        if (!(mesh.area(t) > 0.0)) return -1.0;
        for (int i = 0; i < 3; ++i) {
          Vec2 a = mesh.nodes[v[i]], b = mesh.nodes[v[(i + 1) % 3]], c = mesh.nodes[v[(i + 2) % 3]];
          best = std::min(best, std::atan2(std::abs(cross(b - a, c - a)), dot(b - a, c - a)));
        }
      }
      return best;
    };
    for (int sweep = 0; sweep < opt.smoothing_sweeps; ++sweep) {
      for (int i = 0; i < nn; ++i) {
        if (fixed[i] || nbrs[i].empty()) continue;
        Vec2 avg;
        for (int j : nbrs[i]) avg = avg + mesh.nodes[j];
        avg = (1.0 / nbrs[i].size()) * avg;
        Vec2 old = mesh.nodes[i];
        double before = local_min_angle(i);
        mesh.nodes[i] = avg;
        if (local_min_angle(i) < before) mesh.nodes[i] = old;
      }
    }
    mesh.finalize();
  }

  MeshQuality q = mesh_quality(mesh);
  if (q.min_angle_deg < opt.min_angle_deg)
    fail(ErrorCode::MeshFailure, "minimum angle " + std::to_string(q.min_angle_deg) + " below floor");
  if (q.max_edge > opt.max_edge_factor * h)
    fail(ErrorCode::MeshFailure, "edge length " + std::to_string(q.max_edge) + " exceeds bound");
  return mesh;
}

// Plain text mesh: header line, node coordinates, triangles with region tags
// and boundary edges with boundary tags. Indices are zero based.
inline void write_mesh(std::ostream& os, const Mesh& m) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "nodes " << m.nodes.size() << " triangles " << m.triangles.size() << " edges " << m.edges.size() << "\n";
  for (auto p : m.nodes) ss << p.x << " " << p.y << "\n";
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& v = m.triangles[t];
    ss << v[0] << " " << v[1] << " " << v[2] << " " << region_name(m.regions[t]) << "\n";
  }
  for (const auto& e : m.edges) ss << e.nodes[0] << " " << e.nodes[1] << " " << tag_name(e.tag) << "\n";
  os << ss.str();
}

inline Mesh read_mesh(std::istream& is) {
  auto bad = [](const std::string& what) { fail(ErrorCode::ParseError, "mesh file: " + what); };
  std::string w1, w2, w3;
  std::size_t nn = 0, nt = 0, ne = 0;
  Mesh m;
  if (!(is >> w1 >> nn >> w2 >> nt >> w3 >> ne)) bad("header");
  if (w1 != "nodes" || w2 != "triangles" || w3 != "edges") bad("header keywords");
  auto region_of = [&](const std::string& s) {
    for (int i = 0; i < kRegionCount; ++i)
      if (s == region_name(static_cast<Region>(i))) return static_cast<Region>(i);
    fail(ErrorCode::TagMismatch, "unknown region tag " + s);
  };
  auto tag_of = [&](const std::string& s) {
    for (int i = 0; i < kTagCount; ++i)
      if (s == tag_name(static_cast<BoundaryTag>(i))) return static_cast<BoundaryTag>(i);
    fail(ErrorCode::TagMismatch, "unknown boundary tag " + s);
  };
  m.nodes.resize(nn);
  for (auto& p : m.nodes)
    if (!(is >> p.x >> p.y)) bad("node");
  m.triangles.resize(nt);
  m.regions.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    std::string tag;
    auto& v = m.triangles[t];
    if (!(is >> v[0] >> v[1] >> v[2] >> tag)) bad("triangle");
    m.regions[t] = region_of(tag);
  }
  m.edges.resize(ne);
  for (auto& e : m.edges) {
    std::string tag;
    if (!(is >> e.nodes[0] >> e.nodes[1] >> tag)) bad("edge");
    e.tag = tag_of(tag);
  }
  // Radii of the truncation and outer circles are recovered from their nodes.
  double rt = 0.0, rout = 0.0;
  for (const auto& e : m.edges) {
    for (int k : e.nodes) {
      if (k < 0 || k >= static_cast<int>(nn)) bad("edge node index");
      if (e.tag == BoundaryTag::GammaInf) rt = std::max(rt, norm(m.nodes[k]));
      if (e.tag == BoundaryTag::PmlOuter) rout = std::max(rout, norm(m.nodes[k]));
    }
  }
  m.truncation_radius = rt;
  m.pml_thickness = rout > rt ? rout - rt : 0.0;
  m.finalize();
  m.target_h = mesh_quality(m).max_edge / 1.5;
  return m;
}

}  // namespace enz::geometry
