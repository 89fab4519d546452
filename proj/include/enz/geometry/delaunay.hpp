#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "enz/common.hpp"

namespace enz::geometry {

struct IntPoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
};

using Int128 = __int128;

// Exact orientation; positive when (a, b, c) is counter-clockwise.
inline Int128 orient2d(IntPoint a, IntPoint b, IntPoint c) {
  return Int128(b.x - a.x) * Int128(c.y - a.y) - Int128(b.y - a.y) * Int128(c.x - a.x);
}

// Exact incircle; positive when d is strictly inside the circumcircle of the
// counter-clockwise triangle (a, b, c). Coordinate differences must stay below 2^30.
inline Int128 incircle(IntPoint a, IntPoint b, IntPoint c, IntPoint d) {
  Int128 adx = a.x - d.x, ady = a.y - d.y;
  Int128 bdx = b.x - d.x, bdy = b.y - d.y;
  Int128 cdx = c.x - d.x, cdy = c.y - d.y;
  Int128 alift = adx * adx + ady * ady;
  Int128 blift = bdx * bdx + bdy * bdy;
  Int128 clift = cdx * cdx + cdy * cdy;
  return alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) +
         clift * (adx * bdy - ady * bdx);
}

namespace detail {

inline std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int order) {
  std::uint64_t d = 0;
  for (std::uint32_t s = 1u << (order - 1); s > 0; s >>= 1) {
    std::uint32_t rx = (x & s) > 0;
    std::uint32_t ry = (y & s) > 0;
    d += std::uint64_t(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

class BowyerWatson {
 public:
  explicit BowyerWatson(std::vector<IntPoint> pts) : pts_(std::move(pts)) {}

  void insert(int p) {
    int t = locate(p);
    collect_cavity(t, p);
    retriangulate(p);
  }

  void add_super(int a, int b, int c) {
    tris_.push_back({{a, b, c}, {-1, -1, -1}, true});
    last_ = 0;
  }

  std::vector<std::array<int, 3>> triangles(int limit) const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= limit || t.v[1] >= limit || t.v[2] >= limit) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n;  // neighbour across the edge opposite v[i]
    bool alive;
  };

  int locate(int p) {
    int t = last_;
    const IntPoint& q = pts_[p];
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const Tri& tri = tris_[t];
      int next = -1;
      ++rotor_;
      for (int k = 0; k < 3; ++k) {
        int i = (k + rotor_) % 3;
        if (orient2d(pts_[tri.v[(i + 1) % 3]], pts_[tri.v[(i + 2) % 3]], q) < 0) {
          next = tri.n[i];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    fail(ErrorCode::MeshFailure, "point location did not terminate");
  }

  void collect_cavity(int start, int p) {
    cavity_.clear();
    cavity_.push_back(start);
    mark(start);
    for (std::size_t k = 0; k < cavity_.size(); ++k) {
      const Tri& tri = tris_[cavity_[k]];
      for (int i = 0; i < 3; ++i) {
        int nb = tri.n[i];
        if (nb < 0 || marked(nb)) continue;
        const Tri& o = tris_[nb];
        if (incircle(pts_[o.v[0]], pts_[o.v[1]], pts_[o.v[2]], pts_[p]) > 0) {
          mark(nb);
          cavity_.push_back(nb);
        }
      }
    }
  }

  void retriangulate(int p) {
    struct Edge {
      int a, b, outer;
    };
    std::vector<Edge> boundary;
    for (int c : cavity_) {
      const Tri& tri = tris_[c];
      for (int i = 0; i < 3; ++i) {
        int nb = tri.n[i];
        if (nb >= 0 && marked(nb)) continue;
        boundary.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], nb});
      }
    }
    for (int c : cavity_) {
      tris_[c].alive = false;
      free_.push_back(c);
    }
    ++stamp_;
    by_a_.clear();
    by_b_.clear();
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const auto& e : boundary) {
      int id;
      if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
      } else {
        id = static_cast<int>(tris_.size());
        tris_.push_back({});
        stamps_.push_back(0);
      }
      tris_[id] = {{e.a, e.b, p}, {-1, -1, e.outer}, true};
      if (e.outer >= 0) {
        Tri& o = tris_[e.outer];
        for (int i = 0; i < 3; ++i) {
          int u = o.v[(i + 1) % 3], w = o.v[(i + 2) % 3];
          if (u == e.b && w == e.a) o.n[i] = id;
        }
      }
      by_a_[e.a] = id;
      by_b_[e.b] = id;
      created.push_back(id);
    }
    for (int id : created) {
      Tri& t = tris_[id];
      t.n[0] = by_a_.at(t.v[1]);  // edge (b, p) is shared with the triangle starting at b
      t.n[1] = by_b_.at(t.v[0]);  // edge (p, a) is shared with the triangle ending at a
    }
    last_ = created.back();
  }

  void mark(int t) {
    if (stamps_.size() < tris_.size()) stamps_.resize(tris_.size(), 0);
    stamps_[t] = stamp_;
  }
  bool marked(int t) const { return t < static_cast<int>(stamps_.size()) && stamps_[t] == stamp_; }

  std::vector<IntPoint> pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<int> cavity_;
  std::vector<std::uint64_t> stamps_;
  std::uint64_t stamp_ = 1;
  std::unordered_map<int, int> by_a_, by_b_;
  int last_ = 0;
  int rotor_ = 0;
};

}  // namespace detail

struct Quantizer {
  double scale = 1.0;
  IntPoint operator()(Vec2 p) const { return {std::llround(p.x * scale), std::llround(p.y * scale)}; }
};

// Quantizer mapping |x|, |y| <= extent onto integers bounded by 2^27.
inline Quantizer make_quantizer(double extent) { return {double(1 << 27) / extent}; }

// Delaunay triangulation of distinct points with |x|, |y| <= extent.
// Triangles are counter-clockwise and index into pts.
inline std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& pts, double extent) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) fail(ErrorCode::MeshFailure, "fewer than three points");
  Quantizer q = make_quantizer(extent);
  std::vector<IntPoint> ip(n + 3);
  for (int i = 0; i < n; ++i) {
    if (std::abs(pts[i].x) > extent || std::abs(pts[i].y) > extent)
      fail(ErrorCode::MeshFailure, "point outside triangulation extent");
    ip[i] = q(pts[i]);
  }
  const std::int64_t m = 1 << 27;
  ip[n] = {-3 * m, -3 * m};
  ip[n + 1] = {3 * m, -3 * m};
  ip[n + 2] = {0, 5 * m};

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> key(n);
  for (int i = 0; i < n; ++i) {
    auto gx = static_cast<std::uint32_t>((ip[i].x + m) >> 13);
    auto gy = static_cast<std::uint32_t>((ip[i].y + m) >> 13);
    key[i] = detail::hilbert_index(gx, gy, 16);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
  {
    std::vector<int> sorted(order);
    std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
      return ip[a].x != ip[b].x ? ip[a].x < ip[b].x : ip[a].y < ip[b].y;
    });
    for (int k = 1; k < n; ++k)
      if (ip[sorted[k]].x == ip[sorted[k - 1]].x && ip[sorted[k]].y == ip[sorted[k - 1]].y)
        fail(ErrorCode::MeshFailure, "duplicate points after quantization");
  }

  detail::BowyerWatson bw(ip);
  bw.add_super(n, n + 1, n + 2);
  for (int p : order) bw.insert(p);
  return bw.triangles(n);
}

}  // namespace enz::geometry
