#pragma once
// Brute-force reference implementations used to check the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "sda/graph.hpp"
#include "sda/tessellation.hpp"
#include "sda/vec3.hpp"

namespace oracle {

using sda::Vec3;
using sda::cross;
using sda::dot;

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    const double n = v.norm();
    if (n > 1e-6) return v / n;
  }
}

inline Vec3 from_lat_lon(double lat_deg, double lon_deg) {
  const double la = lat_deg * M_PI / 180.0, lo = lon_deg * M_PI / 180.0;
  return {std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)};
}

/// Angle between unit vectors by the law of cosines on the chord; no atan2.
inline double angle(const Vec3& a, const Vec3& b) {
  const double chord = (a - b).norm();
  return 2.0 * std::asin(std::min(1.0, chord / 2.0));
}

enum class Shape { Uniform, Hemisphere, Band, Clustered, NearDuplicates };

/// Point set generator covering the geometric regimes the tessellation must
/// survive. Deterministic in `seed`.
inline std::vector<sda::UnitSpherePoint> point_set(std::uint64_t seed, int n, Shape shape) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<sda::UnitSpherePoint> pts;
  const Vec3 centre = random_unit(rng);
  for (int i = 0; i < n; ++i) {
    Vec3 v;
    switch (shape) {
      case Shape::Uniform:
        v = random_unit(rng);
        break;
      case Shape::Hemisphere:
        v = random_unit(rng);
        if (dot(v, centre) < 0) v = v - centre * (2.0 * dot(v, centre));
        break;
      case Shape::Band:
        v = from_lat_lon(u(rng) * 6.0 - 3.0, u(rng) * 360.0);
        break;
      case Shape::Clustered: {
        const Vec3 w = random_unit(rng);
        v = (centre + w * 0.15).normalized();
        break;
      }
      case Shape::NearDuplicates:
        if (i > 0 && i % 3 == 0) {
          const Vec3 w = random_unit(rng);
          v = (pts[i - 1].vector + w * 1e-7).normalized();
        } else {
          v = random_unit(rng);
        }
        break;
    }
    pts.push_back({v, 1000 + i});
  }
  return pts;
}

/// Shape used for the i-th set of a property sweep.
inline Shape shape_for(int i) {
  static constexpr std::array<Shape, 8> cycle{Shape::Uniform,   Shape::Uniform,
                                              Shape::Hemisphere, Shape::Band,
                                              Shape::Uniform,   Shape::Clustered,
                                              Shape::NearDuplicates, Shape::Uniform};
  return cycle[static_cast<std::size_t>(i) % cycle.size()];
}

/// Extended-precision vector for the cap tests, so slivers whose sides are
/// far below a degree keep their circumcenters accurate.
struct LVec {
  long double x, y, z;
  explicit LVec(const Vec3& v) : x(v.x), y(v.y), z(v.z) {}
  LVec(long double a, long double b, long double c) : x(a), y(b), z(c) {}
  LVec operator-(const LVec& o) const { return {x - o.x, y - o.y, z - o.z}; }
  LVec operator+(const LVec& o) const { return {x + o.x, y + o.y, z + o.z}; }
  LVec operator/(long double s) const { return {x / s, y / s, z / s}; }
  long double dot(const LVec& o) const { return x * o.x + y * o.y + z * o.z; }
  LVec cross(const LVec& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  long double norm() const { return std::sqrt(dot(*this)); }
};

inline long double langle(const LVec& a, const LVec& b) {
  return 2.0L * std::asin(std::min(1.0L, (a - b).norm() / 2.0L));
}

/// Circumcenter through the plane equation x . p = 1 solved by Cramer's rule,
/// flipped to the side the triangle's winding faces.
inline LVec circumcenter(const LVec& a, const LVec& b, const LVec& c) {
  const long double det = a.dot(b.cross(c));
  const LVec winding = (b - a).cross(c - a);
  LVec x = std::abs(det) > 1e-300L ? (b.cross(c) + c.cross(a) + a.cross(b)) / det : winding;
  x = x / x.norm();
  if (x.dot(winding) < 0) x = LVec{-x.x, -x.y, -x.z};
  return x;
}

inline Vec3 circumcenter(const Vec3& a, const Vec3& b, const Vec3& c) {
  const LVec x = circumcenter(LVec(a), LVec(b), LVec(c));
  return {static_cast<double>(x.x), static_cast<double>(x.y), static_cast<double>(x.z)};
}

/// True when no seed lies strictly inside the triangle's circumcap, up to
/// `tol` radians.
inline bool empty_circumcap(const sda::SphericalTriangulation& tri, const std::array<int, 3>& t,
                            double tol) {
  const LVec a(tri.points[t[0]].vector);
  const LVec centre = circumcenter(a, LVec(tri.points[t[1]].vector), LVec(tri.points[t[2]].vector));
  const long double r = langle(centre, a);
  for (std::size_t i = 0; i < tri.points.size(); ++i) {
    if (static_cast<int>(i) == t[0] || static_cast<int>(i) == t[1] || static_cast<int>(i) == t[2]) {
      continue;
    }
    if (langle(centre, LVec(tri.points[i].vector)) < r - tol) return false;
  }
  return true;
}

/// Every pair of seeds at the minimum angular distance.
inline std::vector<std::pair<int, int>> closest_pairs(const std::vector<sda::UnitSpherePoint>& pts) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = angle(pts[i].vector, pts[j].vector);
      if (d < best) {
        best = d;
        out.clear();
      }
      if (d == best) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return out;
}

/// Nearest seed by brute force; ties to the lower actuator id.
inline int nearest_seed(const std::vector<sda::UnitSpherePoint>& seeds, const Vec3& q) {
  int best_id = -1;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : seeds) {
    const double d = angle(s.vector, q);
    if (d < best || (d == best && s.actuator_id < best_id)) {
      best = d;
      best_id = s.actuator_id;
    }
  }
  return best_id;
}

constexpr int kInf = std::numeric_limits<int>::max() / 4;

inline std::vector<std::vector<int>> floyd_warshall(const sda::ActuatorGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : g.edges()) d[e.a][e.b] = d[e.b][e.a] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

/// Coreness straight from the definition: for each k, strip nodes of degree
/// below k until none remain; survivors have coreness >= k.
inline std::vector<int> coreness(const sda::ActuatorGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<int> core(n, 0);
  for (int k = 1;; ++k) {
    std::vector<bool> alive(n, true);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t v = 0; v < n; ++v) {
        if (!alive[v]) continue;
        int d = 0;
        for (int w : g.neighbors(v)) d += alive[w] ? 1 : 0;
        if (d < k) {
          alive[v] = false;
          changed = true;
        }
      }
    }
    bool any = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (alive[v]) {
        core[v] = k;
        any = true;
      }
    }
    if (!any) return core;
  }
}

/// Prim's algorithm on the complete graph of chord lengths.
inline double complete_mst_chord(const std::vector<sda::UnitSpherePoint>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<bool> in(n, false);
  best[0] = 0.0;
  double total = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!in[v] && (u == n || best[v] < best[u])) u = v;
    in[u] = true;
    total += best[u];
    for (std::size_t v = 0; v < n; ++v)
      if (!in[v]) best[v] = std::min(best[v], (pts[u].vector - pts[v].vector).norm());
  }
  return total;
}

/// Random connected graph: a random spanning tree plus extra edges.
inline sda::ActuatorGraph random_connected_graph(std::mt19937_64& rng, int n, double extra_density) {
  std::set<std::pair<int, int>> pairs;
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    const int p = parent(rng);
    pairs.insert({p, v});
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (u(rng) < extra_density) pairs.insert({a, b});
  const std::vector<std::pair<int, int>> list(pairs.begin(), pairs.end());
  return sda::ActuatorGraph::from_pairs(n, list);
}

}  // namespace oracle
