#include "sda/tessellation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "predicates.hpp"
#include "sda/constants.hpp"
#include "sda/error.hpp"

namespace sda {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Incremental convex hull with a bipartite conflict graph. Faces are
/// counter-clockwise seen from outside; nbr[i] is the face across the edge
/// v[i] -> v[i+1]. A point exactly on a face's plane is treated as beneath
/// it, which amounts to pushing every newly inserted point infinitesimally
/// towards the origin.
class IncrementalHull {
 public:
  explicit IncrementalHull(std::span<const Vec3> points)
      : pts_(points),
        inserted_(points.size(), false),
        point_conflicts_(points.size()),
        candidate_stamp_(points.size(), -1),
        cone_start_(points.size(), -1),
        cone_end_(points.size(), -1) {}

  /// False when every point is coplanar with the first three.
  bool build(std::span<const int> order) {
    if (!seed_simplex(order)) return false;
    for (const int p : order) {
      if (!inserted_[p]) insert(p);
    }
    return true;
  }

  std::vector<std::array<int, 3>> faces() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& f : faces_) {
      if (f.alive) out.push_back(f.v);
    }
    return out;
  }

 private:
  struct Face {
    std::array<int, 3> v{};
    std::array<int, 3> nbr{-1, -1, -1};
    std::vector<int> conflicts;
    bool alive = true;
  };

  int side(const Face& f, int p) const {
    return detail::orientation(pts_[f.v[0]], pts_[f.v[1]], pts_[f.v[2]], pts_[p]);
  }

  bool seed_simplex(std::span<const int> order) {
    if (order.size() < 4) return false;
    const int a = order[0];
    const int b = order[1];
    int c = -1;
    int d = -1;
    for (std::size_t k = 2; k < order.size() && c < 0; ++k) {
      if (cross(pts_[b] - pts_[a], pts_[order[k]] - pts_[a]).norm() > 0.0) c = order[k];
    }
    if (c < 0) return false;
    for (std::size_t k = 2; k < order.size() && d < 0; ++k) {
      const int q = order[k];
      if (q != c && detail::orientation(pts_[a], pts_[b], pts_[c], pts_[q]) != 0) d = q;
    }
    if (d < 0) return false;

    const std::array<std::array<int, 4>, 4> tets{{{a, b, c, d}, {a, d, b, c}, {b, d, c, a},
                                                  {c, d, a, b}}};
    for (const auto& t : tets) {
      Face f;
      f.v = {t[0], t[1], t[2]};
      if (side(f, t[3]) > 0) std::swap(f.v[1], f.v[2]);
      faces_.push_back(std::move(f));
    }
    link_all();
    for (const int p : {a, b, c, d}) inserted_[p] = true;

    for (const int q : order) {
      if (inserted_[q]) continue;
      for (int fi = 0; fi < 4; ++fi) {
        if (side(faces_[fi], q) > 0) add_conflict(fi, q);
      }
    }
    return true;
  }

  void link_all() {
    std::map<std::pair<int, int>, std::pair<int, int>> directed;
    for (int fi = 0; fi < static_cast<int>(faces_.size()); ++fi) {
      for (int i = 0; i < 3; ++i) {
        directed[{faces_[fi].v[i], faces_[fi].v[(i + 1) % 3]}] = {fi, i};
      }
    }
    for (auto& [edge, slot] : directed) {
      const auto twin = directed.find({edge.second, edge.first});
      if (twin == directed.end()) throw InvariantError("hull seed is not closed");
      faces_[slot.first].nbr[slot.second] = twin->second.first;
    }
  }

  void add_conflict(int face, int point) {
    faces_[face].conflicts.push_back(point);
    point_conflicts_[point].push_back(face);
  }

  void insert(int p) {
    std::vector<int> visible;
    for (const int f : point_conflicts_[p]) {
      if (faces_[f].alive) visible.push_back(f);
    }
    point_conflicts_[p].clear();
    point_conflicts_[p].shrink_to_fit();
    inserted_[p] = true;
    // Beneath every face: the point sits inside the hull up to rounding and
    // is dropped; the caller folds it into its nearest vertex.
    if (visible.empty()) return;

    for (const int f : visible) faces_[f].alive = false;

    struct HorizonEdge {
      int a, b, inside, outside;
    };
    std::vector<HorizonEdge> horizon;
    for (const int f : visible) {
      for (int i = 0; i < 3; ++i) {
        const int g = faces_[f].nbr[i];
        if (faces_[g].alive) {
          horizon.push_back({faces_[f].v[i], faces_[f].v[(i + 1) % 3], f, g});
        }
      }
    }

    std::vector<int> created;
    created.reserve(horizon.size());
    for (const auto& e : horizon) {
      const int h = static_cast<int>(faces_.size());
      Face nf;
      nf.v = {e.a, e.b, p};
      nf.nbr[0] = e.outside;
      faces_.push_back(std::move(nf));
      auto& back = faces_[e.outside].nbr;
      *std::find(back.begin(), back.end(), e.inside) = h;
      if (cone_start_[e.a] >= 0 || cone_end_[e.b] >= 0) {
        throw InvariantError("horizon is not a simple cycle");
      }
      cone_start_[e.a] = h;
      cone_end_[e.b] = h;
      created.push_back(h);
    }
    for (const int h : created) {
      Face& f = faces_[h];
      f.nbr[1] = cone_start_[f.v[1]];
      f.nbr[2] = cone_end_[f.v[0]];
      if (f.nbr[1] < 0 || f.nbr[2] < 0) throw InvariantError("horizon is not closed");
    }
    for (const int h : created) {
      cone_start_[faces_[h].v[0]] = -1;
      cone_end_[faces_[h].v[1]] = -1;
    }

    for (std::size_t k = 0; k < horizon.size(); ++k) {
      const int h = created[k];
      for (const int source : {horizon[k].inside, horizon[k].outside}) {
        for (const int q : faces_[source].conflicts) {
          if (inserted_[q] || candidate_stamp_[q] == h) continue;
          candidate_stamp_[q] = h;
          if (side(faces_[h], q) > 0) add_conflict(h, q);
        }
      }
    }
    for (const int f : visible) {
      faces_[f].conflicts.clear();
      faces_[f].conflicts.shrink_to_fit();
    }
  }

  std::span<const Vec3> pts_;
  std::vector<Face> faces_;
  std::vector<bool> inserted_;
  std::vector<std::vector<int>> point_conflicts_;
  std::vector<int> candidate_stamp_;
  std::vector<int> cone_start_;
  std::vector<int> cone_end_;
};

std::vector<int> insertion_order(std::size_t n, std::uint64_t seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

bool near_great_circle(std::span<const Vec3> points, double tolerance_rad) {
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const Vec3& p : points) {
    const Eigen::Vector3d v(p.x, p.y, p.z);
    scatter += v * v.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(scatter);
  const Eigen::Vector3d n = solver.eigenvectors().col(0);
  const Vec3 normal{n.x(), n.y(), n.z()};
  const double limit = std::sin(tolerance_rad);
  return std::all_of(points.begin(), points.end(),
                     [&](const Vec3& p) { return std::abs(dot(p, normal)) <= limit; });
}

std::array<int, 3> canonical(std::array<int, 3> t) {
  const auto min_it = std::min_element(t.begin(), t.end());
  std::rotate(t.begin(), min_it, t.end());
  return t;
}

}  // namespace

UnitSpherePoint project_to_unit_sphere(const GeodeticPoint& point, int actuator_id) {
  const double lat = point.latitude_deg * kDegToRad;
  const double lon = point.longitude_deg * kDegToRad;
  const double c = std::cos(lat);
  return UnitSpherePoint{Vec3{c * std::cos(lon), c * std::sin(lon), std::sin(lat)}, actuator_id};
}

SphericalTriangulation delaunay_on_sphere(std::span<const UnitSpherePoint> points,
                                          const TessellationOptions& options) {
  const std::size_t n = points.size();

  // Merge coincident seeds. The sweep on x only needs a window a little wider
  // than the chord of the merge tolerance.
  UnionFind clusters(n);
  {
    std::vector<std::size_t> by_x(n);
    std::iota(by_x.begin(), by_x.end(), 0);
    std::sort(by_x.begin(), by_x.end(), [&](std::size_t i, std::size_t j) {
      return points[i].vector.x < points[j].vector.x;
    });
    const double window = 2.0 * options.merge_tolerance_rad;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto& pi = points[by_x[i]].vector;
        const auto& pj = points[by_x[j]].vector;
        if (pj.x - pi.x > window) break;
        if (angular_distance(pi, pj) < options.merge_tolerance_rad) clusters.unite(by_x[i], by_x[j]);
      }
    }
  }
  std::vector<std::size_t> rep_of(n);
  for (std::size_t i = 0; i < n; ++i) rep_of[i] = clusters.find(i);
  // Representative: the member with the lowest actuator id.
  std::vector<std::size_t> best(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t& b = best[rep_of[i]];
    if (b == n || points[i].actuator_id < points[b].actuator_id) b = i;
  }
  std::vector<std::size_t> distinct;  // input indices of representatives, input order
  for (std::size_t i = 0; i < n; ++i) {
    if (best[rep_of[i]] == i) distinct.push_back(i);
  }
  std::vector<Alias> aliases;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = best[rep_of[i]];
    if (r != i) aliases.push_back({points[r].actuator_id, points[i].actuator_id});
  }

  if (distinct.size() < 4) {
    throw PreconditionError("too few points: need at least 4 distinct seeds, got " +
                            std::to_string(distinct.size()));
  }
  std::vector<Vec3> coords;
  coords.reserve(distinct.size());
  for (const std::size_t i : distinct) coords.push_back(points[i].vector);
  if (near_great_circle(coords, options.degeneracy_tolerance_rad)) {
    throw PreconditionError("degenerate input: all seeds lie on one great circle");
  }

  IncrementalHull hull(coords);
  if (!hull.build(insertion_order(coords.size(), options.seed))) {
    throw PreconditionError("degenerate input: all seeds are coplanar");
  }
  const auto faces = hull.faces();

  // Seeds that ended up strictly inside the hull (possible only through
  // rounding of near-coincident points) become aliases of their nearest vertex.
  std::vector<char> on_hull(coords.size(), 0);
  for (const auto& f : faces) {
    for (const int v : f) on_hull[v] = 1;
  }
  std::vector<int> new_index(coords.size(), -1);
  SphericalTriangulation out;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (!on_hull[k]) continue;
    new_index[k] = static_cast<int>(out.points.size());
    out.points.push_back(points[distinct[k]]);
  }
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (on_hull[k]) continue;
    int nearest = -1;
    double best_angle = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < out.points.size(); ++j) {
      const double angle = angular_distance(coords[k], out.points[j].vector);
      if (angle < best_angle) {
        best_angle = angle;
        nearest = static_cast<int>(j);
      }
    }
    const int old_id = points[distinct[k]].actuator_id;
    const int new_rep = out.points[nearest].actuator_id;
    for (auto& a : aliases) {
      if (a.representative_id == old_id) a.representative_id = new_rep;
    }
    aliases.push_back({new_rep, old_id});
  }
  std::sort(aliases.begin(), aliases.end(), [](const Alias& x, const Alias& y) {
    return std::pair(x.representative_id, x.alias_id) < std::pair(y.representative_id, y.alias_id);
  });
  out.aliases = std::move(aliases);

  out.triangles.reserve(faces.size());
  for (const auto& f : faces) {
    out.triangles.push_back(canonical({new_index[f[0]], new_index[f[1]], new_index[f[2]]}));
  }
  std::sort(out.triangles.begin(), out.triangles.end());

  for (const auto& t : out.triangles) {
    for (int i = 0; i < 3; ++i) {
      const int a = t[i];
      const int b = t[(i + 1) % 3];
      out.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());

  const std::size_t v = out.points.size();
  if (out.triangles.size() != 2 * v - 4 || out.edges.size() != 3 * v - 6) {
    throw InvariantError("triangulation violates Euler counts: V=" + std::to_string(v) +
                         " E=" + std::to_string(out.edges.size()) +
                         " F=" + std::to_string(out.triangles.size()));
  }
  return out;
}

Vec3 spherical_circumcenter(const Vec3& a, const Vec3& b, const Vec3& c) {
  return cross(b - a, c - a).normalized();
}

SphericalVoronoi voronoi_dual(const SphericalTriangulation& tri) {
  SphericalVoronoi out;
  out.seeds = tri.points;
  const std::size_t n = tri.points.size();

  out.vertices.reserve(tri.triangles.size());
  for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
    const auto& [a, b, c] = tri.triangles[t];
    const Vec3 normal =
        cross(tri.points[b].vector - tri.points[a].vector, tri.points[c].vector - tri.points[a].vector);
    const double len = normal.norm();
    if (!(len > std::numeric_limits<double>::min()) || !std::isfinite(len)) {
      throw PreconditionError("degenerate triangle " + std::to_string(t) +
                              ": vertices are collinear");
    }
    out.vertices.push_back(normal / len);
  }

  // For each seed, the incident triangles keyed by the vertex that follows
  // the seed; the next triangle counter-clockwise starts at the vertex that
  // precedes it.
  std::vector<std::map<int, int>> after(n);
  for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
    const auto& tr = tri.triangles[t];
    for (int i = 0; i < 3; ++i) after[tr[i]][tr[(i + 1) % 3]] = static_cast<int>(t);
  }
  out.cells.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (after[s].empty()) throw InvariantError("seed without incident triangles");
    int start = std::numeric_limits<int>::max();
    for (const auto& [_, t] : after[s]) start = std::min(start, t);
    int t = start;
    auto& ring = out.cells[s];
    do {
      ring.push_back(t);
      const auto& tr = tri.triangles[t];
      const int k = tr[0] == static_cast<int>(s) ? 0 : (tr[1] == static_cast<int>(s) ? 1 : 2);
      const int prev = tr[(k + 2) % 3];
      const auto it = after[s].find(prev);
      if (it == after[s].end()) throw InvariantError("open fan around seed " + std::to_string(s));
      t = it->second;
      if (ring.size() > after[s].size()) throw InvariantError("fan walk does not close");
    } while (t != start);
  }

  // Two cells are adjacent when their rings share an arc (consecutive vertices).
  std::map<std::pair<int, int>, std::vector<int>> arcs;
  for (std::size_t s = 0; s < n; ++s) {
    const auto& ring = out.cells[s];
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const int u = ring[i];
      const int w = ring[(i + 1) % ring.size()];
      arcs[{std::min(u, w), std::max(u, w)}].push_back(static_cast<int>(s));
    }
  }
  for (const auto& [_, cells] : arcs) {
    if (cells.size() != 2) throw InvariantError("Voronoi arc not shared by exactly two cells");
    out.adjacency.emplace_back(std::min(cells[0], cells[1]), std::max(cells[0], cells[1]));
  }
  std::sort(out.adjacency.begin(), out.adjacency.end());
  out.adjacency.erase(std::unique(out.adjacency.begin(), out.adjacency.end()), out.adjacency.end());
  return out;
}

int locate_cell(const SphericalVoronoi& voronoi, const Vec3& query) {
  if (voronoi.seeds.empty()) throw PreconditionError("empty Voronoi diagram");
  int best_id = voronoi.seeds.front().actuator_id;
  double best_angle = std::numeric_limits<double>::infinity();
  for (const auto& seed : voronoi.seeds) {
    const double angle = angular_distance(query, seed.vector);
    if (angle < best_angle || (angle == best_angle && seed.actuator_id < best_id)) {
      best_angle = angle;
      best_id = seed.actuator_id;
    }
  }
  return best_id;
}

}  // namespace sda
