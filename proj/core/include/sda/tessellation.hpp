#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sda/propagation.hpp"
#include "sda/vec3.hpp"

namespace sda {

/// A seed on the unit sphere, tagged with the actuator it stands for.
struct UnitSpherePoint {
  Vec3 vector;
  int actuator_id = 0;
};

/// Zenith projection: drops the altitude, keeps the direction.
UnitSpherePoint project_to_unit_sphere(const GeodeticPoint& point, int actuator_id);

/// An actuator folded into another one whose zenith point coincides with it.
struct Alias {
  int representative_id = 0;
  int alias_id = 0;
  bool operator==(const Alias&) const = default;
};

struct SphericalTriangulation {
  std::vector<UnitSpherePoint> points;    // distinct seeds, input order
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise seen from outside
  std::vector<std::pair<int, int>> edges;     // (i, j) with i < j, sorted
  std::vector<Alias> aliases;             // sorted by (representative, alias)
};

struct TessellationOptions {
  /// Seeds closer than this (radians) are merged.
  double merge_tolerance_rad = 1e-9;
  /// Inputs within this angular distance of one great circle are rejected.
  double degeneracy_tolerance_rad = 1e-9;
  /// Drives the insertion permutation; the output does not depend on it
  /// except in cocircular configurations.
  std::uint64_t seed = 0x9E3779B97F4A7C15ULL;
};

/// Delaunay triangulation on the sphere, read off the convex hull of the
/// seeds. Throws PreconditionError for fewer than four distinct seeds or a
/// (near) great-circle configuration.
SphericalTriangulation delaunay_on_sphere(std::span<const UnitSpherePoint> points,
                                          const TessellationOptions& options = {});

struct SphericalVoronoi {
  std::vector<UnitSpherePoint> seeds;  // same order as the triangulation points
  std::vector<Vec3> vertices;          // one per triangle: its circumcenter
  std::vector<std::vector<int>> cells; // per seed, ring of vertex indices (CCW from outside)
  std::vector<std::pair<int, int>> adjacency;  // seed index pairs sharing an arc, sorted
};

/// Circumcenter of a counter-clockwise triangle on the unit sphere: the pole
/// of its plane on the side the triangle faces.
Vec3 spherical_circumcenter(const Vec3& a, const Vec3& b, const Vec3& c);

SphericalVoronoi voronoi_dual(const SphericalTriangulation& triangulation);

/// Actuator id of the seed nearest to `query` in angle; ties go to the lower id.
int locate_cell(const SphericalVoronoi& voronoi, const Vec3& query);

}  // namespace sda
