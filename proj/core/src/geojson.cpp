#include "sda/geojson.hpp"

#include <cmath>
#include <fstream>

#include "sda/constants.hpp"
#include "sda/error.hpp"

namespace sda {

namespace {

using nlohmann::json;

/// Points along the great circle from u to v, excluding v.
void densify(const Vec3& u, const Vec3& v, double max_step_rad, std::vector<Vec3>& out) {
  const double angle = angular_distance(u, v);
  const int steps = std::max(1, static_cast<int>(std::ceil(angle / max_step_rad)));
  const double s = std::sin(angle);
  for (int i = 0; i < steps; ++i) {
    const double f = static_cast<double>(i) / steps;
    if (s < 1e-15) {
      out.push_back(u);
      continue;
    }
    const double wa = std::sin((1.0 - f) * angle) / s;
    const double wb = std::sin(f * angle) / s;
    out.push_back((u * wa + v * wb).normalized());
  }
}

json lon_lat_path(const std::vector<Vec3>& path) {
  json coords = json::array();
  double previous_lon = 0.0;
  bool first = true;
  for (const Vec3& p : path) {
    double lon = std::atan2(p.y, p.x) * kRadToDeg;
    const double lat = std::atan2(p.z, std::hypot(p.x, p.y)) * kRadToDeg;
    if (!first) {
      while (lon - previous_lon > 180.0) lon -= 360.0;
      while (lon - previous_lon < -180.0) lon += 360.0;
    }
    first = false;
    previous_lon = lon;
    coords.push_back({lon, lat});
  }
  return coords;
}

/// Closed polygon ring. A ring that winds once around the polar axis encloses
/// a pole; it is routed along that pole's latitude so it closes without a
/// 360-degree jump.
json lon_lat_ring(const std::vector<Vec3>& path, int pole) {
  json coords = lon_lat_path(path);
  const json first = coords.front();
  const double start = first[0].get<double>();
  double closing = std::atan2(path.front().y, path.front().x) * kRadToDeg;
  const double last = coords.back()[0].get<double>();
  while (closing - last > 180.0) closing -= 360.0;
  while (closing - last < -180.0) closing += 360.0;
  if (pole != 0 && std::abs(closing - start) > 180.0) {
    const double lat = pole * 90.0;
    coords.push_back({closing, first[1].get<double>()});
    coords.push_back({closing, lat});
    coords.push_back({start, lat});
  }
  coords.push_back(first);
  return coords;
}

}  // namespace

json to_geojson(const SphericalTriangulation& tri, const SphericalVoronoi& voronoi,
                double max_step_deg) {
  const double step = max_step_deg * kDegToRad;
  json features = json::array();
  const int north = locate_cell(voronoi, {0, 0, 1});
  const int south = locate_cell(voronoi, {0, 0, -1});

  for (std::size_t s = 0; s < voronoi.cells.size(); ++s) {
    const auto& ring = voronoi.cells[s];
    std::vector<Vec3> path;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      densify(voronoi.vertices[ring[i]], voronoi.vertices[ring[(i + 1) % ring.size()]], step, path);
    }
    const int id = voronoi.seeds[s].actuator_id;
    const int pole = id == north ? 1 : (id == south ? -1 : 0);
    features.push_back({{"type", "Feature"},
                        {"properties", {{"kind", "voronoi_cell"}, {"actuator_id", id}}},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", {lon_lat_ring(path, pole)}}}}});
  }

  for (const auto& [a, b] : tri.edges) {
    std::vector<Vec3> path;
    densify(tri.points[a].vector, tri.points[b].vector, step, path);
    path.push_back(tri.points[b].vector);
    features.push_back({{"type", "Feature"},
                        {"properties", {{"kind", "delaunay_edge"},
                                        {"actuator_a", tri.points[a].actuator_id},
                                        {"actuator_b", tri.points[b].actuator_id}}},
                        {"geometry", {{"type", "LineString"}, {"coordinates", lon_lat_path(path)}}}});
  }
  return json{{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

void write_geojson(const std::filesystem::path& path, const SphericalTriangulation& tri,
                   const SphericalVoronoi& voronoi) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << to_geojson(tri, voronoi).dump() << '\n';
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace sda
