#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "sda/tessellation.hpp"

namespace sda {

/// FeatureCollection with one Polygon per Voronoi cell and one LineString per
/// Delaunay edge, coordinates as [lon, lat] degrees. Great-circle arcs are
/// densified to steps of at most `max_step_deg`. Longitudes along a feature
/// are unwrapped so consecutive vertices never jump by more than 180 degrees;
/// the cells holding a pole are closed along that pole's latitude.
nlohmann::json to_geojson(const SphericalTriangulation& triangulation,
                          const SphericalVoronoi& voronoi, double max_step_deg = 2.0);

void write_geojson(const std::filesystem::path& path, const SphericalTriangulation& triangulation,
                   const SphericalVoronoi& voronoi);

}  // namespace sda
