#pragma once

#include <span>
#include <string>
#include <vector>

#include "sda/time.hpp"
#include "sda/tle.hpp"
#include "sda/vec3.hpp"

namespace sda {

/// Earth-centered inertial state (TEME approximated as inertial).
struct EciState {
  Vec3 position_km;
  Vec3 velocity_km_s;
  UtcTime epoch;
};

/// Sub-satellite point on a spherical Earth.
struct GeodeticPoint {
  double latitude_deg = 0.0;   // [-90, 90]
  double longitude_deg = 0.0;  // (-180, 180]
  double altitude_km = 0.0;
};

struct ActuatorState {
  int norad_id = 0;
  std::string name;
  OrbitRegime regime = OrbitRegime::LEO;
  EciState eci;
  GeodeticPoint geodetic;
  UtcTime timestamp;
};

/// Newton iteration on E - e sin E = M. The residual is at most 1e-12 rad.
/// Throws PreconditionError unless 0 <= e < 1.
double solve_kepler(double mean_anomaly_rad, double eccentricity);

/// The element set's epoch, rounded to the millisecond.
UtcTime tle_epoch(const TleRecord& record);

/// Seconds from the element set's epoch to `t`, without epoch rounding.
double seconds_since_tle_epoch(const TleRecord& record, UtcTime t);

/// True when `t` is more than 30 days from the epoch, where mean elements
/// are no longer trustworthy.
bool is_stale(const TleRecord& record, UtcTime t);

/// Two-body propagation of the mean elements to `t`.
EciState mean_elements_to_state(const TleRecord& record, UtcTime t);

/// Greenwich mean sidereal time in [0, 2pi), UT1 taken as UTC.
double gmst(UtcTime t);
double gmst_from_j2000_seconds(double seconds);

/// Rotates into the Earth-fixed frame and decomposes on a sphere of radius
/// kEarthRadiusKm. Longitude is 0 at the poles. Throws PreconditionError for
/// a zero position.
GeodeticPoint eci_to_geodetic(const EciState& state);

/// Inverse of eci_to_geodetic: inertial position of a geodetic point at `t`.
Vec3 geodetic_to_eci(const GeodeticPoint& point, UtcTime t);

/// One state per requested norad id, in request order. Throws
/// PreconditionError for an id the catalog does not contain.
std::vector<ActuatorState> propagate_catalog(const Catalog& catalog, UtcTime t,
                                             std::span<const int> norad_ids);

}  // namespace sda
