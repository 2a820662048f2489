#pragma once

#include <numbers>

namespace sda {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

/// Earth gravitational parameter, km^3/s^2.
inline constexpr double kMuEarth = 398600.4418;
/// Equatorial radius, km. Also used as the spherical-Earth radius.
inline constexpr double kEarthRadiusKm = 6378.137;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kSiderealDaySeconds = 86164.0905;

}  // namespace sda
