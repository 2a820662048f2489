#include "sda/propagation.hpp"

#include <cmath>

#include "sda/constants.hpp"
#include "sda/error.hpp"

namespace sda {

namespace {

constexpr int kKeplerMaxIterations = 50;
constexpr double kKeplerTolerance = 1e-12;
constexpr double kStaleSeconds = 30.0 * kSecondsPerDay;

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

}  // namespace

double solve_kepler(double mean_anomaly_rad, double e) {
  if (!(e >= 0.0 && e < 1.0)) {
    throw PreconditionError("eccentricity must be in [0, 1), got " + std::to_string(e));
  }
  // Solve on the reduced anomaly, then restore the whole revolutions.
  const double m = wrap_two_pi(mean_anomaly_rad);
  const double offset = mean_anomaly_rad - m;

  double ecc_anom = e < 0.8 ? m : kPi;
  double residual = ecc_anom - e * std::sin(ecc_anom) - m;
  for (int i = 0; i < kKeplerMaxIterations && std::abs(residual) > 1e-15; ++i) {
    const double step = residual / (1.0 - e * std::cos(ecc_anom));
    ecc_anom -= step;
    residual = ecc_anom - e * std::sin(ecc_anom) - m;
    if (std::abs(step) < 1e-16) break;
  }
  if (std::abs(residual) > kKeplerTolerance) {
    throw InvariantError("Kepler solver did not converge for M=" +
                         std::to_string(mean_anomaly_rad) + ", e=" + std::to_string(e));
  }
  return ecc_anom + offset;
}

UtcTime tle_epoch(const TleRecord& record) {
  const double offset_ms = (record.epoch_day - 1.0) * kSecondsPerDay * 1000.0;
  return UtcTime{year_start_ms(record.full_epoch_year()) + std::llround(offset_ms)};
}

double seconds_since_tle_epoch(const TleRecord& record, UtcTime t) {
  const double since_year =
      static_cast<double>(t.ms - year_start_ms(record.full_epoch_year())) / 1000.0;
  return since_year - (record.epoch_day - 1.0) * kSecondsPerDay;
}

bool is_stale(const TleRecord& record, UtcTime t) {
  return std::abs(seconds_since_tle_epoch(record, t)) > kStaleSeconds;
}

EciState mean_elements_to_state(const TleRecord& record, UtcTime t) {
  const double e = record.eccentricity;
  const double a = semi_major_axis_km(record.mean_motion_rev_per_day);
  const double n = record.mean_motion_rev_per_day * kTwoPi / kSecondsPerDay;
  const double dt = seconds_since_tle_epoch(record, t);

  const double mean_anom = record.mean_anomaly_deg * kDegToRad + n * dt;
  const double ecc_anom = solve_kepler(mean_anom, e);
  const double cos_e = std::cos(ecc_anom);
  const double sin_e = std::sin(ecc_anom);
  const double root = std::sqrt(1.0 - e * e);

  const double xp = a * (cos_e - e);
  const double yp = a * root * sin_e;
  const double rate = a * n / (1.0 - e * cos_e);
  const double vxp = -rate * sin_e;
  const double vyp = rate * root * cos_e;

  const double raan = record.raan_deg * kDegToRad;
  const double argp = record.arg_perigee_deg * kDegToRad;
  const double incl = record.inclination_deg * kDegToRad;
  const double co = std::cos(raan), so = std::sin(raan);
  const double cw = std::cos(argp), sw = std::sin(argp);
  const double ci = std::cos(incl), si = std::sin(incl);

  const Vec3 p{co * cw - so * sw * ci, so * cw + co * sw * ci, sw * si};
  const Vec3 q{-co * sw - so * cw * ci, -so * sw + co * cw * ci, cw * si};

  return EciState{p * xp + q * yp, p * vxp + q * vyp, t};
}

double gmst_from_j2000_seconds(double seconds) {
  const double days = seconds / kSecondsPerDay;
  const double centuries = days / 36525.0;
  // The 876600 h * T term is exactly 86400 s per day, so only the day
  // fraction matters modulo one rotation.
  const double day_fraction = days - std::floor(days);
  const double gmst_seconds = 67310.54841 + kSecondsPerDay * day_fraction +
                              8640184.812866 * centuries + 0.093104 * centuries * centuries -
                              6.2e-6 * centuries * centuries * centuries;
  return wrap_two_pi(gmst_seconds * kTwoPi / kSecondsPerDay);
}

double gmst(UtcTime t) {
  return gmst_from_j2000_seconds(static_cast<double>(t.ms - kJ2000.ms) / 1000.0);
}

GeodeticPoint eci_to_geodetic(const EciState& state) {
  const Vec3& r = state.position_km;
  const double radius = r.norm();
  if (!(radius > 0.0)) throw PreconditionError("cannot project a zero position vector");

  const double theta = gmst(state.epoch);
  const double c = std::cos(theta), s = std::sin(theta);
  const double x = c * r.x + s * r.y;
  const double y = -s * r.x + c * r.y;
  const double horizontal = std::hypot(x, y);

  GeodeticPoint g;
  g.latitude_deg = std::atan2(r.z, horizontal) * kRadToDeg;
  g.longitude_deg = horizontal == 0.0 ? 0.0 : std::atan2(y, x) * kRadToDeg;
  if (g.longitude_deg <= -180.0) g.longitude_deg += 360.0;
  g.altitude_km = radius - kEarthRadiusKm;
  return g;
}

Vec3 geodetic_to_eci(const GeodeticPoint& point, UtcTime t) {
  const double lat = point.latitude_deg * kDegToRad;
  const double lon = point.longitude_deg * kDegToRad + gmst(t);
  const double radius = kEarthRadiusKm + point.altitude_km;
  return Vec3{std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)} *
         radius;
}

std::vector<ActuatorState> propagate_catalog(const Catalog& catalog, UtcTime t,
                                             std::span<const int> norad_ids) {
  std::vector<ActuatorState> out;
  out.reserve(norad_ids.size());
  for (const int id : norad_ids) {
    const auto index = catalog.find(id);
    if (!index) throw PreconditionError("norad id " + std::to_string(id) + " not in catalog");
    const TleRecord& record = catalog.records()[*index];
    ActuatorState s;
    s.norad_id = id;
    s.name = record.name;
    s.regime = catalog.regime_of(*index);
    s.eci = mean_elements_to_state(record, t);
    s.geodetic = eci_to_geodetic(s.eci);
    s.timestamp = t;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace sda
