#include "predicates.hpp"

#include <gmpxx.h>

#include <cmath>
#include <limits>

namespace sda::detail {

namespace {

// Static error bound for the orient3d determinant (Shewchuk, "Adaptive
// Precision Floating-Point Arithmetic and Fast Robust Geometric Predicates").
constexpr double kEpsilon = std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kErrBound = (7.0 + 56.0 * kEpsilon) * kEpsilon;

int sign_of(const mpq_class& v) { return sgn(v); }

int exact_orientation(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& p) {
  const mpq_class ax(a.x), ay(a.y), az(a.z);
  const mpq_class ux = mpq_class(b.x) - ax, uy = mpq_class(b.y) - ay, uz = mpq_class(b.z) - az;
  const mpq_class vx = mpq_class(c.x) - ax, vy = mpq_class(c.y) - ay, vz = mpq_class(c.z) - az;
  const mpq_class wx = mpq_class(p.x) - ax, wy = mpq_class(p.y) - ay, wz = mpq_class(p.z) - az;
  const mpq_class det = wx * (uy * vz - uz * vy) + wy * (uz * vx - ux * vz) +
                        wz * (ux * vy - uy * vx);
  return sign_of(det);
}

}  // namespace

int orientation(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& p) {
  const double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
  const double vx = c.x - a.x, vy = c.y - a.y, vz = c.z - a.z;
  const double wx = p.x - a.x, wy = p.y - a.y, wz = p.z - a.z;

  const double m1 = uy * vz, m2 = uz * vy;
  const double m3 = uz * vx, m4 = ux * vz;
  const double m5 = ux * vy, m6 = uy * vx;
  const double det = wx * (m1 - m2) + wy * (m3 - m4) + wz * (m5 - m6);
  const double permanent = (std::abs(m1) + std::abs(m2)) * std::abs(wx) +
                           (std::abs(m3) + std::abs(m4)) * std::abs(wy) +
                           (std::abs(m5) + std::abs(m6)) * std::abs(wz);
  const double bound = kErrBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return exact_orientation(a, b, c, p);
}

}  // namespace sda::detail
