#pragma once

#include "sda/vec3.hpp"

namespace sda::detail {

/// Sign of the signed volume of (b-a, c-a, p-a): +1 when p lies on the side
/// the normal (b-a)x(c-a) points to, -1 on the other side, 0 when exactly
/// coplanar. A floating-point filter settles almost every call; the rest are
/// decided in exact rational arithmetic.
int orientation(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& p);

}  // namespace sda::detail
