#include "cpmg/rotation.hpp"

#include <cmath>
#include <stdexcept>

namespace cpmg {

Rotation from_axis_angle(const Vec3& axis, double angle) {
  double n = norm(axis);
  if (std::abs(n - 1.0) > 1e-9) {
    throw std::invalid_argument("from_axis_angle: axis must be unit length");
  }
  double h = 0.5 * angle;
  double s = std::sin(h);
  return {std::cos(h), s * axis.x, s * axis.y, s * axis.z};
}

Rotation normalized(const Rotation& r) {
  double n = std::sqrt(r.w * r.w + r.x * r.x + r.y * r.y + r.z * r.z);
  return {r.w / n, r.x / n, r.y / n, r.z / n};
}

Rotation compose(const Rotation& first, const Rotation& second) {
  const Rotation& a = second;  // Hamilton product a*b applies b first
  const Rotation& b = first;
  Rotation r{a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
             a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
             a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
             a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  return normalized(r);
}

Vec3 apply(const Rotation& r, const Vec3& v) {
  // v' = v + 2w (u x v) + 2 u x (u x v), u = vector part
  Vec3 u{r.x, r.y, r.z};
  Vec3 uv = cross(u, v);
  Vec3 uuv = cross(u, uv);
  return v + 2.0 * r.w * uv + 2.0 * uuv;
}

AxisAngle to_axis_angle(const Rotation& r) {
  double w = r.w, x = r.x, y = r.y, z = r.z;
  if (w < 0.0) {
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  double vn = std::sqrt(x * x + y * y + z * z);
  if (vn < 1e-12) {
    return {x_hat, 0.0, true};
  }
  return {{x / vn, y / vn, z / vn}, 2.0 * std::atan2(vn, w), false};
}

}  // namespace cpmg
