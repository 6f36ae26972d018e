#pragma once

#include "cpmg/vec3.hpp"

namespace cpmg {

// Unit quaternion acting on magnetization vectors. Rotations are
// right-handed: positive angle about +z carries x toward y.
struct Rotation {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Canonical axis-angle: angle in [0, pi], w >= 0 branch. A rotation whose
// vector part underflows (|v| < 1e-12) is reported as degenerate with the
// x axis as placeholder and angle 0.
struct AxisAngle {
  Vec3 axis{1.0, 0.0, 0.0};
  double angle = 0.0;
  bool degenerate = false;
};

// axis must be unit length to 1e-9; throws std::invalid_argument otherwise.
Rotation from_axis_angle(const Vec3& axis, double angle);

// Returns the rotation "first, then second", renormalized.
Rotation compose(const Rotation& first, const Rotation& second);

Vec3 apply(const Rotation& r, const Vec3& v);

AxisAngle to_axis_angle(const Rotation& r);

Rotation normalized(const Rotation& r);

}  // namespace cpmg
