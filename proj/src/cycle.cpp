#include "cpmg/cycle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cpmg {

namespace {

constexpr double pi = std::numbers::pi;

double wrap_pi(double a) {
  // to (-pi, pi]
  a = std::fmod(a, 2.0 * pi);
  if (a <= -pi) a += 2.0 * pi;
  if (a > pi) a -= 2.0 * pi;
  return a;
}

// Extract (n_perp, n_z, epsilon, alpha) from the quaternion components of a
// cycle propagator whose axis lies in the plane spanned by z and the pulse
// axis. vx is the component along the in-plane transverse direction at
// azimuth `phase`.
EffectiveRotation from_planar_quaternion(double w, double vx, double vz, double phase) {
  if (w < 0.0) {
    w = -w;
    vx = -vx;
    vz = -vz;
  }
  double delta = std::hypot(vx, vz);
  EffectiveRotation er;
  if (delta < 1e-12) {
    er.n_perp = 1.0;
    er.n_z = 0.0;
    er.epsilon = wrap_pi(phase);
    er.alpha = 0.0;
    er.degenerate_axis = true;
    return er;
  }
  er.alpha = 2.0 * std::atan2(delta, w);
  er.n_perp = std::abs(vx) / delta;
  er.n_z = vz / delta;
  er.epsilon = wrap_pi(vx < 0.0 ? phase + pi : phase);
  er.degenerate_axis = false;
  return er;
}

}  // namespace

void validate(const CycleParams& p) {
  if (!(std::isfinite(p.omega0_norm) && std::isfinite(p.omega1_norm) &&
        std::isfinite(p.te_ratio) && std::isfinite(p.pulse_phase) &&
        std::isfinite(p.ramp0) && std::isfinite(p.ramp1))) {
    throw std::invalid_argument("CycleParams: non-finite field");
  }
  if (p.te_ratio <= 1.0) {
    throw std::invalid_argument("CycleParams: te_ratio must exceed 1");
  }
  if (p.omega1_norm < 0.0) {
    throw std::invalid_argument("CycleParams: omega1_norm must be >= 0");
  }
}

Vec3 EffectiveRotation::axis() const {
  return {n_perp * std::cos(epsilon), n_perp * std::sin(epsilon), n_z};
}

EffectiveRotation effective_rotation(const CycleParams& p) {
  validate(p);
  double w0 = p.omega0_norm;
  double w1 = p.omega1_norm;
  double om = std::hypot(w0, w1);
  double u0 = om > 0.0 ? w0 / om : 0.0;
  double u1 = om > 0.0 ? w1 / om : 0.0;
  double b1 = 0.5 * pi * w0 * (p.te_ratio - 1.0);  // half the free precession
  double b2 = 0.5 * pi * om;                       // half the pulse nutation
  double c1 = std::cos(b1), s1 = std::sin(b1);
  double c2 = std::cos(b2), s2 = std::sin(b2);
  double w = c1 * c2 - u0 * s1 * s2;
  double vx = u1 * s2;
  double vz = s1 * c2 + u0 * c1 * s2;
  return from_planar_quaternion(w, vx, vz, p.pulse_phase);
}

Rotation cycle_rotation(const CycleParams& p) {
  validate(p);
  double w0 = p.omega0_norm;
  double w1 = p.omega1_norm;
  double om = std::hypot(w0, w1);
  double free_angle = pi * w0 * (p.te_ratio - 1.0) * 0.5;  // per free interval
  Rotation rz = from_axis_angle(z_hat, free_angle);
  Rotation pulse;
  if (om > 0.0) {
    Vec3 axis{w1 * std::cos(p.pulse_phase) / om, w1 * std::sin(p.pulse_phase) / om, w0 / om};
    pulse = from_axis_angle(normalized(axis), pi * om);
  }
  return compose(compose(rz, pulse), rz);
}

EffectiveRotation effective_rotation_oracle(const CycleParams& p) {
  Rotation r = cycle_rotation(p);
  // Project the vector part onto the in-plane direction at the pulse phase.
  // The out-of-plane component is zero by construction; fold it in anyway so
  // the oracle stays independent of that assumption.
  double cphi = std::cos(p.pulse_phase), sphi = std::sin(p.pulse_phase);
  double vx = r.x * cphi + r.y * sphi;
  return from_planar_quaternion(r.w, vx, r.z, p.pulse_phase);
}

double azimuthal_correction(const CycleParams& p) {
  validate(p);
  return pi / 8.0 * p.te_ratio * p.ramp0;
}

std::array<double, 3> energy_levels(const CycleParams& p) {
  double a = effective_rotation(p).alpha;
  return {-a, 0.0, a};
}

}  // namespace cpmg
