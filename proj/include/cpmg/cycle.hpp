#pragma once

#include <array>

#include "cpmg/rotation.hpp"

namespace cpmg {

// Conventions used throughout:
//   - Frequencies are normalized by the nominal nutation rate omega1_nom,
//     with omega1_nom * t_180 = pi (an exact refocusing pulse on resonance).
//   - Time is normalized by the echo spacing t_E; tau = t / t_E.
//   - te_ratio = t_E / t_180 must exceed 1 (the pulse has to fit).
//   - One refocusing cycle spans one echo spacing, centered on the pulse:
//     free precession for (t_E - t_180)/2, the pulse, free precession again.
//     Echoes fall at integer tau.
struct CycleParams {
  double omega0_norm = 0.0;   // offset field, units of omega1_nom
  double omega1_norm = 1.0;   // pulse amplitude, units of omega1_nom
  double te_ratio = 8.0;      // echo spacing over pulse duration
  double pulse_phase = 0.0;   // refocusing pulse phase (CPMG: 0)
  double ramp0 = 0.0;         // d(omega0_norm)/dtau at the cycle
  double ramp1 = 0.0;         // d(omega1_norm)/dtau at the cycle
};

// Throws std::invalid_argument on te_ratio <= 1, omega1_norm < 0, or
// non-finite fields.
void validate(const CycleParams& p);

// Net rotation of one cycle in axis-angle form. The axis is stored as
// (n_perp, n_z) plus the azimuth epsilon of its transverse part, with
// n_perp >= 0 and epsilon in (-pi, pi]; alpha is the canonical angle in
// [0, pi]. When the cycle is the identity to 1e-12 the axis is undefined:
// degenerate_axis is set and (n_perp, n_z, epsilon) default to
// (1, 0, pulse_phase).
struct EffectiveRotation {
  double n_perp = 1.0;
  double n_z = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  bool degenerate_axis = false;

  Vec3 axis() const;
};

// Closed-form propagator of one cycle (piecewise-constant fields across it).
EffectiveRotation effective_rotation(const CycleParams& p);

// Same rotation assembled by explicit composition of the three intervals;
// used to cross-check the closed form.
EffectiveRotation effective_rotation_oracle(const CycleParams& p);

// The composed cycle propagator itself (free, pulse, free).
Rotation cycle_rotation(const CycleParams& p);

// First-order azimuthal tilt of the rotation axis under an omega0 ramp:
// delta_epsilon = (pi/8) * te_ratio * ramp0.
double azimuthal_correction(const CycleParams& p);

// Stroboscopic mode frequencies {-alpha, 0, +alpha} in units of 1/t_E.
// The middle level is exactly zero.
std::array<double, 3> energy_levels(const CycleParams& p);

}  // namespace cpmg
