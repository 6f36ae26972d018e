#pragma once

#include <vector>

#include "cpmg/cycle.hpp"
#include "cpmg/field_profile.hpp"

namespace cpmg {

// Echo-train timing on the normalized tau axis. The excitation pulse is
// treated as instantaneous at tau = 0 (its nutation angle still scales with
// t90_ratio and the local fields); refocusing cycles then occupy
// (k-1, k] with the pulse centered at half-integer tau.
struct SequenceTiming {
  double te_ratio = 8.0;
  double t90_ratio = 0.5;       // t_90 / t_180
  int echo_count = 1;
  double excitation_phase = 0.0;  // set at pi/2 for CPMG by cpmg_timing()
  double refocusing_phase = 0.0;
};

// CPMG defaults: excitation 90 degrees out of phase with the refocusing
// pulses so the echo magnetization lies along the rotation axis at small
// offsets.
SequenceTiming cpmg_timing(double te_ratio, int echo_count);

void validate(const SequenceTiming& t);

struct EchoRecord {
  int index = 0;   // echo number; tau = index
  double tau = 0.0;
  double omega0 = 0.0;  // omega0_norm at the echo
  Vec3 m;
};

struct EchoTrain {
  Vec3 m_exc;                     // magnetization right after excitation
  std::vector<EchoRecord> echoes;  // index 0 (the excitation point) .. N
};

// Magnetization after the excitation pulse from equilibrium +z, using the
// fields at tau = 0. Nutation angle pi * Omega * t90_ratio about the
// excitation-phase axis tilted by the offset.
Vec3 excite(const FieldProfile& profile, const SequenceTiming& timing);

// Piecewise-constant-field integration of the full train. Each free interval
// and each pulse is cut into `substeps` slices with fields sampled at slice
// midpoints; omega1 is sampled once per pulse (at its center). Throws if the
// profile is not defined on [0, echo_count].
EchoTrain simulate_cpmg(const FieldProfile& profile, const SequenceTiming& timing,
                        int substeps = 4);

// Same integration from an explicit starting state instead of excite().
EchoTrain simulate_cpmg(const FieldProfile& profile, const SequenceTiming& timing, const Vec3& m0,
                        int substeps = 4);

// Stroboscopic propagation under a fixed cycle rotation: echo k is
// R^k applied to m_exc. Echo omega0 fields are left at zero.
EchoTrain static_propagate(const EffectiveRotation& er, const Vec3& m_exc, int n);

}  // namespace cpmg
