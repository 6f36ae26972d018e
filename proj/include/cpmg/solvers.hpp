#pragma once

#include <string>
#include <vector>

#include "cpmg/adiabaticity.hpp"
#include "cpmg/eigenmodes.hpp"
#include "cpmg/field_profile.hpp"
#include "cpmg/simulator.hpp"

namespace cpmg {

// Mode content of the magnetization at each echo, in the sign-tracked
// eigenbasis of the instantaneous cycle. phi_dyn accumulates the dynamic
// phase of the +1 mode (the cycle angle, negated while the tracked basis is
// flipped); phi_geo accumulates its geometric phase increments.
struct ModeSample {
  int cycle = 0;
  double tau = 0.0;
  double omega0 = 0.0;
  double a0 = 0.0;
  double cp_magnitude = 0.0;
  double adiabaticity = 0.0;
  double phi_dyn = 0.0;
  double phi_geo = 0.0;
  bool flip_event = false;
  bool degenerate = false;
};

struct ModeTrace {
  std::vector<ModeSample> samples;
  int flip_count = 0;
  int near_orthogonal_count = 0;
  int renorm_warnings = 0;  // continuous solver only
};

// Decomposes a simulated train against cycle parameters read from the
// profile at each echo.
ModeTrace decompose_train(const EchoTrain& train, const FieldProfile& profile,
                          const SequenceTiming& timing);

// Zeroth-order adiabatic transport: mode magnitudes frozen at their values
// after the first cycle, phases integrated cycle by cycle, magnetization
// rebuilt in the final basis at each echo.
struct AdiabaticPrediction {
  ModeTrace trace;
  EchoTrain train;
};

AdiabaticPrediction adiabatic_predict(const FieldProfile& profile, const SequenceTiming& timing,
                                      const Vec3& m_exc);

// First-order steady-state transverse magnetization at an echo, for slow
// ramps: the axis tilt delta_epsilon plus the lag 1/A perpendicular to the
// axis.
struct FirstOrderPoint {
  double mx = 0.0;
  double my = 0.0;
};

FirstOrderPoint first_order_predict(const FieldProfile& profile, const SequenceTiming& timing,
                                    double tau);

// Continuous limit of the echo-train dynamics: integrates
//   d n_eff / d tau = alpha(tau) * (n_axis(tau) x n_eff)
// with RK4 at fixed step (must divide 1), decomposing at integer tau in the
// same sign-tracked basis as decompose_train. alpha and the axis follow the
// canonical branch, whose fold at alpha = pi carries the stroboscopic level
// gap.
ModeTrace continuous_mode_evolution(const FieldProfile& profile, const SequenceTiming& timing,
                                    const Vec3& m0, double step = 0.125);

// Adiabaticity sampled along a profile. samples_per_spacing points per unit
// tau (cycle centers at integers when 1).
struct AdiabaticitySample {
  double tau = 0.0;
  double omega0 = 0.0;
  double omega1 = 0.0;
  double value = 0.0;
};

std::vector<AdiabaticitySample> adiabaticity_trace(const FieldProfile& profile, double te_ratio,
                                                   double refocusing_phase, double tau_lo,
                                                   double tau_hi, int samples_per_spacing = 1);

double min_adiabaticity(const FieldProfile& profile, double te_ratio, double refocusing_phase,
                        double tau_lo, double tau_hi, int samples_per_spacing = 32);

// Intervals of an omega0 sweep classified by the adiabaticity threshold.
struct Region {
  double lo = 0.0;
  double hi = 0.0;
  bool adiabatic = false;
};

struct RegionSegmentation {
  std::vector<Region> regions;
  double threshold = 2.0;
  std::string axis;  // "omega0" or "tau"
};

// Fixed ramp over an omega0 range. Sampling resolution bounds how narrow a
// flagged region can be; near-singular slivers below the grid scale are
// smoothed over.
RegionSegmentation segment_regions(double te_ratio, double omega1, double ramp0, double omega0_lo,
                                   double omega0_hi, double threshold = 2.0, int samples = 2001);

// Along a profile in tau.
RegionSegmentation segment_regions(const FieldProfile& profile, double te_ratio,
                                   double refocusing_phase, double tau_lo, double tau_hi,
                                   double threshold = 2.0, int samples_per_spacing = 8);

}  // namespace cpmg
