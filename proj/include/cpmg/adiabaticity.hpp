#pragma once

#include <limits>
#include <string>
#include <vector>

#include "cpmg/cycle.hpp"

namespace cpmg {

// Polar angle of the rotation axis, atan2(n_perp, n_z) in [0, pi]. Throws
// std::domain_error at degenerate (singular) points.
double theta(const CycleParams& p);

// Signed axis angle psi = atan2(s_x, n_z) where s_x carries the sign of the
// transverse axis component; continuous across n_perp = 0 crossings where
// theta folds. Used for differentiation.
double theta_signed(const CycleParams& p);

// Branch-aligned central differences of psi; h is the step in the respective
// frequency. Near-zero derivatives are returned as-is (callers map to inf).
double dpsi_domega0(const CycleParams& p, double h = 1e-5);
double dpsi_domega1(const CycleParams& p, double h = 1e-5);

// Critical sweep rates |alpha / (dpsi/domega)|: the field-change rate at
// which the axis reorients as fast as the magnetization precesses around it.
// Infinite when the axis does not respond to that channel; {0, 0} at
// degenerate points.
struct CriticalRates {
  double nu0_crit = 0.0;
  double nu1_crit = 0.0;
};

CriticalRates critical_rates(const CycleParams& p);

// A = 1 / |ramp0/nu0_crit + ramp1/nu1_crit| with signed slopes inside.
// Exactly |nu/ramp| when only one ramp is nonzero; +inf when both vanish.
double adiabaticity(const CycleParams& p);

// Signed 1/A = (dpsi0 * ramp0 + dpsi1 * ramp1) / alpha; the signed axis
// reorientation rate per unit precession, used by the first-order transverse
// prediction.
double signed_inverse_adiabaticity(const CycleParams& p);

// Parameter points where the cycle propagator is the identity: the free
// precession closes (omega0 (te_ratio - 1) = 2(m - l)) while the pulse
// nutation closes (sqrt(omega0^2 + omega1^2) = 2l). Indexed by winding
// numbers l >= 1 and l <= m < l * te_ratio; mirrored in omega0 except at 0.
struct SingularPoint {
  double omega0 = 0.0;
  double omega1 = 0.0;
  int l = 0;
  int m = 0;
  double residual = 0.0;  // canonical angle of the composed propagator
};

std::vector<SingularPoint> singular_points(
    double te_ratio, int l_max,
    double omega1_max = std::numeric_limits<double>::infinity());

// Uniform axis for maps; value(i) spans [lo, hi] inclusive.
struct MapAxis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  int count = 2;
  bool log_scale = false;

  double value(int i) const;
};

struct ScalarMap {
  MapAxis x;
  MapAxis y;
  std::string quantity;
  std::vector<double> values;  // row-major: values[iy * x.count + ix]

  double& at(int ix, int iy) { return values[static_cast<size_t>(iy) * x.count + ix]; }
  double at(int ix, int iy) const { return values[static_cast<size_t>(iy) * x.count + ix]; }
};

enum class GridQuantity {
  adiabaticity,  // y axis is ramp0
  nu0_crit,      // y axis is omega1_norm
  nu1_crit,
  alpha,
  n_perp,
  n_z,
};

// Evaluates the chosen quantity over the grid. For GridQuantity::adiabaticity
// the y axis is the omega0 ramp rate at fixed omega1; otherwise y is
// omega1_norm. threads = 0 picks the hardware count.
ScalarMap adiabaticity_grid(double te_ratio, const MapAxis& omega0_axis,
                            const MapAxis& second_axis, GridQuantity quantity,
                            double omega1_fixed = 1.0, double pulse_phase = 0.0,
                            int threads = 0);

// For each x column, the lowest y at which the map crosses `level` (linear
// interpolation in y); NaN when no crossing. Used for threshold contours of
// adiabaticity maps.
std::vector<std::pair<double, double>> threshold_contour(const ScalarMap& map, double level);

}  // namespace cpmg
