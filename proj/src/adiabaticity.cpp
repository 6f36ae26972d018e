#include "cpmg/adiabaticity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cpmg/parallel.hpp"

namespace cpmg {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

// Signed transverse component: n_perp with the sign the axis projects onto
// the pulse-phase direction.
double signed_sx(const EffectiveRotation& er, double phase) {
  double s = std::cos(er.epsilon - phase) < 0.0 ? -1.0 : 1.0;
  return s * er.n_perp;
}

double psi_of(const EffectiveRotation& er, double phase) {
  return std::atan2(signed_sx(er, phase), er.n_z);
}

// atan2 branch: pick psi + k*pi closest to ref. The axis direction is only
// defined up to sign, so the physical branch distance is pi, not 2 pi.
double align_branch(double psi, double ref) {
  double best = psi;
  double best_d = std::abs(psi - ref);
  for (int k = -2; k <= 2; ++k) {
    double c = psi + k * pi;
    double d = std::abs(c - ref);
    if (d < best_d) {
      best = c;
      best_d = d;
    }
  }
  return best;
}

struct PsiStencil {
  double center = 0.0;
  double plus = 0.0;
  double minus = 0.0;
  bool degenerate = false;
};

PsiStencil psi_stencil(const CycleParams& p, double h, bool vary_omega0) {
  PsiStencil s;
  EffectiveRotation c = effective_rotation(p);
  if (c.degenerate_axis) {
    s.degenerate = true;
    return s;
  }
  s.center = psi_of(c, p.pulse_phase);
  CycleParams up = p, dn = p;
  if (vary_omega0) {
    up.omega0_norm += h;
    dn.omega0_norm -= h;
  } else {
    up.omega1_norm += h;
    dn.omega1_norm = std::max(0.0, dn.omega1_norm - h);
  }
  s.plus = align_branch(psi_of(effective_rotation(up), p.pulse_phase), s.center);
  s.minus = align_branch(psi_of(effective_rotation(dn), p.pulse_phase), s.center);
  return s;
}

double central_diff(const CycleParams& p, double h, bool vary_omega0) {
  PsiStencil s = psi_stencil(p, h, vary_omega0);
  if (s.degenerate) return 0.0;
  double lo = vary_omega0 ? p.omega0_norm - h : p.omega1_norm - h;
  double span = 2.0 * h;
  if (!vary_omega0 && lo < 0.0) span = p.omega1_norm + h;  // clamped at zero
  return (s.plus - s.minus) / span;
}

}  // namespace

double theta(const CycleParams& p) {
  EffectiveRotation er = effective_rotation(p);
  if (er.degenerate_axis) {
    throw std::domain_error("theta: degenerate rotation axis (singular point)");
  }
  return std::atan2(er.n_perp, er.n_z);
}

double theta_signed(const CycleParams& p) {
  EffectiveRotation er = effective_rotation(p);
  if (er.degenerate_axis) {
    throw std::domain_error("theta_signed: degenerate rotation axis");
  }
  return psi_of(er, p.pulse_phase);
}

double dpsi_domega0(const CycleParams& p, double h) { return central_diff(p, h, true); }

double dpsi_domega1(const CycleParams& p, double h) { return central_diff(p, h, false); }

CriticalRates critical_rates(const CycleParams& p) {
  EffectiveRotation er = effective_rotation(p);
  if (er.degenerate_axis) {
    return {0.0, 0.0};
  }
  double d0 = dpsi_domega0(p);
  double d1 = dpsi_domega1(p);
  CriticalRates r;
  r.nu0_crit = d0 == 0.0 ? inf : std::abs(er.alpha / d0);
  r.nu1_crit = d1 == 0.0 ? inf : std::abs(er.alpha / d1);
  return r;
}

double adiabaticity(const CycleParams& p) {
  if (p.ramp0 == 0.0 && p.ramp1 == 0.0) return inf;
  CriticalRates r = critical_rates(p);
  if (p.ramp1 == 0.0) {
    return std::abs(r.nu0_crit / p.ramp0);
  }
  if (p.ramp0 == 0.0) {
    return std::abs(r.nu1_crit / p.ramp1);
  }
  double inv = signed_inverse_adiabaticity(p);
  if (inv == 0.0) return inf;
  return 1.0 / std::abs(inv);
}

double signed_inverse_adiabaticity(const CycleParams& p) {
  EffectiveRotation er = effective_rotation(p);
  if (er.degenerate_axis) return inf;
  if (er.alpha == 0.0) return inf;
  double d0 = p.ramp0 == 0.0 ? 0.0 : dpsi_domega0(p);
  double d1 = p.ramp1 == 0.0 ? 0.0 : dpsi_domega1(p);
  return (d0 * p.ramp0 + d1 * p.ramp1) / er.alpha;
}

std::vector<SingularPoint> singular_points(double te_ratio, int l_max, double omega1_max) {
  if (te_ratio <= 1.0) {
    throw std::invalid_argument("singular_points: te_ratio must exceed 1");
  }
  std::vector<SingularPoint> pts;
  for (int l = 1; l <= l_max; ++l) {
    // m ranges over integers with l <= m < l * te_ratio
    int m_hi = static_cast<int>(std::ceil(l * te_ratio)) - 1;
    for (int m = l; m <= m_hi; ++m) {
      if (static_cast<double>(m) >= l * te_ratio) continue;
      double w0 = 2.0 * (m - l) / (te_ratio - 1.0);
      double disc = 4.0 * l * l - w0 * w0;
      if (disc <= 0.0) continue;  // pulse circle closes before the offset line
      double w1 = std::sqrt(disc);
      if (w1 > omega1_max) continue;
      for (double sgn : {1.0, -1.0}) {
        if (sgn < 0.0 && w0 == 0.0) break;  // +-0 is one point
        SingularPoint sp;
        sp.omega0 = sgn * w0;
        sp.omega1 = w1;
        sp.l = l;
        sp.m = m;
        CycleParams p;
        p.omega0_norm = sp.omega0;
        p.omega1_norm = sp.omega1;
        p.te_ratio = te_ratio;
        sp.residual = effective_rotation_oracle(p).alpha;
        pts.push_back(sp);
      }
    }
  }
  std::sort(pts.begin(), pts.end(), [](const SingularPoint& a, const SingularPoint& b) {
    if (a.omega0 != b.omega0) return a.omega0 < b.omega0;
    return a.omega1 < b.omega1;
  });
  return pts;
}

double MapAxis::value(int i) const {
  if (count < 2) return lo;
  double t = static_cast<double>(i) / (count - 1);
  if (log_scale) {
    return lo * std::pow(hi / lo, t);
  }
  return lo + (hi - lo) * t;
}

ScalarMap adiabaticity_grid(double te_ratio, const MapAxis& omega0_axis,
                            const MapAxis& second_axis, GridQuantity quantity,
                            double omega1_fixed, double pulse_phase, int threads) {
  ScalarMap map;
  map.x = omega0_axis;
  map.y = second_axis;
  switch (quantity) {
    case GridQuantity::adiabaticity: map.quantity = "adiabaticity"; break;
    case GridQuantity::nu0_crit: map.quantity = "nu0_crit"; break;
    case GridQuantity::nu1_crit: map.quantity = "nu1_crit"; break;
    case GridQuantity::alpha: map.quantity = "alpha"; break;
    case GridQuantity::n_perp: map.quantity = "n_perp"; break;
    case GridQuantity::n_z: map.quantity = "n_z"; break;
  }
  map.values.assign(static_cast<size_t>(omega0_axis.count) * second_axis.count, 0.0);
  parallel_for(second_axis.count, threads, [&](int iy) {
    double yv = second_axis.value(iy);
    for (int ix = 0; ix < omega0_axis.count; ++ix) {
      CycleParams p;
      p.omega0_norm = omega0_axis.value(ix);
      p.te_ratio = te_ratio;
      p.pulse_phase = pulse_phase;
      double v = 0.0;
      switch (quantity) {
        case GridQuantity::adiabaticity:
          p.omega1_norm = omega1_fixed;
          p.ramp0 = yv;
          v = adiabaticity(p);
          break;
        case GridQuantity::nu0_crit:
          p.omega1_norm = yv;
          v = critical_rates(p).nu0_crit;
          break;
        case GridQuantity::nu1_crit:
          p.omega1_norm = yv;
          v = critical_rates(p).nu1_crit;
          break;
        case GridQuantity::alpha:
          p.omega1_norm = yv;
          v = effective_rotation(p).alpha;
          break;
        case GridQuantity::n_perp:
          p.omega1_norm = yv;
          v = effective_rotation(p).n_perp;
          break;
        case GridQuantity::n_z:
          p.omega1_norm = yv;
          v = effective_rotation(p).n_z;
          break;
      }
      map.at(ix, iy) = v;
    }
  });
  return map;
}

std::vector<std::pair<double, double>> threshold_contour(const ScalarMap& map, double level) {
  std::vector<std::pair<double, double>> out;
  out.reserve(map.x.count);
  for (int ix = 0; ix < map.x.count; ++ix) {
    double xv = map.x.value(ix);
    double yc = std::numeric_limits<double>::quiet_NaN();
    for (int iy = 0; iy + 1 < map.y.count; ++iy) {
      double a = map.at(ix, iy), b = map.at(ix, iy + 1);
      if ((a - level) * (b - level) <= 0.0 && a != b) {
        double t = (level - a) / (b - a);
        double y0 = map.y.value(iy), y1 = map.y.value(iy + 1);
        yc = map.y.log_scale ? y0 * std::pow(y1 / y0, t) : y0 + t * (y1 - y0);
        break;
      }
    }
    out.emplace_back(xv, yc);
  }
  return out;
}

}  // namespace cpmg
