#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cpmg/adiabaticity.hpp"

using namespace cpmg;

namespace {

constexpr double pi = std::numbers::pi;

CycleParams params(double w0, double w1 = 1.0, double te = 8.0) {
  CycleParams p;
  p.omega0_norm = w0;
  p.omega1_norm = w1;
  p.te_ratio = te;
  return p;
}

}  // namespace

TEST_CASE("axis polar angle at resonance") {
  CHECK(theta(params(0.0)) == doctest::Approx(pi / 2).epsilon(1e-14));
  CHECK(theta_signed(params(0.0)) == doctest::Approx(pi / 2).epsilon(1e-14));
}

TEST_CASE("polar angle mirrors with the offset") {
  for (double w0 : {0.2, 0.7, 1.1, 1.9}) {
    CHECK(theta(params(-w0)) == doctest::Approx(pi - theta(params(w0))).epsilon(1e-12));
  }
}

TEST_CASE("theta refuses a degenerate axis") {
  CHECK_THROWS_AS(theta(params(0.0, 2.0)), std::domain_error);
  CHECK_THROWS_AS(theta_signed(params(0.0, 2.0)), std::domain_error);
}

TEST_CASE("derivative stencil is second order") {
  // Richardson: halving h must reproduce the h value to ~h^2 accuracy away
  // from folds and singular rings.
  for (double w0 : {0.1, 0.5, 0.9, 1.3}) {
    for (double w1 : {0.8, 1.0, 1.2}) {
      CycleParams p = params(w0, w1);
      double d0 = dpsi_domega0(p, 1e-5);
      double d0h = dpsi_domega0(p, 5e-6);
      double rich0 = (4.0 * d0h - d0) / 3.0;
      CHECK(std::abs(d0 - rich0) < 1e-6 * std::max(1.0, std::abs(rich0)));
      double d1 = dpsi_domega1(p, 1e-5);
      double d1h = dpsi_domega1(p, 5e-6);
      double rich1 = (4.0 * d1h - d1) / 3.0;
      CHECK(std::abs(d1 - rich1) < 1e-6 * std::max(1.0, std::abs(rich1)));
    }
  }
}

TEST_CASE("critical rates at resonance") {
  CriticalRates r = critical_rates(params(0.0));
  // axis tilts with the offset at unit slope, and alpha = pi there
  CHECK(r.nu0_crit == doctest::Approx(pi).epsilon(1e-5));
  // the axis direction is flat in omega1 on the resonance line
  CHECK(std::isinf(r.nu1_crit));
}

TEST_CASE("critical rates are even in the offset") {
  for (double w0 : {0.3, 0.9, 1.7, 2.6}) {
    CriticalRates a = critical_rates(params(w0, 1.0, 8.1));
    CriticalRates b = critical_rates(params(-w0, 1.0, 8.1));
    CHECK(a.nu0_crit == doctest::Approx(b.nu0_crit).epsilon(1e-7));
    CHECK(a.nu1_crit == doctest::Approx(b.nu1_crit).epsilon(1e-7));
  }
}

TEST_CASE("degenerate points report zero critical rates") {
  CriticalRates r = critical_rates(params(0.0, 2.0));
  CHECK(r.nu0_crit == 0.0);
  CHECK(r.nu1_crit == 0.0);
}

TEST_CASE("single-ramp adiabaticity is the exact ratio") {
  CycleParams p = params(0.8, 1.0, 8.1);
  p.ramp0 = 1e-3;
  CHECK(adiabaticity(p) == std::abs(critical_rates(p).nu0_crit / p.ramp0));
  p.ramp0 = 0.0;
  p.ramp1 = -2e-3;
  CHECK(adiabaticity(p) == std::abs(critical_rates(p).nu1_crit / p.ramp1));
}

TEST_CASE("static parameters are infinitely adiabatic") {
  CHECK(std::isinf(adiabaticity(params(0.8))));
}

TEST_CASE("two-channel ramps combine signed") {
  CycleParams p = params(0.8, 1.0, 8.1);
  p.ramp0 = 1e-3;
  p.ramp1 = 4e-4;
  double inv = signed_inverse_adiabaticity(p);
  double manual = (dpsi_domega0(p) * p.ramp0 + dpsi_domega1(p) * p.ramp1) /
                  effective_rotation(p).alpha;
  CHECK(inv == doctest::Approx(manual).epsilon(1e-14));
  CHECK(adiabaticity(p) * std::abs(inv) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("signed inverse is infinite at singular points") {
  CHECK(std::isinf(signed_inverse_adiabaticity(params(0.0, 2.0))));
}

TEST_CASE("singular point enumeration") {
  double te = 8.0;
  auto pts = singular_points(te, 3);
  REQUIRE(!pts.empty());

  int zeros = 0;
  bool found_l1_axis = false;
  for (const auto& sp : pts) {
    CHECK(sp.l >= 1);
    CHECK(sp.l <= 3);
    CHECK(sp.m >= sp.l);
    CHECK(static_cast<double>(sp.m) < sp.l * te);
    // both closure conditions hold exactly
    CHECK(std::abs(sp.omega0 * sp.omega0 + sp.omega1 * sp.omega1 - 4.0 * sp.l * sp.l) < 1e-9);
    CHECK(std::abs(std::abs(sp.omega0) * (te - 1.0) / 2.0 - (sp.m - sp.l)) < 1e-9);
    CHECK(sp.omega1 > 0.0);
    CHECK(sp.residual < 1e-9);
    if (sp.omega0 == 0.0) {
      ++zeros;
      if (sp.l == 1) {
        found_l1_axis = true;
        CHECK(sp.omega1 == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(sp.m == 1);
      }
    }
  }
  CHECK(found_l1_axis);
  CHECK(zeros == 3);  // one on-axis point per winding number, not duplicated

  // mirrored pairs share l, m, omega1
  for (const auto& sp : pts) {
    if (sp.omega0 <= 0.0) continue;
    bool matched = false;
    for (const auto& q : pts) {
      if (q.omega0 == -sp.omega0 && q.l == sp.l && q.m == sp.m && q.omega1 == sp.omega1) {
        matched = true;
        break;
      }
    }
    CHECK(matched);
  }

  // sorted by omega0 then omega1
  for (size_t i = 1; i < pts.size(); ++i) {
    bool ordered = pts[i - 1].omega0 < pts[i].omega0 ||
                   (pts[i - 1].omega0 == pts[i].omega0 && pts[i - 1].omega1 < pts[i].omega1);
    CHECK(ordered);
  }
}

TEST_CASE("singular point cap and argument checks") {
  auto all = singular_points(8.0, 2);
  auto capped = singular_points(8.0, 2, 2.5);
  for (const auto& sp : capped) CHECK(sp.omega1 <= 2.5);
  size_t expect = 0;
  for (const auto& sp : all) {
    if (sp.omega1 <= 2.5) ++expect;
  }
  CHECK(capped.size() == expect);
  CHECK(capped.size() < all.size());
  CHECK_THROWS_AS(singular_points(1.0, 2), std::invalid_argument);
}

TEST_CASE("map axis endpoints") {
  MapAxis lin{"w0", -2.0, 2.0, 5, false};
  CHECK(lin.value(0) == -2.0);
  CHECK(lin.value(4) == 2.0);
  CHECK(lin.value(2) == doctest::Approx(0.0));
  MapAxis lg{"ramp", 1e-4, 1e-1, 4, true};
  CHECK(lg.value(0) == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(lg.value(3) == doctest::Approx(1e-1).epsilon(1e-15));
  CHECK(lg.value(1) == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("grid evaluation matches pointwise formulas") {
  MapAxis x{"omega0_norm", -1.0, 1.0, 9, false};
  MapAxis y{"omega1_norm", 0.5, 1.5, 5, false};
  ScalarMap m = adiabaticity_grid(8.1, x, y, GridQuantity::nu0_crit, 1.0, 0.0, 2);
  CHECK(m.quantity == "nu0_crit");
  REQUIRE(m.values.size() == 45);
  for (int iy = 0; iy < y.count; ++iy) {
    for (int ix = 0; ix < x.count; ++ix) {
      CycleParams p = params(x.value(ix), y.value(iy), 8.1);
      CHECK(m.at(ix, iy) == doctest::Approx(critical_rates(p).nu0_crit).epsilon(1e-12));
    }
  }
  // threaded evaluation is deterministic
  ScalarMap m1 = adiabaticity_grid(8.1, x, y, GridQuantity::nu0_crit, 1.0, 0.0, 1);
  CHECK(m1.values == m.values);
}

TEST_CASE("adiabaticity map and its threshold contour") {
  MapAxis x{"omega0_norm", 0.5, 2.5, 21, false};
  MapAxis y{"ramp0", 1e-5, 1e-1, 17, true};
  ScalarMap m = adiabaticity_grid(15.0, x, y, GridQuantity::adiabaticity, 1.0, 0.0, 2);
  // adiabaticity decreases as the ramp grows, column by column
  for (int ix = 0; ix < x.count; ++ix) {
    for (int iy = 1; iy < y.count; ++iy) {
      CHECK(m.at(ix, iy) <= m.at(ix, iy - 1));
    }
  }
  auto contour = threshold_contour(m, 2.0);
  REQUIRE(contour.size() == static_cast<size_t>(x.count));
  for (int ix = 0; ix < x.count; ++ix) {
    CHECK(contour[ix].first == doctest::Approx(x.value(ix)));
    double yc = contour[ix].second;
    if (std::isnan(yc)) continue;
    CHECK(yc >= y.lo);
    CHECK(yc <= y.hi);
    CycleParams p = params(x.value(ix), 1.0, 15.0);
    p.ramp0 = yc;
    CHECK(adiabaticity(p) == doctest::Approx(2.0).epsilon(0.25));  // linear interp on a log axis
  }
}
