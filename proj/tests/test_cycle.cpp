#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cpmg/cycle.hpp"

using namespace cpmg;

namespace {

constexpr double pi = std::numbers::pi;

CycleParams make(double w0, double w1, double te, double phase = 0.0) {
  CycleParams p;
  p.omega0_norm = w0;
  p.omega1_norm = w1;
  p.te_ratio = te;
  p.pulse_phase = phase;
  return p;
}

// Canonical quaternion components of an effective rotation, for comparisons
// that stay stable near degenerate points.
std::array<double, 4> quat(const EffectiveRotation& er) {
  double h = 0.5 * er.alpha;
  double s = std::sin(h);
  Vec3 ax = er.axis();
  return {std::cos(h), s * ax.x, s * ax.y, s * ax.z};
}

double quat_dist(const EffectiveRotation& a, const EffectiveRotation& b) {
  auto qa = quat(a), qb = quat(b);
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(qa[i] - qb[i]));
  return m;
}

}  // namespace

TEST_CASE("on-resonance cycle is a pi rotation about x") {
  for (double te : {8.0, 8.1, 15.0, 2.5}) {
    EffectiveRotation er = effective_rotation(make(0.0, 1.0, te));
    CHECK(std::abs(er.alpha - pi) < 1e-12);
    CHECK(er.n_perp == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(er.n_z) < 1e-14);
    CHECK(std::abs(er.epsilon) < 1e-14);
    CHECK(!er.degenerate_axis);
  }
}

TEST_CASE("zero pulse amplitude reduces to free precession over the spacing") {
  double w0 = 0.05, te = 8.0;
  EffectiveRotation er = effective_rotation(make(w0, 0.0, te));
  CHECK(er.alpha == doctest::Approx(pi * w0 * te).epsilon(1e-12));
  CHECK(er.n_z == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(er.n_perp < 1e-12);
}

TEST_CASE("double nutation at zero offset is the identity") {
  EffectiveRotation er = effective_rotation(make(0.0, 2.0, 8.0));
  CHECK(er.degenerate_axis);
  CHECK(er.alpha == 0.0);
  CHECK(er.n_perp == 1.0);
  CHECK(er.n_z == 0.0);
}

TEST_CASE("closed form matches explicit composition") {
  for (double te : {8.0, 8.1, 15.0}) {
    for (int i = 0; i <= 120; ++i) {
      double w0 = -6.0 + 12.0 * i / 120;
      for (double w1 : {0.05, 0.3, 1.0, 2.5, 4.0}) {
        CycleParams p = make(w0, w1, te);
        double d = quat_dist(effective_rotation(p), effective_rotation_oracle(p));
        CAPTURE(te);
        CAPTURE(w0);
        CAPTURE(w1);
        REQUIRE(d < 1e-10);
      }
    }
  }
}

TEST_CASE("closed form matches composition off the CPMG phase") {
  for (double phase : {pi / 2, -pi / 3, 2.1}) {
    for (int i = 0; i <= 60; ++i) {
      double w0 = -4.0 + 8.0 * i / 60;
      CycleParams p = make(w0, 1.2, 8.1, phase);
      CHECK(quat_dist(effective_rotation(p), effective_rotation_oracle(p)) < 1e-10);
    }
  }
}

TEST_CASE("offset parity: alpha and n_perp even, n_z odd") {
  for (int i = 1; i <= 40; ++i) {
    double w0 = 6.0 * i / 40;
    EffectiveRotation a = effective_rotation(make(w0, 1.0, 15.0));
    EffectiveRotation b = effective_rotation(make(-w0, 1.0, 15.0));
    if (a.degenerate_axis || b.degenerate_axis) continue;
    CHECK(a.alpha == doctest::Approx(b.alpha).epsilon(1e-12));
    CHECK(a.n_perp == doctest::Approx(b.n_perp).epsilon(1e-12));
    CHECK(a.n_z == doctest::Approx(-b.n_z).epsilon(1e-12));
  }
}

TEST_CASE("axis is unit length and stays in the pulse plane") {
  for (double te : {8.0, 15.0}) {
    for (int i = 0; i <= 200; ++i) {
      double w0 = -6.0 + 12.0 * i / 200;
      EffectiveRotation er = effective_rotation(make(w0, 1.0, te));
      if (er.degenerate_axis) continue;
      CHECK(std::abs(er.n_perp * er.n_perp + er.n_z * er.n_z - 1.0) < 1e-10);
      CHECK(er.n_perp >= 0.0);
      // CPMG phase: the azimuth can only be 0 or pi
      CHECK(std::min(std::abs(er.epsilon), std::abs(std::abs(er.epsilon) - pi)) < 1e-12);
    }
  }
}

TEST_CASE("phase shifts move the axis azimuth rigidly") {
  CycleParams a = make(0.8, 1.0, 8.0, 0.0);
  CycleParams b = make(0.8, 1.0, 8.0, pi / 2);
  EffectiveRotation ea = effective_rotation(a);
  EffectiveRotation eb = effective_rotation(b);
  CHECK(ea.alpha == doctest::Approx(eb.alpha).epsilon(1e-14));
  CHECK(ea.n_perp == doctest::Approx(eb.n_perp).epsilon(1e-14));
  CHECK(ea.n_z == doctest::Approx(eb.n_z).epsilon(1e-14));
  double d = std::remainder(eb.epsilon - ea.epsilon - pi / 2, 2.0 * pi);
  CHECK(std::abs(d) < 1e-14);
}

TEST_CASE("azimuthal correction formula") {
  CycleParams p = make(0.5, 1.0, 15.0);
  p.ramp0 = 1e-2;
  CHECK(azimuthal_correction(p) == pi / 8.0 * 15.0 * 1e-2);
  CHECK(azimuthal_correction(p) == doctest::Approx(3.375 * pi / 180.0).epsilon(1e-12));
  p.ramp0 = 0.0;
  CHECK(azimuthal_correction(p) == 0.0);
  CycleParams q = make(1.0, 1.0, 8.0);
  q.ramp0 = 1e-3;
  CHECK(azimuthal_correction(q) == doctest::Approx(pi / 8.0 * 8e-3).epsilon(1e-15));
}

TEST_CASE("middle energy level is exactly zero") {
  for (int i = 0; i <= 50; ++i) {
    double w0 = -3.0 + 6.0 * i / 50;
    auto lv = energy_levels(make(w0, 1.0, 8.1));
    CHECK(lv[1] == 0.0);
    CHECK(lv[0] == -lv[2]);
    CHECK(lv[2] >= 0.0);
  }
  auto lv = energy_levels(make(0.0, 1.0, 8.0));
  CHECK(lv[2] == doctest::Approx(pi).epsilon(1e-14));
}

TEST_CASE("level gap has a local minimum near the first avoided crossing") {
  auto gap = [](double w0) { return energy_levels(make(w0, 1.0, 8.1))[2]; };
  double g_at = gap(1.69);
  CHECK(g_at < gap(1.59));
  CHECK(g_at < gap(1.79));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(effective_rotation(make(0.0, 1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(effective_rotation(make(0.0, 1.0, 0.5)), std::invalid_argument);
  CHECK_THROWS_AS(effective_rotation(make(0.0, -1.0, 8.0)), std::invalid_argument);
  CycleParams p = make(0.0, 1.0, 8.0);
  p.ramp0 = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
}

TEST_CASE("degenerate reporting keeps placeholder axis and pulse phase") {
  EffectiveRotation er = effective_rotation(make(0.0, 2.0, 8.0, 1.0));
  CHECK(er.degenerate_axis);
  CHECK(er.epsilon == doctest::Approx(1.0).epsilon(1e-15));
}
