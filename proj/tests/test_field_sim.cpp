#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cpmg/simulator.hpp"

using namespace cpmg;

namespace {

constexpr double pi = std::numbers::pi;

double train_distance(const EchoTrain& a, const EchoTrain& b) {
  REQUIRE(a.echoes.size() == b.echoes.size());
  double worst = 0.0;
  for (size_t i = 0; i < a.echoes.size(); ++i) {
    worst = std::max(worst, norm(a.echoes[i].m - b.echoes[i].m));
  }
  return worst;
}

}  // namespace

TEST_CASE("channel evaluation") {
  FieldProfile c = FieldProfile::constant(0.4, 0.9);
  ProfileSample s = c.at(12.3);
  CHECK(s.omega0 == 0.4);
  CHECK(s.ramp0 == 0.0);
  CHECK(s.omega1 == 0.9);
  CHECK(s.ramp1 == 0.0);

  FieldProfile l = FieldProfile::linear(1e-3, 0.2);
  s = l.at(100.0);
  CHECK(s.omega0 == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(s.ramp0 == 1e-3);
  CHECK(s.omega1 == 1.0);

  FieldProfile h = FieldProfile::harmonic(1.4, 300.0);
  s = h.at(75.0);  // quarter period
  CHECK(s.omega0 == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(std::abs(s.ramp0) < 1e-12);
  s = h.at(0.0);
  CHECK(s.omega0 == 0.0);
  CHECK(s.ramp0 == doctest::Approx(1.4 * 2.0 * pi / 300.0).epsilon(1e-14));
  CHECK_THROWS_AS(FieldProfile::harmonic(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("out-and-back channel clamps at its ends") {
  FieldProfile b = FieldProfile::bilinear(0.0, 2.2, 1e-3);
  CHECK(b.excursion_end() == doctest::Approx(4400.0).epsilon(1e-15));
  ProfileSample s = b.at(1100.0);
  CHECK(s.omega0 == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(s.ramp0 == doctest::Approx(1e-3).epsilon(1e-12));
  s = b.at(3300.0);
  CHECK(s.omega0 == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(s.ramp0 == doctest::Approx(-1e-3).epsilon(1e-12));
  s = b.at(5000.0);
  CHECK(s.omega0 == 0.0);
  CHECK(s.ramp0 == 0.0);
  s = b.at(-1.0);
  CHECK(s.omega0 == 0.0);
  CHECK(b.defined_on(0.0, 1e6));  // clamped, not restricted

  FieldProfile flat = FieldProfile::bilinear(0.7, 0.7, 1e-3);
  CHECK(flat.excursion_end() == 0.0);
  CHECK(flat.at(50.0).omega0 == 0.7);
  CHECK_THROWS_AS(FieldProfile::bilinear(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("tabulated profiles restrict the domain") {
  FieldProfile t = FieldProfile::tabulated({{0.0, 0.0, 1.0}, {10.0, 1.0, 1.0}, {20.0, 0.5, 0.8}});
  CHECK(t.defined_on(0.0, 20.0));
  CHECK(!t.defined_on(0.0, 20.5));
  CHECK(!t.defined_on(-0.5, 10.0));
  ProfileSample s = t.at(15.0);
  CHECK(s.omega0 == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(s.ramp0 == doctest::Approx(-0.05).epsilon(1e-12));
  CHECK(s.omega1 == doctest::Approx(0.9).epsilon(1e-14));
  CHECK_THROWS_AS(FieldProfile::tabulated({{0.0, 0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(FieldProfile::tabulated({{0.0, 0.0, 1.0}, {0.0, 1.0, 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("excitation pulse") {
  SequenceTiming t = cpmg_timing(8.0, 10);
  CHECK(t.excitation_phase == doctest::Approx(pi / 2));
  CHECK(t.refocusing_phase == 0.0);
  CHECK(t.echo_count == 10);

  // on resonance: 90 degrees about +y takes +z to +x
  Vec3 m = excite(FieldProfile::constant(0.0), t);
  CHECK(norm(m - x_hat) < 1e-15);

  // no field at all: nothing happens
  Vec3 mz = excite(FieldProfile::constant(0.0, 0.0), t);
  CHECK(norm(mz - z_hat) == 0.0);

  // tilted axis oracle
  double w0 = 0.6;
  Vec3 mt = excite(FieldProfile::constant(w0), t);
  double om = std::hypot(w0, 1.0);
  Vec3 axis = (1.0 / om) * Vec3{0.0, 1.0, w0};
  Vec3 want = apply(from_axis_angle(axis, pi * om * 0.5), z_hat);
  CHECK(norm(mt - want) < 1e-14);
}

TEST_CASE("timing validation") {
  SequenceTiming t = cpmg_timing(8.0, 5);
  CHECK_NOTHROW(validate(t));
  t.te_ratio = 1.0;
  CHECK_THROWS_AS(validate(t), std::invalid_argument);
  t = cpmg_timing(8.0, -1);
  CHECK_THROWS_AS(validate(t), std::invalid_argument);
  t = cpmg_timing(8.0, 5);
  t.t90_ratio = 0.0;
  CHECK_THROWS_AS(validate(t), std::invalid_argument);
  CHECK_THROWS_AS(simulate_cpmg(FieldProfile::constant(0.0), cpmg_timing(8.0, 1), 0),
                  std::invalid_argument);
}

TEST_CASE("simulation refuses profiles that do not cover the train") {
  FieldProfile t = FieldProfile::tabulated({{0.0, 0.0, 1.0}, {5.0, 0.5, 1.0}});
  CHECK_NOTHROW(simulate_cpmg(t, cpmg_timing(8.0, 5)));
  CHECK_THROWS_AS(simulate_cpmg(t, cpmg_timing(8.0, 6)), std::invalid_argument);
}

TEST_CASE("on-resonance train is locked along x") {
  EchoTrain train = simulate_cpmg(FieldProfile::constant(0.0), cpmg_timing(8.0, 1000));
  REQUIRE(train.echoes.size() == 1001);
  for (const auto& e : train.echoes) {
    CHECK(norm(e.m - x_hat) < 1e-9);
  }
}

TEST_CASE("echo bookkeeping") {
  FieldProfile p = FieldProfile::linear(1e-3);
  EchoTrain train = simulate_cpmg(p, cpmg_timing(8.0, 20));
  for (int k = 0; k <= 20; ++k) {
    CHECK(train.echoes[k].index == k);
    CHECK(train.echoes[k].tau == static_cast<double>(k));
    CHECK(train.echoes[k].omega0 == doctest::Approx(1e-3 * k).epsilon(1e-14));
  }
  EchoTrain none = simulate_cpmg(p, cpmg_timing(8.0, 0));
  CHECK(none.echoes.size() == 1);
  CHECK(norm(none.echoes[0].m - none.m_exc) == 0.0);
}

TEST_CASE("static fields reproduce the closed-form propagator") {
  for (double w0 : {0.3, 0.7, 1.9}) {
    FieldProfile p = FieldProfile::constant(w0);
    SequenceTiming t = cpmg_timing(8.0, 50);
    EchoTrain sim = simulate_cpmg(p, t, 1);  // constant fields: slices exact
    CycleParams cp;
    cp.omega0_norm = w0;
    cp.te_ratio = 8.0;
    EchoTrain strobe = static_propagate(effective_rotation(cp), sim.m_exc, 50);
    CHECK(train_distance(sim, strobe) < 1e-8);
  }
}

TEST_CASE("norm is conserved through ramps") {
  EchoTrain train = simulate_cpmg(FieldProfile::linear(1e-2), cpmg_timing(15.0, 200));
  for (const auto& e : train.echoes) {
    CHECK(std::abs(norm(e.m) - 1.0) < 1e-9);
  }
}

TEST_CASE("substep refinement has converged at the studied rates") {
  // Midpoint sampling makes free intervals exact for linear ramps; the pulse
  // carries a saturating commutator error proportional to ramp / substeps^2.
  // Windows end before the first strong transition so trajectories are not
  // chaotic-sensitive.
  SequenceTiming te15 = cpmg_timing(15.0, 130);
  FieldProfile fast = FieldProfile::linear(1e-2);
  EchoTrain f32 = simulate_cpmg(fast, te15, 32);
  EchoTrain f64 = simulate_cpmg(fast, te15, 64);
  CHECK(train_distance(f32, f64) < 1e-6);
  EchoTrain f4 = simulate_cpmg(fast, te15, 4);
  CHECK(train_distance(f4, f64) < 5e-5);

  SequenceTiming te15_slow = cpmg_timing(15.0, 1300);
  FieldProfile slow = FieldProfile::linear(1e-3);
  EchoTrain s8 = simulate_cpmg(slow, te15_slow, 8);
  EchoTrain s16 = simulate_cpmg(slow, te15_slow, 16);
  CHECK(train_distance(s8, s16) < 1e-6);
  EchoTrain s4 = simulate_cpmg(slow, te15_slow, 4);
  CHECK(train_distance(s4, s16) < 1e-5);

  SequenceTiming te8 = cpmg_timing(8.0, 1300);
  EchoTrain e8 = simulate_cpmg(slow, te8, 8);
  EchoTrain e16 = simulate_cpmg(slow, te8, 16);
  CHECK(train_distance(e8, e16) < 1e-6);
}

TEST_CASE("simulation is deterministic") {
  FieldProfile p = FieldProfile::harmonic(1.4, 300.2);
  SequenceTiming t = cpmg_timing(15.0, 300);
  EchoTrain a = simulate_cpmg(p, t);
  EchoTrain b = simulate_cpmg(p, t);
  REQUIRE(a.echoes.size() == b.echoes.size());
  for (size_t i = 0; i < a.echoes.size(); ++i) {
    CHECK(a.echoes[i].m.x == b.echoes[i].m.x);
    CHECK(a.echoes[i].m.y == b.echoes[i].m.y);
    CHECK(a.echoes[i].m.z == b.echoes[i].m.z);
  }
}

TEST_CASE("degenerate stroboscopic propagation holds still") {
  EffectiveRotation deg;
  deg.degenerate_axis = true;
  Vec3 m{0.1, 0.2, 0.97};
  EchoTrain train = static_propagate(deg, m, 5);
  for (const auto& e : train.echoes) CHECK(norm(e.m - m) == 0.0);
}
