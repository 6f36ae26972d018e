#include "cpmg/simulator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cpmg {

namespace {

constexpr double pi = std::numbers::pi;

void rotate_z(Vec3& m, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  double x = m.x * c - m.y * s;
  double y = m.x * s + m.y * c;
  m.x = x;
  m.y = y;
}

// Rodrigues rotation about a general axis given by components (ax, ay, az)
// of magnitude `an`, through `angle`.
void rotate_axis(Vec3& m, double ax, double ay, double az, double an, double angle) {
  if (an <= 0.0) return;
  double ux = ax / an, uy = ay / an, uz = az / an;
  double c = std::cos(angle), s = std::sin(angle);
  double d = (1.0 - c) * (ux * m.x + uy * m.y + uz * m.z);
  Vec3 cr{uy * m.z - uz * m.y, uz * m.x - ux * m.z, ux * m.y - uy * m.x};
  m = {m.x * c + cr.x * s + ux * d, m.y * c + cr.y * s + uy * d, m.z * c + cr.z * s + uz * d};
}

}  // namespace

SequenceTiming cpmg_timing(double te_ratio, int echo_count) {
  SequenceTiming t;
  t.te_ratio = te_ratio;
  t.echo_count = echo_count;
  t.excitation_phase = 0.5 * pi;
  t.refocusing_phase = 0.0;
  return t;
}

void validate(const SequenceTiming& t) {
  if (!(t.te_ratio > 1.0)) throw std::invalid_argument("SequenceTiming: te_ratio must exceed 1");
  if (!(t.t90_ratio > 0.0)) throw std::invalid_argument("SequenceTiming: t90_ratio must be positive");
  if (t.echo_count < 0) throw std::invalid_argument("SequenceTiming: echo_count must be >= 0");
}

Vec3 excite(const FieldProfile& profile, const SequenceTiming& timing) {
  validate(timing);
  ProfileSample s = profile.at(0.0);
  double om = std::hypot(s.omega0, s.omega1);
  Vec3 m = z_hat;
  if (om == 0.0) return m;
  double angle = pi * om * timing.t90_ratio;
  double c = std::cos(timing.excitation_phase), sn = std::sin(timing.excitation_phase);
  rotate_axis(m, s.omega1 * c, s.omega1 * sn, s.omega0, om, angle);
  return m;
}

EchoTrain simulate_cpmg(const FieldProfile& profile, const SequenceTiming& timing, int substeps) {
  return simulate_cpmg(profile, timing, excite(profile, timing), substeps);
}

EchoTrain simulate_cpmg(const FieldProfile& profile, const SequenceTiming& timing, const Vec3& m0,
                        int substeps) {
  validate(timing);
  if (substeps < 1) throw std::invalid_argument("simulate_cpmg: substeps must be >= 1");
  if (!profile.defined_on(0.0, static_cast<double>(timing.echo_count))) {
    throw std::invalid_argument("simulate_cpmg: profile not defined on [0, echo_count]");
  }

  EchoTrain train;
  Vec3 m = m0;
  train.m_exc = m;
  train.echoes.push_back({0, 0.0, profile.at(0.0).omega0, m});

  double e = timing.te_ratio;
  double pulse_len = 1.0 / e;
  double free_len = 0.5 * (1.0 - pulse_len);
  double cphi = std::cos(timing.refocusing_phase);
  double sphi = std::sin(timing.refocusing_phase);

  for (int k = 1; k <= timing.echo_count; ++k) {
    double t0 = k - 1.0;
    // leading free interval
    double dt = free_len / substeps;
    for (int i = 0; i < substeps; ++i) {
      double tm = t0 + (i + 0.5) * dt;
      rotate_z(m, pi * e * profile.at(tm).omega0 * dt);
    }
    // refocusing pulse; omega1 held at its center value
    double tp0 = t0 + free_len;
    double w1 = profile.at(k - 0.5).omega1;
    dt = pulse_len / substeps;
    for (int i = 0; i < substeps; ++i) {
      double tm = tp0 + (i + 0.5) * dt;
      double w0 = profile.at(tm).omega0;
      double om = std::hypot(w0, w1);
      rotate_axis(m, w1 * cphi, w1 * sphi, w0, om, pi * e * om * dt);
    }
    // trailing free interval
    double tf0 = tp0 + pulse_len;
    dt = free_len / substeps;
    for (int i = 0; i < substeps; ++i) {
      double tm = tf0 + (i + 0.5) * dt;
      rotate_z(m, pi * e * profile.at(tm).omega0 * dt);
    }
    train.echoes.push_back({k, static_cast<double>(k), profile.at(k).omega0, m});
  }
  return train;
}

EchoTrain static_propagate(const EffectiveRotation& er, const Vec3& m_exc, int n) {
  EchoTrain train;
  train.m_exc = m_exc;
  train.echoes.reserve(n + 1);
  train.echoes.push_back({0, 0.0, 0.0, m_exc});
  Rotation r;
  if (!er.degenerate_axis) r = from_axis_angle(er.axis(), er.alpha);
  Vec3 m = m_exc;
  for (int k = 1; k <= n; ++k) {
    if (!er.degenerate_axis) m = apply(r, m);
    train.echoes.push_back({k, static_cast<double>(k), 0.0, m});
  }
  return train;
}

}  // namespace cpmg
