#include "cpmg/eigenmodes.hpp"

#include <cmath>
#include <stdexcept>

namespace cpmg {

namespace {

const cdouble i_unit{0.0, 1.0};

EigenBasis flip(const EigenBasis& b) {
  // Negating the axis maps v0 -> -v0 and v_plus -> -conj(v_plus); the
  // flipped v_plus then evolves with exp(+i alpha) per cycle.
  EigenBasis f;
  f.v0 = -b.v0;
  f.v_plus = cdouble{-1.0, 0.0} * conj(b.v_plus);
  return f;
}

}  // namespace

EigenBasis eigenbasis(const EffectiveRotation& er) {
  if (er.degenerate_axis) {
    throw std::domain_error("eigenbasis: degenerate rotation axis");
  }
  double ce = std::cos(er.epsilon), se = std::sin(er.epsilon);
  EigenBasis b;
  b.v0 = {er.n_perp * ce, er.n_perp * se, er.n_z};
  cdouble f = -i_unit / std::sqrt(2.0);
  b.v_plus = {f * (er.n_z * ce - i_unit * se),
              f * (er.n_z * se + i_unit * ce),
              f * (-er.n_perp)};
  return b;
}

ModeAmplitudes decompose(const Vec3& m, const EigenBasis& basis) {
  ModeAmplitudes a;
  a.a0 = dot(m, basis.v0);
  a.a_plus = inner(basis.v_plus, m);  // = m . conj(v_plus)
  return a;
}

Vec3 reconstruct(const ModeAmplitudes& a, const EigenBasis& basis, int n, double alpha) {
  cdouble phase = std::exp(-i_unit * (static_cast<double>(n) * alpha));
  cdouble cp = a.a_plus * phase;
  // a_minus * exp(+i n alpha) * v_minus is the conjugate term; the sum is
  // 2 Re{cp * v_plus}.
  return {a.a0 * basis.v0.x + 2.0 * std::real(cp * basis.v_plus.x),
          a.a0 * basis.v0.y + 2.0 * std::real(cp * basis.v_plus.y),
          a.a0 * basis.v0.z + 2.0 * std::real(cp * basis.v_plus.z)};
}

Vec3 project_cpmg(const Vec3& m, const Vec3& n_axis) {
  return dot(m, n_axis) * n_axis;
}

PhaseIncrement geometric_phase_increment(const CVec3& v_now, const CVec3& v_next) {
  cdouble ov = inner(v_now, v_next);
  PhaseIncrement p;
  p.near_orthogonal = std::abs(ov) < 1e-6;
  p.gamma = -std::arg(ov);
  return p;
}

PhaseIncrement geometric_phase_increment(const Vec3& v_now, const Vec3& v_next) {
  PhaseIncrement p;
  p.gamma = 0.0;  // real overlap has no phase
  p.near_orthogonal = std::abs(dot(v_now, v_next)) < 1e-6;
  return p;
}

BasisTracker::Step BasisTracker::next(const EffectiveRotation& er) {
  Step s;
  if (er.degenerate_axis) {
    if (!have_prev_) {
      throw std::domain_error("BasisTracker: first cycle has a degenerate axis");
    }
    s.basis = prev_;
    s.flipped = flipped_;
    s.degenerate = true;
    return s;
  }
  EigenBasis b = eigenbasis(er);
  if (flipped_) b = flip(b);
  if (have_prev_ && dot(b.v0, prev_.v0) < 0.0) {
    b = flip(b);
    flipped_ = !flipped_;
    ++flip_count_;
    s.flip_event = true;
  }
  prev_ = b;
  have_prev_ = true;
  s.basis = b;
  s.flipped = flipped_;
  return s;
}

}  // namespace cpmg
