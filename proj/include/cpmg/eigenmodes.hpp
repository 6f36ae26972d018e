#pragma once

#include <complex>

#include "cpmg/cycle.hpp"

namespace cpmg {

using cdouble = std::complex<double>;

struct CVec3 {
  cdouble x{};
  cdouble y{};
  cdouble z{};
};

inline CVec3 conj(const CVec3& v) {
  return {std::conj(v.x), std::conj(v.y), std::conj(v.z)};
}

inline CVec3 operator*(cdouble s, const CVec3& v) { return {s * v.x, s * v.y, s * v.z}; }

// <a|b> = sum conj(a_i) b_i
inline cdouble inner(const CVec3& a, const CVec3& b) {
  return std::conj(a.x) * b.x + std::conj(a.y) * b.y + std::conj(a.z) * b.z;
}

inline cdouble inner(const CVec3& a, const Vec3& b) {
  return std::conj(a.x) * b.x + std::conj(a.y) * b.y + std::conj(a.z) * b.z;
}

// Eigenvectors of the cycle propagator: v0 along the rotation axis
// (eigenvalue 1) and v_plus with eigenvalue exp(-i alpha) per cycle.
// v_minus = conj(v_plus) carries exp(+i alpha). Orthonormal under inner().
struct EigenBasis {
  Vec3 v0{0.0, 0.0, 1.0};
  CVec3 v_plus{};

  CVec3 v_minus() const { return conj(v_plus); }
};

// Throws std::domain_error when the rotation axis is degenerate.
EigenBasis eigenbasis(const EffectiveRotation& er);

// Projections of a magnetization vector onto the basis. a0 is real for real
// input; a_minus = conj(a_plus) is implied and not stored.
struct ModeAmplitudes {
  double a0 = 0.0;
  cdouble a_plus{};

  // Transverse (CP) content; a0^2 + cp^2 = |M|^2.
  double cp_magnitude() const { return std::sqrt(2.0) * std::abs(a_plus); }
};

ModeAmplitudes decompose(const Vec3& m, const EigenBasis& basis);

// M after n cycles of the fixed rotation with angle alpha:
// sum_k a_k exp(-i k n alpha) v_k.
Vec3 reconstruct(const ModeAmplitudes& a, const EigenBasis& basis, int n, double alpha);

// Component along the axis times the axis (the part that survives CPMG
// averaging).
Vec3 project_cpmg(const Vec3& m, const Vec3& n_axis);

// Geometric phase picked up when the basis moves between cycles:
// gamma = -Im ln <v_now | v_next>. near_orthogonal flags |<.|.>| < 1e-6,
// where the adiabatic picture has broken down.
struct PhaseIncrement {
  double gamma = 0.0;
  bool near_orthogonal = false;
};

PhaseIncrement geometric_phase_increment(const CVec3& v_now, const CVec3& v_next);
// k = 0 overload: real axis vectors give exactly zero phase.
PhaseIncrement geometric_phase_increment(const Vec3& v_now, const Vec3& v_next);

// Sign-consistent eigenbasis along a sequence of cycles. The canonical axis
// can jump sign between cycles (the angle folds at pi); the tracker flips the
// basis back so mode amplitudes stay continuous. Degenerate cycles reuse the
// previous basis.
class BasisTracker {
 public:
  struct Step {
    EigenBasis basis;
    bool flipped = false;     // basis is negated relative to canonical
    bool flip_event = false;  // the sign jump happened at this step
    bool degenerate = false;  // axis carried over from the previous step
  };

  // Throws std::domain_error if the first step is degenerate.
  Step next(const EffectiveRotation& er);

  int flip_count() const { return flip_count_; }

 private:
  bool have_prev_ = false;
  bool flipped_ = false;
  int flip_count_ = 0;
  EigenBasis prev_{};
};

}  // namespace cpmg
