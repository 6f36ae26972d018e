#pragma once

#include <array>
#include <limits>
#include <variant>
#include <vector>

namespace cpmg {

// Field values and slopes at a normalized time tau.
struct ProfileSample {
  double omega0 = 0.0;
  double ramp0 = 0.0;
  double omega1 = 1.0;
  double ramp1 = 0.0;
};

// Time-dependent normalized fields omega0(tau), omega1(tau). Piecewise-linear
// channels clamp to their end values outside the knot span; tabulated
// profiles instead restrict the usable domain to the knot span.
class FieldProfile {
 public:
  struct Constant {
    double value = 0.0;
  };
  struct Linear {
    double start = 0.0;
    double rate = 0.0;
  };
  struct Harmonic {
    double amplitude = 0.0;
    double period = 1.0;  // value = amplitude * sin(2 pi tau / period)
  };
  struct PiecewiseLinear {
    std::vector<std::pair<double, double>> knots;  // (tau, value), tau ascending
  };
  using Channel = std::variant<Constant, Linear, Harmonic, PiecewiseLinear>;

  FieldProfile() : omega0_(Constant{0.0}), omega1_(Constant{1.0}) {}
  FieldProfile(Channel omega0, Channel omega1)
      : omega0_(std::move(omega0)), omega1_(std::move(omega1)) {}

  static FieldProfile constant(double omega0, double omega1 = 1.0);
  static FieldProfile linear(double ramp0, double omega0_start = 0.0, double omega1 = 1.0);
  static FieldProfile harmonic(double amplitude, double period, double omega1 = 1.0);
  // Out and back at |rate| = rate_mag: start -> peak -> start, then clamped.
  static FieldProfile bilinear(double start, double peak, double rate_mag, double omega1 = 1.0);
  // rows of (tau, omega0, omega1); tau strictly ascending. The domain is the
  // row span.
  static FieldProfile tabulated(const std::vector<std::array<double, 3>>& rows);

  ProfileSample at(double tau) const;
  bool defined_on(double lo, double hi) const;

  // Total excursion time of a bilinear omega0 channel (tau where it returns
  // to its start); 0 for other shapes.
  double excursion_end() const;

  const Channel& omega0_channel() const { return omega0_; }
  const Channel& omega1_channel() const { return omega1_; }

 private:
  Channel omega0_;
  Channel omega1_;
  double tau_min_ = -std::numeric_limits<double>::infinity();
  double tau_max_ = std::numeric_limits<double>::infinity();
};

}  // namespace cpmg
