#include "cpmg/field_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cpmg {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// (value, slope)
std::pair<double, double> eval(const FieldProfile::Channel& c, double tau) {
  if (const auto* k = std::get_if<FieldProfile::Constant>(&c)) {
    return {k->value, 0.0};
  }
  if (const auto* l = std::get_if<FieldProfile::Linear>(&c)) {
    return {l->start + l->rate * tau, l->rate};
  }
  if (const auto* h = std::get_if<FieldProfile::Harmonic>(&c)) {
    double ph = two_pi * tau / h->period;
    return {h->amplitude * std::sin(ph), h->amplitude * two_pi / h->period * std::cos(ph)};
  }
  const auto& pw = std::get<FieldProfile::PiecewiseLinear>(c);
  const auto& kn = pw.knots;
  if (kn.empty()) throw std::invalid_argument("FieldProfile: empty knot list");
  if (tau <= kn.front().first) return {kn.front().second, 0.0};
  if (tau >= kn.back().first) return {kn.back().second, 0.0};
  auto it = std::upper_bound(kn.begin(), kn.end(), tau,
                             [](double t, const auto& k) { return t < k.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  double slope = (hi.second - lo.second) / (hi.first - lo.first);
  return {lo.second + slope * (tau - lo.first), slope};
}

}  // namespace

FieldProfile FieldProfile::constant(double omega0, double omega1) {
  return FieldProfile(Constant{omega0}, Constant{omega1});
}

FieldProfile FieldProfile::linear(double ramp0, double omega0_start, double omega1) {
  return FieldProfile(Linear{omega0_start, ramp0}, Constant{omega1});
}

FieldProfile FieldProfile::harmonic(double amplitude, double period, double omega1) {
  if (period <= 0.0) throw std::invalid_argument("FieldProfile: period must be positive");
  return FieldProfile(Harmonic{amplitude, period}, Constant{omega1});
}

FieldProfile FieldProfile::bilinear(double start, double peak, double rate_mag, double omega1) {
  if (rate_mag <= 0.0) throw std::invalid_argument("FieldProfile: rate must be positive");
  double half = std::abs(peak - start) / rate_mag;
  PiecewiseLinear pw;
  pw.knots = {{0.0, start}, {half, peak}, {2.0 * half, start}};
  if (half == 0.0) pw.knots = {{0.0, start}};
  return FieldProfile(Channel{std::move(pw)}, Constant{omega1});
}

FieldProfile FieldProfile::tabulated(const std::vector<std::array<double, 3>>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("FieldProfile: need at least two rows");
  PiecewiseLinear w0, w1;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i][0] <= rows[i - 1][0]) {
      throw std::invalid_argument("FieldProfile: tau must be strictly ascending");
    }
    w0.knots.emplace_back(rows[i][0], rows[i][1]);
    w1.knots.emplace_back(rows[i][0], rows[i][2]);
  }
  FieldProfile p(Channel{std::move(w0)}, Channel{std::move(w1)});
  p.tau_min_ = rows.front()[0];
  p.tau_max_ = rows.back()[0];
  return p;
}

ProfileSample FieldProfile::at(double tau) const {
  auto [v0, r0] = eval(omega0_, tau);
  auto [v1, r1] = eval(omega1_, tau);
  return {v0, r0, v1, r1};
}

bool FieldProfile::defined_on(double lo, double hi) const {
  return lo >= tau_min_ && hi <= tau_max_;
}

double FieldProfile::excursion_end() const {
  if (const auto* pw = std::get_if<PiecewiseLinear>(&omega0_)) {
    if (pw->knots.size() >= 2) return pw->knots.back().first;
  }
  return 0.0;
}

}  // namespace cpmg
