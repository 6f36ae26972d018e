#include "cpmg/solvers.hpp"

#include <cmath>
#include <stdexcept>

namespace cpmg {

namespace {

CycleParams params_at(const FieldProfile& profile, const SequenceTiming& timing, double tau) {
  ProfileSample s = profile.at(tau);
  CycleParams p;
  p.omega0_norm = s.omega0;
  p.omega1_norm = s.omega1;
  p.te_ratio = timing.te_ratio;
  p.pulse_phase = timing.refocusing_phase;
  p.ramp0 = s.ramp0;
  p.ramp1 = s.ramp1;
  return p;
}

// Shared by direct decomposition, the adiabatic prediction, and the
// continuous solver so all three report amplitudes in the same tracked basis.
struct TraceBuilder {
  BasisTracker tracker;
  bool have_prev = false;
  CVec3 prev_v_plus{};
  double phi_dyn = 0.0;
  double phi_geo = 0.0;
  ModeTrace trace;

  // Returns the tracked basis for the cycle ending at tau; accumulates
  // phases. advance_dynamic is false for the tau = 0 sample (no cycle has
  // run yet).
  BasisTracker::Step step(const EffectiveRotation& er, bool advance_dynamic) {
    BasisTracker::Step st = tracker.next(er);
    if (advance_dynamic && !er.degenerate_axis) {
      phi_dyn += (st.flipped ? -1.0 : 1.0) * er.alpha;
    }
    if (have_prev) {
      PhaseIncrement inc = geometric_phase_increment(prev_v_plus, st.basis.v_plus);
      phi_geo += inc.gamma;
      if (inc.near_orthogonal) ++trace.near_orthogonal_count;
    }
    prev_v_plus = st.basis.v_plus;
    have_prev = true;
    return st;
  }

  void record(int cycle, double tau, double omega0, const ModeAmplitudes& a, double adiab,
              const BasisTracker::Step& st) {
    ModeSample s;
    s.cycle = cycle;
    s.tau = tau;
    s.omega0 = omega0;
    s.a0 = a.a0;
    s.cp_magnitude = a.cp_magnitude();
    s.adiabaticity = adiab;
    s.phi_dyn = phi_dyn;
    s.phi_geo = phi_geo;
    s.flip_event = st.flip_event;
    s.degenerate = st.degenerate;
    trace.samples.push_back(s);
  }

  ModeTrace finish() {
    trace.flip_count = tracker.flip_count();
    return std::move(trace);
  }
};

}  // namespace

ModeTrace decompose_train(const EchoTrain& train, const FieldProfile& profile,
                          const SequenceTiming& timing) {
  TraceBuilder tb;
  for (const EchoRecord& e : train.echoes) {
    CycleParams p = params_at(profile, timing, e.tau);
    EffectiveRotation er = effective_rotation(p);
    BasisTracker::Step st = tb.step(er, e.index > 0);
    ModeAmplitudes a = decompose(e.m, st.basis);
    tb.record(e.index, e.tau, p.omega0_norm, a, adiabaticity(p), st);
  }
  return tb.finish();
}

AdiabaticPrediction adiabatic_predict(const FieldProfile& profile, const SequenceTiming& timing,
                                      const Vec3& m_exc) {
  validate(timing);
  if (!profile.defined_on(0.0, static_cast<double>(timing.echo_count))) {
    throw std::invalid_argument("adiabatic_predict: profile not defined on [0, echo_count]");
  }
  AdiabaticPrediction out;
  out.train.m_exc = m_exc;

  TraceBuilder tb;
  ModeAmplitudes a1;  // frozen after the first cycle
  double phi_geo_base = 0.0;  // transport starts at the tau = 1 basis
  const cdouble i_unit{0.0, 1.0};
  for (int k = 0; k <= timing.echo_count; ++k) {
    double tau = static_cast<double>(k);
    CycleParams p = params_at(profile, timing, tau);
    EffectiveRotation er = effective_rotation(p);
    BasisTracker::Step st = tb.step(er, k > 0);
    if (k <= 1) {
      a1 = decompose(m_exc, st.basis);
      phi_geo_base = tb.phi_geo;
    }
    cdouble cp = a1.a_plus * std::exp(i_unit * (tb.phi_geo - phi_geo_base - tb.phi_dyn));
    Vec3 m{a1.a0 * st.basis.v0.x + 2.0 * std::real(cp * st.basis.v_plus.x),
           a1.a0 * st.basis.v0.y + 2.0 * std::real(cp * st.basis.v_plus.y),
           a1.a0 * st.basis.v0.z + 2.0 * std::real(cp * st.basis.v_plus.z)};
    ModeAmplitudes ak;
    ak.a0 = a1.a0;
    ak.a_plus = cp;
    tb.record(k, tau, p.omega0_norm, ak, adiabaticity(p), st);
    out.train.echoes.push_back({k, tau, p.omega0_norm, m});
  }
  out.trace = tb.finish();
  return out;
}

FirstOrderPoint first_order_predict(const FieldProfile& profile, const SequenceTiming& timing,
                                    double tau) {
  CycleParams p = params_at(profile, timing, tau);
  EffectiveRotation er = effective_rotation(p);
  if (er.degenerate_axis) {
    throw std::domain_error("first_order_predict: degenerate axis");
  }
  double inv = signed_inverse_adiabaticity(p);
  double de = azimuthal_correction(p);
  double denom = std::sqrt(1.0 + inv * inv);
  FirstOrderPoint fp;
  fp.mx = (std::cos(de) * er.n_perp - inv * std::sin(de)) / denom;
  fp.my = (std::sin(de) * er.n_perp + inv * std::cos(de)) / denom;
  return fp;
}

ModeTrace continuous_mode_evolution(const FieldProfile& profile, const SequenceTiming& timing,
                                    const Vec3& m0, double step) {
  validate(timing);
  double n_per_unit = 1.0 / step;
  int steps_per_cycle = static_cast<int>(std::lround(n_per_unit));
  if (steps_per_cycle < 1 || std::abs(steps_per_cycle * step - 1.0) > 1e-12) {
    throw std::invalid_argument("continuous_mode_evolution: step must divide 1");
  }
  if (norm(m0) < 1e-12) {
    throw std::invalid_argument("continuous_mode_evolution: zero initial magnetization");
  }
  if (!profile.defined_on(0.0, static_cast<double>(timing.echo_count))) {
    throw std::invalid_argument("continuous_mode_evolution: profile not defined on range");
  }

  auto generator = [&](double tau) -> Vec3 {
    EffectiveRotation er = effective_rotation(params_at(profile, timing, tau));
    if (er.degenerate_axis) return {0.0, 0.0, 0.0};
    return er.alpha * er.axis();
  };
  auto deriv = [&](double tau, const Vec3& n) -> Vec3 { return cross(generator(tau), n); };

  TraceBuilder tb;
  Vec3 n = normalized(m0);

  auto sample = [&](int cycle, double tau) {
    CycleParams p = params_at(profile, timing, tau);
    EffectiveRotation er = effective_rotation(p);
    BasisTracker::Step st = tb.step(er, cycle > 0);
    ModeAmplitudes a = decompose(n, st.basis);
    tb.record(cycle, tau, p.omega0_norm, a, adiabaticity(p), st);
  };

  sample(0, 0.0);
  for (int k = 0; k < timing.echo_count; ++k) {
    for (int i = 0; i < steps_per_cycle; ++i) {
      double tau = k + i * step;
      Vec3 k1 = deriv(tau, n);
      Vec3 k2 = deriv(tau + 0.5 * step, n + 0.5 * step * k1);
      Vec3 k3 = deriv(tau + 0.5 * step, n + 0.5 * step * k2);
      Vec3 k4 = deriv(tau + step, n + step * k3);
      n = n + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      double nn = norm(n);
      if (std::abs(nn - 1.0) > 1e-6) ++tb.trace.renorm_warnings;
      n = {n.x / nn, n.y / nn, n.z / nn};
    }
    sample(k + 1, static_cast<double>(k + 1));
  }
  return tb.finish();
}

std::vector<AdiabaticitySample> adiabaticity_trace(const FieldProfile& profile, double te_ratio,
                                                   double refocusing_phase, double tau_lo,
                                                   double tau_hi, int samples_per_spacing) {
  if (samples_per_spacing < 1) {
    throw std::invalid_argument("adiabaticity_trace: samples_per_spacing must be >= 1");
  }
  std::vector<AdiabaticitySample> out;
  int n = static_cast<int>(std::lround((tau_hi - tau_lo) * samples_per_spacing));
  for (int i = 0; i <= n; ++i) {
    double tau = tau_lo + static_cast<double>(i) / samples_per_spacing;
    ProfileSample s = profile.at(tau);
    CycleParams p{s.omega0, s.omega1, te_ratio, refocusing_phase, s.ramp0, s.ramp1};
    out.push_back({tau, s.omega0, s.omega1, adiabaticity(p)});
  }
  return out;
}

double min_adiabaticity(const FieldProfile& profile, double te_ratio, double refocusing_phase,
                        double tau_lo, double tau_hi, int samples_per_spacing) {
  double best = std::numeric_limits<double>::infinity();
  for (const AdiabaticitySample& s :
       adiabaticity_trace(profile, te_ratio, refocusing_phase, tau_lo, tau_hi,
                          samples_per_spacing)) {
    if (s.value < best) best = s.value;
  }
  return best;
}

namespace {

RegionSegmentation segment_values(const std::vector<double>& xs, const std::vector<double>& vals,
                                  double threshold, std::string axis) {
  RegionSegmentation seg;
  seg.threshold = threshold;
  seg.axis = std::move(axis);
  if (xs.empty()) return seg;
  bool cur = vals[0] >= threshold;
  double start = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) {
    bool a = vals[i] >= threshold;
    if (a != cur) {
      double xm = 0.5 * (xs[i - 1] + xs[i]);
      seg.regions.push_back({start, xm, cur});
      start = xm;
      cur = a;
    }
  }
  seg.regions.push_back({start, xs.back(), cur});
  return seg;
}

}  // namespace

RegionSegmentation segment_regions(double te_ratio, double omega1, double ramp0, double omega0_lo,
                                   double omega0_hi, double threshold, int samples) {
  if (samples < 2) throw std::invalid_argument("segment_regions: need at least 2 samples");
  std::vector<double> xs(samples), vals(samples);
  for (int i = 0; i < samples; ++i) {
    double w0 = omega0_lo + (omega0_hi - omega0_lo) * i / (samples - 1);
    CycleParams p{w0, omega1, te_ratio, 0.0, ramp0, 0.0};
    xs[i] = w0;
    vals[i] = adiabaticity(p);
  }
  return segment_values(xs, vals, threshold, "omega0");
}

RegionSegmentation segment_regions(const FieldProfile& profile, double te_ratio,
                                   double refocusing_phase, double tau_lo, double tau_hi,
                                   double threshold, int samples_per_spacing) {
  std::vector<AdiabaticitySample> tr =
      adiabaticity_trace(profile, te_ratio, refocusing_phase, tau_lo, tau_hi, samples_per_spacing);
  std::vector<double> xs, vals;
  xs.reserve(tr.size());
  vals.reserve(tr.size());
  for (const auto& s : tr) {
    xs.push_back(s.tau);
    vals.push_back(s.value);
  }
  return segment_values(xs, vals, threshold, "tau");
}

}  // namespace cpmg
