#include "cpmg/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "cpmg/eigenmodes.hpp"
#include "cpmg/io.hpp"
#include "cpmg/parallel.hpp"
#include "cpmg/solvers.hpp"

namespace cpmg {

namespace {

constexpr double pi = std::numbers::pi;

using nlohmann::json;

// Strict parameter reader: records defaults, rejects unknown keys.
class Params {
 public:
  Params(const json& j, std::string scope) : j_(j), scope_(std::move(scope)) {
    if (!j_.is_object()) throw ConfigError(scope_ + ": expected a JSON object");
  }

  double num(const char* key, double def) {
    mark(key);
    if (!j_.contains(key)) {
      out_[key] = def;
      return def;
    }
    if (!j_[key].is_number()) throw ConfigError(scope_ + "." + key + ": expected a number");
    double v = j_[key].get<double>();
    out_[key] = v;
    return v;
  }

  int integer(const char* key, int def) {
    mark(key);
    if (!j_.contains(key)) {
      out_[key] = def;
      return def;
    }
    if (!j_[key].is_number_integer()) throw ConfigError(scope_ + "." + key + ": expected an integer");
    int v = j_[key].get<int>();
    out_[key] = v;
    return v;
  }

  std::vector<double> list(const char* key, std::vector<double> def) {
    mark(key);
    if (!j_.contains(key)) {
      out_[key] = def;
      return def;
    }
    if (!j_[key].is_array()) throw ConfigError(scope_ + "." + key + ": expected an array");
    std::vector<double> v;
    for (const auto& e : j_[key]) {
      if (!e.is_number()) throw ConfigError(scope_ + "." + key + ": expected numbers");
      v.push_back(e.get<double>());
    }
    out_[key] = v;
    return v;
  }

  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) {
        throw ConfigError(scope_ + ": unknown key '" + it.key() + "'");
      }
    }
  }

  const json& resolved() const { return out_; }

 private:
  void mark(const char* key) { used_.insert(key); }

  const json& j_;
  std::string scope_;
  std::set<std::string> used_;
  json out_ = json::object();
};

int stride_for(size_t rows, int max_rows) {
  if (max_rows <= 0 || rows <= static_cast<size_t>(max_rows)) return 1;
  return static_cast<int>((rows + max_rows - 1) / max_rows);
}

CsvTable train_table(const EchoTrain& t, int stride) {
  CsvTable tab;
  tab.columns = {"echo_index", "tau", "omega0_norm", "Mx", "My", "Mz"};
  size_t n = t.echoes.size();
  for (size_t i = 0; i < n; ++i) {
    if (stride > 1 && i % stride != 0 && i + 1 != n) continue;
    const EchoRecord& e = t.echoes[i];
    tab.rows.push_back({static_cast<double>(e.index), e.tau, e.omega0, e.m.x, e.m.y, e.m.z});
  }
  return tab;
}

CsvTable trace_table(const ModeTrace& t, int stride) {
  CsvTable tab;
  tab.columns = {"cycle", "tau", "omega0_norm", "a0", "cp_magnitude", "adiabaticity"};
  size_t n = t.samples.size();
  for (size_t i = 0; i < n; ++i) {
    if (stride > 1 && i % stride != 0 && i + 1 != n) continue;
    const ModeSample& s = t.samples[i];
    tab.rows.push_back(
        {static_cast<double>(s.cycle), s.tau, s.omega0, s.a0, s.cp_magnitude, s.adiabaticity});
  }
  return tab;
}

std::string label(double v) { return format_double(v); }

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

json base_config(const std::string& name, const RunOptions& opt, const json& params) {
  json c;
  c["scenario"] = name;
  c["threads"] = opt.threads;
  c["substeps"] = opt.substeps;
  c["full_scale"] = opt.full_scale;
  c["params"] = params;
  return c;
}

// ---- cycle-properties -----------------------------------------------------

void scenario_cycle_properties(const RunOptions& opt) {
  Stopwatch sw;
  Params pr(opt.params, "params");
  std::vector<double> tes = pr.list("te_ratios", {8.0, 8.1, 15.0});
  double w0_lo = pr.num("omega0_min", -6.0);
  double w0_hi = pr.num("omega0_max", 6.0);
  int count = pr.integer("count", opt.full_scale ? 4801 : 1201);
  double omega1 = pr.num("omega1", 1.0);
  pr.finish();

  ManifestWriter mw(opt.out_dir, base_config("cycle-properties", opt, pr.resolved()));
  for (double te : tes) {
    CsvTable tab;
    tab.comments.push_back("per-cycle effective rotation and critical rates, te_ratio " +
                           label(te));
    tab.columns = {"omega0_norm", "alpha",    "n_perp",   "n_z",
                   "epsilon",     "theta",    "nu0_crit", "nu1_crit"};
    tab.rows.assign(count, {});
    parallel_for(count, opt.threads, [&](int i) {
      double w0 = w0_lo + (w0_hi - w0_lo) * i / (count - 1);
      CycleParams p{w0, omega1, te, 0.0, 0.0, 0.0};
      EffectiveRotation er = effective_rotation(p);
      CriticalRates cr = critical_rates(p);
      double th = er.degenerate_axis ? std::numeric_limits<double>::quiet_NaN()
                                     : std::atan2(er.n_perp, er.n_z);
      tab.rows[i] = {w0, er.alpha, er.n_perp, er.n_z, er.epsilon, th, cr.nu0_crit, cr.nu1_crit};
    });
    std::filesystem::path f = opt.out_dir / ("cycle_te" + label(te) + ".csv");
    write_csv(f, tab);
    mw.add_output(f);
  }
  mw.finalize(sw.ms());
}

// ---- linear-ramp ----------------------------------------------------------

void scenario_linear_ramp(const RunOptions& opt) {
  Stopwatch sw;
  Params pr(opt.params, "params");
  std::vector<double> rates = pr.list("rates", {1e-5, 1e-4, 1e-3, 3e-3, 1e-2});
  double te = pr.num("te_ratio", 15.0);
  double start = pr.num("omega0_start", 0.0);
  double end = pr.num("omega0_end", 4.2);
  int max_rows = pr.integer("max_rows", opt.full_scale ? 0 : 50000);
  pr.finish();

  ManifestWriter mw(opt.out_dir, base_config("linear-ramp", opt, pr.resolved()));
  for (double rate : rates) {
    if (rate <= 0.0) throw ConfigError("params.rates: rates must be positive");
    int n = static_cast<int>(std::ceil((end - start) / rate));
    FieldProfile profile = FieldProfile::linear(rate, start);
    SequenceTiming timing = cpmg_timing(te, n);
    EchoTrain train = simulate_cpmg(profile, timing, opt.substeps);
    ModeTrace trace = decompose_train(train, profile, timing);
    int stride = stride_for(train.echoes.size(), max_rows);

    std::filesystem::path ft = opt.out_dir / ("train_r" + label(rate) + ".csv");
    write_csv(ft, train_table(train, stride));
    mw.add_output(ft);

    std::filesystem::path fm = opt.out_dir / ("modes_r" + label(rate) + ".csv");
    write_csv(fm, trace_table(trace, stride));
    mw.add_output(fm);

    CsvTable fo;
    fo.comments.push_back("first-order steady-state transverse prediction, ramp " + label(rate));
    fo.columns = {"tau", "omega0_norm", "mx_pred", "my_pred", "inv_adiabaticity"};
    size_t rows = train.echoes.size();
    for (size_t i = 0; i < rows; ++i) {
      if (stride > 1 && i % stride != 0 && i + 1 != rows) continue;
      const EchoRecord& e = train.echoes[i];
      CycleParams p{e.omega0, 1.0, te, 0.0, rate, 0.0};
      EffectiveRotation er = effective_rotation(p);
      if (er.degenerate_axis) continue;
      FirstOrderPoint f = first_order_predict(profile, timing, e.tau);
      fo.rows.push_back({e.tau, e.omega0, f.mx, f.my, signed_inverse_adiabaticity(p)});
    }
    std::filesystem::path ff = opt.out_dir / ("firstorder_r" + label(rate) + ".csv");
    write_csv(ff, fo);
    mw.add_output(ff);
  }
  mw.finalize(sw.ms());
}

// ---- ramp-rate-map --------------------------------------------------------

void scenario_ramp_rate_map(const RunOptions& opt) {
  Stopwatch sw;
  Params pr(opt.params, "params");
  double te = pr.num("te_ratio", 15.0);
  double omega1 = pr.num("omega1", 1.0);
  double w0_lo = pr.num("omega0_min", -2.2);
  double w0_hi = pr.num("omega0_max", 2.2);
  int w0_count = pr.integer("omega0_count", opt.full_scale ? 881 : 221);
  double r_lo = pr.num("ramp_min", 1e-5);
  double r_hi = pr.num("ramp_max", 1e-1);
  int r_count = pr.integer("ramp_count", opt.full_scale ? 161 : 81);
  double threshold = pr.num("threshold", 2.0);
  pr.finish();

  ManifestWriter mw(opt.out_dir, base_config("ramp-rate-map", opt, pr.resolved()));
  MapAxis xa{"omega0_norm", w0_lo, w0_hi, w0_count, false};
  MapAxis ya{"ramp0", r_lo, r_hi, r_count, true};
  ScalarMap map =
      adiabaticity_grid(te, xa, ya, GridQuantity::adiabaticity, omega1, 0.0, opt.threads);
  std::filesystem::path fm = opt.out_dir / "adiabaticity_map.csv";
  write_map_csv(fm, map);
  mw.add_output(fm);

  CsvTable ct;
  ct.comments.push_back("lowest ramp rate at which adiabaticity drops to the threshold");
  ct.comments.push_back("threshold " + label(threshold));
  ct.columns = {"omega0_norm", "ramp_at_threshold"};
  for (auto [x, y] : threshold_contour(map, threshold)) ct.rows.push_back({x, y});
  std::filesystem::path fc = opt.out_dir / "threshold_contour.csv";
  write_csv(fc, ct);
  mw.add_output(fc);

  CsvTable nt;
  nt.comments.push_back("critical offset sweep rate and the ramp giving threshold adiabaticity");
  nt.columns = {"omega0_norm", "nu0_crit", "ramp_star"};
  nt.rows.assign(w0_count, {});
  parallel_for(w0_count, opt.threads, [&](int i) {
    double w0 = xa.value(i);
    CycleParams p{w0, omega1, te, 0.0, 0.0, 0.0};
    double nu = critical_rates(p).nu0_crit;
    nt.rows[i] = {w0, nu, nu / threshold};
  });
  std::filesystem::path fn = opt.out_dir / "critical_rate.csv";
  write_csv(fn, nt);
  mw.add_output(fn);
  mw.finalize(sw.ms());
}

// ---- harmonic -------------------------------------------------------------

void scenario_harmonic(const RunOptions& opt) {
  Stopwatch sw;
  Params pr(opt.params, "params");
  double te = pr.num("te_ratio", 15.0);
  double amp = pr.num("amplitude", 1.4);
  std::vector<double> periods = pr.list("periods", {30000.0, 3002.0, 300.2});
  double n_periods = pr.num("n_periods", 2.0);
  int max_rows = pr.integer("max_rows", opt.full_scale ? 0 : 50000);
  int fine = pr.integer("min_samples_per_cycle", 32);
  pr.finish();

  ManifestWriter mw(opt.out_dir, base_config("harmonic", opt, pr.resolved()));
  CsvTable summary;
  summary.comments.push_back("harmonic offset modulation omega0 = amplitude sin(2 pi tau / P)");
  summary.columns = {"period",          "echoes", "min_adiabaticity",
                     "return_distance", "delta_a0", "max_cp"};
  for (double period : periods) {
    if (period <= 0.0) throw ConfigError("params.periods: periods must be positive");
    int n = static_cast<int>(std::ceil(n_periods * period));
    FieldProfile profile = FieldProfile::harmonic(amp, period);
    SequenceTiming timing = cpmg_timing(te, n);
    EchoTrain train = simulate_cpmg(profile, timing, opt.substeps);
    ModeTrace trace = decompose_train(train, profile, timing);
    int stride = stride_for(train.echoes.size(), max_rows);

    std::filesystem::path ft = opt.out_dir / ("train_P" + label(period) + ".csv");
    write_csv(ft, train_table(train, stride));
    mw.add_output(ft);
    std::filesystem::path fm = opt.out_dir / ("modes_P" + label(period) + ".csv");
    write_csv(fm, trace_table(trace, stride));
    mw.add_output(fm);

    double min_a = min_adiabaticity(profile, te, timing.refocusing_phase, 0.0,
                                    static_cast<double>(n), fine);
    double ret = norm(train.echoes.back().m - train.m_exc);
    double da0 = std::abs(trace.samples.back().a0 - trace.samples.front().a0);
    double max_cp = 0.0;
    for (const auto& s : trace.samples) max_cp = std::max(max_cp, s.cp_magnitude);
    summary.rows.push_back({period, static_cast<double>(n), min_a, ret, da0, max_cp});
  }
  std::filesystem::path fs = opt.out_dir / "summary.csv";
  write_csv(fs, summary);
  mw.add_output(fs);
  mw.finalize(sw.ms());
}

// ---- return-to-origin -----------------------------------------------------

void scenario_return_to_origin(const RunOptions& opt) {
  Stopwatch sw;
  Params pr(opt.params, "params");
  double te = pr.num("te_ratio", 15.0);
  double rate = pr.num("rate", 1e-3);
  double lo = pr.num("omega_min", -4.0);
  double hi = pr.num("omega_max", 4.0);
  int count = pr.integer("count", opt.full_scale ? 240 : 60);
  pr.finish();
  if (rate <= 0.0) throw ConfigError("params.rate: must be positive");

  ManifestWriter mw(opt.out_dir, base_config("return-to-origin", opt, pr.resolved()));
  ScalarMap map;
  map.x = {"omega0_start", lo, hi, count, false};
  map.y = {"omega0_peak", lo, hi, count, false};
  map.quantity = "return_distance";
  map.values.assign(static_cast<size_t>(count) * count, 0.0);
  // companion map with the pure axis mode as the start state; it isolates the
  // reversibility of the CPMG component from path-sensitive CP admixtures
  ScalarMap mode_map = map;
  mode_map.quantity = "return_distance_mode";

  parallel_for(count * count, opt.threads, [&](int idx) {
    int iy = idx / count, ix = idx % count;
    double start = map.x.value(ix);
    double peak = map.y.value(iy);
    double value, mode_value;
    try {
      FieldProfile profile = FieldProfile::bilinear(start, peak, rate);
      int n = std::max(1, static_cast<int>(std::ceil(profile.excursion_end())));
      SequenceTiming timing = cpmg_timing(te, n);
      CycleParams p{start, 1.0, te, timing.refocusing_phase, 0.0, 0.0};
      EffectiveRotation er = effective_rotation(p);
      EigenBasis basis = eigenbasis(er);  // same axis at both ends (clamped profile)
      EchoTrain train = simulate_cpmg(profile, timing, opt.substeps);
      double a0_start = decompose(train.m_exc, basis).a0;
      double a0_end = decompose(train.echoes.back().m, basis).a0;
      value = std::abs(a0_end - a0_start);
      EchoTrain mode_train = simulate_cpmg(profile, timing, basis.v0, opt.substeps);
      mode_value = std::abs(decompose(mode_train.echoes.back().m, basis).a0 - 1.0);
    } catch (const std::domain_error&) {
      value = std::numeric_limits<double>::quiet_NaN();  // singular start point
      mode_value = value;
    }
    map.values[idx] = value;
    mode_map.values[idx] = mode_value;
  });

  std::filesystem::path f = opt.out_dir / "return_map.csv";
  write_map_csv(f, map);
  mw.add_output(f);
  std::filesystem::path fm = opt.out_dir / "return_map_mode.csv";
  write_map_csv(fm, mode_map);
  mw.add_output(fm);
  mw.finalize(sw.ms());
}

// ---- continuous-compare ---------------------------------------------------

void scenario_continuous_compare(const RunOptions& opt) {
  Stopwatch sw;
  Params pr(opt.params, "params");
  double te = pr.num("te_ratio", 8.0);
  std::vector<double> rates = pr.list("rates", {5e-4, 1e-3});
  double start = pr.num("omega0_start", 0.0);
  double end = pr.num("omega0_end", 2.5);
  double step = pr.num("step", 0.125);
  double cmp_lo = pr.num("compare_min", 0.0);
  double cmp_hi = pr.num("compare_max", 1.9);
  int max_rows = pr.integer("max_rows", opt.full_scale ? 0 : 50000);
  pr.finish();

  ManifestWriter mw(opt.out_dir, base_config("continuous-compare", opt, pr.resolved()));
  CsvTable summary;
  summary.comments.push_back("discrete echo-train decomposition vs continuous-limit transport");
  summary.columns = {"rate",        "echoes",      "rms_a0_window", "rms_cp_window",
                     "rms_a0_full", "rms_cp_full", "renorm_warnings"};
  for (double rate : rates) {
    if (rate <= 0.0) throw ConfigError("params.rates: rates must be positive");
    int n = static_cast<int>(std::ceil((end - start) / rate));
    FieldProfile profile = FieldProfile::linear(rate, start);
    SequenceTiming timing = cpmg_timing(te, n);
    EchoTrain train = simulate_cpmg(profile, timing, opt.substeps);
    ModeTrace direct = decompose_train(train, profile, timing);
    ModeTrace cont = continuous_mode_evolution(profile, timing, train.m_exc, step);

    int stride = stride_for(direct.samples.size(), max_rows);
    std::filesystem::path fd = opt.out_dir / ("direct_r" + label(rate) + ".csv");
    write_csv(fd, trace_table(direct, stride));
    mw.add_output(fd);
    std::filesystem::path fc = opt.out_dir / ("continuous_r" + label(rate) + ".csv");
    write_csv(fc, trace_table(cont, stride));
    mw.add_output(fc);

    auto rms = [&](bool window, bool cp) {
      double acc = 0.0;
      int cnt = 0;
      for (size_t i = 0; i < direct.samples.size(); ++i) {
        double w0 = direct.samples[i].omega0;
        if (window && (w0 < cmp_lo || w0 > cmp_hi)) continue;
        double d = cp ? direct.samples[i].cp_magnitude - cont.samples[i].cp_magnitude
                      : direct.samples[i].a0 - cont.samples[i].a0;
        acc += d * d;
        ++cnt;
      }
      return cnt ? std::sqrt(acc / cnt) : 0.0;
    };
    summary.rows.push_back({rate, static_cast<double>(n), rms(true, false), rms(true, true),
                            rms(false, false), rms(false, true),
                            static_cast<double>(cont.renorm_warnings)});
  }
  std::filesystem::path fs = opt.out_dir / "summary.csv";
  write_csv(fs, summary);
  mw.add_output(fs);
  mw.finalize(sw.ms());
}

// ---- singular-points ------------------------------------------------------

void scenario_singular_points(const RunOptions& opt) {
  Stopwatch sw;
  Params pr(opt.params, "params");
  std::vector<double> tes = pr.list("te_ratios", {8.0, 15.0});
  int l_max = pr.integer("l_max", opt.full_scale ? 6 : 3);
  double w1_max = pr.num("omega1_max", 0.0);  // 0 = unbounded
  pr.finish();

  ManifestWriter mw(opt.out_dir, base_config("singular-points", opt, pr.resolved()));
  for (double te : tes) {
    std::vector<SingularPoint> pts = singular_points(
        te, l_max, w1_max > 0.0 ? w1_max : std::numeric_limits<double>::infinity());
    CsvTable tab;
    tab.comments.push_back("parameter points where one cycle is the identity, te_ratio " +
                           label(te));
    tab.columns = {"omega0_norm", "omega1_norm", "l", "m", "residual"};
    for (const auto& p : pts) {
      tab.rows.push_back({p.omega0, p.omega1, static_cast<double>(p.l), static_cast<double>(p.m),
                          p.residual});
    }
    std::filesystem::path f = opt.out_dir / ("singular_te" + label(te) + ".csv");
    write_csv(f, tab);
    mw.add_output(f);
  }
  mw.finalize(sw.ms());
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"cycle-properties", "linear-ramp",      "ramp-rate-map",  "harmonic",
          "return-to-origin", "continuous-compare", "singular-points"};
}

void run_scenario(const std::string& name, const RunOptions& opt) {
  if (name == "cycle-properties") return scenario_cycle_properties(opt);
  if (name == "linear-ramp") return scenario_linear_ramp(opt);
  if (name == "ramp-rate-map") return scenario_ramp_rate_map(opt);
  if (name == "harmonic") return scenario_harmonic(opt);
  if (name == "return-to-origin") return scenario_return_to_origin(opt);
  if (name == "continuous-compare") return scenario_continuous_compare(opt);
  if (name == "singular-points") return scenario_singular_points(opt);
  std::string names;
  for (const auto& n : scenario_names()) names += " " + n;
  throw ConfigError("unknown scenario '" + name + "'; available:" + names);
}

void run_sweep(const SweepSpec& spec, const RunOptions& opt) {
  Stopwatch sw;
  json cfg;
  cfg["sweep"] = {{"quantity", spec.quantity},
                  {"te_ratio", spec.te_ratio},
                  {"omega1", spec.omega1},
                  {"pulse_phase", spec.pulse_phase},
                  {"x", {{"name", spec.x.name},
                         {"lo", spec.x.lo},
                         {"hi", spec.x.hi},
                         {"count", spec.x.count},
                         {"log", spec.x.log_scale}}},
                  {"y", {{"name", spec.y.name},
                         {"lo", spec.y.lo},
                         {"hi", spec.y.hi},
                         {"count", spec.y.count},
                         {"log", spec.y.log_scale}}}};
  cfg["threads"] = opt.threads;
  ManifestWriter mw(opt.out_dir, cfg);
  GridQuantity q = grid_quantity_from_name(spec.quantity);
  ScalarMap map =
      adiabaticity_grid(spec.te_ratio, spec.x, spec.y, q, spec.omega1, spec.pulse_phase,
                        opt.threads);
  std::filesystem::path f = opt.out_dir / ("sweep_" + spec.quantity + ".csv");
  write_map_csv(f, map);
  mw.add_output(f);
  mw.finalize(sw.ms());
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  return j;
}

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const std::string& scope) {
  if (!j.is_object()) throw ConfigError(scope + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) {
      if (it.key() == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError(scope + ": unknown key '" + it.key() + "'");
  }
}

namespace {

FieldProfile::Channel channel_from_json(const json& j, const std::string& scope) {
  if (!j.is_object() || !j.contains("type")) {
    throw ConfigError(scope + ": expected an object with a 'type' key");
  }
  std::string type = j["type"].get<std::string>();
  auto need = [&](const char* key) -> double {
    if (!j.contains(key) || !j[key].is_number()) {
      throw ConfigError(scope + ": '" + type + "' channel needs numeric '" + key + "'");
    }
    return j[key].get<double>();
  };
  if (type == "constant") {
    check_keys(j, {"type", "value"}, scope);
    return FieldProfile::Constant{need("value")};
  }
  if (type == "linear") {
    check_keys(j, {"type", "start", "rate"}, scope);
    return FieldProfile::Linear{need("start"), need("rate")};
  }
  if (type == "harmonic") {
    check_keys(j, {"type", "amplitude", "period"}, scope);
    return FieldProfile::Harmonic{need("amplitude"), need("period")};
  }
  if (type == "bilinear") {
    check_keys(j, {"type", "start", "peak", "rate"}, scope);
    double start = need("start"), peak = need("peak"), rate = need("rate");
    if (rate <= 0.0) throw ConfigError(scope + ": bilinear rate must be positive");
    double half = std::abs(peak - start) / rate;
    FieldProfile::PiecewiseLinear pw;
    pw.knots = {{0.0, start}, {half, peak}, {2.0 * half, start}};
    if (half == 0.0) pw.knots = {{0.0, start}};
    return pw;
  }
  throw ConfigError(scope + ": unknown channel type '" + type + "'");
}

}  // namespace

FieldProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("profile: expected a JSON object");
  if (j.contains("table")) {
    check_keys(j, {"table"}, "profile");
    if (!j["table"].is_array()) throw ConfigError("profile.table: expected an array of rows");
    std::vector<std::array<double, 3>> rows;
    for (const auto& r : j["table"]) {
      if (!r.is_array() || r.size() != 3) {
        throw ConfigError("profile.table: each row must be [tau, omega0, omega1]");
      }
      rows.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>()});
    }
    try {
      return FieldProfile::tabulated(rows);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("profile.table: ") + e.what());
    }
  }
  check_keys(j, {"omega0", "omega1"}, "profile");
  if (!j.contains("omega0")) throw ConfigError("profile: missing 'omega0' channel");
  FieldProfile::Channel w0 = channel_from_json(j["omega0"], "profile.omega0");
  FieldProfile::Channel w1 = FieldProfile::Constant{1.0};
  if (j.contains("omega1")) w1 = channel_from_json(j["omega1"], "profile.omega1");
  return FieldProfile(std::move(w0), std::move(w1));
}

SequenceTiming timing_from_json(const nlohmann::json& j) {
  check_keys(j, {"te_ratio", "t90_ratio", "echo_count", "excitation_phase_deg",
                 "refocusing_phase_deg"},
             "timing");
  SequenceTiming t;
  t.te_ratio = j.value("te_ratio", 8.0);
  t.t90_ratio = j.value("t90_ratio", 0.5);
  t.echo_count = j.value("echo_count", 100);
  t.excitation_phase = j.value("excitation_phase_deg", 90.0) * pi / 180.0;
  t.refocusing_phase = j.value("refocusing_phase_deg", 0.0) * pi / 180.0;
  try {
    validate(t);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("timing: ") + e.what());
  }
  return t;
}

GridQuantity grid_quantity_from_name(const std::string& name) {
  if (name == "adiabaticity") return GridQuantity::adiabaticity;
  if (name == "nu0_crit") return GridQuantity::nu0_crit;
  if (name == "nu1_crit") return GridQuantity::nu1_crit;
  if (name == "alpha") return GridQuantity::alpha;
  if (name == "n_perp") return GridQuantity::n_perp;
  if (name == "n_z") return GridQuantity::n_z;
  throw ConfigError("unknown sweep quantity '" + name +
                    "'; use adiabaticity, nu0_crit, nu1_crit, alpha, n_perp, or n_z");
}

}  // namespace cpmg
