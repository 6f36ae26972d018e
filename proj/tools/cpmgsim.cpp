#include <cstdlib>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpmg/adiabaticity.hpp"
#include "cpmg/eigenmodes.hpp"
#include "cpmg/io.hpp"
#include "cpmg/parallel.hpp"
#include "cpmg/scenarios.hpp"
#include "cpmg/solvers.hpp"
#include "cpmg/version.hpp"

namespace {

constexpr double pi = std::numbers::pi;

using cpmg::ConfigError;
using nlohmann::json;

std::filesystem::path resolve_out(const std::string& cli_out, const json& config) {
  if (!cli_out.empty()) return cli_out;
  if (config.is_object() && config.contains("out")) {
    if (!config["out"].is_string()) throw ConfigError("config.out: expected a string");
    return config["out"].get<std::string>();
  }
  if (const char* env = std::getenv("CPMGSIM_OUT"); env && *env) return env;
  return "out";
}

cpmg::MapAxis parse_axis(const std::string& spec, const std::string& name) {
  // lo:hi:count[:log]
  cpmg::MapAxis a;
  a.name = name;
  std::vector<std::string> parts;
  size_t pos = 0;
  while (pos <= spec.size()) {
    size_t c = spec.find(':', pos);
    if (c == std::string::npos) c = spec.size();
    parts.push_back(spec.substr(pos, c - pos));
    pos = c + 1;
  }
  if (parts.size() < 3 || parts.size() > 4) {
    throw ConfigError("axis spec '" + spec + "': expected lo:hi:count[:log]");
  }
  try {
    a.lo = std::stod(parts[0]);
    a.hi = std::stod(parts[1]);
    a.count = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw ConfigError("axis spec '" + spec + "': bad number");
  }
  if (a.count < 2) throw ConfigError("axis spec '" + spec + "': count must be >= 2");
  if (parts.size() == 4) {
    if (parts[3] != "log") throw ConfigError("axis spec '" + spec + "': trailing token must be 'log'");
    a.log_scale = true;
    if (a.lo <= 0.0 || a.hi <= 0.0) throw ConfigError("axis spec '" + spec + "': log axis needs positive bounds");
  }
  return a;
}

void print_cycle(const cpmg::CycleParams& p, bool as_json) {
  cpmg::EffectiveRotation er = cpmg::effective_rotation(p);
  cpmg::EffectiveRotation chk = cpmg::effective_rotation_oracle(p);
  cpmg::CriticalRates cr = cpmg::critical_rates(p);
  double adiab = cpmg::adiabaticity(p);
  double de = cpmg::azimuthal_correction(p);
  auto lv = cpmg::energy_levels(p);
  double theta_v = er.degenerate_axis ? std::numeric_limits<double>::quiet_NaN()
                                      : std::atan2(er.n_perp, er.n_z);
  double check = std::abs(er.alpha - chk.alpha);
  if (as_json) {
    json j;
    j["alpha"] = er.alpha;
    j["n_perp"] = er.n_perp;
    j["n_z"] = er.n_z;
    j["epsilon"] = er.epsilon;
    j["theta"] = theta_v;
    j["degenerate_axis"] = er.degenerate_axis;
    j["levels"] = lv;
    j["nu0_crit"] = cpmg::cap_value(cr.nu0_crit);
    j["nu1_crit"] = cpmg::cap_value(cr.nu1_crit);
    j["adiabaticity"] = cpmg::cap_value(adiab);
    j["delta_epsilon"] = de;
    j["composition_check"] = check;
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << "alpha            " << cpmg::format_double(er.alpha) << "\n"
            << "n_perp           " << cpmg::format_double(er.n_perp) << "\n"
            << "n_z              " << cpmg::format_double(er.n_z) << "\n"
            << "epsilon          " << cpmg::format_double(er.epsilon) << "\n"
            << "theta            " << cpmg::format_double(theta_v) << "\n"
            << "degenerate_axis  " << (er.degenerate_axis ? "yes" : "no") << "\n"
            << "levels           " << cpmg::format_double(lv[0]) << " 0 "
            << cpmg::format_double(lv[2]) << "\n"
            << "nu0_crit         " << cpmg::format_double(cpmg::cap_value(cr.nu0_crit)) << "\n"
            << "nu1_crit         " << cpmg::format_double(cpmg::cap_value(cr.nu1_crit)) << "\n"
            << "adiabaticity     " << cpmg::format_double(cpmg::cap_value(adiab)) << "\n"
            << "delta_epsilon    " << cpmg::format_double(de) << "\n"
            << "composition_check " << cpmg::format_double(check) << "\n";
}

struct SimulateArgs {
  std::string config;
  double linear_rate = 0.0;
  bool linear_set = false;
  double omega0_start = 0.0;
  double te_ratio = 8.0;
  int echoes = 100;
  double t90_ratio = 0.5;
  bool no_trace = false;
};

void run_simulate(const SimulateArgs& a, const std::string& cli_out, int threads, int substeps) {
  json cfg = json::object();
  cpmg::FieldProfile profile;
  cpmg::SequenceTiming timing;
  json resolved;
  if (!a.config.empty()) {
    if (a.linear_set) throw ConfigError("--linear cannot be combined with --config");
    cfg = cpmg::load_json_file(a.config);
    cpmg::check_keys(cfg, {"profile", "timing", "out"}, "config");
    if (!cfg.contains("profile")) throw ConfigError("config: missing 'profile'");
    profile = cpmg::profile_from_json(cfg["profile"]);
    timing = cpmg::timing_from_json(cfg.contains("timing") ? cfg["timing"] : json::object());
    resolved["profile"] = cfg["profile"];
    resolved["timing"] = cfg.contains("timing") ? cfg["timing"] : json::object();
  } else {
    profile = cpmg::FieldProfile::linear(a.linear_set ? a.linear_rate : 0.0, a.omega0_start);
    timing = cpmg::cpmg_timing(a.te_ratio, a.echoes);
    timing.t90_ratio = a.t90_ratio;
    resolved["profile"] = {{"omega0",
                            {{"type", "linear"},
                             {"start", a.omega0_start},
                             {"rate", a.linear_set ? a.linear_rate : 0.0}}},
                           {"omega1", {{"type", "constant"}, {"value", 1.0}}}};
    resolved["timing"] = {{"te_ratio", a.te_ratio},
                          {"t90_ratio", a.t90_ratio},
                          {"echo_count", a.echoes},
                          {"excitation_phase_deg", 90.0},
                          {"refocusing_phase_deg", 0.0}};
  }
  resolved["substeps"] = substeps;
  resolved["threads"] = threads;

  auto t0 = std::chrono::steady_clock::now();
  cpmg::EchoTrain train = cpmg::simulate_cpmg(profile, timing, substeps);
  cpmg::ManifestWriter mw(resolve_out(cli_out, cfg), resolved);
  cpmg::CsvTable tab;
  tab.columns = {"echo_index", "tau", "omega0_norm", "Mx", "My", "Mz"};
  for (const auto& e : train.echoes) {
    tab.rows.push_back({static_cast<double>(e.index), e.tau, e.omega0, e.m.x, e.m.y, e.m.z});
  }
  auto ftrain = mw.out_dir() / "train.csv";
  cpmg::write_csv(ftrain, tab);
  mw.add_output(ftrain);
  if (!a.no_trace) {
    cpmg::ModeTrace trace = cpmg::decompose_train(train, profile, timing);
    cpmg::CsvTable tt;
    tt.columns = {"cycle", "tau", "omega0_norm", "a0", "cp_magnitude", "adiabaticity"};
    for (const auto& s : trace.samples) {
      tt.rows.push_back({static_cast<double>(s.cycle), s.tau, s.omega0, s.a0, s.cp_magnitude,
                         s.adiabaticity});
    }
    auto fmodes = mw.out_dir() / "modes.csv";
    cpmg::write_csv(fmodes, tt);
    mw.add_output(fmodes);
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  mw.finalize(ms);
  std::cout << "wrote " << (mw.out_dir() / "train.csv").string() << " (" << train.echoes.size()
            << " rows)\n";
}

struct DecomposeArgs {
  std::string config;
  std::string train_file;
};

void run_decompose(const DecomposeArgs& a, const std::string& cli_out) {
  if (a.config.empty()) throw ConfigError("decompose: --config is required");
  if (a.train_file.empty()) throw ConfigError("decompose: --train is required");
  json cfg = cpmg::load_json_file(a.config);
  cpmg::check_keys(cfg, {"profile", "timing", "out"}, "config");
  if (!cfg.contains("profile")) throw ConfigError("config: missing 'profile'");
  cpmg::FieldProfile profile = cpmg::profile_from_json(cfg["profile"]);
  cpmg::SequenceTiming timing =
      cpmg::timing_from_json(cfg.contains("timing") ? cfg["timing"] : json::object());

  cpmg::CsvTable in = cpmg::read_csv(a.train_file);
  auto col = [&](const std::string& name) {
    for (size_t i = 0; i < in.columns.size(); ++i) {
      if (in.columns[i] == name) return i;
    }
    throw ConfigError("train file: missing column '" + name + "'");
  };
  size_t ci = col("echo_index"), ct = col("tau"), cw = col("omega0_norm");
  size_t cx = col("Mx"), cy = col("My"), cz = col("Mz");
  cpmg::EchoTrain train;
  for (const auto& r : in.rows) {
    cpmg::EchoRecord e;
    e.index = static_cast<int>(r[ci]);
    e.tau = r[ct];
    e.omega0 = r[cw];
    e.m = {r[cx], r[cy], r[cz]};
    train.echoes.push_back(e);
  }
  if (train.echoes.empty()) throw ConfigError("train file: no rows");
  train.m_exc = train.echoes.front().m;

  auto t0 = std::chrono::steady_clock::now();
  cpmg::ModeTrace trace = cpmg::decompose_train(train, profile, timing);
  json resolved;
  resolved["profile"] = cfg["profile"];
  resolved["timing"] = cfg.contains("timing") ? cfg["timing"] : json::object();
  resolved["train"] = a.train_file;
  cpmg::ManifestWriter mw(resolve_out(cli_out, cfg), resolved);
  cpmg::CsvTable tt;
  tt.columns = {"cycle", "tau", "omega0_norm", "a0", "cp_magnitude", "adiabaticity"};
  for (const auto& s : trace.samples) {
    tt.rows.push_back({static_cast<double>(s.cycle), s.tau, s.omega0, s.a0, s.cp_magnitude,
                       s.adiabaticity});
  }
  auto fmodes = mw.out_dir() / "modes.csv";
  cpmg::write_csv(fmodes, tt);
  mw.add_output(fmodes);
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  mw.finalize(ms);
  std::cout << "wrote " << fmodes.string() << " (" << trace.samples.size() << " rows, "
            << trace.flip_count << " axis flips)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPMG echo-train dynamics under drifting fields: per-cycle effective rotations, "
               "eigenmode decomposition, adiabaticity analysis, and scenario runners"};
  app.set_version_flag("--version", std::string(cpmg::kToolName) + " " + cpmg::kToolVersion);
  app.require_subcommand(1);

  std::string out;
  int threads = 0;
  int substeps = 4;
  bool full_scale = false;
  app.add_option("--out", out, "output directory (default: $CPMGSIM_OUT, else ./out)");
  app.add_option("--threads", threads, "worker threads, 0 = hardware count");
  app.add_option("--substeps", substeps, "integration substeps per pulse/free interval")
      ->check(CLI::PositiveNumber);
  app.add_flag("--full-scale", full_scale, "use the large preset grid sizes");
  app.fallthrough();

  // cycle
  auto* c_cycle = app.add_subcommand("cycle", "effective rotation of a single cycle");
  cpmg::CycleParams cyc;
  double cyc_phase_deg = 0.0;
  bool cyc_json = false;
  c_cycle->add_option("--omega0", cyc.omega0_norm, "offset, units of nominal omega1")->required();
  c_cycle->add_option("--omega1", cyc.omega1_norm, "pulse amplitude, nominal = 1");
  c_cycle->add_option("--te-ratio", cyc.te_ratio, "echo spacing / pulse duration")->required();
  c_cycle->add_option("--phase-deg", cyc_phase_deg, "refocusing pulse phase, degrees");
  c_cycle->add_option("--ramp0", cyc.ramp0, "d(omega0)/dtau");
  c_cycle->add_option("--ramp1", cyc.ramp1, "d(omega1)/dtau");
  c_cycle->add_flag("--json", cyc_json, "emit JSON");

  // adiabaticity
  auto* c_adiab = app.add_subcommand("adiabaticity", "adiabaticity along an offset sweep");
  double ad_te = 15.0, ad_w1 = 1.0, ad_ramp = 1e-3, ad_lo = 0.0, ad_hi = 4.0, ad_thresh = 2.0;
  int ad_count = 2001;
  c_adiab->add_option("--te-ratio", ad_te, "echo spacing / pulse duration");
  c_adiab->add_option("--omega1", ad_w1, "pulse amplitude");
  c_adiab->add_option("--ramp0", ad_ramp, "offset sweep rate per echo spacing")->required();
  c_adiab->add_option("--omega0-min", ad_lo, "sweep start");
  c_adiab->add_option("--omega0-max", ad_hi, "sweep end");
  c_adiab->add_option("--count", ad_count, "samples across the sweep")->check(CLI::Range(2, 10000000));
  c_adiab->add_option("--threshold", ad_thresh, "adiabatic/non-adiabatic threshold");

  // simulate
  auto* c_sim = app.add_subcommand("simulate", "integrate an echo train through a field profile");
  SimulateArgs sim;
  c_sim->add_option("--config", sim.config, "JSON file with 'profile' and 'timing'");
  auto* lin = c_sim->add_option("--linear", sim.linear_rate, "linear offset ramp rate");
  c_sim->add_option("--omega0-start", sim.omega0_start, "offset at tau = 0");
  c_sim->add_option("--te-ratio", sim.te_ratio, "echo spacing / pulse duration");
  c_sim->add_option("--echoes", sim.echoes, "number of echoes")->check(CLI::PositiveNumber);
  c_sim->add_option("--t90-ratio", sim.t90_ratio, "excitation/refocusing duration ratio");
  c_sim->add_flag("--no-trace", sim.no_trace, "skip the eigenmode trace output");

  // decompose
  auto* c_dec = app.add_subcommand("decompose", "eigenmode trace of a stored echo train");
  DecomposeArgs dec;
  c_dec->add_option("--config", dec.config, "JSON file with 'profile' and 'timing'")->required();
  c_dec->add_option("--train", dec.train_file, "echo-train CSV (train.csv schema)")->required();

  // scenario
  auto* c_scn = app.add_subcommand("scenario", "run a named study end to end");
  std::string scn_name;
  std::string scn_config;
  bool scn_list = false;
  c_scn->add_option("name", scn_name, "scenario name (see --list)");
  c_scn->add_option("--config", scn_config, "JSON file: {scenario?, out?, threads?, substeps?, full_scale?, params?}");
  c_scn->add_flag("--list", scn_list, "list scenario names and exit");

  // sweep
  auto* c_swp = app.add_subcommand("sweep", "grid evaluation of a per-cycle quantity");
  std::string sw_quantity = "adiabaticity";
  double sw_te = 8.0, sw_w1 = 1.0, sw_phase_deg = 0.0;
  std::string sw_x = "-6:6:1201", sw_y, sw_yname, sw_config;
  c_swp->add_option("--config", sw_config, "JSON sweep spec");
  c_swp->add_option("--quantity", sw_quantity, "adiabaticity, nu0_crit, nu1_crit, alpha, n_perp, n_z");
  c_swp->add_option("--te-ratio", sw_te, "echo spacing / pulse duration");
  c_swp->add_option("--omega1", sw_w1, "pulse amplitude (fixed-omega1 quantities)");
  c_swp->add_option("--phase-deg", sw_phase_deg, "refocusing pulse phase, degrees");
  c_swp->add_option("--x", sw_x, "omega0 axis, lo:hi:count");
  c_swp->add_option("--y", sw_y, "second axis, lo:hi:count[:log]");
  c_swp->add_option("--y-name", sw_yname, "second axis meaning (ramp0 or omega1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_cycle->parsed()) {
      cyc.pulse_phase = cyc_phase_deg * pi / 180.0;
      try {
        print_cycle(cyc, cyc_json);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      return 0;
    }

    if (c_adiab->parsed()) {
      if (ad_ramp == 0.0) throw ConfigError("--ramp0 must be nonzero");
      json cfg = {{"te_ratio", ad_te}, {"omega1", ad_w1},       {"ramp0", ad_ramp},
                  {"omega0_min", ad_lo}, {"omega0_max", ad_hi}, {"count", ad_count},
                  {"threshold", ad_thresh}};
      cpmg::ManifestWriter mw(resolve_out(out, json::object()), cfg);
      auto t0 = std::chrono::steady_clock::now();
      cpmg::CsvTable tab;
      tab.columns = {"omega0_norm", "nu0_crit", "adiabaticity"};
      tab.rows.assign(ad_count, {});
      cpmg::parallel_for(ad_count, threads, [&](int i) {
        double w0 = ad_lo + (ad_hi - ad_lo) * i / (ad_count - 1);
        cpmg::CycleParams p{w0, ad_w1, ad_te, 0.0, ad_ramp, 0.0};
        tab.rows[i] = {w0, cpmg::critical_rates(p).nu0_crit, cpmg::adiabaticity(p)};
      });
      auto fcurve = mw.out_dir() / "adiabaticity_curve.csv";
      cpmg::write_csv(fcurve, tab);
      mw.add_output(fcurve);
      cpmg::RegionSegmentation seg =
          cpmg::segment_regions(ad_te, ad_w1, ad_ramp, ad_lo, ad_hi, ad_thresh, ad_count);
      cpmg::CsvTable rt;
      rt.comments.push_back("intervals classified against adiabaticity threshold " +
                            cpmg::format_double(ad_thresh));
      rt.columns = {"omega0_lo", "omega0_hi", "adiabatic"};
      for (const auto& r : seg.regions) {
        rt.rows.push_back({r.lo, r.hi, r.adiabatic ? 1.0 : 0.0});
      }
      auto freg = mw.out_dir() / "regions.csv";
      cpmg::write_csv(freg, rt);
      mw.add_output(freg);
      double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      mw.finalize(ms);
      for (const auto& r : seg.regions) {
        std::cout << (r.adiabatic ? "adiabatic      " : "non-adiabatic  ")
                  << cpmg::format_double(r.lo) << " .. " << cpmg::format_double(r.hi) << "\n";
      }
      return 0;
    }

    if (c_sim->parsed()) {
      sim.linear_set = lin->count() > 0;
      run_simulate(sim, out, threads, substeps);
      return 0;
    }

    if (c_dec->parsed()) {
      run_decompose(dec, out);
      return 0;
    }

    if (c_scn->parsed()) {
      if (scn_list) {
        for (const auto& n : cpmg::scenario_names()) std::cout << n << "\n";
        return 0;
      }
      json cfg = json::object();
      if (!scn_config.empty()) {
        cfg = cpmg::load_json_file(scn_config);
        cpmg::check_keys(cfg, {"scenario", "out", "threads", "substeps", "full_scale", "params"},
                         "config");
      }
      std::string name = scn_name;
      if (name.empty()) {
        if (!cfg.contains("scenario")) {
          throw ConfigError("scenario: give a name argument or 'scenario' in the config");
        }
        name = cfg["scenario"].get<std::string>();
      } else if (cfg.contains("scenario") && cfg["scenario"].get<std::string>() != name) {
        throw ConfigError("scenario name argument and config 'scenario' disagree");
      }
      cpmg::RunOptions ro;
      ro.out_dir = resolve_out(out, cfg);
      ro.threads = app.count("--threads") ? threads : cfg.value("threads", threads);
      ro.substeps = app.count("--substeps") ? substeps : cfg.value("substeps", substeps);
      ro.full_scale = full_scale || cfg.value("full_scale", false);
      if (cfg.contains("params")) ro.params = cfg["params"];
      cpmg::run_scenario(name, ro);
      std::cout << "scenario " << name << " done, outputs in " << ro.out_dir.string() << "\n";
      return 0;
    }

    if (c_swp->parsed()) {
      cpmg::SweepSpec spec;
      if (!sw_config.empty()) {
        json cfg = cpmg::load_json_file(sw_config);
        cpmg::check_keys(cfg, {"quantity", "te_ratio", "omega1", "pulse_phase_deg", "x", "y",
                               "y_name", "out"},
                         "config");
        spec.quantity = cfg.value("quantity", sw_quantity);
        spec.te_ratio = cfg.value("te_ratio", sw_te);
        spec.omega1 = cfg.value("omega1", sw_w1);
        spec.pulse_phase = cfg.value("pulse_phase_deg", sw_phase_deg) * pi / 180.0;
        auto axis_of = [&](const char* key, const std::string& fallback_name) {
          if (!cfg.contains(key)) throw ConfigError(std::string("config: missing '") + key + "'");
          const json& a = cfg[key];
          cpmg::check_keys(a, {"name", "lo", "hi", "count", "log"}, std::string("config.") + key);
          cpmg::MapAxis ax;
          ax.name = a.value("name", fallback_name);
          if (!a.contains("lo") || !a.contains("hi") || !a.contains("count")) {
            throw ConfigError(std::string("config.") + key + ": needs lo, hi, count");
          }
          ax.lo = a["lo"].get<double>();
          ax.hi = a["hi"].get<double>();
          ax.count = a["count"].get<int>();
          ax.log_scale = a.value("log", false);
          return ax;
        };
        spec.x = axis_of("x", "omega0_norm");
        spec.y = axis_of("y", spec.quantity == "adiabaticity" ? "ramp0" : "omega1_norm");
        cpmg::RunOptions ro;
        ro.out_dir = resolve_out(out, cfg);
        ro.threads = threads;
        cpmg::run_sweep(spec, ro);
        std::cout << "sweep " << spec.quantity << " done, outputs in " << ro.out_dir.string()
                  << "\n";
        return 0;
      }
      spec.quantity = sw_quantity;
      spec.te_ratio = sw_te;
      spec.omega1 = sw_w1;
      spec.pulse_phase = sw_phase_deg * pi / 180.0;
      spec.x = parse_axis(sw_x, "omega0_norm");
      std::string yname = sw_yname;
      if (yname.empty()) yname = sw_quantity == "adiabaticity" ? "ramp0" : "omega1_norm";
      if (yname != "ramp0" && yname != "omega1_norm" && yname != "omega1") {
        throw ConfigError("--y-name must be ramp0 or omega1");
      }
      if (sw_y.empty()) {
        sw_y = sw_quantity == "adiabaticity" ? "1e-5:1e-1:81:log" : "0.05:4:80";
      }
      spec.y = parse_axis(sw_y, yname == "omega1" ? "omega1_norm" : yname);
      cpmg::RunOptions ro;
      ro.out_dir = resolve_out(out, json::object());
      ro.threads = threads;
      cpmg::run_sweep(spec, ro);
      std::cout << "sweep " << spec.quantity << " done, outputs in " << ro.out_dir.string() << "\n";
      return 0;
    }

    throw ConfigError("no subcommand selected");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
