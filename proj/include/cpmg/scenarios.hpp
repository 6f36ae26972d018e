#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpmg/adiabaticity.hpp"
#include "cpmg/field_profile.hpp"
#include "cpmg/simulator.hpp"

namespace cpmg {

// Bad user input (config file, CLI values): exits with code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int threads = 0;  // 0 = hardware count
  int substeps = 4;
  bool full_scale = false;
  nlohmann::json params = nlohmann::json::object();
};

std::vector<std::string> scenario_names();

// Runs one named scenario, writing data files plus manifest.json into
// opt.out_dir. Throws ConfigError for unknown names or bad params.
void run_scenario(const std::string& name, const RunOptions& opt);

struct SweepSpec {
  std::string quantity = "adiabaticity";
  double te_ratio = 8.0;
  double omega1 = 1.0;
  double pulse_phase = 0.0;
  MapAxis x;  // omega0
  MapAxis y;  // ramp0 for adiabaticity, omega1 otherwise
};

void run_sweep(const SweepSpec& spec, const RunOptions& opt);

// Shared config plumbing (strict: unknown keys are errors).
nlohmann::json load_json_file(const std::filesystem::path& path);
void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const std::string& scope);
FieldProfile profile_from_json(const nlohmann::json& j);
SequenceTiming timing_from_json(const nlohmann::json& j);
GridQuantity grid_quantity_from_name(const std::string& name);

}  // namespace cpmg
