#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpmg/adiabaticity.hpp"

namespace cpmg {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

// Non-finite and huge magnitudes are clamped to +-value_cap before
// serialization (diverging rates would otherwise break downstream parsing).
inline constexpr double kValueCap = 1e9;
double cap_value(double v, bool* capped = nullptr);

struct CsvTable {
  std::vector<std::string> comments;  // emitted as "# ..." lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Writes the table; returns true when any value was clamped (a note line is
// added to the header in that case).
bool write_csv(const std::filesystem::path& file, const CsvTable& table);

// Reads a numeric CSV written by write_csv; comment lines are preserved in
// `comments` (without the leading marker).
CsvTable read_csv(const std::filesystem::path& file);

// Map layout: comment lines describing both axes, then one "x y value" row
// per grid point, y-major.
bool write_map_csv(const std::filesystem::path& file, const ScalarMap& map);

uint64_t fnv1a64(const void* data, size_t size);
uint64_t fnv1a64_file(const std::filesystem::path& file);

// Accumulates outputs of one run and writes manifest.json last, so a
// complete manifest implies a complete run. The timestamp and wall-clock
// fields are the only parts allowed to differ between identical runs.
class ManifestWriter {
 public:
  ManifestWriter(std::filesystem::path out_dir, nlohmann::json config);

  void add_output(const std::filesystem::path& file);
  void note(const std::string& key, const nlohmann::json& value);
  std::filesystem::path finalize(double wall_ms);  // writes manifest.json

  const std::filesystem::path& out_dir() const { return out_dir_; }

 private:
  std::filesystem::path out_dir_;
  nlohmann::json config_;
  nlohmann::json notes_;
  std::vector<std::filesystem::path> outputs_;
};

}  // namespace cpmg
