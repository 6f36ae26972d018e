#include "cpmg/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "cpmg/version.hpp"

namespace cpmg {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double cap_value(double v, bool* capped) {
  if (std::isnan(v)) {
    if (capped) *capped = true;
    return kValueCap;
  }
  if (v > kValueCap) {
    if (capped) *capped = true;
    return kValueCap;
  }
  if (v < -kValueCap) {
    if (capped) *capped = true;
    return -kValueCap;
  }
  return v;
}

namespace {

void open_out(std::ofstream& out, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  out.open(file, std::ios::binary);  // binary: byte-identical across platforms
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
}

}  // namespace

bool write_csv(const std::filesystem::path& file, const CsvTable& table) {
  bool capped = false;
  std::string body;
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::invalid_argument("write_csv: row width mismatch");
    }
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) body.push_back(',');
      body += format_double(cap_value(row[i], &capped));
    }
    body.push_back('\n');
  }
  std::ofstream out;
  open_out(out, file);
  for (const auto& c : table.comments) out << "# " << c << "\n";
  if (capped) out << "# note: non-finite or oversized values clamped to +-1e9\n";
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << "\n" << body;
  return capped;
}

CsvTable read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open for reading: " + file.string());
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      size_t off = line.size() > 1 && line[1] == ' ' ? 2 : 1;
      t.comments.push_back(line.substr(off));
      continue;
    }
    std::vector<std::string> cells;
    size_t pos = 0;
    while (pos <= line.size()) {
      size_t c = line.find(',', pos);
      if (c == std::string::npos) c = line.size();
      cells.push_back(line.substr(pos, c - pos));
      pos = c + 1;
    }
    if (!have_header) {
      t.columns = cells;
      have_header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      double v = 0.0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw std::runtime_error("bad numeric cell '" + cell + "' in " + file.string());
      }
      row.push_back(v);
    }
    if (row.size() != t.columns.size()) {
      throw std::runtime_error("row width mismatch in " + file.string());
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw std::runtime_error("missing header in " + file.string());
  return t;
}

bool write_map_csv(const std::filesystem::path& file, const ScalarMap& map) {
  CsvTable t;
  auto axis_line = [](const char* which, const MapAxis& a) {
    std::string s = std::string(which) + " " + a.name + " " + format_double(a.lo) + " " +
                    format_double(a.hi) + " " + std::to_string(a.count);
    if (a.log_scale) s += " log";
    return s;
  };
  t.comments.push_back("map " + map.quantity);
  t.comments.push_back(axis_line("x-axis", map.x));
  t.comments.push_back(axis_line("y-axis", map.y));
  t.columns = {map.x.name, map.y.name, map.quantity};
  t.rows.reserve(map.values.size());
  for (int iy = 0; iy < map.y.count; ++iy) {
    for (int ix = 0; ix < map.x.count; ++ix) {
      t.rows.push_back({map.x.value(ix), map.y.value(iy), map.at(ix, iy)});
    }
  }
  return write_csv(file, t);
}

uint64_t fnv1a64(const void* data, size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ull;
  for (size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t fnv1a64_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for hashing: " + file.string());
  uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

ManifestWriter::ManifestWriter(std::filesystem::path out_dir, nlohmann::json config)
    : out_dir_(std::move(out_dir)), config_(std::move(config)), notes_(nlohmann::json::object()) {
  std::filesystem::create_directories(out_dir_);
}

void ManifestWriter::add_output(const std::filesystem::path& file) { outputs_.push_back(file); }

void ManifestWriter::note(const std::string& key, const nlohmann::json& value) {
  notes_[key] = value;
}

std::filesystem::path ManifestWriter::finalize(double wall_ms) {
  nlohmann::json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  auto now = std::chrono::system_clock::now();
  m["generated_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  m["wall_ms"] = wall_ms;
  m["config"] = config_;
  if (!notes_.empty()) m["notes"] = notes_;
  m["value_cap"] = kValueCap;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& f : outputs_) {
    char hex[17];
    snprintf(hex, sizeof(hex), "%016llx",
             static_cast<unsigned long long>(fnv1a64_file(f)));
    nlohmann::json o;
    o["file"] = std::filesystem::relative(f, out_dir_).generic_string();
    o["fnv1a64"] = hex;
    outs.push_back(o);
  }
  m["outputs"] = outs;
  std::filesystem::path mf = out_dir_ / "manifest.json";
  std::ofstream out;
  open_out(out, mf);
  out << m.dump(2) << "\n";
  return mf;
}

}  // namespace cpmg
