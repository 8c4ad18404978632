#pragma once

// Serialisation of snapshots, logs and reports (CSV and JSON), and the run
// manifest with SHA-256 digests of every written file.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "mesa/diagnostics.hpp"
#include "mesa/hele_shaw.hpp"
#include "mesa/sweep.hpp"

namespace mesa::io {

using nlohmann::json;

/// `x,n,p` or `x,y,n,p`, one row per cell, 17 significant digits.
std::string field_csv(const Field& n, const Field& p);
/// `t,a,b,p_center,da_dt,db_dt`.
std::string front_csv(const FrontTrajectory& traj);
std::string sweep_csv(const SweepReport& report);

json to_json(const ValidationReport& report);
json to_json(const DiagnosticsReport& report);
/// Per-step series are decimated to at most `max_points` entries.
json to_json(const RunLog& log, std::size_t max_points = 20000);
json to_json(const SweepReport& report);

std::string sha256_hex(const std::string& bytes);

/// Output directory plus inventory of what was written into it.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  const std::filesystem::path& path() const { return dir_; }
  /// Writes `name` and records its digest.
  void write(const std::string& name, const std::string& content);
  void write(const std::string& name, const json& content);

  /// manifest.json: config echo, version, timestamp, file digests and status.
  void write_manifest(const std::map<std::string, std::string>& config, const std::string& command,
                      int exit_code, const std::string& error = {});

  struct Entry {
    std::string name;
    std::string sha256;
    std::uintmax_t bytes;
  };
  const std::vector<Entry>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<Entry> files_;
};

/// snapshot_0000.csv style names.
std::string numbered(const std::string& stem, std::size_t index, const std::string& ext);

}  // namespace mesa::io
