#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "flux/io.hpp"

namespace flux::harness {

inline constexpr const char* kVersion = "0.1.0";

/// Schema or value problems in a scenario config (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunManifest {
  std::string scenario;
  std::string config_hash;
  std::string version = kVersion;
  double wall_clock_sec = 0.0;
  std::map<std::string, bool> invariants;
  std::map<std::string, double> summary;
  std::vector<std::string> outputs;  ///< paths relative to the run directory
  Json to_json() const;
};

/// FNV-1a over the canonical (key-sorted) dump.
std::string config_hash(const Json& config);

/// Throws ConfigError on any schema violation; no side effects.
void validate_config(const Json& config);

/// Execute a scenario, writing outputs and manifest.json into out_dir
/// (created if needed). Deterministic given config + seed.
RunManifest run_scenario(const Json& config, const std::filesystem::path& out_dir);

struct SweepRow {
  Json value;
  std::string status;  ///< "ok" or the error message
  std::map<std::string, double> summary;
};

struct SweepResult {
  std::string param_path;
  std::vector<SweepRow> rows;
};

/// One run per value, each in out_root/row_NNN; failures are recorded per row
/// and the sweep continues. Writes out_root/sweep.csv and sweep.json.
SweepResult sweep(const Json& base_config, const std::string& param_path,
                  const std::vector<Json>& values, const std::filesystem::path& out_root);

struct Preset {
  std::string description;
  std::string config_text;
};

const std::map<std::string, Preset>& presets();
Json preset_config(const std::string& name);

}  // namespace flux::harness
