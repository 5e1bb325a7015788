#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "gnsstune/dynamics.hpp"
#include "gnsstune/geodesy.hpp"
#include "gnsstune/optimizer.hpp"
#include "gnsstune/tracking.hpp"

namespace gnsstune {

using TomlValue = std::variant<bool, std::int64_t, double, std::string>;

struct TomlEntry {
  TomlValue value;
  int line = 0;
};

/// Flat view of a TOML document: keys are "section.key" ("key" at top level).
using TomlTable = std::map<std::string, TomlEntry>;

/// Parses the subset of TOML used by run configs: [section] headers, bare
/// keys, and string / integer / float / boolean values with # comments.
/// Arrays, inline tables, dotted keys and multi-line strings are rejected.
/// Throws ConfigError with the offending line number.
TomlTable parse_toml(std::string_view text);

struct RunConfig {
  ScenarioTag scenario = ScenarioTag::kStatic;
  std::uint64_t seed = 1;
  std::string output_dir = "results";
  double duration_s = 180.0;

  // Static receiver position and rocket launch site.
  Geodetic site{37.10, -6.73, 20.0};
  double launch_azimuth_deg = 220.0;
  double launch_elevation_deg = 45.0;
  LeoElements leo;

  double cn0_dbhz = 41.0;
  double elevation_mask_deg = 5.0;
  double init_code_error_chips = 0.25;
  double init_freq_error_hz = 100.0;

  LoopConfig loop;
  GaConfig ga;
};

/// Defaults for a scenario: the per-scenario loop preset, 180 / 70 / 600 s,
/// 41 dB-Hz ground or 45 dB-Hz orbital signal.
RunConfig default_run_config(ScenarioTag tag);

/// Scenario defaults overlaid with the document. `scenario` is required;
/// unknown keys, wrong types and out-of-range values throw ConfigError.
RunConfig parse_run_config(std::string_view toml_text);
RunConfig load_run_config(const std::string& path);

/// Applies one "section.key" override given as text (e.g. from the CLI).
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

/// Throws ConfigError if any field is out of range.
void validate(const RunConfig& cfg);

/// Fully resolved configuration. The output directory is left out so that
/// the same experiment hashes the same wherever it is written.
nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const LoopConfig& cfg);

/// 16 hex digits of FNV-1a over the compact resolved JSON.
std::string config_hash(const RunConfig& cfg);

}  // namespace gnsstune
