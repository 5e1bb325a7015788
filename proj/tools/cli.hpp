#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gnsstune/config.hpp"

namespace gnsstune::cli {

/// Options shared by simulate, track and optimize.
struct CommonOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::vector<std::string> overrides;  // "section.key=value"
  unsigned parallel = 1;
};

/// File (or scenario defaults), then --set overrides, then --seed / --out.
RunConfig resolve_config(const CommonOptions& opts);

struct TrackOptions {
  std::optional<std::string> truth_csv;
  bool export_errors = false;
};

struct OptimizeOptions {
  bool smoke = false;
};

/// Applies the smoke budget: pop 12, 3 generations, 30 s of truth.
void apply_smoke(RunConfig& cfg);

// Each command writes into cfg.output_dir and logs progress to `log`.
// Bad input throws ConfigError; anything else that goes wrong throws.
void cmd_simulate(const RunConfig& cfg, std::ostream& log);
void cmd_track(const RunConfig& cfg, const TrackOptions& opts, unsigned parallel, std::ostream& log);
void cmd_optimize(const RunConfig& cfg, unsigned parallel, std::ostream& log);
/// Reads `results_dir/summary.json` or `results_dir/*/summary.json`; writes
/// report.csv and violin.csv next to them only after every run parsed.
void cmd_report(const std::string& results_dir, std::ostream& out);

/// Adds a trailing config_hash column to every row of a CSV document.
std::string with_hash_column(const std::string& csv, const std::string& hash);

}  // namespace gnsstune::cli
