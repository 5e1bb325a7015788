#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "gnsstune/error.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

void add_common(CLI::App* cmd, gnsstune::cli::CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "TOML run configuration");
  cmd->add_option("-s,--scenario", o.scenario, "static, rocket or leo (defaults only, or a check against --config)");
  cmd->add_option("--seed", o.seed, "Master seed (overrides the file)");
  cmd->add_option("-o,--out", o.output_dir, "Output directory (overrides the file)");
  cmd->add_option("--set", o.overrides, "Override one key, e.g. --set loop.pll_bw_hz=20")->take_all();
  cmd->add_option("-j,--parallel", o.parallel, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1U, 1024U));
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gnsstune;
  CLI::App app{"gnsstune: tracking-loop tuning for GNSS receivers under dynamics"};
  app.require_subcommand(1);

  cli::CommonOptions sim_opts, track_opts, opt_opts;
  cli::TrackOptions track_extra;
  bool smoke = false;
  std::string results_dir;

  auto* sim = app.add_subcommand("simulate", "Write truth trajectory, passes and channel truth");
  add_common(sim, sim_opts);
  auto* track = app.add_subcommand("track", "Closed-loop tracking + PVT with one loop configuration");
  add_common(track, track_opts);
  track->add_option("--truth", track_extra.truth_csv, "Truth CSV from simulate (generated inline if omitted)");
  track->add_flag("--export-errors", track_extra.export_errors, "Write per-epoch error series errors.csv");
  auto* optimize = app.add_subcommand("optimize", "Genetic search over the loop parameters");
  add_common(optimize, opt_opts);
  optimize->add_flag("--smoke", smoke, "Small budget: pop 12, 3 generations, 30 s truth");
  auto* report = app.add_subcommand("report", "Summarize optimize results");
  report->add_option("results_dir", results_dir, "Directory with summary.json, or with one subdirectory per run")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (sim->parsed()) {
      cli::cmd_simulate(cli::resolve_config(sim_opts), std::cout);
    } else if (track->parsed()) {
      cli::cmd_track(cli::resolve_config(track_opts), track_extra, track_opts.parallel, std::cout);
    } else if (optimize->parsed()) {
      RunConfig cfg = cli::resolve_config(opt_opts);
      if (smoke) cli::apply_smoke(cfg);
      validate(cfg);
      cli::cmd_optimize(cfg, opt_opts.parallel, std::cout);
    } else if (report->parsed()) {
      cli::cmd_report(results_dir, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
