#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gnsstune/error.hpp"
#include "gnsstune/scenario.hpp"
#include "gnsstune/signal.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gnsstune::cli {

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path prepare_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

json cost_json(const CostComponents& c) {
  return {{"j_pos", c.j_pos},
          {"j_vel", c.j_vel},
          {"j_pos_norm", c.j_pos_norm},
          {"j_vel_norm", c.j_vel_norm},
          {"j_total", c.j_total},
          {"missing_fraction", c.missing_fraction}};
}

json bounds_json(const NormalizationBounds& b) {
  return {{"j_pos_min", b.j_pos_min}, {"j_pos_max", b.j_pos_max}, {"j_vel_min", b.j_vel_min}, {"j_vel_max", b.j_vel_max}};
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fmt(double v, int precision = 6) {
  std::ostringstream ss;
  ss << std::setprecision(precision) << v;
  return ss.str();
}

json manifest(const RunConfig& cfg, const std::string& command, const std::vector<std::string>& outputs) {
  return {{"command", command}, {"config_hash", config_hash(cfg)}, {"config", to_json(cfg)}, {"outputs", outputs}};
}

}  // namespace

std::string with_hash_column(const std::string& csv, const std::string& hash) {
  std::string out;
  out.reserve(csv.size() + csv.size() / 4);
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out += line;
    out += header ? ",config_hash" : "," + hash;
    out += '\n';
    header = false;
  }
  return out;
}

RunConfig resolve_config(const CommonOptions& opts) {
  RunConfig cfg;
  if (opts.config_path) {
    cfg = load_run_config(*opts.config_path);
    if (opts.scenario && parse_scenario(*opts.scenario) != cfg.scenario) {
      throw ConfigError("--scenario " + *opts.scenario + " contradicts the config file");
    }
  } else if (opts.scenario) {
    cfg = default_run_config(parse_scenario(*opts.scenario));
  } else {
    throw ConfigError("either --config or --scenario is required");
  }
  for (const auto& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.output_dir) cfg.output_dir = *opts.output_dir;
  validate(cfg);
  return cfg;
}

void apply_smoke(RunConfig& cfg) {
  cfg.ga.pop_size = 12;
  cfg.ga.max_generations = 3;
  cfg.ga.tournament_size = std::min(cfg.ga.tournament_size, cfg.ga.pop_size);
  cfg.duration_s = std::min(cfg.duration_s, 30.0);
}

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const Scenario sc = build_scenario(cfg);
  const std::string hash = config_hash(cfg);
  const fs::path dir = prepare_dir(cfg);

  std::ostringstream truth_csv;
  sc.truth->write_csv(truth_csv);

  std::ostringstream passes_csv;
  std::ostringstream channel_csv;
  passes_csv << "prn,start_s,end_s,bit_sync_s\n";
  channel_csv << std::setprecision(12) << "t,prn,tau_chips,phi_cycles,doppler_hz,elevation_deg\n";
  std::map<int, std::uint64_t> pass_count;
  for (const Pass& p : visibility_passes(*sc.truth, sc.env)) {
    const auto sat = std::find_if(sc.env.constellation.begin(), sc.env.constellation.end(),
                                  [&](const GpsSatellite& s) { return s.prn == p.prn; });
    const double sync = p.start + sc.env.bit_sync_delay_s;
    passes_csv << p.prn << ',' << p.start << ',' << p.end << ',' << sync << '\n';
    const std::uint64_t pass_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(p.prn), pass_count[p.prn]++});
    const ChannelTruth ct(p.prn, sc.truth, *sat, sc.env.cn0_dbhz, derive_seed(pass_seed, {0xB175}), sync);
    for (double t = p.start; t <= p.end + 1e-9; t += 1.0) {
      const auto s = ct.sample(t);
      channel_csv << t << ',' << p.prn << ',' << s.tau << ',' << s.phi << ',' << s.doppler << ','
                  << ct.los(t).elevation_deg << '\n';
    }
  }

  json m = manifest(cfg, "simulate", {"truth.csv", "passes.csv", "channel_truth.csv"});
  m["truth"] = {{"rows", sc.truth->size()},
                {"sample_rate_hz", sc.truth->sample_rate()},
                {"start_s", sc.truth->start_time()},
                {"end_s", sc.truth->end_time()}};
  if (sc.rocket_summary) {
    const auto& r = *sc.rocket_summary;
    m["rocket_summary"] = {{"apogee_m", r.apogee_m},         {"max_speed_mps", r.max_speed_mps},
                           {"peak_accel_g", r.peak_accel_g}, {"time_above_4g_s", r.time_above_4g_s},
                           {"burnout_s", r.burnout_s},       {"flight_time_s", r.flight_time_s}};
  }
  m["bounds"] = bounds_json(sc.bounds);

  write_file(dir / "truth.csv", with_hash_column(truth_csv.str(), hash));
  write_file(dir / "passes.csv", with_hash_column(passes_csv.str(), hash));
  write_file(dir / "channel_truth.csv", with_hash_column(channel_csv.str(), hash));
  write_file(dir / "manifest.json", m.dump(2) + "\n");

  log << "simulate " << to_string(cfg.scenario) << ": " << sc.truth->size() << " truth rows at "
      << sc.truth->sample_rate() << " Hz";
  if (sc.rocket_summary) {
    log << "; apogee " << fmt(sc.rocket_summary->apogee_m, 5) << " m, max speed "
        << fmt(sc.rocket_summary->max_speed_mps, 4) << " m/s, peak " << fmt(sc.rocket_summary->peak_accel_g, 4)
        << " g";
  }
  log << "\nwrote " << dir.string() << " (config " << hash << ")\n";
}

void cmd_track(const RunConfig& cfg, const TrackOptions& opts, unsigned parallel, std::ostream& log) {
  Scenario sc = build_scenario(cfg);
  if (opts.truth_csv) {
    std::ifstream in(*opts.truth_csv);
    if (!in) throw ConfigError("truth file '" + *opts.truth_csv + "' not found; run simulate first or drop --truth");
    try {
      sc.truth = std::make_shared<GroundTruth>(GroundTruth::read_csv(in, cfg.scenario));
    } catch (const InvalidStateError& e) {
      throw ConfigError(*opts.truth_csv + ": " + e.what());
    }
  }
  const std::string hash = config_hash(cfg);
  const fs::path dir = prepare_dir(cfg);

  const Evaluation ev = evaluate_config(sc, cfg.loop, cfg.seed, parallel);
  const double settle = cfg.scenario == ScenarioTag::kLeo ? 120.0 : 30.0;
  const AxisErrors all = axis_errors(*sc.truth, ev.run.solutions);
  const AxisErrors late = axis_errors(*sc.truth, ev.run.solutions, settle);

  std::ostringstream pvt_csv;
  write_pvt_csv(pvt_csv, ev.run.solutions);

  std::ostringstream ch_csv;
  ch_csv << "prn,start_s,end_s,first_lock_s,bit_sync_s,loss_of_lock_s,rejected,reason\n";
  auto cell = [](const std::optional<double>& v) { return v ? fmt(*v, 10) : std::string(); };
  for (const auto& c : ev.run.channels) {
    ch_csv << c.prn << ',' << c.start_time << ',' << c.end_time << ',' << cell(c.first_lock_time) << ','
           << cell(c.bit_sync_time) << ',' << cell(c.loss_of_lock_time) << ',' << (c.rejected ? 1 : 0) << ",\""
           << c.reject_reason << "\"\n";
  }

  auto axes = [](const AxisErrors& a) {
    return json{{"epochs", a.epochs},
                {"position_3sigma_m", {a.position_3sigma.x(), a.position_3sigma.y(), a.position_3sigma.z()}},
                {"velocity_3sigma_mps", {a.velocity_3sigma.x(), a.velocity_3sigma.y(), a.velocity_3sigma.z()}},
                {"max_position_m", a.max_position},
                {"max_velocity_mps", a.max_velocity}};
  };
  json cost = {{"config_hash", hash},
               {"scenario", std::string(to_string(cfg.scenario))},
               {"loop", to_json(cfg.loop)},
               {"cost", cost_json(ev.cost)},
               {"bounds", bounds_json(sc.bounds)},
               {"failed", ev.failed},
               {"failure", ev.failure},
               {"errors_all", axes(all)},
               {"errors_after_settle", axes(late)},
               {"settle_s", settle}};

  std::vector<std::string> outputs{"pvt.csv", "channels.csv", "cost.json"};
  std::string errors_csv;
  if (opts.export_errors) {
    std::ostringstream e;
    e << std::setprecision(10) << "t,valid,ex_m,ey_m,ez_m,evx_mps,evy_mps,evz_mps,pos_err_m,vel_err_mps\n";
    for (const auto& s : ev.run.solutions) {
      e << s.t << ',' << (s.valid ? 1 : 0);
      if (s.valid) {
        const EcefState tr = sc.truth->at(s.t);
        const Vec3 dp = s.position - tr.position;
        const Vec3 dv = s.velocity - tr.velocity;
        e << ',' << dp.x() << ',' << dp.y() << ',' << dp.z() << ',' << dv.x() << ',' << dv.y() << ',' << dv.z()
          << ',' << dp.norm() << ',' << dv.norm() << '\n';
      } else {
        e << ",,,,,,,,\n";
      }
    }
    errors_csv = with_hash_column(e.str(), hash);
    outputs.push_back("errors.csv");
  }

  write_file(dir / "pvt.csv", with_hash_column(pvt_csv.str(), hash));
  write_file(dir / "channels.csv", with_hash_column(ch_csv.str(), hash));
  write_file(dir / "cost.json", cost.dump(2) + "\n");
  if (opts.export_errors) write_file(dir / "errors.csv", errors_csv);
  write_file(dir / "manifest.json", manifest(cfg, "track", outputs).dump(2) + "\n");

  log << "track " << to_string(cfg.scenario) << " with " << describe(cfg.loop) << "\n";
  if (ev.failed) log << "  run failed: " << ev.failure << " (charged worst-case cost)\n";
  log << "  J_pos " << fmt(ev.cost.j_pos) << " m^2, J_vel " << fmt(ev.cost.j_vel) << " m^2/s^2\n"
      << "  normalized pos " << fmt(ev.cost.j_pos_norm) << ", vel " << fmt(ev.cost.j_vel_norm) << ", J "
      << fmt(ev.cost.j_total) << " (missing epochs " << fmt(100.0 * ev.cost.missing_fraction, 3) << " %)\n"
      << "  3-sigma after " << settle << " s: position " << fmt(late.position_3sigma.maxCoeff(), 4)
      << " m, velocity " << fmt(late.velocity_3sigma.maxCoeff(), 4) << " m/s (worst ECEF axis)\n"
      << "wrote " << dir.string() << " (config " << hash << ")\n";
}

void cmd_optimize(const RunConfig& cfg_in, unsigned parallel, std::ostream& log) {
  RunConfig cfg = cfg_in;
  auto sc = std::make_shared<const Scenario>(build_scenario(cfg));
  const std::string hash = config_hash(cfg);
  const fs::path dir = prepare_dir(cfg);

  GaConfig ga = cfg.ga;
  ga.parallel = std::max(1U, parallel);

  std::ofstream jsonl(dir / "individuals.jsonl", std::ios::binary);
  if (!jsonl) throw std::runtime_error("cannot write " + (dir / "individuals.jsonl").string());
  std::ostringstream conv;
  conv << std::setprecision(12) << "generation,resolution,best_j,median_j,new_evaluations\n";
  json gens = json::array();

  auto observer = [&](const GenerationStats& g) {
    for (std::size_t i = 0; i < g.population.size(); ++i) {
      const Individual& ind = g.population[i];
      json rec = {{"config_hash", hash},
                  {"generation", g.index},
                  {"index", i},
                  {"resolution", std::string(to_string(g.resolution))},
                  {"chromosome", to_hex(ind.chromosome)},
                  {"bits", to_bits(ind.chromosome)},
                  {"config", to_json(ind.config)},
                  {"cost", ind.cost ? cost_json(*ind.cost) : json(nullptr)},
                  {"origin", std::string(to_string(ind.origin))},
                  {"eval_seed", ind.seed}};
      jsonl << rec.dump() << '\n';
    }
    jsonl.flush();
    conv << g.index << ',' << to_string(g.resolution) << ',' << g.best.j() << ',' << g.median << ','
         << g.new_evaluations << '\n';
    gens.push_back({{"generation", g.index},
                    {"resolution", std::string(to_string(g.resolution))},
                    {"best_j", g.best.j()},
                    {"median_j", g.median},
                    {"new_evaluations", g.new_evaluations}});
    log << "generation " << g.index << " (" << to_string(g.resolution) << "): best J " << fmt(g.best.j())
        << ", median " << fmt(g.median) << ", " << g.new_evaluations << " new evaluations\n";
  };

  const GaResult res = run_ga(cfg.scenario, ga, make_evaluator(sc), cfg.seed, worst_case_cost(sc->bounds), observer);
  if (!jsonl) throw std::runtime_error("write failed for individuals.jsonl");

  const double first = res.generations.front().best.j();
  const double last = res.best.j();
  json summary = {{"config_hash", hash},
                  {"scenario", std::string(to_string(cfg.scenario))},
                  {"seed", cfg.seed},
                  {"best",
                   {{"generation", res.best.generation},
                    {"chromosome", to_hex(res.best.chromosome)},
                    {"config", to_json(res.best.config)},
                    {"cost", res.best.cost ? cost_json(*res.best.cost) : json(nullptr)},
                    {"eval_seed", res.best.seed}}},
                  {"generations", gens},
                  {"termination", std::string(to_string(res.termination))},
                  {"unique_evaluations", res.unique_evaluations},
                  {"best_generation_1", first},
                  {"improvement_pct", first > 0.0 ? 100.0 * (first - last) / first : 0.0},
                  {"bounds", bounds_json(sc->bounds)}};

  write_file(dir / "convergence.csv", with_hash_column(conv.str(), hash));
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_file(dir / "manifest.json",
             manifest(cfg, "optimize", {"individuals.jsonl", "convergence.csv", "summary.json"}).dump(2) + "\n");

  log << "best J " << fmt(last) << " with " << describe(res.best.config) << "\n"
      << "termination: " << to_string(res.termination) << " after " << res.generations.size() << " generations, "
      << res.unique_evaluations << " unique evaluations\n"
      << "wrote " << dir.string() << " (config " << hash << ")\n";
}

void cmd_report(const std::string& results_dir, std::ostream& out) {
  const fs::path root(results_dir);
  if (!fs::is_directory(root)) throw ConfigError("results directory '" + results_dir + "' does not exist");
  std::vector<fs::path> runs;
  if (fs::exists(root / "summary.json")) {
    runs.push_back(root);
  } else {
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.is_directory() && fs::exists(e.path() / "summary.json")) runs.push_back(e.path());
    }
    std::sort(runs.begin(), runs.end());
  }
  if (runs.empty()) throw ConfigError("no optimize results (summary.json) under '" + results_dir + "'");

  struct Row {
    std::string scenario;
    std::string hash;
    json best;
    double j = 0.0;
    double gen1 = 0.0;
    double improvement = 0.0;
  };
  std::vector<Row> rows;
  std::ostringstream violin;
  violin << std::setprecision(10) << "scenario,generation,parameter,value,config_hash\n";
  for (const auto& run : runs) {
    json s;
    try {
      s = json::parse(read_file(run / "summary.json"));
    } catch (const json::exception& e) {
      throw ConfigError((run / "summary.json").string() + ": " + e.what());
    }
    Row r;
    try {
      r.scenario = s.at("scenario").get<std::string>();
      r.hash = s.at("config_hash").get<std::string>();
      r.best = s.at("best").at("config");
      r.j = s.at("best").at("cost").at("j_total").get<double>();
      r.gen1 = s.at("best_generation_1").get<double>();
      r.improvement = s.at("improvement_pct").get<double>();
    } catch (const json::exception& e) {
      throw ConfigError((run / "summary.json").string() + ": " + e.what());
    }
    const bool with_tint = r.scenario == "static";
    const fs::path ind_path = run / "individuals.jsonl";
    if (!fs::exists(ind_path)) throw ConfigError("missing " + ind_path.string());
    std::istringstream lines(read_file(ind_path));
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      try {
        const json rec = json::parse(line);
        const json& c = rec.at("config");
        const int g = rec.at("generation").get<int>();
        for (const char* key : {"t_int_ms", "pll_bw_hz", "pll_narrow_hz", "pll_order", "dll_bw_hz", "dll_narrow_hz",
                                "dll_order", "fll_bw_hz"}) {
          if (!with_tint && std::string(key) == "t_int_ms") continue;
          violin << r.scenario << ',' << g << ',' << key << ',' << c.at(key).get<double>() << ',' << r.hash << '\n';
        }
      } catch (const json::exception& e) {
        throw ConfigError(ind_path.string() + ": " + e.what());
      }
    }
    rows.push_back(std::move(r));
  }

  std::ostringstream table;
  table << "scenario,t_int_ms,pll_bw_hz,pll_narrow_hz,pll_order,dll_bw_hz,dll_narrow_hz,dll_order,fll_bw_hz,"
           "best_j,best_j_generation_1,improvement_pct,config_hash\n";
  out << std::left << std::setw(8) << "Scenario" << std::right << std::setw(8) << "Tint" << std::setw(8) << "PLL"
      << std::setw(10) << "PLLnarrow" << std::setw(9) << "PLLorder" << std::setw(8) << "DLL" << std::setw(10)
      << "DLLnarrow" << std::setw(9) << "DLLorder" << std::setw(8) << "FLL" << std::setw(10) << "J"
      << std::setw(13) << "improvement" << '\n';
  for (const auto& r : rows) {
    const json& c = r.best;
    const bool with_tint = r.scenario == "static";
    const std::string tint = with_tint ? fmt(c.at("t_int_ms").get<double>()) : std::string("1");
    table << r.scenario << ',' << (with_tint ? tint : std::string()) << ',' << c.at("pll_bw_hz").get<double>()
          << ',' << c.at("pll_narrow_hz").get<double>() << ',' << c.at("pll_order").get<int>() << ','
          << c.at("dll_bw_hz").get<double>() << ',' << c.at("dll_narrow_hz").get<double>() << ','
          << c.at("dll_order").get<int>() << ',' << c.at("fll_bw_hz").get<double>() << ',' << fmt(r.j, 10) << ','
          << fmt(r.gen1, 10) << ',' << fmt(r.improvement, 6) << ',' << r.hash << '\n';
    out << std::left << std::setw(8) << r.scenario << std::right << std::setw(8) << tint << std::setw(8)
        << fmt(c.at("pll_bw_hz").get<double>(), 4) << std::setw(10) << fmt(c.at("pll_narrow_hz").get<double>(), 4)
        << std::setw(9) << c.at("pll_order").get<int>() << std::setw(8) << fmt(c.at("dll_bw_hz").get<double>(), 4)
        << std::setw(10) << fmt(c.at("dll_narrow_hz").get<double>(), 4) << std::setw(9)
        << c.at("dll_order").get<int>() << std::setw(8) << fmt(c.at("fll_bw_hz").get<double>(), 4) << std::setw(10)
        << fmt(r.j, 4) << std::setw(12) << fmt(r.improvement, 3) << "%\n";
  }

  write_file(root / "report.csv", table.str());
  write_file(root / "violin.csv", violin.str());
  out << "wrote " << (root / "report.csv").string() << " and " << (root / "violin.csv").string() << '\n';
}

}  // namespace gnsstune::cli
