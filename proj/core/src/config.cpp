#include "gnsstune/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>
#include <vector>

#include "gnsstune/error.hpp"
#include "gnsstune/random.hpp"

namespace gnsstune {

namespace {

[[noreturn]] void fail_at(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_bare_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

std::optional<TomlValue> parse_value(std::string_view v, std::string* why) {
  v = trim(v);
  if (v.empty()) {
    *why = "missing value";
    return std::nullopt;
  }
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') {
      *why = "unterminated string";
      return std::nullopt;
    }
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      char c = v[i];
      if (c == '"') {
        *why = "unexpected quote in string";
        return std::nullopt;
      }
      if (c == '\\') {
        if (i + 2 >= v.size()) {
          *why = "dangling escape";
          return std::nullopt;
        }
        switch (v[++i]) {
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          default: *why = "unsupported escape"; return std::nullopt;
        }
      }
      out.push_back(c);
    }
    return TomlValue{out};
  }
  if (v == "true") return TomlValue{true};
  if (v == "false") return TomlValue{false};
  if (v.front() == '[' || v.front() == '{') {
    *why = "arrays and inline tables are not supported";
    return std::nullopt;
  }
  std::string digits;
  for (char c : v) {
    if (c != '_') digits.push_back(c);
  }
  const char* first = digits.data();
  const char* last = first + digits.size();
  if (*first == '+') ++first;
  const bool looks_float = digits.find_first_of(".eE") != std::string::npos || digits == "inf" || digits == "nan";
  if (!looks_float) {
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec == std::errc() && p == last) return TomlValue{i};
  } else {
    double d = 0.0;
    auto [p, ec] = std::from_chars(first, last, d);
    if (ec == std::errc() && p == last && std::isfinite(d)) return TomlValue{d};
  }
  *why = "cannot parse value '" + std::string(v) + "'";
  return std::nullopt;
}

std::string type_name(const TomlValue& v) {
  switch (v.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    default: return "string";
  }
}

double as_double(const TomlValue& v, const std::string& key) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw ConfigError(key + ": expected a number, got " + type_name(v));
}

std::int64_t as_int(const TomlValue& v, const std::string& key) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw ConfigError(key + ": expected an integer, got " + type_name(v));
}

std::string as_string(const TomlValue& v, const std::string& key) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError(key + ": expected a string, got " + type_name(v));
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const TomlValue&)> set;
  std::function<nlohmann::json(const RunConfig&)> get;
};

template <typename Member>
Field real(std::string key, Member member) {
  return {key, [=](RunConfig& c, const TomlValue& v) { member(c) = as_double(v, key); },
          [=](const RunConfig& c) {
            RunConfig copy = c;
            return nlohmann::json(member(copy));
          }};
}

template <typename T, typename Member>
Field integer(std::string key, Member member) {
  return {key,
          [=](RunConfig& c, const TomlValue& v) {
            const std::int64_t i = as_int(v, key);
            if (i < 0 && std::is_unsigned_v<T>) throw ConfigError(key + ": must be non-negative");
            member(c) = static_cast<T>(i);
          },
          [=](const RunConfig& c) {
            RunConfig copy = c;
            return nlohmann::json(member(copy));
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"seed",
                 [](RunConfig& c, const TomlValue& v) {
                   const std::int64_t i = as_int(v, "seed");
                   if (i < 0) throw ConfigError("seed: must be non-negative");
                   c.seed = static_cast<std::uint64_t>(i);
                 },
                 [](const RunConfig& c) { return nlohmann::json(c.seed); }});
    f.push_back({"output_dir", [](RunConfig& c, const TomlValue& v) { c.output_dir = as_string(v, "output_dir"); },
                 nullptr});
    f.push_back(real("duration_s", [](RunConfig& c) -> double& { return c.duration_s; }));

    f.push_back(real("dynamics.site_lat_deg", [](RunConfig& c) -> double& { return c.site.lat_deg; }));
    f.push_back(real("dynamics.site_lon_deg", [](RunConfig& c) -> double& { return c.site.lon_deg; }));
    f.push_back(real("dynamics.site_height_m", [](RunConfig& c) -> double& { return c.site.height_m; }));
    f.push_back(real("dynamics.launch_azimuth_deg", [](RunConfig& c) -> double& { return c.launch_azimuth_deg; }));
    f.push_back(
        real("dynamics.launch_elevation_deg", [](RunConfig& c) -> double& { return c.launch_elevation_deg; }));
    f.push_back(real("dynamics.leo_altitude_m", [](RunConfig& c) -> double& { return c.leo.altitude_m; }));
    f.push_back(real("dynamics.leo_eccentricity", [](RunConfig& c) -> double& { return c.leo.eccentricity; }));
    f.push_back(
        real("dynamics.leo_inclination_deg", [](RunConfig& c) -> double& { return c.leo.inclination_deg; }));
    f.push_back(
        real("dynamics.leo_arg_perigee_deg", [](RunConfig& c) -> double& { return c.leo.arg_perigee_deg; }));
    f.push_back(real("dynamics.leo_raan_deg", [](RunConfig& c) -> double& { return c.leo.raan_deg; }));
    f.push_back(
        real("dynamics.leo_true_anomaly_deg", [](RunConfig& c) -> double& { return c.leo.true_anomaly_deg; }));

    f.push_back(real("signal.cn0_dbhz", [](RunConfig& c) -> double& { return c.cn0_dbhz; }));
    f.push_back(real("signal.elevation_mask_deg", [](RunConfig& c) -> double& { return c.elevation_mask_deg; }));
    f.push_back(
        real("signal.init_code_error_chips", [](RunConfig& c) -> double& { return c.init_code_error_chips; }));
    f.push_back(real("signal.init_freq_error_hz", [](RunConfig& c) -> double& { return c.init_freq_error_hz; }));

    f.push_back(integer<int>("loop.t_int_ms", [](RunConfig& c) -> int& { return c.loop.t_int_ms; }));
    f.push_back(real("loop.pll_bw_hz", [](RunConfig& c) -> double& { return c.loop.pll_bw; }));
    f.push_back(real("loop.pll_narrow_pct", [](RunConfig& c) -> double& { return c.loop.pll_narrow_pct; }));
    f.push_back(integer<int>("loop.pll_order", [](RunConfig& c) -> int& { return c.loop.pll_order; }));
    f.push_back(real("loop.dll_bw_hz", [](RunConfig& c) -> double& { return c.loop.dll_bw; }));
    f.push_back(real("loop.dll_narrow_pct", [](RunConfig& c) -> double& { return c.loop.dll_narrow_pct; }));
    f.push_back(integer<int>("loop.dll_order", [](RunConfig& c) -> int& { return c.loop.dll_order; }));
    f.push_back(real("loop.fll_bw_hz", [](RunConfig& c) -> double& { return c.loop.fll_bw; }));

    f.push_back(integer<int>("ga.pop_size", [](RunConfig& c) -> int& { return c.ga.pop_size; }));
    f.push_back(integer<int>("ga.max_generations", [](RunConfig& c) -> int& { return c.ga.max_generations; }));
    f.push_back(real("ga.p_replication", [](RunConfig& c) -> double& { return c.ga.p_replication; }));
    f.push_back(real("ga.p_crossover", [](RunConfig& c) -> double& { return c.ga.p_crossover; }));
    f.push_back(real("ga.p_mutation", [](RunConfig& c) -> double& { return c.ga.p_mutation; }));
    f.push_back(integer<int>("ga.n_elite", [](RunConfig& c) -> int& { return c.ga.n_elite; }));
    f.push_back(real("ga.mutation_rate", [](RunConfig& c) -> double& { return c.ga.mutation_rate; }));
    f.push_back(integer<int>("ga.tournament_size", [](RunConfig& c) -> int& { return c.ga.tournament_size; }));
    f.push_back(real("ga.tournament_p", [](RunConfig& c) -> double& { return c.ga.tournament_p; }));
    f.push_back(integer<int>("ga.stagnation_limit", [](RunConfig& c) -> int& { return c.ga.stagnation_limit; }));
    f.push_back(
        integer<int>("ga.coarse_generations", [](RunConfig& c) -> int& { return c.ga.coarse_generations; }));
    f.push_back(
        integer<int>("ga.duplicate_retries", [](RunConfig& c) -> int& { return c.ga.duplicate_retries; }));
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

TomlTable parse_toml(std::string_view text) {
  TomlTable table;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.size() < 3 || line.back() != ']' || line[1] == '[') fail_at(line_no, "malformed section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!is_bare_key(name)) fail_at(line_no, "invalid section name");
      section = std::string(name);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail_at(line_no, "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    if (!is_bare_key(key)) fail_at(line_no, "invalid key '" + std::string(key) + "'");
    std::string why;
    auto value = parse_value(line.substr(eq + 1), &why);
    if (!value) fail_at(line_no, why);
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (table.count(full)) fail_at(line_no, "duplicate key '" + full + "'");
    table.emplace(full, TomlEntry{std::move(*value), line_no});
  }
  return table;
}

RunConfig default_run_config(ScenarioTag tag) {
  RunConfig c;
  c.scenario = tag;
  c.loop = preset_config(tag);
  switch (tag) {
    case ScenarioTag::kStatic: c.duration_s = 180.0; break;
    case ScenarioTag::kRocket:
      c.duration_s = 70.0;
      {
        const RocketParams rp = default_rocket_params();
        c.site = rp.launch_site;
        c.launch_azimuth_deg = rp.launch_azimuth_deg;
        c.launch_elevation_deg = rp.launch_elevation_deg;
      }
      break;
    case ScenarioTag::kLeo:
      c.duration_s = 600.0;
      c.cn0_dbhz = 45.0;
      c.init_freq_error_hz = 200.0;
      break;
  }
  return c;
}

RunConfig parse_run_config(std::string_view toml_text) {
  const TomlTable table = parse_toml(toml_text);
  const auto it = table.find("scenario");
  if (it == table.end()) throw ConfigError("missing required key 'scenario'");
  RunConfig cfg;
  try {
    cfg = default_run_config(parse_scenario(as_string(it->second.value, "scenario")));
  } catch (const ConfigError& e) {
    fail_at(it->second.line, e.what());
  }
  for (const auto& [key, entry] : table) {
    if (key == "scenario") continue;
    const Field* f = find_field(key);
    if (f == nullptr) fail_at(entry.line, "unknown key '" + key + "'");
    try {
      f->set(cfg, entry.value);
    } catch (const ConfigError& e) {
      fail_at(entry.line, e.what());
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_run_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "scenario") throw ConfigError("scenario cannot be overridden; pick it with --scenario or the file");
  const Field* f = find_field(key);
  if (f == nullptr) throw ConfigError("unknown key '" + key + "'");
  std::string why;
  auto parsed = parse_value(value, &why);
  f->set(cfg, parsed ? *parsed : TomlValue{value});
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& what) { throw ConfigError("run config: " + what); };
  if (!(c.duration_s > 0.0)) fail("duration_s must be positive");
  if (c.scenario == ScenarioTag::kRocket && c.duration_s > 300.0) fail("rocket duration_s must be at most 300");
  if (c.duration_s > 86400.0) fail("duration_s must be at most one day");
  if (!(std::abs(c.site.lat_deg) <= 90.0)) fail("site_lat_deg must be in [-90, 90]");
  if (!(std::abs(c.site.lon_deg) <= 180.0)) fail("site_lon_deg must be in [-180, 180]");
  if (!(c.site.height_m > -500.0 && c.site.height_m < 1e4)) fail("site_height_m must be in (-500, 10000)");
  if (!(c.launch_elevation_deg > 0.0 && c.launch_elevation_deg <= 90.0)) fail("launch_elevation_deg must be in (0, 90]");
  if (!(c.leo.altitude_m >= 150e3 && c.leo.altitude_m <= 2000e3)) fail("leo_altitude_m must be in [150 km, 2000 km]");
  if (!(c.leo.eccentricity >= 0.0 && c.leo.eccentricity < 0.1)) fail("leo_eccentricity must be in [0, 0.1)");
  if (!(c.cn0_dbhz >= 20.0 && c.cn0_dbhz <= 60.0)) fail("cn0_dbhz must be in [20, 60]");
  if (!(c.elevation_mask_deg >= 0.0 && c.elevation_mask_deg < 90.0)) fail("elevation_mask_deg must be in [0, 90)");
  if (!(c.init_code_error_chips >= 0.0 && c.init_code_error_chips < 0.5)) fail("init_code_error_chips must be in [0, 0.5)");
  if (!(c.init_freq_error_hz >= 0.0 && c.init_freq_error_hz <= 500.0)) fail("init_freq_error_hz must be in [0, 500]");
  validate(c.loop);
  validate(c.ga);
}

nlohmann::json to_json(const LoopConfig& c) {
  return {{"t_int_ms", c.t_int_ms},       {"pll_bw_hz", c.pll_bw},     {"pll_narrow_pct", c.pll_narrow_pct},
          {"pll_narrow_hz", c.pll_narrow()}, {"pll_order", c.pll_order}, {"dll_bw_hz", c.dll_bw},
          {"dll_narrow_pct", c.dll_narrow_pct}, {"dll_narrow_hz", c.dll_narrow()}, {"dll_order", c.dll_order},
          {"fll_bw_hz", c.fll_bw}};
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["scenario"] = std::string(to_string(c.scenario));
  for (const auto& f : fields()) {
    if (!f.get) continue;
    const auto dot = f.key.find('.');
    if (dot == std::string::npos) {
      j[f.key] = f.get(c);
    } else {
      j[f.key.substr(0, dot)][f.key.substr(dot + 1)] = f.get(c);
    }
  }
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(cfg).dump())));
  return buf;
}

}  // namespace gnsstune
